//! Smile curves, liquidity reports, and the bucketed temporal volatility
//! surface.
//!
//! Smiles keep bid, ask, and mid curves separate for calls and puts; quotes
//! the solver cannot invert stay in the output with their failure status, so
//! illiquid chains remain visible instead of silently shrinking. The
//! temporal surface fixes a maturity band, partitions the quote dates into
//! contiguous sub-periods of (near-)equal count, rounds strikes to a bucket
//! size, and averages every successful bid/ask inversion of calls and puts
//! that falls in a cell; cells with no successful inversion are explicitly
//! missing.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::OptionChain;
use crate::options::{implied_vol, IvStatus, OptionKind, PricingInputs, QuoteSide};

/// Days per year for converting days-to-expiry into a year fraction.
pub const DAYS_PER_YEAR: f64 = 365.0;

/// One strike on a smile curve; `iv` is present exactly for `Ok` status.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmilePoint {
    pub strike: f64,
    pub iv: Option<f64>,
    pub status: IvStatus,
}

/// A per-(expiry, kind, side) implied-volatility curve on one quote date.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmileCurve {
    pub quote_date: NaiveDate,
    pub expiry_date: NaiveDate,
    pub kind: OptionKind,
    pub side: QuoteSide,
    pub points: Vec<SmilePoint>,
}

/// Smile curves for every expiry and option type quoted on `quote_date`:
/// three curves (bid, ask, mid) per (expiry, kind) group, strikes ascending.
/// Quotes with open interest below `min_open_interest` are excluded.
pub fn compute_smiles(
    chain: &OptionChain,
    quote_date: NaiveDate,
    spot: f64,
    rate: f64,
    min_open_interest: u64,
) -> Result<Vec<SmileCurve>> {
    if !(spot.is_finite() && spot > 0.0) {
        return Err(Error::InvalidSpec(format!("spot must be positive, got {spot}")));
    }
    let quotes: Vec<_> = chain.quotes_on(quote_date).collect();
    if quotes.is_empty() {
        return Err(Error::NoQuotesForDate(quote_date));
    }

    let mut groups: BTreeMap<(NaiveDate, OptionKind), Vec<&crate::ingest::OptionQuote>> =
        BTreeMap::new();
    for quote in quotes {
        if quote.open_interest < min_open_interest {
            continue;
        }
        groups.entry((quote.expiry_date, quote.kind)).or_default().push(quote);
    }

    let mut curves = Vec::new();
    for ((expiry_date, kind), mut group) in groups {
        group.sort_by(|a, b| a.strike.total_cmp(&b.strike));
        let tau = (expiry_date - quote_date).num_days() as f64 / DAYS_PER_YEAR;
        for side in [QuoteSide::Bid, QuoteSide::Ask, QuoteSide::Mid] {
            let points: Vec<SmilePoint> = group
                .iter()
                .map(|quote| {
                    let price = match side {
                        QuoteSide::Bid => quote.bid,
                        QuoteSide::Ask => quote.ask,
                        QuoteSide::Mid => 0.5 * (quote.bid + quote.ask),
                    };
                    let result = match PricingInputs::new(spot, quote.strike, rate, tau) {
                        Ok(inputs) => implied_vol(price, &inputs, kind),
                        Err(_) => crate::options::IvResult {
                            status: IvStatus::NoConvergence,
                            sigma: None,
                        },
                    };
                    SmilePoint { strike: quote.strike, iv: result.sigma, status: result.status }
                })
                .collect();
            curves.push(SmileCurve { quote_date, expiry_date, kind, side, points });
        }
    }
    Ok(curves)
}

/// One row of the per-date liquidity report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadRow {
    pub expiry_date: NaiveDate,
    pub kind: OptionKind,
    pub strike: f64,
    pub spread: f64,
    pub open_interest: u64,
}

/// Bid-ask spread and open interest for every quote on `quote_date`.
pub fn spread_report(chain: &OptionChain, quote_date: NaiveDate) -> Result<Vec<SpreadRow>> {
    let rows: Vec<SpreadRow> = chain
        .quotes_on(quote_date)
        .map(|q| SpreadRow {
            expiry_date: q.expiry_date,
            kind: q.kind,
            strike: q.strike,
            spread: q.ask - q.bid,
            open_interest: q.open_interest,
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::NoQuotesForDate(quote_date));
    }
    Ok(rows)
}

/// Configuration for the temporal surface. Defaults target the medium-term
/// maturity band (180 ± 45 days), 38 sub-periods, and 1000-unit strike
/// buckets.
#[derive(Debug, Clone)]
pub struct SurfaceConfig {
    pub rate: f64,
    pub maturity_days: i64,
    pub maturity_tolerance_days: i64,
    pub buckets: usize,
    pub strike_round: f64,
    pub min_open_interest: u64,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig {
            rate: 0.0,
            maturity_days: 180,
            maturity_tolerance_days: 45,
            buckets: 38,
            strike_round: 1000.0,
            min_open_interest: 0,
        }
    }
}

/// Implied-volatility grid over (time bucket × strike bucket) with explicit
/// missing cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolSurface {
    /// Per-bucket (first, last) quote date.
    pub buckets: Vec<(NaiveDate, NaiveDate)>,
    /// Rounded strikes, ascending.
    pub strikes: Vec<f64>,
    /// `cells[bucket][strike_index]`, `None` when no inversion succeeded.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl VolSurface {
    pub fn cell(&self, bucket: usize, strike_index: usize) -> Option<f64> {
        self.cells.get(bucket).and_then(|row| row.get(strike_index).copied().flatten())
    }

    pub fn present_cells(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_some()).count()
    }
}

/// Build the temporal surface for a maturity band.
///
/// Quote dates are partitioned into `buckets` contiguous groups of equal
/// count (the remainder spread over the earliest buckets). A quote enters
/// the grid when its days-to-expiry is within the maturity tolerance, its
/// open interest passes the filter, and a spot is known for its date; its
/// bid and ask are then inverted separately and every successful inversion
/// (calls and puts pooled) is averaged into the (bucket, rounded strike)
/// cell.
pub fn build_temporal_surface(
    chain: &OptionChain,
    spots: &BTreeMap<NaiveDate, f64>,
    config: &SurfaceConfig,
) -> Result<VolSurface> {
    if config.buckets == 0 {
        return Err(Error::InvalidSpec("bucket count must be at least 1".into()));
    }
    if !(config.strike_round.is_finite() && config.strike_round > 0.0) {
        return Err(Error::InvalidSpec("strike rounding unit must be positive".into()));
    }
    let dates = chain.quote_dates();
    if dates.len() < config.buckets {
        return Err(Error::InsufficientDates { have: dates.len(), need: config.buckets });
    }

    // Equal-count contiguous partition; the remainder goes to the earliest buckets.
    let base = dates.len() / config.buckets;
    let remainder = dates.len() % config.buckets;
    let mut bucket_of: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    let mut buckets: Vec<(NaiveDate, NaiveDate)> = Vec::with_capacity(config.buckets);
    let mut cursor = 0usize;
    for bucket in 0..config.buckets {
        let size = base + usize::from(bucket < remainder);
        let slice = &dates[cursor..cursor + size];
        for date in slice {
            bucket_of.insert(*date, bucket);
        }
        buckets.push((slice[0], slice[size - 1]));
        cursor += size;
    }

    // (bucket, strike-bits) → (sum, count); BTreeMap keeps assembly ordered.
    let mut accumulator: BTreeMap<(usize, u64), (f64, u32)> = BTreeMap::new();
    let mut strike_set: BTreeMap<u64, f64> = BTreeMap::new();
    for quote in chain.quotes() {
        if quote.open_interest < config.min_open_interest {
            continue;
        }
        if (quote.days_to_expiry() - config.maturity_days).abs() > config.maturity_tolerance_days {
            continue;
        }
        let Some(&spot) = spots.get(&quote.quote_date) else {
            continue;
        };
        let bucket = bucket_of[&quote.quote_date];
        let rounded = (quote.strike / config.strike_round).round() * config.strike_round;
        strike_set.insert(rounded.to_bits(), rounded);

        let tau = quote.days_to_expiry() as f64 / DAYS_PER_YEAR;
        let Ok(inputs) = PricingInputs::new(spot, quote.strike, config.rate, tau) else {
            continue;
        };
        for price in [quote.bid, quote.ask] {
            let result = implied_vol(price, &inputs, quote.kind);
            if let (IvStatus::Ok, Some(sigma)) = (result.status, result.sigma) {
                let entry = accumulator.entry((bucket, rounded.to_bits())).or_insert((0.0, 0));
                entry.0 += sigma;
                entry.1 += 1;
            }
        }
    }

    let strikes: Vec<f64> = {
        let mut s: Vec<f64> = strike_set.values().copied().collect();
        s.sort_by(f64::total_cmp);
        s
    };
    let strike_index: BTreeMap<u64, usize> =
        strikes.iter().enumerate().map(|(i, s)| (s.to_bits(), i)).collect();

    let mut cells = vec![vec![None; strikes.len()]; config.buckets];
    for ((bucket, strike_bits), (sum, count)) in accumulator {
        let index = strike_index[&strike_bits];
        cells[bucket][index] = Some(sum / count as f64);
    }

    Ok(VolSurface { buckets, strikes, cells })
}
