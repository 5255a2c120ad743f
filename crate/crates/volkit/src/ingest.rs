//! Loading, validation, and windowing of price series and option chains,
//! plus deterministic synthetic fixtures.
//!
//! File formats:
//! - `prices.csv`: header `date,price`; ISO-8601 dates, `.` decimal separator.
//! - `options.csv`: header `quote_date,expiry_date,type,strike,bid,ask,open_interest`.
//!
//! Loaders are total over arbitrary byte input: every malformed row is an
//! error naming the offending line, never a panic. Rows are sorted by date on
//! load, so writers and loaders round-trip.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::garch::{simulate, GarchModel};
use crate::options::OptionKind;

/// Calendar anchor for synthetic fixtures and simulated series.
pub(crate) fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2018, 1, 1).expect("valid epoch")
}

/// A validated daily price series: strictly increasing dates, positive
/// prices, at least two observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    observations: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    pub fn new(observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if observations.len() < 2 {
            return Err(Error::TooFewObservations { have: observations.len(), need: 2 });
        }
        for window in observations.windows(2) {
            if window[1].0 <= window[0].0 {
                return Err(Error::InvalidSpec(format!(
                    "dates must be strictly increasing, got {} after {}",
                    window[1].0, window[0].0
                )));
            }
        }
        if let Some((date, price)) =
            observations.iter().find(|(_, p)| !(p.is_finite() && *p > 0.0))
        {
            return Err(Error::InvalidSpec(format!("non-positive price {price} on {date}")));
        }
        Ok(PriceSeries { observations })
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.observations.first().expect("non-empty").0
    }

    pub fn last_date(&self) -> NaiveDate {
        self.observations.last().expect("non-empty").0
    }

    /// Per-date spot map, as consumed by surface construction.
    pub fn spot_map(&self) -> BTreeMap<NaiveDate, f64> {
        self.observations.iter().copied().collect()
    }
}

/// One two-sided option quote.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionQuote {
    pub quote_date: NaiveDate,
    pub expiry_date: NaiveDate,
    pub kind: OptionKind,
    pub strike: f64,
    pub bid: f64,
    pub ask: f64,
    pub open_interest: u64,
}

impl OptionQuote {
    /// Days between quote and expiry.
    pub fn days_to_expiry(&self) -> i64 {
        (self.expiry_date - self.quote_date).num_days()
    }
}

/// A validated set of option quotes; sparse days are legal. Quotes are kept
/// sorted by (quote_date, expiry_date, kind, strike) so that downstream
/// output is independent of input row order.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionChain {
    quotes: Vec<OptionQuote>,
    underlying: Option<BTreeMap<NaiveDate, f64>>,
}

impl OptionChain {
    pub fn new(mut quotes: Vec<OptionQuote>) -> Result<Self> {
        // Deterministic sort, then pairwise validation.
        quotes.sort_by(|a, b| {
            (a.quote_date, a.expiry_date, a.kind)
                .cmp(&(b.quote_date, b.expiry_date, b.kind))
                .then(a.strike.total_cmp(&b.strike))
        });
        for pair in quotes.windows(2) {
            if pair[0].quote_date == pair[1].quote_date
                && pair[0].expiry_date == pair[1].expiry_date
                && pair[0].kind == pair[1].kind
                && pair[0].strike == pair[1].strike
            {
                return Err(Error::DuplicateQuote { line: 0 });
            }
        }
        for (i, q) in quotes.iter().enumerate() {
            let line = i as u64 + 1;
            if !(q.strike.is_finite() && q.strike > 0.0) {
                return Err(Error::MalformedRow { line, reason: "strike must be positive".into() });
            }
            if !(q.bid.is_finite() && q.ask.is_finite() && q.bid >= 0.0) {
                return Err(Error::MalformedRow { line, reason: "bid/ask must be finite and non-negative".into() });
            }
            if q.bid > q.ask {
                return Err(Error::CrossedQuote { line, bid: q.bid, ask: q.ask });
            }
            if q.expiry_date < q.quote_date {
                return Err(Error::ExpiryBeforeQuote { line });
            }
        }
        Ok(OptionChain { quotes, underlying: None })
    }

    pub fn with_underlying(mut self, spots: BTreeMap<NaiveDate, f64>) -> Self {
        self.underlying = Some(spots);
        self
    }

    pub fn quotes(&self) -> &[OptionQuote] {
        &self.quotes
    }

    pub fn underlying(&self) -> Option<&BTreeMap<NaiveDate, f64>> {
        self.underlying.as_ref()
    }

    /// Quotes for one observation day.
    pub fn quotes_on(&self, date: NaiveDate) -> impl Iterator<Item = &OptionQuote> {
        self.quotes.iter().filter(move |q| q.quote_date == date)
    }

    /// Distinct quote dates, ascending.
    pub fn quote_dates(&self) -> Vec<NaiveDate> {
        let mut dates: Vec<NaiveDate> = self.quotes.iter().map(|q| q.quote_date).collect();
        dates.dedup();
        dates
    }
}

fn parse_date(field: &str, line: u64, what: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(field.trim(), "%Y-%m-%d").map_err(|_| Error::MalformedRow {
        line,
        reason: format!("invalid {what} {field:?}, expected YYYY-MM-DD"),
    })
}

fn parse_number(field: &str, line: u64, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("invalid {what} {field:?}"),
    })
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Load `prices.csv` (`date,price`). Rows are sorted by date; duplicate
/// dates and non-positive prices are errors naming the offending line.
pub fn load_price_series<R: Read>(source: R) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(source);
    {
        let headers = reader
            .headers()
            .map_err(|e| Error::MalformedRow { line: 1, reason: e.to_string() })?;
        let expected = ["date", "price"];
        if headers.iter().map(str::trim).ne(expected) {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!("expected header date,price, got {headers:?}"),
            });
        }
    }
    let mut rows: Vec<(NaiveDate, f64, u64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedRow {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = record_line(&record);
        if record.len() != 2 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 2 fields, got {}", record.len()),
            });
        }
        let date = parse_date(&record[0], line, "date")?;
        let price = parse_number(&record[1], line, "price")?;
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::NonPositivePrice { line, value: price });
        }
        rows.push((date, price, line));
    }
    rows.sort_by_key(|(date, _, _)| *date);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::DuplicateDate { line: pair[0].2.max(pair[1].2), date: pair[1].0 });
        }
    }
    PriceSeries::new(rows.into_iter().map(|(d, p, _)| (d, p)).collect())
}

/// Serialize a price series in the `prices.csv` format.
pub fn write_price_series<W: Write>(series: &PriceSeries, mut sink: W) -> Result<()> {
    writeln!(sink, "date,price")?;
    for (date, price) in series.observations() {
        writeln!(sink, "{date},{price}")?;
    }
    Ok(())
}

/// Load `options.csv`. The `type` field is parsed case-insensitively from
/// {call, put}; crossed quotes, negative open interest, and expiries before
/// the quote date are errors naming the offending line.
pub fn load_option_chain<R: Read>(source: R) -> Result<OptionChain> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(source);
    {
        let headers = reader
            .headers()
            .map_err(|e| Error::MalformedRow { line: 1, reason: e.to_string() })?;
        let expected = ["quote_date", "expiry_date", "type", "strike", "bid", "ask", "open_interest"];
        if headers.iter().map(str::trim).ne(expected) {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!("expected header {}, got {headers:?}", expected.join(",")),
            });
        }
    }
    let mut quotes = Vec::new();
    let mut seen: HashSet<(NaiveDate, NaiveDate, OptionKind, u64)> = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedRow {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = record_line(&record);
        if record.len() != 7 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 7 fields, got {}", record.len()),
            });
        }
        let quote_date = parse_date(&record[0], line, "quote_date")?;
        let expiry_date = parse_date(&record[1], line, "expiry_date")?;
        let kind: OptionKind = record[2]
            .trim()
            .parse()
            .map_err(|reason| Error::MalformedRow { line, reason })?;
        let strike = parse_number(&record[3], line, "strike")?;
        let bid = parse_number(&record[4], line, "bid")?;
        let ask = parse_number(&record[5], line, "ask")?;
        let oi_raw = record[6].trim();
        if oi_raw.starts_with('-') {
            return Err(Error::NegativeOpenInterest { line });
        }
        let open_interest: u64 = oi_raw.parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("invalid open_interest {oi_raw:?}"),
        })?;

        if !(strike.is_finite() && strike > 0.0) {
            return Err(Error::MalformedRow { line, reason: format!("strike must be positive, got {strike}") });
        }
        if !(bid.is_finite() && ask.is_finite() && bid >= 0.0) {
            return Err(Error::MalformedRow { line, reason: "bid/ask must be finite and non-negative".into() });
        }
        if bid > ask {
            return Err(Error::CrossedQuote { line, bid, ask });
        }
        if expiry_date < quote_date {
            return Err(Error::ExpiryBeforeQuote { line });
        }
        if !seen.insert((quote_date, expiry_date, kind, strike.to_bits())) {
            return Err(Error::DuplicateQuote { line });
        }
        quotes.push(OptionQuote { quote_date, expiry_date, kind, strike, bid, ask, open_interest });
    }
    OptionChain::new(quotes)
}

/// Serialize an option chain in the `options.csv` format.
pub fn write_option_chain<W: Write>(chain: &OptionChain, mut sink: W) -> Result<()> {
    writeln!(sink, "quote_date,expiry_date,type,strike,bid,ask,open_interest")?;
    for q in chain.quotes() {
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            q.quote_date, q.expiry_date, q.kind, q.strike, q.bid, q.ask, q.open_interest
        )?;
    }
    Ok(())
}

/// Inclusive date-window slice of a price series. Returns are formed
/// downstream, inside the window, so a log return carries the date of the
/// later price.
pub fn slice_window(series: &PriceSeries, start: NaiveDate, end: NaiveDate) -> Result<PriceSeries> {
    let kept: Vec<(NaiveDate, f64)> = series
        .observations()
        .iter()
        .copied()
        .filter(|(date, _)| *date >= start && *date <= end)
        .collect();
    if kept.len() < 2 {
        return Err(Error::EmptyWindow { start, end });
    }
    PriceSeries::new(kept)
}

/// Deterministic synthetic price fixture: `n` daily prices starting at
/// `start_price`, exponentiating simulated log returns from the model.
pub fn generate_fixture(
    spec: &GarchModel,
    n: usize,
    seed: u64,
    start_price: f64,
) -> Result<PriceSeries> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("fixture needs at least 2 prices, got {n}")));
    }
    if !(start_price.is_finite() && start_price > 0.0) {
        return Err(Error::InvalidSpec(format!("start price must be positive, got {start_price}")));
    }
    let returns = simulate(spec, n - 1, seed)?;
    let mut observations = Vec::with_capacity(n);
    let mut price = start_price;
    observations.push((epoch(), price));
    for (i, r) in returns.values().iter().enumerate() {
        price *= r.exp();
        observations.push((epoch() + chrono::Days::new(i as u64 + 1), price));
    }
    PriceSeries::new(observations)
}
