//! Implied-volatility smiles and the liquidity report for one quote date,
//! on a synthetic chain with a skewed volatility profile and a wide spread.
//!
//! ```bash
//! cargo run --example smile_construction
//! ```

use chrono::NaiveDate;
use volkit::ingest::{OptionChain, OptionQuote};
use volkit::options::{bs_price, OptionKind, PricingInputs, QuoteSide};
use volkit::surface::{compute_smiles, spread_report, DAYS_PER_YEAR};

fn main() -> volkit::Result<()> {
    let quote_date: NaiveDate = "2019-07-31".parse().unwrap();
    let expiry: NaiveDate = "2020-01-27".parse().unwrap();
    let spot = 9767.60;
    let tau = (expiry - quote_date).num_days() as f64 / DAYS_PER_YEAR;

    // Skewed generator: low strikes trade richer than high strikes.
    let skew_sigma = |strike: f64| 0.9 - 0.25 * (strike / spot - 1.0);
    let mut quotes = Vec::new();
    for strike in [6_000.0, 7_000.0, 8_000.0, 9_000.0, 10_000.0, 11_000.0, 12_000.0, 14_000.0] {
        for kind in [OptionKind::Call, OptionKind::Put] {
            let inputs = PricingInputs::new(spot, strike, 0.0, tau)?;
            let fair = bs_price(&inputs, skew_sigma(strike), kind);
            quotes.push(OptionQuote {
                quote_date,
                expiry_date: expiry,
                kind,
                strike,
                bid: (fair - 40.0).max(0.0),
                ask: fair + 40.0,
                open_interest: if strike > 13_000.0 { 1 } else { 20 },
            });
        }
    }
    let chain = OptionChain::new(quotes)?;

    let curves = compute_smiles(&chain, quote_date, spot, 0.0, 0)?;
    println!("{} curves (expiry × kind × bid/ask/mid)\n", curves.len());
    for curve in curves.iter().filter(|c| c.kind == OptionKind::Call) {
        println!("call {} side ({} → {}):", curve.side, curve.quote_date, curve.expiry_date);
        for point in &curve.points {
            match point.iv {
                Some(iv) => println!("  strike {:>7}  iv {:.4}", point.strike, iv),
                None => println!("  strike {:>7}  --- status {}", point.strike, point.status),
            }
        }
    }
    println!("(bid curves sit below ask curves; the skew slopes down in strike)");

    // Mid curves invert the mid price, not the mid of two inverted vols.
    let mid = curves
        .iter()
        .find(|c| c.kind == OptionKind::Put && c.side == QuoteSide::Mid)
        .expect("put mid curve");
    println!("\nput mid-price smile:");
    for point in &mid.points {
        if let Some(iv) = point.iv {
            println!("  strike {:>7}  iv {:.4}", point.strike, iv);
        }
    }

    println!("\nliquidity report:");
    println!("  expiry      kind  strike   spread  open interest");
    for row in spread_report(&chain, quote_date)?.iter().take(6) {
        println!(
            "  {}  {:<5} {:>7}  {:>6.1}  {:>8}",
            row.expiry_date, row.kind.to_string(), row.strike, row.spread, row.open_interest
        );
    }
    Ok(())
}
