//! Temporal implied-volatility surface: 38 date buckets × rounded strikes
//! for a six-month maturity band, on a synthetic chain whose volatility
//! drifts upward through the year.
//!
//! ```bash
//! cargo run --example volatility_surface
//! ```

use std::collections::BTreeMap;

use chrono::NaiveDate;
use volkit::ingest::{OptionChain, OptionQuote};
use volkit::options::{bs_price, OptionKind, PricingInputs};
use volkit::surface::{build_temporal_surface, SurfaceConfig, DAYS_PER_YEAR};

fn main() -> volkit::Result<()> {
    let start: NaiveDate = "2019-01-01".parse().unwrap();
    let days = 212; // roughly January through July
    let spot = 9_000.0;

    let mut quotes = Vec::new();
    let mut spots = BTreeMap::new();
    for day in 0..days {
        let quote_date = start + chrono::Days::new(day);
        spots.insert(quote_date, spot);
        // Each day quotes a six-month contract; vol level climbs over the year.
        let expiry = quote_date + chrono::Days::new(180);
        let tau = (expiry - quote_date).num_days() as f64 / DAYS_PER_YEAR;
        let level = 0.6 + 0.3 * day as f64 / days as f64;
        for strike in [7_000.0, 8_000.0, 9_000.0, 10_000.0, 11_000.0] {
            // Sparse books: skip some wings on odd days, as thin markets do.
            if day % 2 == 1 && (strike < 7_500.0 || strike > 10_500.0) {
                continue;
            }
            for kind in [OptionKind::Call, OptionKind::Put] {
                let inputs = PricingInputs::new(spot, strike, 0.0, tau)?;
                let fair = bs_price(&inputs, level, kind);
                quotes.push(OptionQuote {
                    quote_date,
                    expiry_date: expiry,
                    kind,
                    strike,
                    bid: (fair - 10.0).max(0.0),
                    ask: fair + 10.0,
                    open_interest: 8,
                });
            }
        }
    }
    let chain = OptionChain::new(quotes)?;

    let config = SurfaceConfig::default(); // 180 ± 45 days, 38 buckets, 1000-unit strikes
    let surface = build_temporal_surface(&chain, &spots, &config)?;

    println!(
        "surface: {} buckets × {} strikes, {} cells populated",
        surface.buckets.len(),
        surface.strikes.len(),
        surface.present_cells()
    );
    print!("\nbucket range            ");
    for strike in &surface.strikes {
        print!("{:>8}", strike);
    }
    println!();
    for (b, (from, to)) in surface.buckets.iter().enumerate().step_by(4) {
        print!("{from} → {to}  ");
        for s in 0..surface.strikes.len() {
            match surface.cell(b, s) {
                Some(iv) => print!("{iv:>8.3}"),
                None => print!("{:>8}", "·"),
            }
        }
        println!();
    }
    println!("\nThe level rises bucket by bucket (the simulated regime shift);");
    println!("dots are cells with no invertible quote — sparse books leave gaps.");
    Ok(())
}
