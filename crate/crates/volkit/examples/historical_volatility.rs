//! Rolling historical volatility with square-root-of-time scaling.
//!
//! ```bash
//! cargo run --example historical_volatility
//! ```

use volkit::garch::{Family, GarchModel, ParamVector};
use volkit::ingest::generate_fixture;
use volkit::stats::{historical_volatility, log_returns, scale_volatility};

fn main() -> volkit::Result<()> {
    let model = GarchModel::new(
        Family::SGarch,
        1,
        1,
        ParamVector::symmetric(0.0001, vec![0.0833], vec![0.8644]),
    )?;
    let prices = generate_fixture(&model, 579, 42, 9_000.0)?;
    let returns = log_returns(&prices);

    let vol = historical_volatility(&returns, 30)?;
    println!("30-day rolling daily volatility, monthly sample:");
    for (date, sigma) in vol.points().iter().step_by(30) {
        println!("  {date}  {sigma:.4}");
    }

    let last = vol.last_sigma();
    println!("\nlatest daily volatility: {last:.4}");
    println!("scaled to 30 days:       {:.4}", scale_volatility(last, 30));
    println!("scaled to 365 days:      {:.4}", scale_volatility(last, 365));
    println!("\nThe square-root-of-time rule is exact only for i.i.d. returns;");
    println!("under volatility clustering treat the scaled numbers as comparisons.");
    Ok(())
}
