//! One-year fixed-window and mobile-window volatility forecasts.
//!
//! ```bash
//! cargo run --example forecast_volatility
//! ```

use volkit::estimator::{fit, FitOptions};
use volkit::forecast::{forecast_fixed, forecast_mobile};
use volkit::garch::{simulate, Family, GarchModel, ParamVector};
use volkit::stats::scale_volatility;

fn main() -> volkit::Result<()> {
    let truth = GarchModel::new(
        Family::SGarch,
        1,
        1,
        ParamVector::symmetric(0.0001, vec![0.0833], vec![0.8644]),
    )?;
    let returns = simulate(&truth, 578, 42)?;
    let options = FitOptions::default();

    let fitted = fit(Family::SGarch, 1, 1, &returns, &options)?;
    println!(
        "fitted persistence {:.4}, long-run daily σ {:.4}",
        fitted.model.persistence(),
        fitted.model.unconditional_variance().map(f64::sqrt).unwrap_or(f64::NAN)
    );

    let fixed = forecast_fixed(&fitted.model, &returns, 365, 42)?;
    println!("\nfixed window (no re-estimation):");
    println!("  h    daily σ    annualized");
    for h in [1usize, 5, 21, 63, 126, 252, 365] {
        let step = &fixed.steps[h - 1];
        println!("  {h:<4} {:.4}     {:.4}", step.sigma, scale_volatility(step.sigma, 365));
    }
    if let Some(long_run) = fixed.long_run {
        println!("  long-run daily σ: {:.4}", long_run.sqrt());
        println!("  (the path decays toward it geometrically at rate persistence^h)");
    }

    // The mobile window refits every 21 steps on pseudo-returns that carry
    // the forecast variance, so late steps lean on estimated data.
    let mobile = forecast_mobile(Family::SGarch, 1, 1, &returns, 365, 21, 42, &options)?;
    println!("\nmobile window (refit every 21 steps):");
    println!("  h    fixed σ    mobile σ");
    for h in [1usize, 21, 63, 126, 252, 365] {
        println!(
            "  {h:<4} {:.4}     {:.4}",
            fixed.steps[h - 1].sigma,
            mobile.steps[h - 1].sigma
        );
    }
    println!("\nBoth agree before the first refit; afterwards the mobile path");
    println!("drifts with its own pseudo-data, so trust it mainly near-term.");
    Ok(())
}
