//! Two-regime Markov-switching GARCH: fit, regime probabilities, forecast.
//!
//! ```bash
//! cargo run --example regime_switching
//! ```

use volkit::estimator::{fit, FitOptions};
use volkit::garch::Family;
use volkit::msgarch::{fit_ms, ms_forecast, simulate_ms, MsModel, RegimeParams};
use volkit::selection::{information_criteria, Convention};

fn main() -> volkit::Result<()> {
    // A calm regime and a turbulent one, both persistent.
    let truth = MsModel::new(
        [
            RegimeParams { omega: 0.25e-4, alpha: 0.05, beta: 0.70 },
            RegimeParams { omega: 4e-4, alpha: 0.05, beta: 0.70 },
        ],
        [[0.97, 0.03], [0.05, 0.95]],
    )?;
    let returns = simulate_ms(&truth, 1500, 42)?;

    let options = FitOptions::default();
    let ms = fit_ms(&returns, &options)?;
    println!("fitted two-regime switching model (k = {}):", ms.k);
    for (i, regime) in ms.model.regimes().iter().enumerate() {
        println!(
            "  regime {}: ω {:.3e}  α {:.4}  β {:.4}  long-run σ {:.4}",
            i + 1,
            regime.omega,
            regime.alpha,
            regime.beta,
            regime.unconditional_variance().map(f64::sqrt).unwrap_or(f64::NAN),
        );
    }
    let transition = ms.model.transition();
    println!("  transition: [{:.4} {:.4}; {:.4} {:.4}]",
        transition[0][0], transition[0][1], transition[1][0], transition[1][1]);
    println!(
        "  stable probabilities: {:.4} / {:.4}",
        ms.stable_probabilities[0], ms.stable_probabilities[1]
    );

    // Compare against the one-regime alternative with both conventions.
    let one = fit(Family::SGarch, 1, 1, &returns, &options)?;
    let ms_raw = information_criteria(ms.log_likelihood, ms.k, ms.n, Convention::Raw);
    let one_raw = information_criteria(one.log_likelihood, one.k, one.n, Convention::Raw);
    println!("\n                 LL          AIC          BIC");
    println!("switching   {:>10.4} {:>12.4} {:>12.4}", ms.log_likelihood, ms_raw.aic, ms_raw.bic);
    println!("sgarch(1,1) {:>10.4} {:>12.4} {:>12.4}", one.log_likelihood, one_raw.aic, one_raw.bic);

    let (date, probs) = ms.filtered_probabilities.last().expect("non-empty filter");
    println!("\nfiltered P(regime 1) on {date}: {:.4}", probs[0]);

    let forecast = ms_forecast(&ms, 365)?;
    println!("\nmixture volatility forecast:");
    for h in [1usize, 21, 126, 365] {
        println!("  h = {h:<4} daily σ {:.4}", forecast.steps[h - 1].sigma);
    }
    if let Some(long_run) = forecast.long_run {
        println!("  π-weighted long-run daily σ: {:.4}", long_run.sqrt());
    }
    Ok(())
}
