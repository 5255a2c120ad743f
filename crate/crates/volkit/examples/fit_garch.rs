//! Maximum-likelihood fit of a GARCH(1,1) with inference.
//!
//! ```bash
//! cargo run --example fit_garch
//! ```

use volkit::estimator::{fit, FitOptions};
use volkit::garch::{simulate, Family, GarchModel, ParamVector};
use volkit::selection::{information_criteria, Convention};

fn main() -> volkit::Result<()> {
    let truth = GarchModel::new(
        Family::SGarch,
        1,
        1,
        ParamVector::symmetric(0.0001, vec![0.0833], vec![0.8644]),
    )?;
    let returns = simulate(&truth, 2000, 42)?;

    let result = fit(Family::SGarch, 1, 1, &returns, &FitOptions::default())?;
    println!(
        "fitted sgarch(1,1) on {} observations (converged: {}, {} evaluations)",
        result.n, result.converged, result.iterations
    );

    println!("\nparameter      estimate     true       std error   p-value");
    let names = result.model.free_param_names();
    let values = result.model.free_param_values();
    let truth_values = truth.free_param_values();
    for (i, name) in names.iter().enumerate() {
        let se = result.std_errors.as_ref().map(|se| se[i]);
        let pv = result.p_values.as_ref().map(|pv| pv[i]);
        println!(
            "{name:<12} {:>11.6} {:>9.4} {:>12} {:>10}",
            values[i],
            truth_values[i],
            se.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into()),
            pv.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into()),
        );
    }

    println!("\nlog-likelihood:        {:.4}", result.log_likelihood);
    println!("persistence:           {:.4}", result.model.persistence());
    if let Some(long_run) = result.model.unconditional_variance() {
        println!("long-run variance:     {:.6e} (daily σ {:.4})", long_run, long_run.sqrt());
    }
    let criteria = information_criteria(
        result.log_likelihood,
        result.k,
        result.n,
        Convention::PerObservation,
    );
    println!("AIC/n, BIC/n:          {:.4}, {:.4}", criteria.aic, criteria.bic);
    Ok(())
}
