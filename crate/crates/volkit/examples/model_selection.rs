//! Family/order grid search with information criteria and a likelihood-ratio
//! check of the winning asymmetric extension.
//!
//! ```bash
//! cargo run --example model_selection
//! ```

use volkit::estimator::FitOptions;
use volkit::garch::{simulate, Family, GarchModel, ParamVector};
use volkit::selection::{grid_search, likelihood_ratio_test, Convention, Criterion};

fn main() -> volkit::Result<()> {
    let truth = GarchModel::new(
        Family::SGarch,
        1,
        1,
        ParamVector::symmetric(0.0001, vec![0.0833], vec![0.8644]),
    )?;
    let returns = simulate(&truth, 1500, 42)?;

    // Two lags keep the example quick; raise to 3 for the full scan.
    let families = [Family::SGarch, Family::IGarch, Family::Gjr];
    let grid = grid_search(
        &families,
        &returns,
        2,
        Convention::PerObservation,
        &FitOptions::default(),
    )?;

    println!("family   p  q  conv      LL/n         AIC        BIC");
    for row in &grid.rows {
        match (&row.fit, &row.criteria) {
            (Some(fit), Some(criteria)) => println!(
                "{:<8} {}  {}  {:<5} {:>9.4}  {:>10.4} {:>10.4}",
                row.family.name(),
                row.p,
                row.q,
                fit.converged,
                fit.log_likelihood / fit.n as f64,
                criteria.aic,
                criteria.bic,
            ),
            _ => println!(
                "{:<8} {}  {}  failed: {}",
                row.family.name(),
                row.p,
                row.q,
                row.error.as_deref().unwrap_or("unknown")
            ),
        }
    }

    for criterion in [Criterion::Aic, Criterion::Bic] {
        if let Some(row) = grid.best(criterion) {
            println!("\nbest by {criterion:?}: {} ({},{})", row.family.name(), row.p, row.q);
        }
    }

    // Does the asymmetry term earn its extra parameter?
    let plain = grid
        .rows
        .iter()
        .find(|r| r.family == Family::SGarch && r.p == 1 && r.q == 1)
        .and_then(|r| r.fit.as_ref())
        .expect("sgarch(1,1) cell");
    let asymmetric = grid
        .rows
        .iter()
        .find(|r| r.family == Family::Gjr && r.p == 1 && r.q == 1)
        .and_then(|r| r.fit.as_ref())
        .expect("gjr(1,1) cell");
    let lr = likelihood_ratio_test(asymmetric.log_likelihood, plain.log_likelihood, 1)?;
    println!(
        "\nLR test gjr(1,1) vs sgarch(1,1): statistic {:.4}, p {:.4}, reject@5% {}",
        lr.statistic, lr.p_value, lr.reject_at_5pct
    );
    println!("(data were simulated without asymmetry, so the extension should lose)");
    Ok(())
}
