//! Stable file outputs: versioned JSON reports and fixed-format CSV tables.
//!
//! CSV numbers are rendered with 6 significant digits (trailing zeros
//! trimmed, scientific notation outside a readable magnitude window); JSON
//! keeps full float precision. Identical inputs produce byte-identical
//! output.

use serde::Serialize;
use serde_json::json;

use crate::estimator::FitResult;
use crate::forecast::VolForecastPath;
use crate::msgarch::MsFitResult;
use crate::options::IvResult;
use crate::selection::{Criterion, GridReport};
use crate::stats::{scale_volatility, SummaryStats, TestResult, VolSeries};
use crate::surface::{SmileCurve, SpreadRow, VolSurface};

/// Version stamp carried by every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Render with `sig` significant digits, %g-style: plain decimal notation in
/// a readable magnitude range, scientific outside it, trailing zeros trimmed.
pub fn format_sig(x: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude < -4 || magnitude >= sig as i32 {
        let s = format!("{:.*e}", sig - 1, x);
        // Trim mantissa zeros: "5.33000e-2" → "5.33e-2".
        match s.split_once('e') {
            Some((mantissa, exponent)) => {
                let mantissa = if mantissa.contains('.') {
                    mantissa.trim_end_matches('0').trim_end_matches('.')
                } else {
                    mantissa
                };
                format!("{mantissa}e{exponent}")
            }
            None => s,
        }
    } else {
        let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

fn sig6(x: f64) -> String {
    format_sig(x, 6)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable report");
    out.push('\n');
    out
}

/// Diagnostics bundle for `stats-report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct StatsTests {
    pub jarque_bera: TestResult,
    pub t_test_zero_mean: TestResult,
    pub adf: TestResult,
    pub arch_lm: TestResult,
    pub ljung_box_squared: TestResult,
}

/// `stats-report.json`: summary moments plus the diagnostic battery.
pub fn stats_report_json(summary: &SummaryStats, tests: &StatsTests) -> String {
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "summary": summary,
        "tests": tests,
    }))
}

/// `histvol.csv`: `date,sigma`.
pub fn histvol_csv(vol: &VolSeries) -> String {
    let mut out = String::from("date,sigma\n");
    for (date, sigma) in vol.points() {
        out.push_str(&format!("{date},{}\n", sig6(*sigma)));
    }
    out
}

/// `fit-report.json`: the fit, named parameters with inference, persistence
/// and long-run variance.
pub fn fit_report_json(fit: &FitResult) -> String {
    let names = fit.model.free_param_names();
    let values = fit.model.free_param_values();
    let params: Vec<serde_json::Value> = names
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (name, value))| {
            json!({
                "name": name,
                "value": value,
                "std_error": fit.std_errors.as_ref().map(|se| se[i]),
                "p_value": fit.p_values.as_ref().map(|pv| pv[i]),
            })
        })
        .collect();
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "family": fit.model.family().name(),
        "p": fit.model.p(),
        "q": fit.model.q(),
        "params": params,
        "log_likelihood": fit.log_likelihood,
        "n": fit.n,
        "k": fit.k,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "persistence": fit.model.persistence(),
        "unconditional_variance": fit.model.unconditional_variance(),
    }))
}

/// `msfit-report.json`: regimes, transition matrix, stable probabilities,
/// filtered series.
pub fn msfit_report_json(fit: &MsFitResult) -> String {
    let filtered: Vec<serde_json::Value> = fit
        .filtered_probabilities
        .iter()
        .map(|(date, probs)| json!({"date": date, "p1": probs[0], "p2": probs[1]}))
        .collect();
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "regimes": fit.model.regimes(),
        "transition": fit.model.transition(),
        "stable_probabilities": fit.stable_probabilities,
        "log_likelihood": fit.log_likelihood,
        "n": fit.n,
        "k": fit.k,
        "converged": fit.converged,
        "filtered_probabilities": filtered,
    }))
}

/// `grid-report.csv`: `family,p,q,converged,ll,k,aic,bic`; failed cells keep
/// empty numeric fields.
pub fn grid_report_csv(report: &GridReport) -> String {
    let mut out = String::from("family,p,q,converged,ll,k,aic,bic\n");
    for row in &report.rows {
        match (&row.fit, &row.criteria) {
            (Some(fit), Some(criteria)) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    row.family,
                    row.p,
                    row.q,
                    fit.converged,
                    sig6(fit.log_likelihood),
                    fit.k,
                    sig6(criteria.aic),
                    sig6(criteria.bic),
                ));
            }
            _ => {
                out.push_str(&format!("{},{},{},false,,,,\n", row.family, row.p, row.q));
            }
        }
    }
    out
}

/// `grid-report.json` twin of the CSV, with explicit winners.
pub fn grid_report_json(report: &GridReport) -> String {
    let rows: Vec<serde_json::Value> = report
        .rows
        .iter()
        .map(|row| {
            json!({
                "family": row.family.name(),
                "p": row.p,
                "q": row.q,
                "converged": row.converged(),
                "ll": row.fit.as_ref().map(|f| f.log_likelihood),
                "k": row.fit.as_ref().map(|f| f.k),
                "aic": row.criteria.map(|c| c.aic),
                "bic": row.criteria.map(|c| c.bic),
                "error": row.error,
            })
        })
        .collect();
    let winner = |criterion: Criterion| {
        report.best(criterion).map(|row| {
            json!({"family": row.family.name(), "p": row.p, "q": row.q})
        })
    };
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "convention": report.convention,
        "rows": rows,
        "best_by_aic": winner(Criterion::Aic),
        "best_by_bic": winner(Criterion::Bic),
    }))
}

/// `forecast.csv`: `h,sigma2,sigma` plus `sigma_annual` when annualized
/// (365-day square-root-of-time scaling).
pub fn forecast_csv(path: &VolForecastPath, annualize: bool) -> String {
    let mut out = String::new();
    if annualize {
        out.push_str("h,sigma2,sigma,sigma_annual\n");
    } else {
        out.push_str("h,sigma2,sigma\n");
    }
    for step in &path.steps {
        if annualize {
            out.push_str(&format!(
                "{},{},{},{}\n",
                step.h,
                sig6(step.sigma2),
                sig6(step.sigma),
                sig6(scale_volatility(step.sigma, 365)),
            ));
        } else {
            out.push_str(&format!("{},{},{}\n", step.h, sig6(step.sigma2), sig6(step.sigma)));
        }
    }
    out
}

/// `smiles.csv`: `expiry,kind,side,strike,iv,status`; `iv` is empty for
/// points that did not invert.
pub fn smiles_csv(curves: &[SmileCurve]) -> String {
    let mut out = String::from("expiry,kind,side,strike,iv,status\n");
    for curve in curves {
        for point in &curve.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                curve.expiry_date,
                curve.kind,
                curve.side,
                sig6(point.strike),
                point.iv.map(sig6).unwrap_or_default(),
                point.status,
            ));
        }
    }
    out
}

/// `spreads.csv`: `expiry,kind,strike,spread,open_interest`.
pub fn spreads_csv(rows: &[SpreadRow]) -> String {
    let mut out = String::from("expiry,kind,strike,spread,open_interest\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.expiry_date,
            row.kind,
            sig6(row.strike),
            sig6(row.spread),
            row.open_interest,
        ));
    }
    out
}

/// `surface.csv`: `bucket_start,bucket_end,strike,iv` with a blank `iv` for
/// missing cells.
pub fn surface_csv(surface: &VolSurface) -> String {
    let mut out = String::from("bucket_start,bucket_end,strike,iv\n");
    for (bucket, (start, end)) in surface.buckets.iter().enumerate() {
        for (index, strike) in surface.strikes.iter().enumerate() {
            out.push_str(&format!(
                "{start},{end},{},{}\n",
                sig6(*strike),
                surface.cell(bucket, index).map(sig6).unwrap_or_default(),
            ));
        }
    }
    out
}

/// Single-inversion JSON for the `iv` subcommand.
pub fn iv_json(result: &IvResult) -> String {
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "status": result.status,
        "sigma": result.sigma,
    }))
}
