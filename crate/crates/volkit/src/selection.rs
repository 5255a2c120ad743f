//! Information criteria, family/order grid search, and the likelihood-ratio
//! test.
//!
//! Criteria come in the two conventions used side by side in practice:
//! raw (`AIC = −2·LL + 2k`, `BIC = −2·LL + ln(n)·k`) and per-observation
//! (each divided by n). `k` counts all free parameters, ω included — the
//! igarch constraint removes one β, the switching model has 8.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::estimator::{fit, FitOptions, FitResult};
use crate::garch::Family;
use crate::stats::TestResult;

/// Which criterion declares the winner in user-facing output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
}

impl std::str::FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            other => Err(format!("unknown criterion {other:?}, expected aic or bic")),
        }
    }
}

/// Reporting convention for the criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Raw,
    PerObservation,
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "raw" => Ok(Convention::Raw),
            "per_observation" => Ok(Convention::PerObservation),
            other => Err(format!("unknown convention {other:?}, expected raw or per-observation")),
        }
    }
}

/// AIC/BIC pair under a stated convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriteriaPair {
    pub aic: f64,
    pub bic: f64,
    pub convention: Convention,
}

impl CriteriaPair {
    pub fn value(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
        }
    }
}

/// Akaike and Bayesian information criteria for a fitted likelihood.
pub fn information_criteria(
    log_likelihood: f64,
    k: usize,
    n: usize,
    convention: Convention,
) -> CriteriaPair {
    let aic = -2.0 * log_likelihood + 2.0 * k as f64;
    let bic = -2.0 * log_likelihood + (n as f64).ln() * k as f64;
    match convention {
        Convention::Raw => CriteriaPair { aic, bic, convention },
        Convention::PerObservation => {
            CriteriaPair { aic: aic / n as f64, bic: bic / n as f64, convention }
        }
    }
}

/// One grid cell: a (family, p, q) fit attempt with its criteria. Failed
/// fits keep their error message and count as non-converged.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub family: Family,
    pub p: usize,
    pub q: usize,
    pub fit: Option<FitResult>,
    pub criteria: Option<CriteriaPair>,
    pub error: Option<String>,
}

impl GridRow {
    pub fn converged(&self) -> bool {
        self.fit.as_ref().map(|f| f.converged).unwrap_or(false)
    }
}

/// Full grid over families and orders with both winners.
#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub rows: Vec<GridRow>,
    /// Index into `rows` of the AIC minimizer among converged cells.
    pub best_by_aic: Option<usize>,
    /// Index into `rows` of the BIC minimizer among converged cells.
    pub best_by_bic: Option<usize>,
    pub convention: Convention,
}

impl GridReport {
    pub fn best(&self, criterion: Criterion) -> Option<&GridRow> {
        let index = match criterion {
            Criterion::Aic => self.best_by_aic,
            Criterion::Bic => self.best_by_bic,
        }?;
        self.rows.get(index)
    }
}

/// Fit every (family, p, q) cell with p, q ∈ 1..=max_order. Cells run
/// concurrently; the assembled report is a deterministic merge ordered by
/// (family position, p, q). A failed cell is recorded with its error and is
/// excluded from winner selection, as is any non-converged fit.
pub fn grid_search(
    families: &[Family],
    returns: &crate::stats::ReturnSeries,
    max_order: usize,
    convention: Convention,
    options: &FitOptions,
) -> Result<GridReport> {
    if !(1..=3).contains(&max_order) {
        return Err(Error::InvalidSpec(format!("max order must be in 1..=3, got {max_order}")));
    }
    if families.is_empty() {
        return Err(Error::InvalidSpec("at least one family is required".into()));
    }
    let mut cells = Vec::new();
    for (family_pos, family) in families.iter().enumerate() {
        for p in 1..=max_order {
            for q in 1..=max_order {
                cells.push((family_pos, *family, p, q));
            }
        }
    }

    let n = returns.len();
    let mut rows: Vec<(usize, GridRow)> = cells
        .into_par_iter()
        .enumerate()
        .map(|(index, (_, family, p, q))| {
            let row = match fit(family, p, q, returns, options) {
                Ok(fit_result) => {
                    let criteria = information_criteria(
                        fit_result.log_likelihood,
                        fit_result.k,
                        n,
                        convention,
                    );
                    GridRow { family, p, q, fit: Some(fit_result), criteria: Some(criteria), error: None }
                }
                Err(err) => {
                    GridRow { family, p, q, fit: None, criteria: None, error: Some(err.to_string()) }
                }
            };
            (index, row)
        })
        .collect();
    rows.sort_by_key(|(index, _)| *index);
    let rows: Vec<GridRow> = rows.into_iter().map(|(_, row)| row).collect();

    let winner = |criterion: Criterion| -> Option<usize> {
        let mut best: Option<(usize, f64, usize, usize, usize)> = None;
        for (index, row) in rows.iter().enumerate() {
            if !row.converged() {
                continue;
            }
            let value = row.criteria.expect("converged rows carry criteria").value(criterion);
            let family_pos = families.iter().position(|f| *f == row.family).unwrap_or(usize::MAX);
            let candidate = (index, value, row.p + row.q, row.q, family_pos);
            let better = match &best {
                None => true,
                Some((_, best_value, best_order, best_q, best_family)) => {
                    // Ties break toward lower p+q, then lower q, then the
                    // family listed first.
                    (value, candidate.2, candidate.3, candidate.4)
                        < (*best_value, *best_order, *best_q, *best_family)
                }
            };
            if better {
                best = Some(candidate);
            }
        }
        best.map(|(index, ..)| index)
    };

    Ok(GridReport {
        best_by_aic: winner(Criterion::Aic),
        best_by_bic: winner(Criterion::Bic),
        rows,
        convention,
    })
}

/// Likelihood-ratio test `LR = 2(LL_extended − LL_standard)` with a χ²(df)
/// reference. Tiny negative ratios (within −1e-8) are clamped to zero;
/// anything more negative means the "extended" model was not a superset or
/// its optimization failed, and is an error.
pub fn likelihood_ratio_test(
    ll_extended: f64,
    ll_standard: f64,
    df: usize,
) -> Result<TestResult> {
    if df == 0 {
        return Err(Error::InvalidSpec("degrees of freedom must be at least 1".into()));
    }
    let lr = 2.0 * (ll_extended - ll_standard);
    if lr < -1e-8 {
        return Err(Error::NegativeLikelihoodRatio(lr));
    }
    let lr = lr.max(0.0);
    let chi2 = ChiSquared::new(df as f64).expect("valid df");
    Ok(TestResult::from_raw(lr, 1.0 - chi2.cdf(lr), df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garch::{simulate, GarchModel, ParamVector};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn criteria_match_frozen_arithmetic() {
        // (−2·1061.39 + 2·3)/578 and (−2·1061.39 + ln(578)·3)/578.
        let pair = information_criteria(1061.39, 3, 578, Convention::PerObservation);
        assert_abs_diff_eq!(pair.aic, -3.6622491349480972, epsilon = 1e-12);
        assert_abs_diff_eq!(pair.bic, -3.639621588916926, epsilon = 1e-12);

        let raw = information_criteria(1146.9371, 8, 578, Convention::Raw);
        assert_abs_diff_eq!(raw.aic, -2277.8742, epsilon = 1e-10);
        assert_abs_diff_eq!(raw.bic, -2242.997609050621, epsilon = 1e-10);

        let zero = information_criteria(0.0, 0, 100, Convention::Raw);
        assert_eq!(zero.aic, 0.0);
        assert_eq!(zero.bic, 0.0);
    }

    #[test]
    fn per_observation_is_raw_divided_by_n() {
        for (ll, k, n) in [(1061.39, 3usize, 578usize), (-250.0, 5, 100), (10.0, 1, 8)] {
            let raw = information_criteria(ll, k, n, Convention::Raw);
            let po = information_criteria(ll, k, n, Convention::PerObservation);
            assert_relative_eq!(po.aic, raw.aic / n as f64, max_relative = 1e-15);
            assert_relative_eq!(po.bic, raw.bic / n as f64, max_relative = 1e-15);
        }
    }

    #[test]
    fn extra_parameter_at_equal_likelihood_is_penalized() {
        for convention in [Convention::Raw, Convention::PerObservation] {
            let smaller = information_criteria(500.0, 3, 578, convention);
            let larger = information_criteria(500.0, 4, 578, convention);
            assert!(larger.aic > smaller.aic);
            assert!(larger.bic > smaller.bic);
        }
    }

    #[test]
    fn bic_dominates_aic_for_reasonable_samples() {
        // ln(n) > 2 from n = 8 onward.
        for n in [8usize, 50, 578] {
            let pair = information_criteria(-100.0, 4, n, Convention::Raw);
            assert!(pair.bic >= pair.aic);
        }
    }

    #[test]
    fn grid_has_expected_shape_and_order() {
        let model = GarchModel::new(
            Family::SGarch,
            1,
            1,
            ParamVector::symmetric(0.0001, vec![0.0833], vec![0.8644]),
        )
        .unwrap();
        let rets = simulate(&model, 400, 77).unwrap();
        let options = FitOptions { starts: 1, ..FitOptions::default() };
        let report =
            grid_search(&[Family::SGarch], &rets, 3, Convention::PerObservation, &options)
                .unwrap();
        assert_eq!(report.rows.len(), 9);
        let orders: Vec<(usize, usize)> = report.rows.iter().map(|r| (r.p, r.q)).collect();
        assert_eq!(
            orders,
            vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)]
        );
        assert!(report.best_by_aic.is_some());
        assert!(report.best_by_bic.is_some());
    }

    #[test]
    fn grid_is_deterministic_under_parallel_execution() {
        let model = GarchModel::new(
            Family::SGarch,
            1,
            1,
            ParamVector::symmetric(0.0001, vec![0.0833], vec![0.8644]),
        )
        .unwrap();
        let rets = simulate(&model, 300, 5).unwrap();
        let options = FitOptions { starts: 1, ..FitOptions::default() };
        let a = grid_search(&[Family::SGarch, Family::IGarch], &rets, 2, Convention::Raw, &options)
            .unwrap();
        let b = grid_search(&[Family::SGarch, Family::IGarch], &rets, 2, Convention::Raw, &options)
            .unwrap();
        assert_eq!(a.best_by_aic, b.best_by_aic);
        assert_eq!(a.best_by_bic, b.best_by_bic);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.converged(), y.converged());
            match (x.criteria, y.criteria) {
                (Some(cx), Some(cy)) => {
                    assert_eq!(cx.aic, cy.aic);
                    assert_eq!(cx.bic, cy.bic);
                }
                (None, None) => {}
                other => panic!("mismatched cells {other:?}"),
            }
        }
    }

    #[test]
    fn likelihood_ratio_cases() {
        let equal = likelihood_ratio_test(100.0, 100.0, 1).unwrap();
        assert_eq!(equal.statistic, 0.0);
        assert_eq!(equal.p_value, 1.0);

        // χ²(1) 95% quantile.
        let borderline = likelihood_ratio_test(101.92075, 100.0, 1).unwrap();
        assert_abs_diff_eq!(borderline.statistic, 3.8415, epsilon = 1e-9);
        assert_abs_diff_eq!(borderline.p_value, 0.05, epsilon = 1e-4);

        assert!(matches!(
            likelihood_ratio_test(99.0, 100.0, 2),
            Err(Error::NegativeLikelihoodRatio(_))
        ));
        // Within the clamp band.
        let clamped = likelihood_ratio_test(100.0 - 1e-10, 100.0, 1).unwrap();
        assert_eq!(clamped.statistic, 0.0);
    }
}
