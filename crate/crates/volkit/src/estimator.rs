//! Maximum-likelihood fitting of one-regime variance models.
//!
//! Constrained parameters are mapped to an unconstrained space (logs for
//! positive quantities, a softmax-style map keeping the persistence inside
//! the unit simplex for mean-reverting families, logits for bounded ones),
//! then minimized by a Nelder-Mead search followed by a BFGS polish. Five
//! deterministic multi-starts (seeds 1..5) jitter a moment-based initial
//! point; the reported fit is the best across starts.
//!
//! During optimizer trial evaluations only, conditional variances are
//! floored at 1e-12 to keep the objective finite; reported likelihoods and
//! paths are floor-free.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::garch::{
    expected_power_shock, log_likelihood, presample_variance, Family, GarchModel, ParamVector,
    Recursion,
};
use crate::optimize::{nelder_mead, quasi_newton_polish};
use crate::options::norm_cdf;
use crate::stats::ReturnSeries;

/// Variance floor applied inside optimizer trial evaluations.
pub(crate) const TRIAL_VARIANCE_FLOOR: f64 = 1e-12;

/// Estimation controls. Defaults implement the documented contract:
/// 5 seeded starts, 2000 objective evaluations per start, 1e-8 improvement
/// tolerance.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub starts: usize,
    pub max_evals_per_start: usize,
    pub ftol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { starts: 5, max_evals_per_start: 2000, ftol: 1e-8 }
    }
}

/// A fitted one-regime model with inference metadata.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model: GarchModel,
    pub log_likelihood: f64,
    /// Observation count.
    pub n: usize,
    /// Free-parameter count after family constraints.
    pub k: usize,
    /// Per-free-parameter standard errors; `None` when the Hessian was singular.
    pub std_errors: Option<Vec<f64>>,
    /// Two-sided normal p-values, aligned with `std_errors`.
    pub p_values: Option<Vec<f64>>,
    pub converged: bool,
    /// Objective evaluations spent on the winning start.
    pub iterations: usize,
}

/// Likelihood with the trial floor: finite for any parameter point the
/// optimizer can reach, −∞ where the recursion degenerates entirely.
pub(crate) fn floored_log_likelihood(model: &GarchModel, returns: &ReturnSeries) -> f64 {
    const HALF_LN_2PI: f64 = 0.9189385332046727;
    let values = returns.values();
    let init = presample_variance(values);
    let mut recursion = Recursion::new(model, init);
    let mut ll = 0.0;
    for r in values {
        let mut variance = recursion.next_variance();
        if !variance.is_finite() {
            return f64::NEG_INFINITY;
        }
        if variance < TRIAL_VARIANCE_FLOOR {
            variance = TRIAL_VARIANCE_FLOOR;
        }
        ll += -HALF_LN_2PI - 0.5 * variance.ln() - r * r / (2.0 * variance);
        recursion.push_return(*r);
    }
    ll
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    (p / (1.0 - p)).ln()
}

fn bounded_exp(x: f64) -> f64 {
    x.clamp(-700.0, 50.0).exp()
}

/// Softmax-style map of `k` reals onto positive weights summing below 1.
pub(crate) fn simplex_weights(raw: &[f64]) -> Vec<f64> {
    let m = raw.iter().fold(0.0f64, |acc, v| acc.max(v.clamp(-60.0, 60.0)));
    let denom: f64 =
        (-m).exp() + raw.iter().map(|v| (v.clamp(-60.0, 60.0) - m).exp()).sum::<f64>();
    raw.iter().map(|v| (v.clamp(-60.0, 60.0) - m).exp() / denom).collect()
}

/// Inverse of [`simplex_weights`]: `u_i = ln(w_i / (1 − Σw))`.
pub(crate) fn simplex_raw(weights: &[f64]) -> Vec<f64> {
    let rest = (1.0 - weights.iter().sum::<f64>()).max(1e-12);
    weights.iter().map(|w| (w.max(1e-12) / rest).ln()).collect()
}

/// Bijection between a family's constrained parameters and an unconstrained
/// search space of the same dimension.
#[derive(Debug, Clone)]
pub(crate) struct Transform {
    family: Family,
    p: usize,
    q: usize,
}

impl Transform {
    pub fn new(family: Family, p: usize, q: usize) -> Self {
        Transform { family, p, q }
    }

    pub fn dim(&self) -> usize {
        crate::garch::free_param_count(self.family, self.p, self.q)
    }

    /// Map an unconstrained point to a valid parameter vector.
    pub fn to_params(&self, u: &[f64]) -> ParamVector {
        debug_assert_eq!(u.len(), self.dim());
        let (p, q) = (self.p, self.q);
        match self.family {
            Family::SGarch => {
                let omega = bounded_exp(u[0]);
                let w = simplex_weights(&u[1..1 + q + p]);
                ParamVector::symmetric(omega, w[..q].to_vec(), w[q..].to_vec())
            }
            Family::IGarch => {
                let omega = bounded_exp(u[0]);
                let w = simplex_weights(&u[1..q + p]);
                let mut beta = w[q..].to_vec();
                beta.push((1.0 - w.iter().sum::<f64>()).max(0.0));
                ParamVector::symmetric(omega, w[..q].to_vec(), beta)
            }
            Family::Gjr => {
                // Persistence shares s_i = α_i + γ_i/2 live on the simplex
                // with the βs; a logit split keeps α_i ∈ [0, 2s_i], which is
                // exactly the α_i ≥ 0, α_i + γ_i ≥ 0 constraint pair.
                let omega = bounded_exp(u[0]);
                let shares: Vec<f64> =
                    u[1..1 + q].iter().chain(&u[1 + 2 * q..1 + 2 * q + p]).copied().collect();
                let w = simplex_weights(&shares);
                let beta = w[q..].to_vec();
                let mut alpha = Vec::with_capacity(q);
                let mut gamma = Vec::with_capacity(q);
                for i in 0..q {
                    let split = sigmoid(u[1 + q + i]);
                    let a = 2.0 * w[i] * split;
                    alpha.push(a);
                    gamma.push(2.0 * (w[i] - a));
                }
                ParamVector { omega, alpha, beta, gamma, delta: None }
            }
            Family::EGarch => {
                // Level and shock coefficients are genuinely unconstrained;
                // β is kept on the positive stationary simplex.
                let omega = u[0];
                let alpha = u[1..1 + q].to_vec();
                let gamma = u[1 + q..1 + 2 * q].to_vec();
                let beta = simplex_weights(&u[1 + 2 * q..1 + 2 * q + p]);
                ParamVector { omega, alpha, beta, gamma, delta: None }
            }
            Family::Aparch => {
                // Simplex over persistence contributions c_i = α_i·E(|z|−γ_i z)^δ
                // and the βs, so fitted aparch models stay mean reverting.
                let omega = bounded_exp(u[0]);
                // tanh saturates to exactly ±1 for large arguments; keep the
                // output strictly inside the open interval.
                let gamma: Vec<f64> = u[1 + q..1 + 2 * q]
                    .iter()
                    .map(|v| v.tanh().clamp(-0.999_999, 0.999_999))
                    .collect();
                let delta = bounded_exp(u[1 + 2 * q + p]).max(1e-3);
                let shares: Vec<f64> =
                    u[1..1 + q].iter().chain(&u[1 + 2 * q..1 + 2 * q + p]).copied().collect();
                let w = simplex_weights(&shares);
                let beta = w[q..].to_vec();
                let alpha: Vec<f64> = (0..q)
                    .map(|i| w[i] / expected_power_shock(gamma[i], delta).max(1e-12))
                    .collect();
                ParamVector { omega, alpha, beta, gamma, delta: Some(delta) }
            }
        }
    }

    /// Map parameters back to the unconstrained space (used for warm starts).
    pub fn to_unconstrained(&self, params: &ParamVector) -> Vec<f64> {
        let q = self.q;
        match self.family {
            Family::SGarch => {
                let mut u = vec![params.omega.max(1e-300).ln()];
                let weights: Vec<f64> =
                    params.alpha.iter().chain(&params.beta).copied().collect();
                u.extend(simplex_raw(&weights));
                u
            }
            Family::IGarch => {
                let mut u = vec![params.omega.max(1e-300).ln()];
                let weights: Vec<f64> = params
                    .alpha
                    .iter()
                    .chain(&params.beta[..self.p - 1])
                    .copied()
                    .collect();
                u.extend(simplex_raw(&weights));
                u
            }
            Family::Gjr => {
                let shares: Vec<f64> = params
                    .alpha
                    .iter()
                    .zip(&params.gamma)
                    .map(|(a, g)| a + g / 2.0)
                    .chain(params.beta.iter().copied())
                    .collect();
                let raw = simplex_raw(&shares);
                let mut u = vec![params.omega.max(1e-300).ln()];
                u.extend_from_slice(&raw[..q]);
                for i in 0..q {
                    let share = shares[i].max(1e-12);
                    u.push(logit(params.alpha[i] / (2.0 * share)));
                }
                u.extend_from_slice(&raw[q..]);
                u
            }
            Family::EGarch => {
                let mut u = vec![params.omega];
                u.extend_from_slice(&params.alpha);
                u.extend_from_slice(&params.gamma);
                u.extend(simplex_raw(&params.beta));
                u
            }
            Family::Aparch => {
                let delta = params.delta.expect("aparch delta");
                let shares: Vec<f64> = params
                    .alpha
                    .iter()
                    .zip(&params.gamma)
                    .map(|(a, g)| a * expected_power_shock(*g, delta))
                    .chain(params.beta.iter().copied())
                    .collect();
                let raw = simplex_raw(&shares);
                let mut u = vec![params.omega.max(1e-300).ln()];
                u.extend_from_slice(&raw[..q]);
                for g in &params.gamma {
                    u.push(g.clamp(-0.999_999, 0.999_999).atanh());
                }
                u.extend_from_slice(&raw[q..]);
                u.push(delta.ln());
                u
            }
        }
    }

    /// Moment-based warm start: ω at 5% of the sample variance, small shock
    /// loadings, strong memory, no asymmetry, squared power.
    pub fn initial_params(&self, sample_variance: f64) -> ParamVector {
        let (p, q) = (self.p, self.q);
        let mut alpha = vec![0.05; q];
        let mut beta = vec![0.9 / p as f64; p];
        // Keep the warm start strictly inside the stationarity region.
        let total: f64 = alpha.iter().sum::<f64>() + beta.iter().sum::<f64>();
        if total >= 0.98 {
            let shrink = 0.95 / total;
            alpha.iter_mut().for_each(|a| *a *= shrink);
            beta.iter_mut().for_each(|b| *b *= shrink);
        }
        match self.family {
            Family::SGarch => ParamVector::symmetric(0.05 * sample_variance, alpha, beta),
            Family::IGarch => {
                let used: f64 =
                    alpha.iter().sum::<f64>() + beta[..p - 1].iter().sum::<f64>();
                beta[p - 1] = 1.0 - used;
                ParamVector::symmetric(0.05 * sample_variance, alpha, beta)
            }
            Family::Gjr => ParamVector {
                omega: 0.05 * sample_variance,
                alpha,
                beta,
                gamma: vec![0.0; q],
                delta: None,
            },
            Family::EGarch => {
                let beta_sum: f64 = beta.iter().sum();
                ParamVector {
                    omega: (1.0 - beta_sum) * sample_variance.max(1e-300).ln(),
                    alpha: vec![0.05; q],
                    beta,
                    gamma: vec![0.0; q],
                    delta: None,
                }
            }
            Family::Aparch => ParamVector {
                omega: 0.05 * sample_variance,
                alpha,
                beta,
                gamma: vec![0.0; q],
                delta: Some(2.0),
            },
        }
    }
}

/// Fit a one-regime model by constrained maximum likelihood.
pub fn fit(
    family: Family,
    p: usize,
    q: usize,
    returns: &ReturnSeries,
    options: &FitOptions,
) -> Result<FitResult> {
    if returns.len() < 50 {
        return Err(Error::TooFewObservations { have: returns.len(), need: 50 });
    }
    let sample_variance = presample_variance(returns.values());
    if sample_variance <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    // Validates the orders as a side effect.
    let transform = Transform::new(family, p, q);
    let start_params = transform.initial_params(sample_variance);
    GarchModel::new(family, p, q, start_params.clone())?;

    let u0 = transform.to_unconstrained(&start_params);
    let mut best: Option<(f64, Vec<f64>, bool, usize)> = None;

    for start in 1..=options.starts as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(start);
        let jitter = 0.25 * (start - 1) as f64;
        let u_start: Vec<f64> =
            u0.iter().map(|v| v + jitter * rng.sample::<f64, _>(StandardNormal)).collect();

        let mut objective = |u: &[f64]| {
            let params = transform.to_params(u);
            match GarchModel::new(family, p, q, params) {
                Ok(model) => -floored_log_likelihood(&model, returns),
                Err(_) => f64::INFINITY,
            }
        };

        let simplex_budget = options.max_evals_per_start * 3 / 5;
        let rough = nelder_mead(&mut objective, &u_start, 0.25, options.ftol, simplex_budget);
        let remaining = options.max_evals_per_start.saturating_sub(rough.evals);
        let polished = quasi_newton_polish(&mut objective, &rough.x, options.ftol, remaining);
        let total_evals = rough.evals + polished.evals;
        let (outcome, converged) = if polished.fx <= rough.fx {
            let c = polished.converged;
            (polished, c)
        } else {
            let c = rough.converged;
            (rough, c)
        };

        let replace = match &best {
            None => true,
            Some((fx, _, _, _)) => outcome.fx < *fx,
        };
        if replace {
            best = Some((outcome.fx, outcome.x, converged, total_evals));
        }
    }

    let (_, u_best, converged, iterations) = best.expect("at least one start");
    let model = GarchModel::new(family, p, q, transform.to_params(&u_best))?;
    let ll = log_likelihood(&model, returns)?;
    let k = model.free_param_count();
    let n = returns.len();

    let mut result = FitResult {
        model,
        log_likelihood: ll,
        n,
        k,
        std_errors: None,
        p_values: None,
        converged,
        iterations,
    };
    if let Ok((se, pv)) = standard_errors(&result, returns) {
        result.std_errors = Some(se);
        result.p_values = Some(pv);
    }
    Ok(result)
}

/// Standard errors from the inverse of the negative numerical Hessian of the
/// log-likelihood at the optimum (central differences, relative step 1e-4),
/// with two-sided normal p-values. Errors with `SingularHessian` when the
/// curvature matrix cannot be inverted to positive variances.
pub fn standard_errors(fit: &FitResult, returns: &ReturnSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    let theta = fit.model.free_param_values();
    let dim = theta.len();
    let eval = |values: &[f64]| -> f64 {
        let model = fit.model.from_free_params_unchecked(values);
        floored_log_likelihood(&model, returns)
    };

    // Relative step with an absolute floor for parameters fitted at zero.
    let steps: Vec<f64> = theta.iter().map(|t| 1e-4 * t.abs().max(1e-2)).collect();
    let f0 = eval(&theta);
    if !f0.is_finite() {
        return Err(Error::SingularHessian);
    }

    let mut hessian = vec![vec![0.0f64; dim]; dim];
    for i in 0..dim {
        let mut x = theta.clone();
        x[i] = theta[i] + steps[i];
        let fp = eval(&x);
        x[i] = theta[i] - steps[i];
        let fm = eval(&x);
        if !(fp.is_finite() && fm.is_finite()) {
            return Err(Error::SingularHessian);
        }
        hessian[i][i] = (fp - 2.0 * f0 + fm) / (steps[i] * steps[i]);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut x = theta.clone();
            x[i] = theta[i] + steps[i];
            x[j] = theta[j] + steps[j];
            let fpp = eval(&x);
            x[j] = theta[j] - steps[j];
            let fpm = eval(&x);
            x[i] = theta[i] - steps[i];
            x[j] = theta[j] + steps[j];
            let fmp = eval(&x);
            x[j] = theta[j] - steps[j];
            let fmm = eval(&x);
            if ![fpp, fpm, fmp, fmm].iter().all(|v| v.is_finite()) {
                return Err(Error::SingularHessian);
            }
            let value = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j]);
            hessian[i][j] = value;
            hessian[j][i] = value;
        }
    }

    // Covariance is the inverse of −H.
    let neg_hessian: Vec<Vec<f64>> =
        hessian.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
    let covariance =
        crate::ols::invert_matrix(&neg_hessian).map_err(|_| Error::SingularHessian)?;
    let mut ses = Vec::with_capacity(dim);
    let mut pvalues = Vec::with_capacity(dim);
    for i in 0..dim {
        let var = covariance[i][i];
        if !(var.is_finite() && var > 0.0) {
            return Err(Error::SingularHessian);
        }
        let se = var.sqrt();
        let z = theta[i] / se;
        ses.push(se);
        pvalues.push((2.0 * (1.0 - norm_cdf(z.abs()))).clamp(0.0, 1.0));
    }
    Ok((ses, pvalues))
}
