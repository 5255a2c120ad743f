//! Multi-step daily conditional-volatility forecasts.
//!
//! Fixed-window forecasts iterate the family recursion with future squared
//! returns replaced by their conditional expectation. For the linear
//! families (sgarch, igarch, gjr) this is an exact deterministic recursion;
//! for egarch and aparch, whose variance is not linear in past squared
//! returns, the forecast is the per-step mean of 10,000 seeded simulation
//! paths continued from the end-of-sample state.
//!
//! Mobile-window forecasts re-estimate the model every `refit_every` steps,
//! feeding back pseudo-returns of magnitude σ̂ (a seeded random sign times
//! the forecast volatility, so they are zero-mean with exactly the forecast
//! variance) as if they had been observed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{fit, FitOptions};
use crate::garch::{conditional_variance_path, presample_variance, Family, GarchModel, Recursion};
use crate::stats::ReturnSeries;

/// Simulation paths used for the egarch/aparch forecast mean.
pub const FORECAST_PATHS: usize = 10_000;

/// One forecast step: horizon index (1-based), variance, volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForecastStep {
    pub h: usize,
    pub sigma2: f64,
    pub sigma: f64,
}

/// A forecast path with the model's long-run variance when it exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolForecastPath {
    pub steps: Vec<ForecastStep>,
    pub long_run: Option<f64>,
}

impl VolForecastPath {
    pub(crate) fn from_variances(variances: Vec<f64>, long_run: Option<f64>) -> Self {
        let steps = variances
            .into_iter()
            .enumerate()
            .map(|(i, sigma2)| ForecastStep { h: i + 1, sigma2, sigma: sigma2.sqrt() })
            .collect();
        VolForecastPath { steps, long_run }
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }
}

/// Fixed-window forecast from a fitted model: the model is not updated as
/// the horizon advances. `seed` drives the simulation-based families only.
pub fn forecast_fixed(
    model: &GarchModel,
    returns: &ReturnSeries,
    horizon: usize,
    seed: u64,
) -> Result<VolForecastPath> {
    if horizon == 0 {
        return Err(Error::InvalidSpec("forecast horizon must be at least 1".into()));
    }
    let persistence = model.persistence();
    if model.family() != Family::IGarch && persistence > 1.0 {
        return Err(Error::ExplosiveModel { persistence });
    }
    let variances = match model.family() {
        Family::SGarch | Family::IGarch | Family::Gjr => {
            expectation_forecast(model, returns, horizon)?
        }
        Family::EGarch | Family::Aparch => {
            simulation_forecast(model, returns, horizon, seed, FORECAST_PATHS)?
        }
    };
    Ok(VolForecastPath::from_variances(variances, model.unconditional_variance()))
}

/// Exact expectation recursion for families linear in squared returns:
/// future `E[R²]` terms equal the forecast variance itself (for gjr the
/// indicator contributes γ/2 under symmetric innovations).
fn expectation_forecast(
    model: &GarchModel,
    returns: &ReturnSeries,
    horizon: usize,
) -> Result<Vec<f64>> {
    let path = conditional_variance_path(model, returns)?;
    let history: Vec<f64> = path.values().collect();
    let values = returns.values();
    let n = values.len();
    let init = path.init_value();
    let pv = model.params();
    let (p, q) = (model.p(), model.q());

    // Realized shock contribution of in-sample index `t` for lag slot `i`.
    let realized_shock = |t: isize, i: usize| -> f64 {
        if t < 0 {
            // Pre-sample convention: R² at the init level, indicator at 1/2.
            return pv.alpha[i] * init
                + pv.gamma.get(i).copied().unwrap_or(0.0) * 0.5 * init;
        }
        let r = values[t as usize];
        let down = if r < 0.0 { r * r } else { 0.0 };
        pv.alpha[i] * r * r + pv.gamma.get(i).copied().unwrap_or(0.0) * down
    };
    let past_variance = |t: isize| -> f64 {
        if t < 0 {
            init
        } else {
            history[t as usize]
        }
    };

    let mut forecasts: Vec<f64> = Vec::with_capacity(horizon);
    for h in 1..=horizon {
        let step = n as isize + h as isize - 1; // 0-based index of the forecast period
        let mut acc = pv.omega;
        for i in 0..q {
            let t = step - 1 - i as isize;
            if t >= n as isize {
                let expected = forecasts[(t - n as isize) as usize];
                acc += (pv.alpha[i] + pv.gamma.get(i).copied().unwrap_or(0.0) / 2.0) * expected;
            } else {
                acc += realized_shock(t, i);
            }
        }
        for j in 0..p {
            let t = step - 1 - j as isize;
            if t >= n as isize {
                acc += pv.beta[j] * forecasts[(t - n as isize) as usize];
            } else {
                acc += pv.beta[j] * past_variance(t);
            }
        }
        if !(acc.is_finite() && acc > 0.0) {
            return Err(Error::NonPositiveVariance { index: n + h - 1 });
        }
        forecasts.push(acc);
    }
    Ok(forecasts)
}

/// Mean of seeded simulation paths continued from the end-of-sample state.
fn simulation_forecast(
    model: &GarchModel,
    returns: &ReturnSeries,
    horizon: usize,
    seed: u64,
    paths: usize,
) -> Result<Vec<f64>> {
    // Drive the recursion through the sample once to capture the state.
    let init = presample_variance(returns.values());
    let mut recursion = Recursion::new(model, init);
    for (index, r) in returns.values().iter().enumerate() {
        let variance = recursion.next_variance();
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::NonPositiveVariance { index });
        }
        recursion.push_return(*r);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = vec![0.0f64; horizon];
    for _ in 0..paths {
        let mut branch = recursion.clone();
        for (h, sum) in sums.iter_mut().enumerate() {
            let variance = branch.next_variance();
            if !(variance.is_finite() && variance > 0.0) {
                return Err(Error::NonPositiveVariance { index: returns.len() + h });
            }
            *sum += variance;
            let z: f64 = rng.sample(StandardNormal);
            branch.push_return(variance.sqrt() * z);
        }
    }
    Ok(sums.into_iter().map(|s| s / paths as f64).collect())
}

/// Mobile-window forecast: forecast `refit_every` steps, append seeded
/// pseudo-returns carrying exactly the forecast variance, re-estimate, and
/// continue until the horizon is covered. Deterministic for a given seed.
#[allow(clippy::too_many_arguments)]
pub fn forecast_mobile(
    family: Family,
    p: usize,
    q: usize,
    returns: &ReturnSeries,
    horizon: usize,
    refit_every: usize,
    seed: u64,
    options: &FitOptions,
) -> Result<VolForecastPath> {
    if horizon == 0 {
        return Err(Error::InvalidSpec("forecast horizon must be at least 1".into()));
    }
    if refit_every == 0 {
        return Err(Error::InvalidSpec("refit interval must be at least 1".into()));
    }
    let mut working = returns.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut variances: Vec<f64> = Vec::with_capacity(horizon);
    let mut long_run = None;
    let mut segment: u64 = 0;

    while variances.len() < horizon {
        let fitted = fit(family, p, q, &working, options)?;
        let chunk = refit_every.min(horizon - variances.len());
        // Per-segment seed keeps the simulation-based families deterministic
        // while the sign stream below stays on the single run-level stream.
        let fc = forecast_fixed(&fitted.model, &working, chunk, seed.wrapping_add(segment))?;
        long_run = fc.long_run;
        for step in &fc.steps {
            variances.push(step.sigma2);
            let z: f64 = rng.sample(StandardNormal);
            let pseudo = step.sigma * z.signum();
            working.push(working.last_date() + chrono::Days::new(1), pseudo);
        }
        segment += 1;
    }
    Ok(VolForecastPath::from_variances(variances, long_run))
}
