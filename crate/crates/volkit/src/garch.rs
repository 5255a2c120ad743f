//! One-regime conditional-variance models and their deterministic kernels.
//!
//! Five families share a common contract: returns are zero-mean shocks
//! `R_t = σ_t·z_t` with standard normal `z_t`, and the conditional variance
//! follows the family recursion
//!
//! ```text
//! sgarch/igarch:  σ²_t = ω + Σ_i α_i R²_{t−i}            + Σ_j β_j σ²_{t−j}
//! gjr:            σ²_t = ω + Σ_i (α_i + γ_i·1[R<0]) R²_{t−i} + Σ_j β_j σ²_{t−j}
//! egarch:     ln σ²_t = ω + Σ_i [α_i z_{t−i} + γ_i(|z_{t−i}| − E|z|)] + Σ_j β_j ln σ²_{t−j}
//! aparch:         σ^δ_t = ω + Σ_i α_i (|R_{t−i}| − γ_i R_{t−i})^δ + Σ_j β_j σ^δ_{t−j}
//! ```
//!
//! Pre-sample lags are filled with the mean squared return of the input (its
//! log for the egarch recursion, its δ/2 power for aparch); pre-sample egarch
//! innovation terms use their expectation, zero. The egarch recursion is
//! driven by standardized innovations `z_t = R_t/σ_t` with `E|z| = √(2/π)`.
//! Conditional variances are never clamped: a non-positive or non-finite
//! value is reported as an error.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::ReturnSeries;

/// `E|z|` for standard normal innovations, used by the egarch recursion.
pub const EXPECTED_ABS_NORMAL: f64 = 0.7978845608028654; // sqrt(2/pi)

/// Number of presample draws discarded by [`simulate`].
pub const SIMULATION_BURN_IN: usize = 500;

/// Variance-model family. Declaration order is the canonical CLI order and
/// the final tie-break in model selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    SGarch,
    IGarch,
    Gjr,
    EGarch,
    Aparch,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::SGarch, Family::IGarch, Family::Gjr, Family::EGarch, Family::Aparch];

    pub fn name(&self) -> &'static str {
        match self {
            Family::SGarch => "sgarch",
            Family::IGarch => "igarch",
            Family::Gjr => "gjr",
            Family::EGarch => "egarch",
            Family::Aparch => "aparch",
        }
    }

    /// Whether the family carries asymmetry (γ) loadings.
    pub fn has_gamma(&self) -> bool {
        matches!(self, Family::Gjr | Family::EGarch | Family::Aparch)
    }

    /// Whether the family carries the power exponent δ.
    pub fn has_delta(&self) -> bool {
        matches!(self, Family::Aparch)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sgarch" => Ok(Family::SGarch),
            "igarch" => Ok(Family::IGarch),
            "gjr" => Ok(Family::Gjr),
            "egarch" => Ok(Family::EGarch),
            "aparch" => Ok(Family::Aparch),
            other => Err(format!(
                "unknown family {other:?}, expected one of sgarch, igarch, gjr, egarch, aparch"
            )),
        }
    }
}

/// Family-shaped parameter vector: level ω, shock loadings α (length q),
/// variance loadings β (length p), asymmetry loadings γ (length q where the
/// family has them) and the aparch power δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub omega: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl ParamVector {
    /// Symmetric vector (no γ, no δ) for sgarch/igarch.
    pub fn symmetric(omega: f64, alpha: Vec<f64>, beta: Vec<f64>) -> Self {
        ParamVector { omega, alpha, beta, gamma: Vec::new(), delta: None }
    }

    fn validate(&self, family: Family, p: usize, q: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.alpha.len() != q {
            return fail(format!("expected {q} alpha terms, got {}", self.alpha.len()));
        }
        if self.beta.len() != p {
            return fail(format!("expected {p} beta terms, got {}", self.beta.len()));
        }
        let all = self
            .alpha
            .iter()
            .chain(self.beta.iter())
            .chain(self.gamma.iter())
            .chain(self.delta.iter())
            .chain(std::iter::once(&self.omega));
        if all.clone().any(|v| !v.is_finite()) {
            return fail("non-finite parameter".into());
        }
        if family.has_gamma() {
            if self.gamma.len() != q {
                return fail(format!("expected {q} gamma terms, got {}", self.gamma.len()));
            }
        } else if !self.gamma.is_empty() {
            return fail(format!("{family} takes no gamma terms"));
        }
        match (family.has_delta(), self.delta) {
            (true, Some(d)) if d > 0.0 => {}
            (true, Some(d)) => return fail(format!("delta must be positive, got {d}")),
            (true, None) => return fail("aparch requires delta".into()),
            (false, Some(_)) => return fail(format!("{family} takes no delta")),
            (false, None) => {}
        }
        match family {
            Family::EGarch => {} // log recursion, signs unconstrained
            _ => {
                if self.omega < 0.0 {
                    return fail(format!("omega must be non-negative, got {}", self.omega));
                }
                if let Some(a) = self.alpha.iter().find(|a| **a < 0.0) {
                    return fail(format!("alpha must be non-negative, got {a}"));
                }
                if let Some(b) = self.beta.iter().find(|b| **b < 0.0) {
                    return fail(format!("beta must be non-negative, got {b}"));
                }
            }
        }
        match family {
            Family::Gjr => {
                for (a, g) in self.alpha.iter().zip(&self.gamma) {
                    if a + g < 0.0 {
                        return fail(format!("gjr requires alpha + gamma >= 0, got {}", a + g));
                    }
                }
            }
            Family::Aparch => {
                if let Some(g) = self.gamma.iter().find(|g| g.abs() >= 1.0) {
                    return fail(format!("aparch requires |gamma| < 1, got {g}"));
                }
            }
            Family::IGarch => {
                let persistence: f64 =
                    self.alpha.iter().sum::<f64>() + self.beta.iter().sum::<f64>();
                if (persistence - 1.0).abs() > 1e-10 {
                    return fail(format!("igarch requires alpha + beta sums to 1, got {persistence}"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A validated variance model: family tag, orders, and parameters.
///
/// `q` counts shock (α) lags and `p` counts variance (β) lags; both are
/// limited to 1..=3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchModel {
    family: Family,
    p: usize,
    q: usize,
    params: ParamVector,
}

impl GarchModel {
    pub fn new(family: Family, p: usize, q: usize, params: ParamVector) -> Result<Self> {
        if !(1..=3).contains(&p) || !(1..=3).contains(&q) {
            return Err(Error::InvalidSpec(format!("orders must be in 1..=3, got p={p}, q={q}")));
        }
        params.validate(family, p, q)?;
        Ok(GarchModel { family, p, q, params })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    /// Count of free parameters after family constraints (igarch loses β_p).
    pub fn free_param_count(&self) -> usize {
        free_param_count(self.family, self.p, self.q)
    }

    /// Names of the free parameters, in reporting order.
    pub fn free_param_names(&self) -> Vec<String> {
        free_param_names(self.family, self.p, self.q)
    }

    /// Values of the free parameters, aligned with [`free_param_names`].
    pub fn free_param_values(&self) -> Vec<f64> {
        let pv = &self.params;
        let mut out = vec![pv.omega];
        out.extend_from_slice(&pv.alpha);
        out.extend_from_slice(&pv.gamma);
        match self.family {
            // β_p is eliminated by the unit-persistence constraint.
            Family::IGarch => out.extend_from_slice(&pv.beta[..self.p - 1]),
            _ => out.extend_from_slice(&pv.beta),
        }
        out.extend(pv.delta);
        out
    }

    /// Same-shape rebuild without constraint validation. Used for numerical
    /// derivatives, where perturbed points may sit just outside the
    /// constraint set; the recursion itself tolerates them.
    pub(crate) fn from_free_params_unchecked(&self, values: &[f64]) -> GarchModel {
        GarchModel {
            family: self.family,
            p: self.p,
            q: self.q,
            params: self.assemble_params(values),
        }
    }

    fn assemble_params(&self, values: &[f64]) -> ParamVector {
        let (p, q) = (self.p, self.q);
        let mut it = values.iter().copied();
        let omega = it.next().expect("omega");
        let alpha: Vec<f64> = (&mut it).take(q).collect();
        let gamma: Vec<f64> =
            if self.family.has_gamma() { (&mut it).take(q).collect() } else { Vec::new() };
        let mut beta: Vec<f64> = match self.family {
            Family::IGarch => (&mut it).take(p - 1).collect(),
            _ => (&mut it).take(p).collect(),
        };
        if self.family == Family::IGarch {
            let used: f64 = alpha.iter().sum::<f64>() + beta.iter().sum::<f64>();
            beta.push(1.0 - used);
        }
        let delta = if self.family.has_delta() { Some(it.next().expect("delta")) } else { None };
        ParamVector { omega, alpha, beta, gamma, delta }
    }

    /// Persistence of the variance recursion: the weight with which current
    /// conditions carry into the next period (sums of loadings, with the
    /// standard symmetric-innovation extensions for the asymmetric families).
    pub fn persistence(&self) -> f64 {
        let pv = &self.params;
        let alpha_sum: f64 = pv.alpha.iter().sum();
        let beta_sum: f64 = pv.beta.iter().sum();
        match self.family {
            Family::SGarch => alpha_sum + beta_sum,
            Family::IGarch => 1.0,
            Family::Gjr => alpha_sum + beta_sum + pv.gamma.iter().sum::<f64>() / 2.0,
            Family::EGarch => beta_sum,
            Family::Aparch => {
                let delta = pv.delta.expect("aparch delta");
                beta_sum
                    + pv.alpha
                        .iter()
                        .zip(&pv.gamma)
                        .map(|(a, g)| a * expected_power_shock(*g, delta))
                        .sum::<f64>()
            }
        }
    }

    /// Long-run variance level, when the recursion is mean reverting
    /// (persistence < 1); `None` otherwise, notably for igarch.
    pub fn unconditional_variance(&self) -> Option<f64> {
        let persistence = self.persistence();
        if persistence >= 1.0 {
            return None;
        }
        let omega = self.params.omega;
        match self.family {
            Family::SGarch | Family::IGarch | Family::Gjr => Some(omega / (1.0 - persistence)),
            // Fixed point of the log recursion.
            Family::EGarch => Some((omega / (1.0 - persistence)).exp()),
            Family::Aparch => {
                let delta = self.params.delta.expect("aparch delta");
                Some((omega / (1.0 - persistence)).powf(2.0 / delta))
            }
        }
    }
}

pub(crate) fn free_param_count(family: Family, p: usize, q: usize) -> usize {
    match family {
        Family::SGarch => 1 + q + p,
        Family::IGarch => q + p,
        Family::Gjr | Family::EGarch => 1 + 2 * q + p,
        Family::Aparch => 2 + 2 * q + p,
    }
}

pub(crate) fn free_param_names(family: Family, p: usize, q: usize) -> Vec<String> {
    let mut names = vec!["omega".to_string()];
    for i in 1..=q {
        names.push(format!("alpha{i}"));
    }
    if family.has_gamma() {
        for i in 1..=q {
            names.push(format!("gamma{i}"));
        }
    }
    let free_betas = if family == Family::IGarch { p - 1 } else { p };
    for j in 1..=free_betas {
        names.push(format!("beta{j}"));
    }
    if family.has_delta() {
        names.push("delta".to_string());
    }
    names
}

/// `E(|Z| − γZ)^δ` for standard normal `Z`; the aparch persistence weight.
///
/// Closed form `[(1−γ)^δ + (1+γ)^δ] · 2^{δ/2} Γ((δ+1)/2) / (2√π)`.
pub fn expected_power_shock(gamma: f64, delta: f64) -> f64 {
    let tail = (1.0 - gamma).powf(delta) + (1.0 + gamma).powf(delta);
    tail * 2f64.powf(delta / 2.0) * statrs::function::gamma::gamma((delta + 1.0) / 2.0)
        / (2.0 * std::f64::consts::PI.sqrt())
}

/// Conditional-variance sequence for a return series, with the pre-sample
/// value it was started from.
#[derive(Debug, Clone, PartialEq)]
pub struct VariancePath {
    points: Vec<(NaiveDate, f64)>,
    init_value: f64,
}

impl VariancePath {
    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|(_, v)| *v)
    }

    pub fn init_value(&self) -> f64 {
        self.init_value
    }

    pub fn last(&self) -> f64 {
        self.points.last().expect("non-empty path").1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One lagged shock observation, or the pre-sample placeholder.
#[derive(Debug, Clone, Copy)]
enum Shock {
    /// Pre-sample: squared return and power terms take the init level,
    /// egarch innovation terms take their zero expectation.
    Pre,
    /// A realized return.
    Ret(f64),
    /// A realized standardized innovation (egarch).
    Std(f64),
}

/// Stepping engine for the family recursions. Lag buffers hold the most
/// recent value first; `next_variance` reads them, `push_return` shifts them.
#[derive(Debug, Clone)]
pub(crate) struct Recursion<'m> {
    model: &'m GarchModel,
    init_var: f64,
    /// σ² lags on the family scale (σ², ln σ², or σ^δ).
    scale_lags: Vec<f64>,
    shock_lags: Vec<Shock>,
    /// σ² produced by the latest `next_variance`, consumed by `push_return`.
    current_var: f64,
}

impl<'m> Recursion<'m> {
    pub fn new(model: &'m GarchModel, init_var: f64) -> Self {
        debug_assert!(init_var >= 0.0);
        let scale_init = match model.family {
            Family::SGarch | Family::IGarch | Family::Gjr => init_var,
            Family::EGarch => init_var.ln(),
            Family::Aparch => init_var.powf(model.params.delta.expect("delta") / 2.0),
        };
        Recursion {
            model,
            init_var,
            scale_lags: vec![scale_init; model.p],
            shock_lags: vec![Shock::Pre; model.q],
            current_var: init_var,
        }
    }

    /// Conditional variance implied by the current lags. Returns the raw
    /// value; callers decide whether a non-positive result is an error.
    pub fn next_variance(&mut self) -> f64 {
        let pv = &self.model.params;
        let variance = match self.model.family {
            Family::SGarch | Family::IGarch => {
                let mut acc = pv.omega;
                for (a, shock) in pv.alpha.iter().zip(&self.shock_lags) {
                    acc += a * self.squared(shock);
                }
                for (b, lag) in pv.beta.iter().zip(&self.scale_lags) {
                    acc += b * lag;
                }
                acc
            }
            Family::Gjr => {
                let mut acc = pv.omega;
                for ((a, g), shock) in pv.alpha.iter().zip(&pv.gamma).zip(&self.shock_lags) {
                    let r2 = self.squared(shock);
                    let down = match shock {
                        Shock::Pre => 0.5 * self.init_var, // E[1(R<0)·R²] under symmetry
                        Shock::Ret(r) => {
                            if *r < 0.0 {
                                r * r
                            } else {
                                0.0
                            }
                        }
                        Shock::Std(_) => unreachable!("gjr lags hold raw returns"),
                    };
                    acc += a * r2 + g * down;
                }
                for (b, lag) in pv.beta.iter().zip(&self.scale_lags) {
                    acc += b * lag;
                }
                acc
            }
            Family::EGarch => {
                let mut acc = pv.omega;
                for ((a, g), shock) in pv.alpha.iter().zip(&pv.gamma).zip(&self.shock_lags) {
                    if let Shock::Std(z) = shock {
                        acc += a * z + g * (z.abs() - EXPECTED_ABS_NORMAL);
                    } // pre-sample innovation terms have zero expectation
                }
                for (b, lag) in pv.beta.iter().zip(&self.scale_lags) {
                    acc += b * lag;
                }
                acc.exp()
            }
            Family::Aparch => {
                let delta = pv.delta.expect("delta");
                let mut acc = pv.omega;
                for ((a, g), shock) in pv.alpha.iter().zip(&pv.gamma).zip(&self.shock_lags) {
                    let power = match shock {
                        Shock::Pre => self.init_var.powf(delta / 2.0),
                        Shock::Ret(r) => (r.abs() - g * r).powf(delta),
                        Shock::Std(_) => unreachable!("aparch lags hold raw returns"),
                    };
                    acc += a * power;
                }
                for (b, lag) in pv.beta.iter().zip(&self.scale_lags) {
                    acc += b * lag;
                }
                if acc <= 0.0 {
                    return acc; // reported upstream, never clamped
                }
                acc.powf(2.0 / delta)
            }
        };
        self.current_var = variance;
        variance
    }

    /// Record the realized return for the period whose variance was just
    /// produced by `next_variance`.
    pub fn push_return(&mut self, ret: f64) {
        let pv = &self.model.params;
        let scale_value = match self.model.family {
            Family::SGarch | Family::IGarch | Family::Gjr => self.current_var,
            Family::EGarch => self.current_var.ln(),
            Family::Aparch => self.current_var.powf(pv.delta.expect("delta") / 2.0),
        };
        self.scale_lags.pop();
        self.scale_lags.insert(0, scale_value);
        let shock = match self.model.family {
            Family::EGarch => Shock::Std(ret / self.current_var.sqrt()),
            _ => Shock::Ret(ret),
        };
        self.shock_lags.pop();
        self.shock_lags.insert(0, shock);
    }

    fn squared(&self, shock: &Shock) -> f64 {
        match shock {
            Shock::Pre => self.init_var,
            Shock::Ret(r) => r * r,
            Shock::Std(_) => unreachable!("linear families hold raw returns"),
        }
    }
}

/// Pre-sample level used by the recursions: mean squared return (the sample
/// variance under the zero-mean convention).
pub(crate) fn presample_variance(values: &[f64]) -> f64 {
    values.iter().map(|r| r * r).sum::<f64>() / values.len() as f64
}

/// Conditional-variance path over a return series, pre-sample terms set to
/// the series' mean squared return.
pub fn conditional_variance_path(model: &GarchModel, returns: &ReturnSeries) -> Result<VariancePath> {
    variance_path_with_init(model, returns, presample_variance(returns.values()))
}

/// Conditional-variance path with an explicit pre-sample variance.
///
/// A zero pre-sample variance is legal (an all-zero input series produces
/// one); the recursion itself must still keep every conditional variance
/// strictly positive.
pub fn variance_path_with_init(
    model: &GarchModel,
    returns: &ReturnSeries,
    init_var: f64,
) -> Result<VariancePath> {
    if !(init_var.is_finite() && init_var >= 0.0) {
        return Err(Error::NonPositiveVariance { index: 0 });
    }
    let mut recursion = Recursion::new(model, init_var);
    let mut points = Vec::with_capacity(returns.len());
    for (index, (date, ret)) in returns.iter().enumerate() {
        let variance = recursion.next_variance();
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::NonPositiveVariance { index });
        }
        points.push((date, variance));
        recursion.push_return(ret);
    }
    Ok(VariancePath { points, init_value: init_var })
}

/// Gaussian log-likelihood of the zero-mean model:
/// `Σ_t [−½ln(2π) − ½ln σ²_t − R²_t/(2σ²_t)]`.
pub fn log_likelihood(model: &GarchModel, returns: &ReturnSeries) -> Result<f64> {
    let path = conditional_variance_path(model, returns)?;
    Ok(log_likelihood_for_path(returns.values(), path.values()))
}

pub(crate) fn log_likelihood_for_path(
    values: &[f64],
    variances: impl Iterator<Item = f64>,
) -> f64 {
    const HALF_LN_2PI: f64 = 0.9189385332046727;
    values
        .iter()
        .zip(variances)
        .map(|(r, v)| -HALF_LN_2PI - 0.5 * v.ln() - r * r / (2.0 * v))
        .sum()
}

/// Simulate a return series from the model with a seeded generator.
///
/// Draws `n + SIMULATION_BURN_IN` innovations and discards the burn-in
/// prefix. The recursion starts from the unconditional variance when it
/// exists, otherwise from a pragmatic `ω`-based level that the burn-in
/// washes out. Deterministic for a given seed.
pub fn simulate(model: &GarchModel, n: usize, seed: u64) -> Result<ReturnSeries> {
    if n == 0 {
        return Err(Error::InvalidSpec("simulation length must be at least 1".into()));
    }
    let persistence = model.persistence();
    if model.family != Family::IGarch && persistence > 1.0 {
        return Err(Error::ExplosiveModel { persistence });
    }
    let init_var = model.unconditional_variance().unwrap_or_else(|| {
        let beta_sum: f64 = model.params.beta.iter().sum();
        f64::max(model.params.omega, 1e-12) / f64::max(1.0 - beta_sum, 0.01)
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut recursion = Recursion::new(model, init_var);
    let mut values = Vec::with_capacity(n);
    for index in 0..SIMULATION_BURN_IN + n {
        let variance = recursion.next_variance();
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::NonPositiveVariance { index });
        }
        let z: f64 = rng.sample(StandardNormal);
        let ret = variance.sqrt() * z;
        recursion.push_return(ret);
        if index >= SIMULATION_BURN_IN {
            values.push(ret);
        }
    }
    ReturnSeries::from_values_at_epoch(values)
}
