//! Two-regime Markov-switching GARCH with parallel regime recursions.
//!
//! Each regime is a standard GARCH(1,1) whose conditional variance evolves
//! on the full return history independently of the realized regime path
//! (the Haas construction), so the likelihood is exactly computable by the
//! discrete-state filter: predict regime probabilities with the transition
//! matrix, mix the per-regime Gaussian densities, update, accumulate the
//! log mixture. The filter starts from the stationary distribution of the
//! transition matrix.
//!
//! The path independence is what makes the exhaustive path-enumeration
//! oracle in the tests exact, and it keeps the parameter count at 8:
//! two (ω, α, β) triples plus two free transition entries.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{fit, FitOptions, TRIAL_VARIANCE_FLOOR};
use crate::forecast::VolForecastPath;
use crate::garch::{presample_variance, Family, GarchModel, ParamVector, SIMULATION_BURN_IN};
use crate::optimize::{nelder_mead, quasi_newton_polish};
use crate::stats::ReturnSeries;

/// One regime's GARCH(1,1) parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl RegimeParams {
    fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::InvalidSpec("non-finite regime parameter".into()));
        }
        if self.omega < 0.0 || self.alpha < 0.0 || self.beta < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "regime parameters must be non-negative, got ω={} α={} β={}",
                self.omega, self.alpha, self.beta
            )));
        }
        Ok(())
    }

    pub fn persistence(&self) -> f64 {
        self.alpha + self.beta
    }

    pub fn unconditional_variance(&self) -> Option<f64> {
        let p = self.persistence();
        if p < 1.0 {
            Some(self.omega / (1.0 - p))
        } else {
            None
        }
    }
}

/// Two sgarch(1,1) regimes and a 2×2 transition matrix
/// `T[i][j] = Pr(s_{t+1}=j | s_t=i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsModel {
    regimes: [RegimeParams; 2],
    transition: [[f64; 2]; 2],
}

impl MsModel {
    pub fn new(regimes: [RegimeParams; 2], transition: [[f64; 2]; 2]) -> Result<Self> {
        for regime in &regimes {
            regime.validate()?;
        }
        for (i, row) in transition.iter().enumerate() {
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidTransition(format!(
                    "row {i} entries must lie in [0, 1], got {row:?}"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidTransition(format!("row {i} sums to {sum}, not 1")));
            }
        }
        Ok(MsModel { regimes, transition })
    }

    pub fn regimes(&self) -> &[RegimeParams; 2] {
        &self.regimes
    }

    pub fn transition(&self) -> &[[f64; 2]; 2] {
        &self.transition
    }

    /// Relabel so regime 1 is the one with higher stationary probability.
    fn with_canonical_labels(self) -> Self {
        match stationary_distribution(&self.transition) {
            Ok(pi) if pi[0] < pi[1] => self.swapped(),
            _ => self,
        }
    }

    fn swapped(&self) -> Self {
        MsModel {
            regimes: [self.regimes[1], self.regimes[0]],
            transition: [
                [self.transition[1][1], self.transition[1][0]],
                [self.transition[0][1], self.transition[0][0]],
            ],
        }
    }
}

/// Stationary distribution of a 2-state chain: `π T = π`, `Σπ = 1`.
/// For two states, `π_1 = T[2][1] / (T[1][2] + T[2][1])`.
pub fn stationary_distribution(transition: &[[f64; 2]; 2]) -> Result<[f64; 2]> {
    let leave_1 = transition[0][1];
    let leave_2 = transition[1][0];
    let total = leave_1 + leave_2;
    if total == 0.0 {
        return Err(Error::ReducibleChain);
    }
    Ok([leave_2 / total, leave_1 / total])
}

/// A fitted switching model with filtering output.
#[derive(Debug, Clone, Serialize)]
pub struct MsFitResult {
    pub model: MsModel,
    pub log_likelihood: f64,
    pub n: usize,
    /// Free parameters: 2×(ω, α, β) plus two transition entries.
    pub k: usize,
    pub stable_probabilities: [f64; 2],
    pub filtered_probabilities: Vec<(NaiveDate, [f64; 2])>,
    /// One-step-ahead regime variances at the end of the sample.
    pub next_variances: [f64; 2],
    pub converged: bool,
}

struct FilterOutput {
    log_likelihood: f64,
    filtered: Vec<[f64; 2]>,
    next_variances: [f64; 2],
}

const HALF_LN_2PI: f64 = 0.9189385332046727;

fn normal_log_density(r: f64, variance: f64) -> f64 {
    -HALF_LN_2PI - 0.5 * variance.ln() - r * r / (2.0 * variance)
}

/// Core filter. `floor_variances` is the optimizer-trial mode: variances
/// floored rather than rejected, degenerate mixtures pushed to −∞ instead of
/// erroring.
fn run_filter(
    model: &MsModel,
    returns: &ReturnSeries,
    initial: [f64; 2],
    floor_variances: bool,
) -> Result<FilterOutput> {
    let values = returns.values();
    let init = presample_variance(values);
    let t = model.transition();

    let mut variances = [0.0f64; 2];
    for (k, regime) in model.regimes().iter().enumerate() {
        variances[k] = regime.omega + (regime.alpha + regime.beta) * init;
    }

    let mut predicted = initial;
    let mut log_likelihood = 0.0f64;
    let mut filtered_path = Vec::with_capacity(values.len());

    for (index, &r) in values.iter().enumerate() {
        for v in variances.iter_mut() {
            if !v.is_finite() || (*v <= 0.0 && !floor_variances) {
                return Err(Error::NonPositiveVariance { index });
            }
            if floor_variances && *v < TRIAL_VARIANCE_FLOOR {
                *v = TRIAL_VARIANCE_FLOOR;
            }
        }
        // Log-sum-exp mixture of the two regime densities.
        let log_terms = [
            predicted[0].max(0.0).ln() + normal_log_density(r, variances[0]),
            predicted[1].max(0.0).ln() + normal_log_density(r, variances[1]),
        ];
        let max_term = log_terms[0].max(log_terms[1]);
        if !max_term.is_finite() {
            if floor_variances {
                return Ok(FilterOutput {
                    log_likelihood: f64::NEG_INFINITY,
                    filtered: filtered_path,
                    next_variances: variances,
                });
            }
            return Err(Error::NonPositiveVariance { index });
        }
        let log_mixture =
            max_term + ((log_terms[0] - max_term).exp() + (log_terms[1] - max_term).exp()).ln();
        log_likelihood += log_mixture;

        let filtered = [
            (log_terms[0] - log_mixture).exp(),
            (log_terms[1] - log_mixture).exp(),
        ];
        filtered_path.push(filtered);
        predicted = [
            filtered[0] * t[0][0] + filtered[1] * t[1][0],
            filtered[0] * t[0][1] + filtered[1] * t[1][1],
        ];

        for (k, regime) in model.regimes().iter().enumerate() {
            variances[k] = regime.omega + regime.alpha * r * r + regime.beta * variances[k];
        }
    }

    Ok(FilterOutput { log_likelihood, filtered: filtered_path, next_variances: variances })
}

/// Log-likelihood and filtered regime probabilities, with the filter started
/// from the stationary distribution of the transition matrix.
pub fn ms_log_likelihood(
    model: &MsModel,
    returns: &ReturnSeries,
) -> Result<(f64, Vec<[f64; 2]>)> {
    let initial = stationary_distribution(model.transition())?;
    ms_log_likelihood_with_init(model, returns, initial)
}

/// Filter variant with an explicit initial regime distribution (used for
/// absorbing chains, whose stationary distribution is not defined).
pub fn ms_log_likelihood_with_init(
    model: &MsModel,
    returns: &ReturnSeries,
    initial: [f64; 2],
) -> Result<(f64, Vec<[f64; 2]>)> {
    let sum = initial[0] + initial[1];
    if !(initial[0] >= 0.0 && initial[1] >= 0.0 && (sum - 1.0).abs() <= 1e-10) {
        return Err(Error::InvalidTransition(format!(
            "initial distribution must be a probability vector, got {initial:?}"
        )));
    }
    let output = run_filter(model, returns, initial, false)?;
    Ok((output.log_likelihood, output.filtered))
}

/// Maximum-likelihood fit of the two-regime model.
///
/// Multi-start: an identical-regime warm start taken from a one-regime
/// sgarch(1,1) fit (so the fitted likelihood can never fall below the
/// one-regime optimum), a separated-regime moment start, and seeded jitters
/// of the latter. Regime labels are canonicalized afterwards: regime 1 is
/// the one with higher stationary probability.
pub fn fit_ms(returns: &ReturnSeries, options: &FitOptions) -> Result<MsFitResult> {
    let n = returns.len();
    if n < 100 {
        return Err(Error::TooFewObservations { have: n, need: 100 });
    }
    let sample_variance = presample_variance(returns.values());
    if sample_variance <= 0.0 {
        return Err(Error::DegenerateSeries);
    }

    // u = [lnω₁, a₁, b₁, lnω₂, a₂, b₂, logit T₁₁, logit T₂₂]
    let to_model = |u: &[f64]| -> MsModel {
        let regime = |base: usize| -> RegimeParams {
            let w = crate::estimator::simplex_weights(&u[base + 1..base + 3]);
            RegimeParams {
                omega: u[base].clamp(-700.0, 50.0).exp(),
                alpha: w[0],
                beta: w[1],
            }
        };
        let stay_1 = 1.0 / (1.0 + (-u[6]).exp());
        let stay_2 = 1.0 / (1.0 + (-u[7]).exp());
        MsModel {
            regimes: [regime(0), regime(3)],
            transition: [[stay_1, 1.0 - stay_1], [1.0 - stay_2, stay_2]],
        }
    };

    let to_unconstrained = |model: &MsModel| -> Vec<f64> {
        let mut u = Vec::with_capacity(8);
        for regime in model.regimes() {
            u.push(regime.omega.max(1e-300).ln());
            u.extend(crate::estimator::simplex_raw(&[regime.alpha, regime.beta]));
        }
        for stay in [model.transition[0][0], model.transition[1][1]] {
            let p = stay.clamp(1e-9, 1.0 - 1e-9);
            u.push((p / (1.0 - p)).ln());
        }
        u
    };

    // Start A: identical regimes at the one-regime optimum.
    let warm = fit(Family::SGarch, 1, 1, returns, options)?;
    let warm_params = warm.model.params();
    let warm_regime = RegimeParams {
        omega: warm_params.omega,
        alpha: warm_params.alpha[0],
        beta: warm_params.beta[0],
    };
    let start_identical = MsModel {
        regimes: [warm_regime, warm_regime],
        transition: [[0.9, 0.1], [0.4, 0.6]],
    };

    // Start B: separated regimes around the sample variance.
    let start_separated = MsModel {
        regimes: [
            RegimeParams { omega: 0.5 * sample_variance * 0.05, alpha: 0.05, beta: 0.90 },
            RegimeParams { omega: 2.0 * sample_variance * 0.20, alpha: 0.10, beta: 0.70 },
        ],
        transition: [[0.95, 0.05], [0.10, 0.90]],
    };

    let mut starts: Vec<Vec<f64>> =
        vec![to_unconstrained(&start_identical), to_unconstrained(&start_separated)];
    let base = to_unconstrained(&start_separated);
    for seed in 3..=options.starts.max(2) as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        starts.push(
            base.iter().map(|v| v + 0.25 * rng.sample::<f64, _>(StandardNormal)).collect(),
        );
    }

    let mut objective = |u: &[f64]| -> f64 {
        let model = to_model(u);
        let Ok(initial) = stationary_distribution(model.transition()) else {
            return f64::INFINITY;
        };
        match run_filter(&model, returns, initial, true) {
            Ok(out) => -out.log_likelihood,
            Err(_) => f64::INFINITY,
        }
    };

    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for u_start in &starts {
        let simplex_budget = options.max_evals_per_start * 3 / 5;
        let rough = nelder_mead(&mut objective, u_start, 0.25, options.ftol, simplex_budget);
        let remaining = options.max_evals_per_start.saturating_sub(rough.evals);
        let polished = quasi_newton_polish(&mut objective, &rough.x, options.ftol, remaining);
        let (outcome, converged) = if polished.fx <= rough.fx {
            let c = polished.converged;
            (polished, c)
        } else {
            let c = rough.converged;
            (rough, c)
        };
        let replace = match &best {
            None => true,
            Some((fx, _, _)) => outcome.fx < *fx,
        };
        if replace {
            best = Some((outcome.fx, outcome.x, converged));
        }
    }

    let (_, u_best, converged) = best.expect("at least one start");
    let model = to_model(&u_best).with_canonical_labels();
    MsModel::new(model.regimes, model.transition)?; // re-validate the final point

    let stable = stationary_distribution(&model.transition)?;
    let output = run_filter(&model, returns, stable, false)?;
    let filtered_probabilities: Vec<(NaiveDate, [f64; 2])> =
        returns.dates().iter().copied().zip(output.filtered).collect();

    Ok(MsFitResult {
        model,
        log_likelihood: output.log_likelihood,
        n,
        k: 8,
        stable_probabilities: stable,
        filtered_probabilities,
        next_variances: output.next_variances,
        converged,
    })
}

/// Forecast the mixture variance: regime probabilities advance by the
/// transition matrix from the last filtered distribution, each regime's
/// variance iterates with `E[R²]` equal to its own current expected
/// variance, and the reported variance is the probability-weighted mixture.
pub fn ms_forecast(fit: &MsFitResult, horizon: usize) -> Result<VolForecastPath> {
    if horizon == 0 {
        return Err(Error::InvalidSpec("forecast horizon must be at least 1".into()));
    }
    let t = fit.model.transition();
    let mut probs = fit
        .filtered_probabilities
        .last()
        .map(|(_, p)| *p)
        .unwrap_or(fit.stable_probabilities);
    let mut variances = fit.next_variances;
    let mut mixture = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        probs = [
            probs[0] * t[0][0] + probs[1] * t[1][0],
            probs[0] * t[0][1] + probs[1] * t[1][1],
        ];
        mixture.push(probs[0] * variances[0] + probs[1] * variances[1]);
        for (v, regime) in variances.iter_mut().zip(fit.model.regimes()) {
            *v = regime.omega + (regime.alpha + regime.beta) * *v;
        }
    }
    let long_run = match (
        fit.model.regimes()[0].unconditional_variance(),
        fit.model.regimes()[1].unconditional_variance(),
    ) {
        (Some(v1), Some(v2)) => {
            Some(fit.stable_probabilities[0] * v1 + fit.stable_probabilities[1] * v2)
        }
        _ => None,
    };
    Ok(VolForecastPath::from_variances(mixture, long_run))
}

/// Simulate a return series from the switching model: the latent chain is
/// drawn from the seeded generator, both regime recursions evolve in
/// parallel, and the realized return uses the active regime's variance.
pub fn simulate_ms(model: &MsModel, n: usize, seed: u64) -> Result<ReturnSeries> {
    if n == 0 {
        return Err(Error::InvalidSpec("simulation length must be at least 1".into()));
    }
    let initial = stationary_distribution(model.transition())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut variances = [0.0f64; 2];
    for (k, regime) in model.regimes().iter().enumerate() {
        variances[k] = regime.unconditional_variance().unwrap_or(1e-4);
    }
    let mut state = if rng.random::<f64>() < initial[0] { 0usize } else { 1usize };

    let mut values = Vec::with_capacity(n);
    for index in 0..SIMULATION_BURN_IN + n {
        for v in &variances {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::NonPositiveVariance { index });
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        let r = variances[state].sqrt() * z;
        if index >= SIMULATION_BURN_IN {
            values.push(r);
        }
        let stay = model.transition()[state][state];
        if rng.random::<f64>() >= stay {
            state = 1 - state;
        }
        for (k, regime) in model.regimes().iter().enumerate() {
            variances[k] = regime.omega + regime.alpha * r * r + regime.beta * variances[k];
        }
    }
    ReturnSeries::from_values_at_epoch(values)
}

/// Equivalent one-regime model for an identical-regime pair (test helper and
/// warm-start bridge).
pub fn regime_as_garch(regime: &RegimeParams) -> Result<GarchModel> {
    GarchModel::new(
        Family::SGarch,
        1,
        1,
        ParamVector::symmetric(regime.omega, vec![regime.alpha], vec![regime.beta]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garch::{log_likelihood, simulate};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn table6_transition() -> [[f64; 2]; 2] {
        [[0.7721, 0.2279], [0.5804, 0.4196]]
    }

    fn example_model() -> MsModel {
        MsModel::new(
            [
                RegimeParams { omega: 2e-5, alpha: 0.0334, beta: 0.9084 },
                RegimeParams { omega: 2e-4, alpha: 0.0528, beta: 0.9319 },
            ],
            table6_transition(),
        )
        .unwrap()
    }

    #[test]
    fn stationary_distribution_cases() {
        let pi = stationary_distribution(&table6_transition()).unwrap();
        assert_abs_diff_eq!(pi[0], 0.7180502288754176, epsilon = 1e-12);
        assert_abs_diff_eq!(pi[1], 0.2819497711245824, epsilon = 1e-12);

        let symmetric = stationary_distribution(&[[0.8, 0.2], [0.2, 0.8]]).unwrap();
        assert_eq!(symmetric, [0.5, 0.5]);

        // πT = π solved by hand: π₁ = 0.3/(0.1+0.3).
        let hand = stationary_distribution(&[[0.9, 0.1], [0.3, 0.7]]).unwrap();
        assert_abs_diff_eq!(hand[0], 0.75, epsilon = 1e-15);

        assert!(matches!(
            stationary_distribution(&[[1.0, 0.0], [0.0, 1.0]]),
            Err(Error::ReducibleChain)
        ));
    }

    #[test]
    fn stationary_distribution_is_a_fixed_point() {
        for t in [table6_transition(), [[0.99, 0.01], [0.5, 0.5]], [[0.2, 0.8], [0.7, 0.3]]] {
            let pi = stationary_distribution(&t).unwrap();
            let pt = [pi[0] * t[0][0] + pi[1] * t[1][0], pi[0] * t[0][1] + pi[1] * t[1][1]];
            assert_abs_diff_eq!(pt[0], pi[0], epsilon = 1e-12);
            assert_abs_diff_eq!(pt[1], pi[1], epsilon = 1e-12);
            assert_abs_diff_eq!(pi[0] + pi[1], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn identical_regimes_collapse_to_one_regime_likelihood() {
        let regime = RegimeParams { omega: 1e-4, alpha: 0.0833, beta: 0.8644 };
        let model = MsModel::new([regime, regime], [[0.6, 0.4], [0.3, 0.7]]).unwrap();
        let plain = regime_as_garch(&regime).unwrap();
        let rets = simulate(&plain, 500, 12).unwrap();
        let (ms_ll, filtered) = ms_log_likelihood(&model, &rets).unwrap();
        let one_ll = log_likelihood(&plain, &rets).unwrap();
        assert_abs_diff_eq!(ms_ll, one_ll, epsilon = 1e-10);
        for probs in filtered {
            assert_abs_diff_eq!(probs[0] + probs[1], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn absorbing_chain_reduces_to_the_occupied_regime() {
        let regime_1 = RegimeParams { omega: 1e-4, alpha: 0.05, beta: 0.9 };
        let regime_2 = RegimeParams { omega: 9e-4, alpha: 0.20, beta: 0.5 };
        let model =
            MsModel::new([regime_1, regime_2], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let plain = regime_as_garch(&regime_1).unwrap();
        let rets = simulate(&plain, 300, 7).unwrap();
        let (ms_ll, _) = ms_log_likelihood_with_init(&model, &rets, [1.0, 0.0]).unwrap();
        let one_ll = log_likelihood(&plain, &rets).unwrap();
        assert_abs_diff_eq!(ms_ll, one_ll, epsilon = 1e-10);
    }

    /// Exhaustive 2^n path-enumeration likelihood; exact for the parallel
    /// (path-independent) recursion.
    fn enumeration_oracle(model: &MsModel, returns: &ReturnSeries) -> f64 {
        let values = returns.values();
        let n = values.len();
        assert!(n <= 12, "oracle is exponential in n");
        let init = presample_variance(values);
        let t = model.transition();
        let pi = stationary_distribution(t).unwrap();

        // Per-regime variance sequences, shared by all paths.
        let mut variances = vec![[0.0f64; 2]; n];
        for k in 0..2 {
            let regime = &model.regimes()[k];
            let mut v = regime.omega + (regime.alpha + regime.beta) * init;
            for (step, row) in variances.iter_mut().enumerate() {
                row[k] = v;
                let r = values[step];
                v = regime.omega + regime.alpha * r * r + regime.beta * v;
            }
        }

        let mut total = 0.0f64;
        for path in 0..(1usize << n) {
            let state = |step: usize| (path >> step) & 1;
            let mut log_term = pi[state(0)].ln();
            for step in 1..n {
                log_term += t[state(step - 1)][state(step)].ln();
            }
            for step in 0..n {
                log_term += normal_log_density(values[step], variances[step][state(step)]);
            }
            total += log_term.exp();
        }
        total.ln()
    }

    #[test]
    fn filter_matches_enumeration_oracle() {
        let model = example_model();
        let rets = simulate(&regime_as_garch(&model.regimes()[0]).unwrap(), 8, 3).unwrap();
        let (ll, _) = ms_log_likelihood(&model, &rets).unwrap();
        let oracle = enumeration_oracle(&model, &rets);
        assert_relative_eq!(ll, oracle, max_relative = 1e-12);
    }

    #[test]
    fn filter_matches_enumeration_oracle_across_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for trial in 0..25 {
            let stay_1: f64 = 0.5 + 0.49 * rng.random::<f64>();
            let stay_2: f64 = 0.2 + 0.7 * rng.random::<f64>();
            let model = MsModel::new(
                [
                    RegimeParams {
                        omega: 1e-5 + 1e-4 * rng.random::<f64>(),
                        alpha: 0.3 * rng.random::<f64>(),
                        beta: 0.6 * rng.random::<f64>(),
                    },
                    RegimeParams {
                        omega: 1e-4 + 1e-3 * rng.random::<f64>(),
                        alpha: 0.3 * rng.random::<f64>(),
                        beta: 0.6 * rng.random::<f64>(),
                    },
                ],
                [[stay_1, 1.0 - stay_1], [1.0 - stay_2, stay_2]],
            )
            .unwrap();
            let rets = simulate_ms(&model, 8, 500 + trial).unwrap();
            let (ll, _) = ms_log_likelihood(&model, &rets).unwrap();
            let oracle = enumeration_oracle(&model, &rets);
            assert_relative_eq!(ll, oracle, max_relative = 1e-9);
        }
    }

    #[test]
    fn label_switching_symmetry() {
        let model = example_model();
        let swapped = model.swapped();
        let rets = simulate_ms(&model, 200, 9).unwrap();
        let (ll_a, filtered_a) = ms_log_likelihood(&model, &rets).unwrap();
        let (ll_b, filtered_b) = ms_log_likelihood(&swapped, &rets).unwrap();
        assert_abs_diff_eq!(ll_a, ll_b, epsilon = 1e-10);
        for (a, b) in filtered_a.iter().zip(&filtered_b) {
            assert_abs_diff_eq!(a[0], b[1], epsilon = 1e-10);
        }
    }

    #[test]
    fn filtered_probabilities_are_proper(){
        let model = example_model();
        let rets = simulate_ms(&model, 400, 77).unwrap();
        let (_, filtered) = ms_log_likelihood(&model, &rets).unwrap();
        for probs in filtered {
            assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
            assert_abs_diff_eq!(probs[0] + probs[1], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fit_ms_nests_the_one_regime_fit() {
        let truth = regime_as_garch(&RegimeParams { omega: 1e-4, alpha: 0.0833, beta: 0.8644 })
            .unwrap();
        let rets = simulate(&truth, 600, 41).unwrap();
        let options = FitOptions::default();
        let one = fit(Family::SGarch, 1, 1, &rets, &options).unwrap();
        let ms = fit_ms(&rets, &options).unwrap();
        assert!(
            ms.log_likelihood >= one.log_likelihood - 1e-6,
            "ms {} < sgarch {}",
            ms.log_likelihood,
            one.log_likelihood
        );
        assert_eq!(ms.k, 8);
        // Canonical labels: regime 1 carries the larger stationary weight.
        assert!(ms.stable_probabilities[0] >= ms.stable_probabilities[1]);
    }

    #[test]
    fn fit_ms_recovers_well_separated_regimes() {
        // Regimes with a 4x variance ratio and persistent states.
        let truth = MsModel::new(
            [
                RegimeParams { omega: 0.25e-4, alpha: 0.05, beta: 0.70 },
                RegimeParams { omega: 4e-4, alpha: 0.05, beta: 0.70 },
            ],
            [[0.97, 0.03], [0.03, 0.97]],
        )
        .unwrap();
        let truth_vars = [
            truth.regimes()[0].unconditional_variance().unwrap(),
            truth.regimes()[1].unconditional_variance().unwrap(),
        ];
        let options = FitOptions { starts: 2, ..FitOptions::default() };
        let mut hits = 0;
        let runs = 20;
        for seed in 0..runs {
            let rets = simulate_ms(&truth, 1500, 900 + seed).unwrap();
            let Ok(fitted) = fit_ms(&rets, &options) else { continue };
            let mut vars = [
                fitted.model.regimes()[0].unconditional_variance().unwrap_or(f64::INFINITY),
                fitted.model.regimes()[1].unconditional_variance().unwrap_or(f64::INFINITY),
            ];
            vars.sort_by(f64::total_cmp);
            let mut expected = truth_vars;
            expected.sort_by(f64::total_cmp);
            let ok = vars
                .iter()
                .zip(&expected)
                .all(|(got, want)| (got - want).abs() <= 0.25 * want);
            if ok {
                hits += 1;
            }
        }
        assert!(hits * 10 >= runs * 8, "recovered {hits}/{runs}");
    }

    #[test]
    fn forecast_with_identical_regimes_matches_one_regime_forecast() {
        let regime = RegimeParams { omega: 1e-4, alpha: 0.0833, beta: 0.8644 };
        let model = MsModel::new([regime, regime], [[0.8, 0.2], [0.3, 0.7]]).unwrap();
        let plain = regime_as_garch(&regime).unwrap();
        let rets = simulate(&plain, 300, 15).unwrap();

        let stable = stationary_distribution(model.transition()).unwrap();
        let output = run_filter(&model, &rets, stable, false).unwrap();
        let fitres = MsFitResult {
            model: model.clone(),
            log_likelihood: output.log_likelihood,
            n: rets.len(),
            k: 8,
            stable_probabilities: stable,
            filtered_probabilities: rets.dates().iter().copied().zip(output.filtered).collect(),
            next_variances: output.next_variances,
            converged: true,
        };
        let ms_path = ms_forecast(&fitres, 50).unwrap();
        let one_path = crate::forecast::forecast_fixed(&plain, &rets, 50, 42).unwrap();
        for (a, b) in ms_path.steps.iter().zip(&one_path.steps) {
            assert_abs_diff_eq!(a.sigma2, b.sigma2, epsilon = 1e-10);
        }
    }

    #[test]
    fn forecast_converges_to_the_mixture_long_run() {
        let model = example_model();
        let rets = simulate_ms(&model, 400, 3).unwrap();
        let stable = stationary_distribution(model.transition()).unwrap();
        let output = run_filter(&model, &rets, stable, false).unwrap();
        let fitres = MsFitResult {
            model: model.clone(),
            log_likelihood: output.log_likelihood,
            n: rets.len(),
            k: 8,
            stable_probabilities: stable,
            filtered_probabilities: rets.dates().iter().copied().zip(output.filtered).collect(),
            next_variances: output.next_variances,
            converged: true,
        };
        let path = ms_forecast(&fitres, 3000).unwrap();
        let target = path.long_run.unwrap();
        let final_step = path.steps.last().unwrap();
        assert_abs_diff_eq!(final_step.sigma2, target, epsilon = 1e-6);
    }

    #[test]
    fn forecast_with_absorbing_identity_chain_follows_regime_one() {
        let regime_1 = RegimeParams { omega: 1e-4, alpha: 0.05, beta: 0.9 };
        let regime_2 = RegimeParams { omega: 9e-4, alpha: 0.2, beta: 0.5 };
        let model =
            MsModel::new([regime_1, regime_2], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let fitres = MsFitResult {
            model,
            log_likelihood: 0.0,
            n: 0,
            k: 8,
            stable_probabilities: [1.0, 0.0],
            filtered_probabilities: vec![(crate::ingest::epoch(), [1.0, 0.0])],
            next_variances: [4e-4, 2e-3],
            converged: true,
        };
        let path = ms_forecast(&fitres, 40).unwrap();
        // Regime-1-only recursion from the same starting variance.
        let mut v = 4e-4;
        for step in &path.steps {
            assert_abs_diff_eq!(step.sigma2, v, epsilon = 1e-15);
            v = 1e-4 + (0.05 + 0.9) * v;
        }
    }

    #[test]
    fn simulate_ms_is_deterministic_and_mixes_scales() {
        let model = example_model();
        let a = simulate_ms(&model, 100, 5).unwrap();
        let b = simulate_ms(&model, 100, 5).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn invalid_transition_rows_are_rejected() {
        let regime = RegimeParams { omega: 1e-4, alpha: 0.05, beta: 0.9 };
        assert!(matches!(
            MsModel::new([regime, regime], [[0.7, 0.2], [0.5, 0.5]]),
            Err(Error::InvalidTransition(_))
        ));
        assert!(matches!(
            MsModel::new([regime, regime], [[1.2, -0.2], [0.5, 0.5]]),
            Err(Error::InvalidTransition(_))
        ));
    }
}
