//! Log returns, descriptive statistics, time-series diagnostics, and rolling
//! historical volatility.
//!
//! Conventions, fixed across the module:
//! - reported standard deviations use the sample (N−1) form
//!   `s = sqrt(Σ(x−x̄)²/(N−1))`;
//! - skewness and kurtosis use population central moments
//!   `m_k = Σ(x−x̄)^k/n`, kurtosis reported raw (normal = 3);
//! - every test returns a [`TestResult`] whose `reject_at_5pct` flag is
//!   exactly `p_value < 0.05`;
//! - degenerate zero-variance inputs produce documented conventional results
//!   or explicit errors, never NaN.

use chrono::NaiveDate;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::ingest::PriceSeries;
use crate::ols::ols;

/// A dated sequence of log returns: strictly increasing dates, finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::TooFewObservations { have: 0, need: 1 });
        }
        for pair in observations.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidSpec(format!(
                    "dates must be strictly increasing, got {} after {}",
                    pair[1].0, pair[0].0
                )));
            }
        }
        if observations.iter().any(|(_, r)| !r.is_finite()) {
            return Err(Error::InvalidSpec("non-finite return".into()));
        }
        let (dates, values) = observations.into_iter().unzip();
        Ok(ReturnSeries { dates, values })
    }

    /// Synthetic series with consecutive daily dates from a fixed anchor.
    pub fn from_values_at_epoch(values: Vec<f64>) -> Result<Self> {
        let start = crate::ingest::epoch();
        let observations = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (start + chrono::Days::new(i as u64), v))
            .collect();
        ReturnSeries::new(observations)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    pub fn last_date(&self) -> NaiveDate {
        *self.dates.last().expect("non-empty")
    }

    /// Append one observation; the date must extend the series.
    pub(crate) fn push(&mut self, date: NaiveDate, value: f64) {
        debug_assert!(date > self.last_date());
        debug_assert!(value.is_finite());
        self.dates.push(date);
        self.values.push(value);
    }
}

/// Log returns `r_t = ln(p_t / p_{t−1})`, each dated at the later price.
pub fn log_returns(series: &PriceSeries) -> ReturnSeries {
    let obs = series.observations();
    let observations: Vec<(NaiveDate, f64)> =
        obs.windows(2).map(|w| (w[1].0, (w[1].1 / w[0].1).ln())).collect();
    ReturnSeries::new(observations).expect("valid price series yields valid returns")
}

/// Descriptive statistics of a return distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub st_deviation: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub min: f64,
    pub max: f64,
    pub jarque_bera: f64,
}

/// Outcome of a hypothesis test at the fixed 5% reference level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df_or_lags: usize,
    pub reject_at_5pct: bool,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64, df_or_lags: usize) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult { statistic, p_value, df_or_lags, reject_at_5pct: p_value < 0.05 }
    }

    /// Build a result from an externally computed statistic and p-value,
    /// keeping the rejection flag consistent with the p-value.
    pub(crate) fn from_raw(statistic: f64, p_value: f64, df_or_lags: usize) -> Self {
        TestResult::new(statistic, p_value, df_or_lags)
    }
}

/// Rolling daily-volatility series with the window it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct VolSeries {
    points: Vec<(NaiveDate, f64)>,
    window: usize,
}

impl VolSeries {
    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn last_sigma(&self) -> f64 {
        self.points.last().expect("non-empty").1
    }
}

struct Moments {
    mean: f64,
    /// Population central moments m2, m3, m4 (divide-by-n).
    m2: f64,
    m3: f64,
    m4: f64,
}

fn central_moments(values: &[f64]) -> Moments {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    Moments { mean, m2: m2 / n, m3: m3 / n, m4: m4 / n }
}

/// Jarque-Bera statistic from sample shape: `n/6·(S² + (K−3)²/4)` with raw
/// (non-excess) kurtosis.
pub fn jarque_bera_statistic(n: usize, skewness: f64, kurtosis: f64) -> f64 {
    let excess = kurtosis - 3.0;
    n as f64 / 6.0 * (skewness * skewness + excess * excess / 4.0)
}

/// Moment summary of a return series.
///
/// Zero-variance input is reported with the normal reference shape
/// (skewness 0, kurtosis 3, Jarque-Bera 0) rather than NaN.
pub fn describe(returns: &ReturnSeries) -> Result<SummaryStats> {
    let values = returns.values();
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewObservations { have: n, need: 2 });
    }
    let moments = central_moments(values);
    let (skewness, kurtosis) = if moments.m2 > 0.0 {
        (moments.m3 / moments.m2.powf(1.5), moments.m4 / (moments.m2 * moments.m2))
    } else {
        (0.0, 3.0)
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Ok(SummaryStats {
        n,
        mean: moments.mean,
        median,
        st_deviation: (moments.m2 * n as f64 / (n as f64 - 1.0)).sqrt(),
        skewness,
        kurtosis,
        min: sorted[0],
        max: sorted[n - 1],
        jarque_bera: jarque_bera_statistic(n, skewness, kurtosis),
    })
}

/// Jarque-Bera normality test: `JB = n/6·(S² + (K−3)²/4)`, p-value from χ²(2).
pub fn jarque_bera(returns: &ReturnSeries) -> Result<TestResult> {
    if returns.len() < 4 {
        return Err(Error::TooFewObservations { have: returns.len(), need: 4 });
    }
    let summary = describe(returns)?;
    let jb = summary.jarque_bera;
    let chi2 = ChiSquared::new(2.0).expect("valid df");
    Ok(TestResult::new(jb, 1.0 - chi2.cdf(jb), 2))
}

/// Two-sided t-test of zero mean: `t = x̄/(s/√n)`, Student-t with n−1 df.
///
/// An all-zero series is reported as (statistic 0, p 1); a constant nonzero
/// series has no finite statistic and errors with `ZeroVariance`.
pub fn t_test_zero_mean(returns: &ReturnSeries) -> Result<TestResult> {
    let values = returns.values();
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewObservations { have: n, need: 2 });
    }
    let df = n - 1;
    let moments = central_moments(values);
    if moments.m2 == 0.0 {
        if moments.mean == 0.0 {
            return Ok(TestResult::new(0.0, 1.0, df));
        }
        return Err(Error::ZeroVariance);
    }
    let s = (moments.m2 * n as f64 / (n as f64 - 1.0)).sqrt();
    let t = moments.mean / (s / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("valid df");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(TestResult::new(t, p, df))
}

/// Dickey-Fuller critical values for the constant, no-trend case
/// (lower and upper tail quantiles of the τ_μ distribution by sample size).
const DF_PROBS: [f64; 8] = [0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99];
const DF_ROWS: [(f64, [f64; 8]); 6] = [
    (25.0, [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72]),
    (50.0, [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66]),
    (100.0, [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63]),
    (250.0, [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62]),
    (500.0, [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61]),
    (f64::INFINITY, [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60]),
];

/// Table quantiles at effective sample size `n`, linear in 1/n.
fn df_quantiles(n: usize) -> [f64; 8] {
    let inv_n = 1.0 / n as f64;
    // Rows are ordered by n ascending, i.e. by 1/n descending.
    let mut lower = &DF_ROWS[0];
    let mut upper = &DF_ROWS[DF_ROWS.len() - 1];
    for pair in DF_ROWS.windows(2) {
        let (lo_n, hi_n) = (pair[0].0, pair[1].0);
        if n as f64 >= lo_n && n as f64 <= hi_n {
            lower = &pair[0];
            upper = &pair[1];
            break;
        }
    }
    if (n as f64) < DF_ROWS[0].0 {
        return DF_ROWS[0].1;
    }
    let (inv_lo, inv_hi) = (1.0 / lower.0, 1.0 / upper.0); // inv_hi <= inv_n <= inv_lo
    let weight = if inv_lo > inv_hi { (inv_lo - inv_n) / (inv_lo - inv_hi) } else { 0.0 };
    let mut out = [0.0; 8];
    for i in 0..8 {
        out[i] = lower.1[i] + weight * (upper.1[i] - lower.1[i]);
    }
    out
}

/// Lower-tail probability of `stat` under the tabulated distribution,
/// clamped to the tabulated range [0.01, 0.99].
fn df_p_value(stat: f64, n: usize) -> f64 {
    let quantiles = df_quantiles(n);
    if stat <= quantiles[0] {
        return DF_PROBS[0];
    }
    if stat >= quantiles[7] {
        return DF_PROBS[7];
    }
    for i in 0..7 {
        if stat <= quantiles[i + 1] {
            let span = quantiles[i + 1] - quantiles[i];
            let w = if span > 0.0 { (stat - quantiles[i]) / span } else { 0.0 };
            return DF_PROBS[i] + w * (DF_PROBS[i + 1] - DF_PROBS[i]);
        }
    }
    DF_PROBS[7]
}

/// Augmented Dickey-Fuller unit-root test with constant, no trend:
/// `Δx_t = c + ρ·x_{t−1} + Σ φ_i Δx_{t−i} + e_t`; the statistic is the
/// t-ratio of ρ and the p-value interpolates the embedded τ_μ table.
pub fn adf_test(returns: &ReturnSeries, lags: usize) -> Result<TestResult> {
    let x = returns.values();
    let n = x.len();
    if n < lags + 10 {
        return Err(Error::TooFewObservations { have: n, need: lags + 10 });
    }
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    // Regression rows are t = lags+1 .. n-1 (0-based indices into x).
    let mut y = Vec::new();
    let mut rows = Vec::new();
    for t in (lags + 1)..n {
        y.push(diffs[t - 1]);
        let mut row = Vec::with_capacity(lags + 2);
        row.push(1.0);
        row.push(x[t - 1]);
        for i in 1..=lags {
            row.push(diffs[t - 1 - i]);
        }
        rows.push(row);
    }
    let fit = ols(&y, &rows)?;
    if fit.std_errors[1] == 0.0 {
        return Err(Error::SingularRegression);
    }
    let stat = fit.coefficients[1] / fit.std_errors[1];
    let p = df_p_value(stat, fit.nobs);
    Ok(TestResult::new(stat, p, lags))
}

/// Engle's ARCH-LM test: regress `r²_t` on a constant and `q` of its lags;
/// the statistic is `m·R²` (m regression observations), p-value from χ²(q).
pub fn arch_lm_test(returns: &ReturnSeries, q: usize) -> Result<TestResult> {
    let n = returns.len();
    if q == 0 {
        return Err(Error::InvalidSpec("lag count must be at least 1".into()));
    }
    if n < q + 10 || n - q <= q + 3 {
        return Err(Error::TooFewObservations { have: n, need: (q + 10).max(2 * q + 4) });
    }
    let squared: Vec<f64> = returns.values().iter().map(|r| r * r).collect();
    let mut y = Vec::new();
    let mut rows = Vec::new();
    for t in q..n {
        y.push(squared[t]);
        let mut row = Vec::with_capacity(q + 1);
        row.push(1.0);
        for i in 1..=q {
            row.push(squared[t - i]);
        }
        rows.push(row);
    }
    let fit = ols(&y, &rows)?;
    let stat = fit.nobs as f64 * fit.r_squared;
    let chi2 = ChiSquared::new(q as f64).expect("valid df");
    Ok(TestResult::new(stat, 1.0 - chi2.cdf(stat.max(0.0)), q))
}

/// Ljung-Box portmanteau test on squared returns:
/// `Q = n(n+2)·Σ_k ρ̂_k²/(n−k)`, p-value from χ²(lags).
pub fn ljung_box_squared(returns: &ReturnSeries, lags: usize) -> Result<TestResult> {
    let n = returns.len();
    if lags == 0 {
        return Err(Error::InvalidSpec("lag count must be at least 1".into()));
    }
    if n <= lags {
        return Err(Error::TooFewObservations { have: n, need: lags + 1 });
    }
    let squared: Vec<f64> = returns.values().iter().map(|r| r * r).collect();
    let mean = squared.iter().sum::<f64>() / n as f64;
    let denom: f64 = squared.iter().map(|v| (v - mean) * (v - mean)).sum();
    if denom == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut q_stat = 0.0;
    for k in 1..=lags {
        let num: f64 =
            (k..n).map(|t| (squared[t] - mean) * (squared[t - k] - mean)).sum();
        let rho = num / denom;
        q_stat += rho * rho / (n - k) as f64;
    }
    q_stat *= n as f64 * (n as f64 + 2.0);
    let chi2 = ChiSquared::new(lags as f64).expect("valid df");
    Ok(TestResult::new(q_stat, 1.0 - chi2.cdf(q_stat), lags))
}

/// Trailing-window mean and sample standard deviation, one point per date
/// from the window-th observation onward.
pub fn rolling_moments(
    returns: &ReturnSeries,
    window: usize,
) -> Result<Vec<(NaiveDate, f64, f64)>> {
    if window < 2 {
        return Err(Error::InvalidSpec(format!("window must be at least 2, got {window}")));
    }
    if returns.len() < window {
        return Err(Error::WindowTooLarge { window, len: returns.len() });
    }
    let values = returns.values();
    let dates = returns.dates();
    let mut out = Vec::with_capacity(values.len() - window + 1);
    for end in window..=values.len() {
        let slice = &values[end - window..end];
        let mean = slice.iter().sum::<f64>() / window as f64;
        let ss: f64 = slice.iter().map(|v| (v - mean) * (v - mean)).sum();
        out.push((dates[end - 1], mean, (ss / (window as f64 - 1.0)).sqrt()));
    }
    Ok(out)
}

/// Rolling historical volatility: the trailing-window sample standard
/// deviation `s = sqrt(Σ(x−x̄)²/(N−1))`, stamped on the window's last date.
pub fn historical_volatility(returns: &ReturnSeries, window: usize) -> Result<VolSeries> {
    let moments = rolling_moments(returns, window)?;
    Ok(VolSeries { points: moments.into_iter().map(|(d, _, s)| (d, s)).collect(), window })
}

/// Square-root-of-time scaling of a daily volatility to a multi-day horizon.
pub fn scale_volatility(daily_sigma: f64, horizon_days: u32) -> f64 {
    daily_sigma * (horizon_days as f64).sqrt()
}
