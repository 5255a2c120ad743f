//! Black-Scholes pricing, put-call parity, and implied-volatility inversion.
//!
//! Pricing follows the standard lognormal model
//!
//! ```text
//! C = S·Φ(d1) − K·e^{−rτ}·Φ(d2),
//! d1 = [ln(S/K) + (r + σ²/2)·τ] / (σ·√τ),   d2 = d1 − σ·√τ
//! ```
//!
//! with the put obtained through parity `C − P = S − K·e^{−rτ}`. Implied
//! volatility inverts the price on the bracket `[1e-4, 10]` (annualized
//! 0.01%–1000%); quotes that violate the no-arbitrage bounds, or that no
//! volatility in the bracket can reach, are reported through a status code
//! rather than an error so sparse, illiquid chains stay representable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower end of the implied-volatility search bracket (annualized).
pub const SIGMA_MIN: f64 = 1e-4;
/// Upper end of the implied-volatility search bracket (annualized).
pub const SIGMA_MAX: f64 = 10.0;

/// Option exercise type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

impl fmt::Display for OptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptionKind::Call => write!(f, "call"),
            OptionKind::Put => write!(f, "put"),
        }
    }
}

impl FromStr for OptionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "call" => Ok(OptionKind::Call),
            "put" => Ok(OptionKind::Put),
            other => Err(format!("unknown option type {other:?}, expected call or put")),
        }
    }
}

/// Which side of a two-sided quote to price or invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuoteSide {
    Bid,
    Ask,
    Mid,
}

impl fmt::Display for QuoteSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuoteSide::Bid => write!(f, "bid"),
            QuoteSide::Ask => write!(f, "ask"),
            QuoteSide::Mid => write!(f, "mid"),
        }
    }
}

/// Market inputs to the pricing formula, volatility excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingInputs {
    /// Spot price of the underlying, USD.
    pub spot: f64,
    /// Strike, USD.
    pub strike: f64,
    /// Continuously compounded annual risk-free rate.
    pub rate: f64,
    /// Time to expiry as a year fraction (calendar days / 365).
    pub tau: f64,
}

impl PricingInputs {
    pub fn new(spot: f64, strike: f64, rate: f64, tau: f64) -> Result<Self> {
        if !(spot.is_finite() && spot > 0.0) {
            return Err(Error::InvalidSpec(format!("spot must be positive, got {spot}")));
        }
        if !(strike.is_finite() && strike > 0.0) {
            return Err(Error::InvalidSpec(format!("strike must be positive, got {strike}")));
        }
        if !rate.is_finite() {
            return Err(Error::InvalidSpec("rate must be finite".into()));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidSpec(format!("tau must be non-negative, got {tau}")));
        }
        Ok(Self { spot, strike, rate, tau })
    }

    /// Discounted strike `K·e^{−rτ}`.
    pub fn discounted_strike(&self) -> f64 {
        self.strike * (-self.rate * self.tau).exp()
    }

    /// No-arbitrage lower bound on the option price (discounted intrinsic value).
    pub fn discounted_intrinsic(&self, kind: OptionKind) -> f64 {
        match kind {
            OptionKind::Call => (self.spot - self.discounted_strike()).max(0.0),
            OptionKind::Put => (self.discounted_strike() - self.spot).max(0.0),
        }
    }

    /// No-arbitrage upper bound on the option price (σ → ∞ limit).
    pub fn upper_bound(&self, kind: OptionKind) -> f64 {
        match kind {
            OptionKind::Call => self.spot,
            OptionKind::Put => self.discounted_strike(),
        }
    }
}

/// Standard normal distribution function Φ(x), accurate to well below 1e-12.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Complementary error function by rational Chebyshev approximation
/// (Cody's three-interval scheme), good to a few ulps across the range.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 0.46875 {
        return 1.0 - erf_small(x);
    }
    if x > 26.6 {
        return 0.0; // exp(-x²) underflows
    }
    // exp(−x²) split as exp(−y²)·exp(−(x−y)(x+y)) with y = trunc(16x)/16
    // to keep the argument reduction exact.
    let y = (16.0 * x).trunc() / 16.0;
    let gauss = (-y * y).exp() * (-(x - y) * (x + y)).exp();
    if x <= 4.0 {
        const C: [f64; 9] = [
            5.64188496988670089e-1,
            8.88314979438837594e0,
            6.61191906371416295e1,
            2.98635138197400131e2,
            8.81952221241769090e2,
            1.71204761263407058e3,
            2.05107837782607147e3,
            1.23033935479799725e3,
            2.15311535474403846e-8,
        ];
        const D: [f64; 8] = [
            1.57449261107098347e1,
            1.17693950891312499e2,
            5.37181101862009858e2,
            1.62138957456669019e3,
            3.29079923573345963e3,
            4.36261909014324716e3,
            3.43936767414372164e3,
            1.23033935480374942e3,
        ];
        let mut num = C[8] * x;
        let mut den = x;
        for i in 0..7 {
            num = (num + C[i]) * x;
            den = (den + D[i]) * x;
        }
        gauss * (num + C[7]) / (den + D[7])
    } else {
        const P: [f64; 6] = [
            3.05326634961232344e-1,
            3.60344899949804439e-1,
            1.25781726111229246e-1,
            1.60837851487422766e-2,
            6.58749161529837803e-4,
            1.63153871373020978e-2,
        ];
        const Q: [f64; 5] = [
            2.56852019228982242e0,
            1.87295284992346047e0,
            5.27905102951428412e-1,
            6.05183413124413191e-2,
            2.33520497626869185e-3,
        ];
        const FRAC_1_SQRT_PI: f64 = 0.5641895835477562869;
        let inv_x2 = 1.0 / (x * x);
        let mut num = P[5] * inv_x2;
        let mut den = inv_x2;
        for i in 0..4 {
            num = (num + P[i]) * inv_x2;
            den = (den + Q[i]) * inv_x2;
        }
        let frac = inv_x2 * (num + P[4]) / (den + Q[4]);
        gauss * (FRAC_1_SQRT_PI - frac) / x
    }
}

/// Error function for |x| < 0.46875.
fn erf_small(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    let z = x * x;
    let mut num = A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    x * (num + A[3]) / (den + B[3])
}

/// Black-Scholes price for the given volatility.
///
/// Edge conventions: `tau = 0` returns the intrinsic value; `sigma = 0`
/// returns the discounted intrinsic value.
pub fn bs_price(inputs: &PricingInputs, sigma: f64, kind: OptionKind) -> f64 {
    let PricingInputs { spot, strike, rate: _, tau } = *inputs;
    if tau == 0.0 {
        return match kind {
            OptionKind::Call => (spot - strike).max(0.0),
            OptionKind::Put => (strike - spot).max(0.0),
        };
    }
    if sigma == 0.0 {
        return inputs.discounted_intrinsic(kind);
    }
    let vol = sigma * tau.sqrt();
    let d1 = ((spot / strike).ln() + (inputs.rate + 0.5 * sigma * sigma) * tau) / vol;
    let d2 = d1 - vol;
    let call = spot * norm_cdf(d1) - inputs.discounted_strike() * norm_cdf(d2);
    match kind {
        OptionKind::Call => call,
        // Parity keeps call/put prices exactly consistent.
        OptionKind::Put => call - spot + inputs.discounted_strike(),
    }
}

/// Price of the opposite option type implied by put-call parity,
/// `C − P = S − K·e^{−rτ}`.
pub fn parity_counterpart(price: f64, inputs: &PricingInputs, kind: OptionKind) -> f64 {
    let forward_gap = inputs.spot - inputs.discounted_strike();
    match kind {
        OptionKind::Call => price - forward_gap,
        OptionKind::Put => price + forward_gap,
    }
}

/// Outcome of an implied-volatility inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IvStatus {
    /// A volatility in the bracket reproduces the quote.
    Ok,
    /// The quote is below the discounted intrinsic value.
    BelowIntrinsic,
    /// The quote is at or above the σ → ∞ price bound.
    AboveUpperBound,
    /// The bracket contains no sign change (or iterations were exhausted).
    NoConvergence,
}

impl fmt::Display for IvStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IvStatus::Ok => "ok",
            IvStatus::BelowIntrinsic => "below_intrinsic",
            IvStatus::AboveUpperBound => "above_upper_bound",
            IvStatus::NoConvergence => "no_convergence",
        };
        write!(f, "{s}")
    }
}

/// Implied-volatility result; `sigma` is present exactly when `status` is `Ok`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvResult {
    pub status: IvStatus,
    pub sigma: Option<f64>,
}

impl IvResult {
    fn ok(sigma: f64) -> Self {
        IvResult { status: IvStatus::Ok, sigma: Some(sigma) }
    }

    fn fail(status: IvStatus) -> Self {
        IvResult { status, sigma: None }
    }
}

/// Annualized volatility that equates the model price to `market_price`.
///
/// Hybrid secant/bisection root search on `[SIGMA_MIN, SIGMA_MAX]`,
/// iterating until the bracket is narrower than 1e-8. Non-invertible quotes
/// come back as status codes.
pub fn implied_vol(market_price: f64, inputs: &PricingInputs, kind: OptionKind) -> IvResult {
    if !(market_price.is_finite() && market_price >= 0.0) || inputs.tau <= 0.0 {
        return IvResult::fail(IvStatus::NoConvergence);
    }
    if market_price < inputs.discounted_intrinsic(kind) {
        return IvResult::fail(IvStatus::BelowIntrinsic);
    }
    if market_price >= inputs.upper_bound(kind) {
        return IvResult::fail(IvStatus::AboveUpperBound);
    }

    let f = |sigma: f64| bs_price(inputs, sigma, kind) - market_price;
    let (mut lo, mut hi) = (SIGMA_MIN, SIGMA_MAX);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return IvResult::ok(lo);
    }
    if fhi == 0.0 {
        return IvResult::ok(hi);
    }
    // bs_price is increasing in sigma, so a root exists iff f changes sign.
    if flo.signum() == fhi.signum() {
        return IvResult::fail(IvStatus::NoConvergence);
    }

    const MAX_ITER: usize = 200;
    const WIDTH_TOL: f64 = 1e-8;
    for iteration in 0..MAX_ITER {
        if hi - lo <= WIDTH_TOL {
            return IvResult::ok(0.5 * (lo + hi));
        }
        // Secant candidate on even iterations, forced bisection on odd ones:
        // the bisection steps guarantee the bracket halves at least every
        // other iteration, so the width criterion always terminates.
        let mut mid = if iteration % 2 == 0 {
            (lo * fhi - hi * flo) / (fhi - flo)
        } else {
            0.5 * (lo + hi)
        };
        if !mid.is_finite() || mid <= lo || mid >= hi {
            mid = 0.5 * (lo + hi);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return IvResult::ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    if hi - lo <= WIDTH_TOL {
        IvResult::ok(0.5 * (lo + hi))
    } else {
        IvResult::fail(IvStatus::NoConvergence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn inputs(spot: f64, strike: f64, rate: f64, tau: f64) -> PricingInputs {
        PricingInputs::new(spot, strike, rate, tau).unwrap()
    }

    /// Compensated Simpson quadrature; summands are assumed smooth.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        assert!(n % 2 == 0);
        let h = (b - a) / n as f64;
        let mut sum = 0.0f64;
        let mut carry = 0.0f64;
        let mut add = |v: f64| {
            let y = v - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        };
        add(f(a));
        add(f(b));
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            add(w * f(a + i as f64 * h));
        }
        sum * h / 3.0
    }

    /// Independent Φ oracle: Simpson quadrature of the normal density on [0, |x|].
    fn norm_cdf_oracle(x: f64) -> f64 {
        let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let half = simpson(density, 0.0, x.abs(), 2_000);
        if x >= 0.0 { 0.5 + half } else { 0.5 - half }
    }

    #[test]
    fn norm_cdf_at_zero_is_half() {
        assert_eq!(norm_cdf(0.0), 0.5);
    }

    #[test]
    fn norm_cdf_symmetry() {
        for x in [0.5, 1.0, 2.0, 5.0] {
            assert_abs_diff_eq!(norm_cdf(x) + norm_cdf(-x), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn norm_cdf_matches_quadrature_oracle() {
        for x in [-3.0, -1.0, -0.25, 0.7, 1.96, 2.5, 4.0] {
            assert_abs_diff_eq!(norm_cdf(x), norm_cdf_oracle(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn norm_cdf_matches_frozen_high_precision_values() {
        // 30-digit reference evaluations.
        let cases = [
            (-5.0, 2.8665157187919391167e-7),
            (-3.0, 0.0013498980316300945267),
            (-1.0, 0.15865525393145705141),
            (-0.25, 0.40129367431707627576),
            (0.7, 0.75803634777692698525),
            (1.0, 0.84134474606854294859),
            (1.96, 0.97500210485177956586),
            (2.0, 0.9772498680518207928),
            (2.5, 0.99379033467422386483),
            (4.0, 0.99996832875816688008),
            (5.0, 0.99999971334842812081),
        ];
        for (x, expected) in cases {
            assert_abs_diff_eq!(norm_cdf(x), expected, epsilon = 1e-15);
        }
    }

    /// Independent price oracle: risk-neutral expectation of the discounted
    /// payoff under the lognormal terminal law, by Simpson quadrature in z.
    /// Integration starts exactly at the payoff kink, where the integrand
    /// becomes smooth.
    fn bs_price_oracle(inp: &PricingInputs, sigma: f64, kind: OptionKind) -> f64 {
        let vol = sigma * inp.tau.sqrt();
        let kink = ((inp.strike / inp.spot).ln() - (inp.rate - 0.5 * sigma * sigma) * inp.tau) / vol;
        let payoff = |z: f64| {
            let st = inp.spot
                * ((inp.rate - 0.5 * sigma * sigma) * inp.tau + sigma * inp.tau.sqrt() * z).exp();
            let intrinsic = match kind {
                OptionKind::Call => st - inp.strike,
                OptionKind::Put => inp.strike - st,
            };
            intrinsic * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
        };
        let integral = match kind {
            OptionKind::Call => simpson(payoff, kink, kink + 16.0, 20_000),
            OptionKind::Put => simpson(payoff, kink - 16.0, kink, 20_000),
        };
        (-inp.rate * inp.tau).exp() * integral
    }

    #[test]
    fn bs_price_matches_quadrature_oracle() {
        let inp = inputs(100.0, 100.0, 0.05, 1.0);
        let call = bs_price(&inp, 0.2, OptionKind::Call);
        assert_relative_eq!(call, bs_price_oracle(&inp, 0.2, OptionKind::Call), epsilon = 1e-8);
        // Frozen oracle value.
        assert_abs_diff_eq!(call, 10.450583572185565, epsilon = 1e-9);
        let put = bs_price(&inp, 0.2, OptionKind::Put);
        assert_relative_eq!(put, bs_price_oracle(&inp, 0.2, OptionKind::Put), epsilon = 1e-7);
        assert_abs_diff_eq!(put, 5.573526022256971, epsilon = 1e-9);
    }

    #[test]
    fn forward_atm_call_equals_put() {
        let inp = inputs(100.0, 100.0, 0.0, 1.0);
        let c = bs_price(&inp, 0.2, OptionKind::Call);
        let p = bs_price(&inp, 0.2, OptionKind::Put);
        assert_abs_diff_eq!(c, p, epsilon = 1e-12);
    }

    #[test]
    fn zero_tau_returns_intrinsic() {
        let inp = inputs(110.0, 100.0, 0.05, 0.0);
        assert_eq!(bs_price(&inp, 0.3, OptionKind::Call), 10.0);
        assert_eq!(bs_price(&inp, 0.3, OptionKind::Put), 0.0);
    }

    #[test]
    fn zero_sigma_returns_discounted_intrinsic() {
        let inp = inputs(110.0, 100.0, 0.05, 1.0);
        let disc = 100.0 * (-0.05_f64).exp();
        assert_abs_diff_eq!(bs_price(&inp, 0.0, OptionKind::Call), 110.0 - disc, epsilon = 1e-12);
        assert_eq!(bs_price(&inp, 0.0, OptionKind::Put), 0.0);
    }

    #[test]
    fn parity_counterpart_matches_hand_arithmetic() {
        let inp = inputs(100.0, 100.0, 0.05, 1.0);
        let put = parity_counterpart(10.450583572185565, &inp, OptionKind::Call);
        assert_abs_diff_eq!(put, 5.573526022256971, epsilon = 1e-9);
        // Involution.
        let call = parity_counterpart(put, &inp, OptionKind::Put);
        assert_abs_diff_eq!(call, 10.450583572185565, epsilon = 1e-12);
        // r = 0, S = K: prices coincide.
        let flat = inputs(100.0, 100.0, 0.0, 0.5);
        assert_abs_diff_eq!(parity_counterpart(7.0, &flat, OptionKind::Call), 7.0, epsilon = 1e-12);
    }

    #[test]
    fn implied_vol_round_trip() {
        for &sigma in &[0.8] {
            for &moneyness in &[0.5, 1.0, 2.0] {
                for &tau in &[30.0 / 365.0, 180.0 / 365.0] {
                    for kind in [OptionKind::Call, OptionKind::Put] {
                        let inp = inputs(100.0, 100.0 / moneyness, 0.02, tau);
                        let price = bs_price(&inp, sigma, kind);
                        let iv = implied_vol(price, &inp, kind);
                        assert_eq!(iv.status, IvStatus::Ok, "m={moneyness} tau={tau} {kind}");
                        assert_abs_diff_eq!(iv.sigma.unwrap(), sigma, epsilon = 1e-7);
                    }
                }
            }
        }
    }

    #[test]
    fn implied_vol_below_intrinsic() {
        let inp = inputs(100.0, 50.0, 0.05, 0.5);
        let intrinsic = inp.discounted_intrinsic(OptionKind::Call);
        let iv = implied_vol(intrinsic * 0.9, &inp, OptionKind::Call);
        assert_eq!(iv.status, IvStatus::BelowIntrinsic);
        assert!(iv.sigma.is_none());
    }

    #[test]
    fn implied_vol_above_upper_bound() {
        let inp = inputs(100.0, 80.0, 0.0, 0.5);
        let iv = implied_vol(100.0, &inp, OptionKind::Call);
        assert_eq!(iv.status, IvStatus::AboveUpperBound);
        let iv_put = implied_vol(inp.discounted_strike(), &inp, OptionKind::Put);
        assert_eq!(iv_put.status, IvStatus::AboveUpperBound);
    }

    #[test]
    fn implied_vol_no_convergence_when_bracket_misses() {
        // Above intrinsic but below the sigma-min price: no sign change.
        let inp = inputs(100.0, 100.0, 0.0, 1.0);
        let p_min = bs_price(&inp, SIGMA_MIN, OptionKind::Call);
        let iv = implied_vol(p_min * 0.5, &inp, OptionKind::Call);
        assert_eq!(iv.status, IvStatus::NoConvergence);
    }

    #[test]
    fn bs_price_monotone_in_sigma() {
        let inp = inputs(120.0, 100.0, 0.03, 0.7);
        let mut last = bs_price(&inp, 0.01, OptionKind::Call);
        let mut sigma = 0.05;
        while sigma <= 3.0 {
            let price = bs_price(&inp, sigma, OptionKind::Call);
            assert!(price > last, "not increasing at sigma={sigma}");
            last = price;
            sigma += 0.05;
        }
    }

    #[test]
    fn bs_price_respects_bounds() {
        for &moneyness in &[0.2, 0.5, 1.0, 2.0, 5.0] {
            for &sigma in &[0.05, 0.5, 3.0] {
                let inp = inputs(100.0, 100.0 / moneyness, 0.04, 0.5);
                let c = bs_price(&inp, sigma, OptionKind::Call);
                assert!(c >= inp.discounted_intrinsic(OptionKind::Call) - 1e-12);
                assert!(c < inp.spot);
            }
        }
    }
}
