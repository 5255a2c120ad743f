//! Black-Scholes pricing, put-call parity, and implied-volatility inversion,
//! including the non-invertible quote statuses.
//!
//! ```bash
//! cargo run --example implied_volatility
//! ```

use volkit::options::{
    bs_price, implied_vol, parity_counterpart, IvStatus, OptionKind, PricingInputs,
};

fn main() -> volkit::Result<()> {
    let spot = 9767.60;
    let inputs = PricingInputs::new(spot, 10_000.0, 0.0, 0.5)?;

    let call = bs_price(&inputs, 0.9, OptionKind::Call);
    let put = bs_price(&inputs, 0.9, OptionKind::Put);
    println!("six-month 10000-strike quotes at σ = 0.90, spot {spot}:");
    println!("  call {call:.2}  put {put:.2}");
    println!("  parity counterpart of the call: {:.2}", parity_counterpart(call, &inputs, OptionKind::Call));

    let recovered = implied_vol(call, &inputs, OptionKind::Call);
    println!(
        "  inverted call price → status {}, σ {:.6}",
        recovered.status,
        recovered.sigma.unwrap_or(f64::NAN)
    );

    // Quotes that no volatility can explain come back as statuses, not errors.
    println!("\nquote pathology handling:");
    let deep_itm = PricingInputs::new(spot, 2_000.0, 0.0, 0.5)?;
    let below = implied_vol(deep_itm.discounted_intrinsic(OptionKind::Call) * 0.9, &deep_itm, OptionKind::Call);
    println!("  price below intrinsic      → {}", below.status);
    let above = implied_vol(spot, &inputs, OptionKind::Call);
    println!("  price at the spot bound    → {}", above.status);
    let stale = implied_vol(bs_price(&inputs, 1e-4, OptionKind::Call) * 0.5, &inputs, OptionKind::Call);
    println!("  price under the σ bracket  → {}", stale.status);
    assert_eq!(below.status, IvStatus::BelowIntrinsic);
    assert_eq!(above.status, IvStatus::AboveUpperBound);

    println!("\nimplied volatility across strikes (flat 0.9 world stays flat):");
    println!("  strike     call IV");
    for strike in [6_000.0, 8_000.0, 10_000.0, 12_000.0, 16_000.0] {
        let inp = PricingInputs::new(spot, strike, 0.0, 0.5)?;
        let price = bs_price(&inp, 0.9, OptionKind::Call);
        let iv = implied_vol(price, &inp, OptionKind::Call);
        println!("  {strike:<8}  {:.6}", iv.sigma.unwrap_or(f64::NAN));
    }
    Ok(())
}
