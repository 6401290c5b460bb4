//! Two-significant-figure display of probabilities and factors.

use ccrisk::Probability;

/// `x` to two significant figures; plain decimals in `[0.1, 1000)`,
/// scientific otherwise.
pub fn sig2(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.1e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (0.1..1000.0).contains(&mag) {
        let decimals = (1 - mag.log10().floor() as i32).max(0) as usize;
        format!("{rounded:.decimals$}")
    } else {
        format!("{rounded:.1e}")
    }
}

/// A probability as a percentage; values within 1 % of certainty are shown
/// as `100-x` so the distance to 1 stays visible.
pub fn percent(p: Probability) -> String {
    let c = 100.0 * p.complement();
    if p.value() > 0.5 && c < 1.0 {
        format!("100-{}", sig2(c))
    } else {
        sig2(100.0 * p.value())
    }
}
