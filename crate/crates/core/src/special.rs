//! Scalar special functions: standard normal, chi-squared and chi tails, and the
//! regularized incomplete beta function with the hyperspherical sector fraction.
//!
//! Everything is evaluated from the regularized incomplete gamma function, so the
//! lower and upper tails are each available without cancellation. [`Probability`]
//! carries both, which matters when a risk bound sits within 1e-12 of one.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, ensure_finite, Result};

/// A probability together with its complement, each computed directly.
///
/// `value + complement == 1` up to rounding, but whichever one is tiny is
/// accurate to full relative precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probability {
    value: f64,
    complement: f64,
}

impl Probability {
    pub const ZERO: Probability = Probability {
        value: 0.0,
        complement: 1.0,
    };
    pub const ONE: Probability = Probability {
        value: 1.0,
        complement: 0.0,
    };

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(domain(format!("probability must lie in [0, 1], got {value}")));
        }
        Ok(Probability {
            value,
            complement: 1.0 - value,
        })
    }

    pub fn from_complement(complement: f64) -> Result<Self> {
        Ok(Probability::new(complement)?.flip())
    }

    /// Both tails computed independently; clamped into [0, 1].
    pub(crate) fn from_tails(value: f64, complement: f64) -> Self {
        Probability {
            value: value.clamp(0.0, 1.0),
            complement: complement.clamp(0.0, 1.0),
        }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn complement(self) -> f64 {
        self.complement
    }

    /// `1 − p` as a probability, swapping the stored tails.
    pub fn flip(self) -> Self {
        Probability {
            value: self.complement,
            complement: self.value,
        }
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value)
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Probability::new(v).map_err(serde::de::Error::custom)
    }
}

const EPS: f64 = 1e-17;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete gamma `(P(a, x), Q(a, x))`.
///
/// Series for `x < a + 1`, Lentz continued fraction otherwise; the tail that is
/// not computed directly is never the small one.
fn gamma_tails(a: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        let p = sum * log_prefactor.exp();
        (p, 1.0 - p)
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        let q = log_prefactor.exp() * h;
        (1.0 - q, q)
    }
}

/// Standard normal CDF `Φ_G(x)`.
pub fn std_normal_cdf(x: f64) -> Result<Probability> {
    if x.is_nan() {
        return Err(domain("normal CDF argument is NaN"));
    }
    ensure_finite(x, "normal CDF argument")?;
    // Φ(|x|) = ½ + ½·P(½, x²/2)
    let (p, q) = gamma_tails(0.5, 0.5 * x * x);
    let upper = Probability::from_tails(0.5 + 0.5 * p, 0.5 * q);
    Ok(if x >= 0.0 { upper } else { upper.flip() })
}

/// Standard normal quantile `Φ_G⁻¹(p)` for `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!(
            "normal quantile needs 0 < p < 1, got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // χ²₁ is the square of a standard normal: P(|Z| > z) = 2·min(p, 1 − p).
    let two_sided = 2.0 * p.min(1.0 - p);
    let z = chi2_inverse(Tail::Upper(two_sided), 1).sqrt();
    Ok(if p > 0.5 { z } else { -z })
}

fn check_dof(d: u32) -> Result<()> {
    if d == 0 {
        Err(domain("degrees of freedom must be at least 1"))
    } else {
        Ok(())
    }
}

/// Both tails of the chi-squared distribution at `x ≥ 0`.
fn chi2_tails(x: f64, d: u32) -> Probability {
    let (p, q) = gamma_tails(0.5 * d as f64, 0.5 * x);
    Probability::from_tails(p, q)
}

/// Chi-squared CDF `Φ_d(x)` with `d` degrees of freedom.
pub fn chi2_cdf(x: f64, d: u32) -> Result<Probability> {
    check_dof(d)?;
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("chi-squared argument must be nonnegative, got {x}")));
    }
    Ok(chi2_tails(x, d))
}

/// Chi-squared quantile `Φ_d⁻¹(p)` for `0 ≤ p < 1`.
pub fn chi2_quantile(p: f64, d: u32) -> Result<f64> {
    check_dof(d)?;
    if !(0.0..1.0).contains(&p) {
        return Err(domain(format!("chi-squared quantile needs 0 ≤ p < 1, got {p}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(chi2_inverse(Tail::Lower(p), d))
}

/// Chi tail `Ψ_d(r) = 1 − Φ_d(r²)` for `r ≥ 0`, and exactly 1 for `r < 0`.
pub fn psi(r: f64, d: u32) -> Result<Probability> {
    check_dof(d)?;
    if r.is_nan() {
        return Err(domain("Ψ_d argument is NaN"));
    }
    if r < 0.0 {
        return Ok(Probability::ONE);
    }
    Ok(chi2_tails(r * r, d).flip())
}

/// Inverse chi tail `Ψ_d⁻¹(β) = √Φ_d⁻¹(1 − β)` for `0 < β ≤ 1`.
pub fn psi_inv(beta: f64, d: u32) -> Result<f64> {
    check_dof(d)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(domain(format!("Ψ_d⁻¹ needs 0 < β ≤ 1, got {beta}")));
    }
    if beta == 1.0 {
        return Ok(0.0);
    }
    Ok(chi2_inverse(Tail::Upper(beta), d).sqrt())
}

/// `ΔΨ_d(a, b) = Ψ_d(a) − Ψ_d(b)` for `0 ≤ a ≤ b`, evaluated on whichever
/// chi-squared tail avoids cancellation.
pub(crate) fn psi_increment(a: f64, b: f64, d: u32) -> f64 {
    let lo = chi2_tails(a * a, d);
    let hi = chi2_tails(b * b, d);
    let diff = if hi.value() < 0.5 {
        hi.value() - lo.value()
    } else {
        lo.complement() - hi.complement()
    };
    diff.max(0.0)
}

#[derive(Clone, Copy, Debug)]
enum Tail {
    Lower(f64),
    Upper(f64),
}

/// Solves `P(d/2, x/2) = p` (or `Q = q`) for `x`, working on the smaller tail
/// in log space with a bracketed Newton iteration.
fn chi2_inverse(target: Tail, d: u32) -> f64 {
    let (lower, t) = match target {
        Tail::Lower(p) if p <= 0.5 => (true, p),
        Tail::Lower(p) => (false, 1.0 - p),
        Tail::Upper(q) if q <= 0.5 => (false, q),
        Tail::Upper(q) => (true, 1.0 - q),
    };
    let a = 0.5 * d as f64;
    let log_t = t.ln();
    let log_pdf = |x: f64| (a - 1.0) * x.ln() - 0.5 * x - a * std::f64::consts::LN_2 - ln_gamma(a);

    // g(x) = ln tail(x) − ln t, increasing on the lower side, decreasing on the upper.
    let residual = |x: f64| {
        let tails = chi2_tails(x, d);
        let tail = if lower { tails.value() } else { tails.complement() };
        (tail.ln() - log_t, tail)
    };

    let lower_prob = if lower { t } else { 1.0 - t };
    let mut x = initial_guess(lower_prob, lower.then_some(t), d);
    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    for _ in 0..400 {
        let (g, tail) = residual(x);
        if g == 0.0 {
            return x;
        }
        let too_small = if lower { g < 0.0 } else { g > 0.0 };
        if too_small {
            lo = x;
        } else {
            hi = x;
        }
        let slope = (log_pdf(x) - tail.ln()).exp() * if lower { 1.0 } else { -1.0 };
        let mut next = x - g / slope;
        if !next.is_finite() || next <= lo || next >= hi {
            next = if hi.is_infinite() {
                2.0 * x.max(1.0)
            } else if lo == 0.0 {
                0.5 * hi
            } else {
                0.5 * (lo + hi)
            };
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return next;
        }
        if hi.is_finite() && (hi - lo) <= 4.0 * f64::EPSILON * hi {
            return 0.5 * (lo + hi);
        }
        x = next;
    }
    x
}

/// Wilson–Hilferty start, replaced by the small-argument asymptote
/// `P ≈ (x/2)^a / Γ(a+1)` deep in the lower tail.
fn initial_guess(lower_prob: f64, small_lower: Option<f64>, d: u32) -> f64 {
    let k = d as f64;
    let z = rough_normal_quantile(lower_prob);
    let h = 2.0 / (9.0 * k);
    let wh = k * (1.0 - h + z * h.sqrt()).powi(3);
    if let Some(p) = small_lower {
        let a = 0.5 * k;
        let asym = 2.0 * ((p.ln() + ln_gamma(a + 1.0)) / a).exp();
        if wh <= 0.0 || p < 0.05 {
            return asym.max(f64::MIN_POSITIVE);
        }
    }
    wh.max(1e-3)
}

/// Abramowitz & Stegun 26.2.23; only used to seed iterations.
fn rough_normal_quantile(p: f64) -> f64 {
    let (q, sign) = if p < 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let q = q.max(1e-300);
    let t = (-2.0 * q.ln()).sqrt();
    let num = 2.515_517 + 0.802_853 * t + 0.010_328 * t * t;
    let den = 1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t;
    sign * (t - num / den)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!(
            "incomplete beta parameters must be positive, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("incomplete beta argument must lie in [0, 1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(inc_beta_split(x, 1.0 - x, a, b))
}

/// `I_x(a, b)` with `y = 1 − x` supplied by the caller, so that an accurate
/// complement survives when `x` rounds towards 1.
fn inc_beta_split(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let log_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * y.ln();
    let front = log_front.exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, y) / b
    };
    value.clamp(0.0, 1.0)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Fraction of a `d`-ball occupied by the sector (cone) of half-angle `θ`,
/// doubled: `𝓘(cos θ) = I_{sin²θ}((d−1)/2, ½)`.
///
/// The sector itself holds `½·𝓘(cos θ)` of the ball, so `𝓘(0) = 1` (half-space)
/// and `𝓘(1) = 0` (degenerate cone).
pub fn sector_fraction(c: f64, d: u32) -> Result<f64> {
    if d < 2 {
        return Err(domain(format!("sector fraction needs d ≥ 2, got {d}")));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(domain(format!("sector cosine must lie in [0, 1], got {c}")));
    }
    // sin²θ = (1 − c)(1 + c) keeps precision near c = 1, cos²θ near c = 0
    let sin2 = ((1.0 - c) * (1.0 + c)).clamp(0.0, 1.0);
    Ok(inc_beta_split(sin2, c * c, 0.5 * (d as f64 - 1.0), 0.5))
}
