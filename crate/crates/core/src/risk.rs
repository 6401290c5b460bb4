//! Failure-risk estimators and their Monte-Carlo references.
//!
//! Every estimator returns an upper bound `β_T ≥ β_R` on the true failure risk
//! `β_R = 1 − P(y ⪯ 0)`. The multidimensional ones need `ȳ ⪯ 0`; when that fails
//! the estimate is reported as undefined rather than as an error.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::gaussian::{sorted_radii, GaussianVec};
use crate::linalg::{spectral_radius_sqrt, SymMatrix};
use crate::special::{psi, psi_increment, sector_fraction, std_normal_cdf, Probability};
use crate::stream::map_blocks;

/// Two-sided 95 % normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskMethod {
    /// `1 − Φ_G(−ȳ/σ)`, exact for scalar constraints.
    #[serde(rename = "exact_1d")]
    Exact1d,
    NakkaChung,
    /// Spectral-radius bound for norm constraints on the control.
    NormSpectral,
    Spectral,
    FirstOrder,
    DthOrder,
}

impl RiskMethod {
    pub fn name(self) -> &'static str {
        match self {
            RiskMethod::Exact1d => "exact_1d",
            RiskMethod::NakkaChung => "nakka_chung",
            RiskMethod::NormSpectral => "norm_spectral",
            RiskMethod::Spectral => "spectral",
            RiskMethod::FirstOrder => "first_order",
            RiskMethod::DthOrder => "dth_order",
        }
    }
}

/// A failure-risk bound; `value` is `None` when the method's existence
/// condition fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiskEstimate {
    pub method: RiskMethod,
    pub value: Option<Probability>,
}

impl RiskEstimate {
    fn defined(method: RiskMethod, value: Probability) -> Self {
        RiskEstimate {
            method,
            value: Some(value),
        }
    }

    fn undefined(method: RiskMethod) -> Self {
        RiskEstimate {
            method,
            value: None,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }

    /// The risk as a plain number, if defined.
    pub fn risk(&self) -> Option<f64> {
        self.value.map(Probability::value)
    }
}

impl Serialize for RiskEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RiskEstimate", 4)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("defined", &self.is_defined())?;
        st.serialize_field("value", &self.value.map(Probability::value))?;
        st.serialize_field("complement", &self.value.map(Probability::complement))?;
        st.end()
    }
}

fn require_scalar(g: &GaussianVec, what: &str) -> Result<()> {
    if g.dim() == 1 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} applies to scalar constraints, got dimension {}",
            g.dim()
        )))
    }
}

/// `β_T,L = 1 − Φ_G(−ȳ/√Σ_y)`, equal to the true risk.
pub fn risk_exact_1d(g: &GaussianVec) -> Result<RiskEstimate> {
    require_scalar(g, "the exact 1-D risk")?;
    let sigma = g.std_devs()[0];
    let p = std_normal_cdf(g.mean()[0] / sigma)?;
    Ok(RiskEstimate::defined(RiskMethod::Exact1d, p))
}

/// `β_T,NC = Σ_y / (Σ_y + ȳ²)`, defined for `ȳ ≤ 0`.
pub fn risk_nakka_chung(g: &GaussianVec) -> Result<RiskEstimate> {
    require_scalar(g, "the Nakka–Chung risk")?;
    let m = g.mean()[0];
    if m > 0.0 {
        return Ok(RiskEstimate::undefined(RiskMethod::NakkaChung));
    }
    let var = g.cov()[(0, 0)];
    let total = var + m * m;
    Ok(RiskEstimate::defined(
        RiskMethod::NakkaChung,
        Probability::from_tails(var / total, m * m / total),
    ))
}

/// Risk implied by the spectral-radius bound on `‖u‖₂ ≤ u_max`.
///
/// With `t = (‖ū‖ − u_max)/ρ(Σᵤ)`: `exp(−t²/2)` for `N_u ≤ 2`, and
/// `exp(−(t + √N_u)²/2)` for `N_u > 2` when `t + √N_u ≤ 0`; otherwise the
/// defining equation has no solution and the estimate is undefined.
pub fn risk_norm_spectral(u_mean: &[f64], u_cov: &SymMatrix, u_max: f64) -> Result<RiskEstimate> {
    if u_mean.len() != u_cov.dim() || u_mean.is_empty() {
        return Err(Error::ShapeMismatch(
            "control mean and covariance dimensions differ".into(),
        ));
    }
    let norm = u_mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm < u_max) {
        return Err(Error::Precondition(format!(
            "nominal control norm {norm} must be below u_max = {u_max}"
        )));
    }
    let rho = spectral_radius_sqrt(u_cov)?;
    if rho == 0.0 {
        return Err(domain("control covariance is zero"));
    }
    let t = (norm - u_max) / rho;
    let n_u = u_mean.len();
    let shifted = if n_u <= 2 { t } else { t + (n_u as f64).sqrt() };
    if shifted > 0.0 {
        return Ok(RiskEstimate::undefined(RiskMethod::NormSpectral));
    }
    let e = -0.5 * shifted * shifted;
    Ok(RiskEstimate::defined(
        RiskMethod::NormSpectral,
        Probability::from_tails(e.exp(), -e.exp_m1()),
    ))
}

/// `β_T,ρ = Ψ_d(min(−ȳ) / ρ(Σ_y))`.
pub fn risk_spectral(g: &GaussianVec) -> Result<RiskEstimate> {
    if !g.mean_nonpositive() {
        return Ok(RiskEstimate::undefined(RiskMethod::Spectral));
    }
    let rho = spectral_radius_sqrt(g.cov())?;
    let margin = g.mean().iter().map(|m| -m).fold(f64::INFINITY, f64::min);
    let value = psi(margin / rho, g.dim() as u32)?;
    Ok(RiskEstimate::defined(RiskMethod::Spectral, value))
}

/// `β_T,1 = Ψ_d(min r)`.
pub fn risk_first_order(g: &GaussianVec) -> Result<RiskEstimate> {
    if !g.mean_nonpositive() {
        return Ok(RiskEstimate::undefined(RiskMethod::FirstOrder));
    }
    let r_min = g
        .signed_mahalanobis()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let value = psi(r_min, g.dim() as u32)?;
    Ok(RiskEstimate::defined(RiskMethod::FirstOrder, value))
}

/// `β_T,d = 1 − Σᵢ ΔΨ_d(r̃ᵢ₋₁, r̃ᵢ) · max[0, 1 − ½ Σ_{j<i} 𝓘(r̃ⱼ/r̃ᵢ)]`.
///
/// Shell `i` of the Mahalanobis-transformed space keeps its probability mass
/// except for the sectors cut off by the `i − 1` closer constraint planes.
/// The value is accumulated from its nonnegative parts,
/// `Ψ_d(r̃_d) + Σᵢ ΔΨᵢ · min(1, ½ Σⱼ 𝓘)`, and the complement from the kept
/// mass, so neither tail suffers cancellation.
pub fn risk_dth_order(g: &GaussianVec) -> Result<RiskEstimate> {
    if !g.mean_nonpositive() {
        return Ok(RiskEstimate::undefined(RiskMethod::DthOrder));
    }
    let d = g.dim();
    let dof = d as u32;
    let radii = sorted_radii(&g.signed_mahalanobis()).radii;

    let mut excess = psi(radii[d], dof)?.value();
    let mut kept = 0.0;
    for i in 1..=d {
        let width = psi_increment(radii[i - 1], radii[i], dof);
        if width == 0.0 {
            continue;
        }
        let mut cut = 0.0;
        for &rj in &radii[1..i] {
            // zero radius: zero-width shell, ratio taken as 1
            let ratio = if radii[i] > 0.0 {
                (rj / radii[i]).clamp(0.0, 1.0)
            } else {
                1.0
            };
            cut += 0.5 * sector_fraction(ratio, dof)?;
            if cut >= 1.0 {
                break;
            }
        }
        let lost = cut.min(1.0);
        kept += width * (1.0 - lost);
        excess += width * lost;
    }

    // Ψ_d(r̃_d) ≤ β_T,d ≤ Ψ_d(r̃₁); clamp the round-off
    let first = psi(radii[1], dof)?;
    let value = Probability::from_tails(
        excess.min(first.value()),
        kept.max(first.complement()),
    );
    Ok(RiskEstimate::defined(RiskMethod::DthOrder, value))
}

/// Monte-Carlo estimate with its 95 % Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: Probability,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: u64,
    pub hits: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_counts(hits: u64, n: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("Monte-Carlo estimate needs at least one sample"));
        }
        if hits > n {
            return Err(domain("more hits than samples"));
        }
        let nf = n as f64;
        let p = hits as f64 / nf;
        let z2 = Z_95 * Z_95;
        let denom = 1.0 + z2 / nf;
        let center = (p + z2 / (2.0 * nf)) / denom;
        let half = Z_95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
        let estimate = Probability::from_tails(p, (n - hits) as f64 / nf);
        Ok(McEstimate {
            estimate,
            ci_low: (center - half).max(0.0).min(p),
            ci_high: (center + half).min(1.0).max(p),
            n_samples: n,
            hits,
            seed,
        })
    }

    pub fn value(&self) -> f64 {
        self.estimate.value()
    }

    /// Half the width of the confidence interval.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

/// Fraction of `n` seeded draws of `y` with at least one component above zero.
pub fn mc_risk(g: &GaussianVec, n: usize, seed: u64) -> Result<McEstimate> {
    if n == 0 {
        return Err(domain("Monte-Carlo risk needs at least one sample"));
    }
    let d = g.dim();
    let chol = g.cholesky();
    let mean = g.mean();
    let counts = map_blocks(n, seed, |rng, len| {
        let mut z = vec![0.0; d];
        let mut failures = 0u64;
        for _ in 0..len {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            // same arithmetic as GaussianVec::draw_into, with early exit
            let failed = (0..d).any(|i| {
                let s: f64 = chol.row(i).iter().zip(&z).map(|(a, b)| a * b).sum();
                s + mean[i] > 0.0
            });
            failures += failed as u64;
        }
        failures
    });
    McEstimate::from_counts(counts.into_iter().sum(), n as u64, seed)
}

/// Probability that a standard normal lies in the shell sector
/// `{r₁ < ‖z‖ ≤ r₂, ∠(z, axis) ≤ θ}`: `½ 𝓘(cos θ) ΔΨ_d(r₁, r₂)`.
pub fn sector_probability(d: u32, r1: f64, r2: f64, theta: f64) -> Result<f64> {
    check_sector(d, r1, r2, theta)?;
    Ok(0.5 * sector_fraction(theta.cos().clamp(0.0, 1.0), d)? * psi_increment(r1, r2, d))
}

fn check_sector(d: u32, r1: f64, r2: f64, theta: f64) -> Result<()> {
    if d < 2 {
        return Err(domain(format!("sector geometry needs d ≥ 2, got {d}")));
    }
    if !(r1 >= 0.0 && r2 >= r1) || r1.is_infinite() {
        return Err(domain(format!("need 0 ≤ r1 ≤ r2, got r1={r1}, r2={r2}")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(domain(format!("sector half-angle must lie in [0, π/2], got {theta}")));
    }
    Ok(())
}

/// Counts standard-normal draws falling in the shell sector by direct
/// geometric test.
pub fn mc_sector_probability(
    d: u32,
    r1: f64,
    r2: f64,
    axis: &[f64],
    theta: f64,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_sector(d, r1, r2, theta)?;
    if axis.len() != d as usize {
        return Err(Error::ShapeMismatch(format!(
            "axis has {} components, expected {d}",
            axis.len()
        )));
    }
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(domain(format!("axis must be a unit vector, has norm {norm}")));
    }
    if n == 0 {
        return Err(domain("Monte-Carlo estimate needs at least one sample"));
    }
    let cos_theta = theta.cos();
    let (r1_sq, r2_sq) = (r1 * r1, r2 * r2);
    let counts = map_blocks(n, seed, |rng, len| {
        let mut z = vec![0.0; d as usize];
        let mut hits = 0u64;
        for _ in 0..len {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            let sq: f64 = z.iter().map(|x| x * x).sum();
            if sq <= r1_sq || sq > r2_sq {
                continue;
            }
            let along: f64 = z.iter().zip(axis).map(|(a, b)| a * b).sum();
            if along >= sq.sqrt() * cos_theta {
                hits += 1;
            }
        }
        hits
    });
    McEstimate::from_counts(counts.into_iter().sum(), n as u64, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> GaussianVec {
        GaussianVec::new(
            vec![-2.0, -1.0],
            SymMatrix::from_rows(&[vec![1.1, -0.8], vec![-0.8, 1.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn exact_1d_examples() {
        let g = GaussianVec::scalar(0.0, 3.0).unwrap();
        assert_eq!(risk_exact_1d(&g).unwrap().risk(), Some(0.5));
        let g = GaussianVec::scalar(-2.0, 4.0).unwrap();
        assert!((risk_exact_1d(&g).unwrap().risk().unwrap() - 0.158_655_253_931_457).abs() < 1e-12);
        assert!(risk_exact_1d(&fig1()).is_err());
    }

    #[test]
    fn nakka_chung_examples() {
        let g = GaussianVec::scalar(0.0, 2.0).unwrap();
        assert_eq!(risk_nakka_chung(&g).unwrap().risk(), Some(1.0));
        let g = GaussianVec::scalar(-3.0, 9.0).unwrap();
        assert_eq!(risk_nakka_chung(&g).unwrap().risk(), Some(0.5));
        let g = GaussianVec::scalar(0.1, 1.0).unwrap();
        assert!(!risk_nakka_chung(&g).unwrap().is_defined());
    }

    #[test]
    fn norm_spectral_branches() {
        // N_u = 1, ‖ū‖ − u_max = −ρ
        let est = risk_norm_spectral(&[1.0], &SymMatrix::diag(&[0.25]), 1.5).unwrap();
        assert!((est.risk().unwrap() - (-0.5_f64).exp()).abs() < 1e-15);
        // N_u = 5 with t = −1: −1 + √5 > 0, no solution
        let est = risk_norm_spectral(&[1.0, 0.0, 0.0, 0.0, 0.0], &SymMatrix::identity(5), 2.0)
            .unwrap();
        assert!(!est.is_defined());
        assert!(risk_norm_spectral(&[3.0], &SymMatrix::identity(1), 2.0).is_err());
    }

    #[test]
    fn multidimensional_estimators_fig1() {
        let g = fig1();
        let lambda_max = 1.05 + (0.0025_f64 + 0.64).sqrt();
        let spectral = risk_spectral(&g).unwrap().risk().unwrap();
        assert!((spectral - (-0.5 / lambda_max).exp()).abs() < 1e-12);
        let first = risk_first_order(&g).unwrap().risk().unwrap();
        assert!((first - (-0.5_f64).exp()).abs() < 1e-15);
        let dth = risk_dth_order(&g).unwrap().risk().unwrap();
        assert!(dth < first && dth > 0.0);
    }

    #[test]
    fn method_names_match_serde() {
        for m in [
            RiskMethod::Exact1d,
            RiskMethod::NakkaChung,
            RiskMethod::NormSpectral,
            RiskMethod::Spectral,
            RiskMethod::FirstOrder,
            RiskMethod::DthOrder,
        ] {
            assert_eq!(serde_json::to_value(m).unwrap(), m.name());
        }
    }

    #[test]
    fn undefined_when_mean_positive() {
        let g = GaussianVec::new(vec![-1.0, 0.5], SymMatrix::identity(2)).unwrap();
        assert!(!risk_spectral(&g).unwrap().is_defined());
        assert!(!risk_first_order(&g).unwrap().is_defined());
        assert!(!risk_dth_order(&g).unwrap().is_defined());
        let json = serde_json::to_string(&risk_dth_order(&g).unwrap()).unwrap();
        assert_eq!(
            json,
            r#"{"method":"dth_order","defined":false,"value":null,"complement":null}"#
        );
    }

    #[test]
    fn zero_mean_gives_certain_failure_bound() {
        let g = GaussianVec::new(vec![0.0, 0.0, 0.0], SymMatrix::identity(3)).unwrap();
        for est in [risk_spectral(&g), risk_first_order(&g), risk_dth_order(&g)] {
            assert_eq!(est.unwrap().risk(), Some(1.0));
        }
    }

    #[test]
    fn equal_radii_collapse_to_first_shell() {
        for d in [2usize, 3, 7] {
            let a = 2.3;
            let g = GaussianVec::new(vec![-a; d], SymMatrix::identity(d)).unwrap();
            let dth = risk_dth_order(&g).unwrap().risk().unwrap();
            let expected = psi(a, d as u32).unwrap().value();
            assert!((dth - expected).abs() < 1e-15, "d={d}");
        }
    }

    #[test]
    fn dth_order_handles_zero_radius() {
        let g = GaussianVec::new(vec![0.0, -1.0, -2.0], SymMatrix::identity(3)).unwrap();
        let est = risk_dth_order(&g).unwrap().value.unwrap();
        assert!(est.value() <= 1.0 && est.value() >= psi(2.0, 3).unwrap().value());
        assert!(est.value().is_finite() && est.complement().is_finite());
    }

    #[test]
    fn wilson_interval_properties() {
        let m = McEstimate::from_counts(0, 1000, 1).unwrap();
        assert_eq!(m.ci_low, 0.0);
        assert!(m.ci_high > 0.0 && m.ci_high < 0.01);
        let m = McEstimate::from_counts(500, 1000, 1).unwrap();
        assert!(m.ci_low < 0.5 && m.ci_high > 0.5);
        assert!((m.half_width() - Z_95 * (0.25_f64 / 1000.0).sqrt()).abs() < 1e-4);
        assert!(McEstimate::from_counts(1, 0, 1).is_err());
    }

    #[test]
    fn mc_risk_is_seeded() {
        let g = fig1();
        let a = mc_risk(&g, 10_000, 9).unwrap();
        let b = mc_risk(&g, 10_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(mc_risk(&g, 0, 9).is_err());
    }

    #[test]
    fn mc_risk_agrees_with_sample() {
        let g = fig1();
        let n = 70_000;
        let draws = crate::gaussian::sample(&g, n, 3);
        let fails = draws.iter().filter(|y| y.iter().any(|&v| v > 0.0)).count();
        assert_eq!(mc_risk(&g, n, 3).unwrap().hits, fails as u64);
    }

    #[test]
    fn sector_edge_cases() {
        let axis = [1.0, 0.0];
        let m = mc_sector_probability(2, 0.0, f64::INFINITY, &axis, 0.0, 10_000, 1).unwrap();
        assert_eq!(m.hits, 0);
        let m = mc_sector_probability(2, 0.0, f64::INFINITY, &axis, std::f64::consts::FRAC_PI_2, 200_000, 1)
            .unwrap();
        assert!((m.value() - 0.5).abs() < 5.0 * m.half_width());
        assert_eq!(
            sector_probability(2, 0.0, f64::INFINITY, std::f64::consts::FRAC_PI_2).unwrap(),
            0.5
        );
        assert!(mc_sector_probability(2, 2.0, 1.0, &axis, 0.3, 10, 1).is_err());
        assert!(mc_sector_probability(2, 0.0, 1.0, &[2.0, 0.0], 0.3, 10, 1).is_err());
        assert!(mc_sector_probability(1, 0.0, 1.0, &[1.0], 0.3, 10, 1).is_err());
        assert!(mc_sector_probability(2, 0.0, 1.0, &axis, 2.0, 10, 1).is_err());
    }
}
