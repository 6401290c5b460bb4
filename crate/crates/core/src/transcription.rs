//! Deterministic transcriptions `ȳ + Δy(ȳ, Σ_y, β) ≤ 0` of the chance
//! constraint `P(y ⪯ 0) ≥ 1 − β`.
//!
//! Each sufficient condition is reported as a vector of margins (`≤ 0` means
//! satisfied) so that an optimizer can use the residuals directly.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_open_unit, Error, Result};
use crate::gaussian::GaussianVec;
use crate::linalg::{spectral_radius_sqrt, SymMatrix};
use crate::risk::risk_dth_order;
use crate::special::{psi_inv, std_normal_quantile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `[√(2 ln 1/β) + √N_u]·ρ(Σᵤ)` back-off on a control norm.
    NormHighdim,
    /// `√(2 ln 1/β)·ρ(Σᵤ)`, valid for `N_u ≤ 2`.
    NormLowdim,
    #[serde(rename = "linear_1d")]
    Linear1d,
    NakkaChung,
    SpectralRadius,
    FirstOrder,
    DthOrder,
}

impl Method {
    /// The three methods that apply to constraints of any dimension.
    pub const MULTIDIMENSIONAL: [Method; 3] =
        [Method::SpectralRadius, Method::FirstOrder, Method::DthOrder];

    pub fn name(self) -> &'static str {
        match self {
            Method::NormHighdim => "norm_highdim",
            Method::NormLowdim => "norm_lowdim",
            Method::Linear1d => "linear_1d",
            Method::NakkaChung => "nakka_chung",
            Method::SpectralRadius => "spectral_radius",
            Method::FirstOrder => "first_order",
            Method::DthOrder => "dth_order",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptionVerdict {
    pub method: Method,
    pub beta: f64,
    /// Transcribed left-hand sides; `≤ 0` means satisfied.
    pub margins: Vec<f64>,
    pub satisfied: bool,
}

impl TranscriptionVerdict {
    fn from_margins(method: Method, beta: f64, margins: Vec<f64>) -> Self {
        let satisfied = margins.iter().all(|&m| m <= 0.0);
        TranscriptionVerdict {
            method,
            beta,
            margins,
            satisfied,
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("spectral radius must be finite and nonnegative, got {rho}")))
    }
}

fn check_var(var: f64) -> Result<()> {
    if var > 0.0 && var.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("variance must be positive, got {var}")))
    }
}

pub fn bound_norm_highdim(beta: f64, n_u: usize, rho: f64) -> Result<f64> {
    ensure_open_unit(beta, "β")?;
    check_rho(rho)?;
    if n_u == 0 {
        return Err(Error::Domain("control dimension must be at least 1".into()));
    }
    Ok(((2.0 * (1.0 / beta).ln()).sqrt() + (n_u as f64).sqrt()) * rho)
}

pub fn bound_norm_lowdim(beta: f64, rho: f64) -> Result<f64> {
    ensure_open_unit(beta, "β")?;
    check_rho(rho)?;
    Ok((2.0 * (1.0 / beta).ln()).sqrt() * rho)
}

/// `Φ_G⁻¹(1 − β)·√Σ_y`, necessary and sufficient for scalar constraints.
pub fn bound_linear_1d(beta: f64, var_y: f64) -> Result<f64> {
    ensure_open_unit(beta, "β")?;
    check_var(var_y)?;
    // Φ⁻¹(1 − β) = −Φ⁻¹(β) without forming 1 − β
    Ok(-std_normal_quantile(beta)? * var_y.sqrt())
}

pub fn bound_nakka_chung(beta: f64, var_y: f64) -> Result<f64> {
    ensure_open_unit(beta, "β")?;
    check_var(var_y)?;
    Ok(((1.0 - beta) / beta).sqrt() * var_y.sqrt())
}

fn scalar_parts(g: &GaussianVec, method: Method) -> Result<(f64, f64)> {
    if g.dim() != 1 {
        return Err(Error::Precondition(format!(
            "{} applies to scalar constraints, got dimension {}",
            method.name(),
            g.dim()
        )));
    }
    Ok((g.mean()[0], g.cov()[(0, 0)]))
}

pub fn transcribe_linear_1d(g: &GaussianVec, beta: f64) -> Result<TranscriptionVerdict> {
    let (mean, var) = scalar_parts(g, Method::Linear1d)?;
    let margin = mean + bound_linear_1d(beta, var)?;
    Ok(TranscriptionVerdict::from_margins(Method::Linear1d, beta, vec![margin]))
}

pub fn transcribe_nakka_chung(g: &GaussianVec, beta: f64) -> Result<TranscriptionVerdict> {
    let (mean, var) = scalar_parts(g, Method::NakkaChung)?;
    let margin = mean + bound_nakka_chung(beta, var)?;
    Ok(TranscriptionVerdict::from_margins(Method::NakkaChung, beta, vec![margin]))
}

/// `‖ū‖ + Δ ≤ u_max`, with the sharper bound when `N_u ≤ 2`.
pub fn transcribe_norm(
    u_mean: &[f64],
    u_cov: &SymMatrix,
    u_max: f64,
    beta: f64,
) -> Result<TranscriptionVerdict> {
    if u_mean.len() != u_cov.dim() || u_mean.is_empty() {
        return Err(Error::ShapeMismatch(
            "control mean and covariance dimensions differ".into(),
        ));
    }
    let rho = spectral_radius_sqrt(u_cov)?;
    let norm = u_mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n_u = u_mean.len();
    let (method, bound) = if n_u <= 2 {
        (Method::NormLowdim, bound_norm_lowdim(beta, rho)?)
    } else {
        (Method::NormHighdim, bound_norm_highdim(beta, n_u, rho)?)
    };
    Ok(TranscriptionVerdict::from_margins(
        method,
        beta,
        vec![norm - u_max + bound],
    ))
}

/// `ȳᵢ + Ψ_d⁻¹(β)·ρ(Σ_y) ≤ 0` for every `i`.
pub fn transcribe_spectral_radius(g: &GaussianVec, beta: f64) -> Result<TranscriptionVerdict> {
    ensure_open_unit(beta, "β")?;
    let backoff = psi_inv(beta, g.dim() as u32)? * spectral_radius_sqrt(g.cov())?;
    let margins = g.mean().iter().map(|m| m + backoff).collect();
    Ok(TranscriptionVerdict::from_margins(Method::SpectralRadius, beta, margins))
}

/// `ȳ + Ψ_d⁻¹(β)·σ ⪯ 0`.
pub fn transcribe_first_order(g: &GaussianVec, beta: f64) -> Result<TranscriptionVerdict> {
    ensure_open_unit(beta, "β")?;
    let margins = quantile_vector(g, beta)?;
    Ok(TranscriptionVerdict::from_margins(Method::FirstOrder, beta, margins))
}

/// `ȳ + Ψ_d⁻¹(β)·σ`: `y` stays componentwise below it with probability at
/// least `1 − β`.
pub fn quantile_vector(g: &GaussianVec, beta: f64) -> Result<Vec<f64>> {
    let scale = psi_inv(beta, g.dim() as u32)?;
    Ok(g.mean()
        .iter()
        .zip(g.std_devs())
        .map(|(m, s)| m + scale * s)
        .collect())
}

/// d-th-order transcription: satisfied when `ȳ ⪯ 0`, some `ȳⱼ < 0`, and
/// `β_T,d ≤ β`.
///
/// The condition is boolean; `margins` carries `β_T,d − β` followed by the
/// mean, as diagnostics. An undefined `β_T,d` (mean not `⪯ 0`) is reported as 1.
pub fn transcribe_dth_order(g: &GaussianVec, beta: f64) -> Result<TranscriptionVerdict> {
    ensure_open_unit(beta, "β")?;
    let risk = risk_dth_order(g)?.risk().unwrap_or(1.0);
    let mut margins = Vec::with_capacity(g.dim() + 1);
    margins.push(risk - beta);
    margins.extend_from_slice(g.mean());
    let satisfied =
        g.mean_nonpositive() && g.mean().iter().any(|&m| m != 0.0) && risk <= beta;
    Ok(TranscriptionVerdict {
        method: Method::DthOrder,
        beta,
        margins,
        satisfied,
    })
}

/// Dispatches the methods that take a [`GaussianVec`] directly.
pub fn transcribe(method: Method, g: &GaussianVec, beta: f64) -> Result<TranscriptionVerdict> {
    match method {
        Method::Linear1d => transcribe_linear_1d(g, beta),
        Method::NakkaChung => transcribe_nakka_chung(g, beta),
        Method::SpectralRadius => transcribe_spectral_radius(g, beta),
        Method::FirstOrder => transcribe_first_order(g, beta),
        Method::DthOrder => transcribe_dth_order(g, beta),
        Method::NormHighdim | Method::NormLowdim => Err(Error::Precondition(format!(
            "{} needs the control mean and covariance, not a constraint distribution",
            method.name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::{risk_first_order, risk_spectral};
    use crate::special::psi;

    fn fig1() -> GaussianVec {
        GaussianVec::new(
            vec![-2.0, -1.0],
            SymMatrix::from_rows(&[vec![1.1, -0.8], vec![-0.8, 1.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn norm_bounds() {
        assert_eq!(bound_norm_highdim(0.3, 3, 0.0).unwrap(), 0.0);
        let b = bound_norm_highdim((-0.5_f64).exp(), 4, 1.0).unwrap();
        assert!((b - 3.0).abs() < 1e-15);
        assert_eq!(bound_norm_lowdim(0.3, 0.0).unwrap(), 0.0);
        assert!((bound_norm_lowdim((-2.0_f64).exp(), 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(bound_norm_lowdim(1.0 - 1e-15, 1.0).unwrap() < 1e-7);
        assert!(bound_norm_lowdim(0.0, 1.0).is_err());
        assert!(bound_norm_highdim(1.0, 2, 1.0).is_err());
    }

    #[test]
    fn scalar_bounds() {
        assert!(bound_linear_1d(0.5, 1.0).unwrap().abs() < 1e-15);
        assert!((bound_linear_1d(0.025, 1.0).unwrap() - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((bound_linear_1d(0.025, 4.0).unwrap() - 3.919_927_969_080_108).abs() < 1e-9);
        assert_eq!(bound_nakka_chung(0.5, 1.0).unwrap(), 1.0);
        assert!((bound_nakka_chung(0.1, 1.0).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(bound_nakka_chung(0.5, 9.0).unwrap(), 3.0);
        assert!(bound_nakka_chung(1.0, 1.0).is_err());
    }

    #[test]
    fn zero_mean_never_satisfied() {
        let g = GaussianVec::new(vec![0.0, 0.0], SymMatrix::identity(2)).unwrap();
        for m in Method::MULTIDIMENSIONAL {
            let v = transcribe(m, &g, 0.9).unwrap();
            assert!(!v.satisfied, "{m:?}");
        }
        assert!(transcribe_spectral_radius(&g, 0.9).unwrap().margins.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn spectral_radius_is_tight_at_its_risk() {
        let g = fig1();
        let beta = risk_spectral(&g).unwrap().risk().unwrap();
        let v = transcribe_spectral_radius(&g, beta).unwrap();
        let max = v.margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(max.abs() < 1e-12, "max margin {max}");

        let g = GaussianVec::scalar(-5.0, 1.0).unwrap();
        let v = transcribe_spectral_radius(&g, psi(5.0, 1).unwrap().value()).unwrap();
        assert!(v.margins[0].abs() < 1e-12);
    }

    #[test]
    fn first_order_boundary() {
        let g = fig1();
        let beta = risk_first_order(&g).unwrap().risk().unwrap();
        assert!((beta - (-0.5_f64).exp()).abs() < 1e-15);
        let v = transcribe_first_order(&g, beta).unwrap();
        assert!(v.margins[1].abs() < 1e-12);
        assert!(v.margins[0] < 0.0);

        let g = GaussianVec::new(vec![0.1, -5.0], SymMatrix::identity(2)).unwrap();
        assert!(!transcribe_first_order(&g, 0.999).unwrap().satisfied);
    }

    #[test]
    fn quantile_vector_examples() {
        let g = fig1();
        assert_eq!(quantile_vector(&g, 1.0).unwrap(), g.mean());
        let g = GaussianVec::scalar(0.0, 1.0).unwrap();
        let q = quantile_vector(&g, psi(2.0, 1).unwrap().value()).unwrap();
        assert!((q[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn dth_order_contract() {
        let g = GaussianVec::new(vec![0.0, 0.0], SymMatrix::identity(2)).unwrap();
        assert!(!transcribe_dth_order(&g, 0.999).unwrap().satisfied);

        let g = fig1();
        let risk = risk_dth_order(&g).unwrap().risk().unwrap();
        let v = transcribe_dth_order(&g, risk).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.margins[0], 0.0);
        assert_eq!(&v.margins[1..], g.mean());
        assert!(!transcribe_dth_order(&g, risk * 0.99).unwrap().satisfied);

        let g = GaussianVec::new(vec![1.0, -3.0], SymMatrix::identity(2)).unwrap();
        let v = transcribe_dth_order(&g, 0.5).unwrap();
        assert!(!v.satisfied);
        assert_eq!(v.margins[0], 0.5);
    }

    #[test]
    fn scalar_methods_reject_vectors() {
        let g = fig1();
        assert!(matches!(transcribe_linear_1d(&g, 0.1), Err(Error::Precondition(_))));
        assert!(matches!(transcribe(Method::NormHighdim, &g, 0.1), Err(Error::Precondition(_))));
    }

    #[test]
    fn norm_transcription_picks_sharper_bound() {
        let v = transcribe_norm(&[1.0, 0.0], &SymMatrix::identity(2), 5.0, 0.01).unwrap();
        assert_eq!(v.method, Method::NormLowdim);
        let v = transcribe_norm(&[1.0, 0.0, 0.0], &SymMatrix::identity(3), 5.0, 0.01).unwrap();
        assert_eq!(v.method, Method::NormHighdim);
        let expected = 1.0 - 5.0 + bound_norm_highdim(0.01, 3, 1.0).unwrap();
        assert!((v.margins[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn method_names_match_serde() {
        for m in [
            Method::NormHighdim,
            Method::NormLowdim,
            Method::Linear1d,
            Method::NakkaChung,
            Method::SpectralRadius,
            Method::FirstOrder,
            Method::DthOrder,
        ] {
            assert_eq!(serde_json::to_value(m).unwrap(), m.name());
            let back: Method = serde_json::from_value(m.name().into()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn verdict_json_shape() {
        let v = TranscriptionVerdict::from_margins(Method::FirstOrder, 0.1, vec![-1.0, 0.5]);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(
            text,
            r#"{"method":"first_order","beta":0.1,"margins":[-1.0,0.5],"satisfied":false}"#
        );
    }
}
