//! Gaussian constraint outputs `y ~ N(ȳ, Σ_y)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{cholesky_lower, congruence, LowerTriangular, Matrix, SymMatrix};
use crate::stream::map_blocks;

/// Mean and positive-definite covariance of a constraint output.
///
/// Positive definiteness is checked once, here; the Cholesky factor is kept
/// for sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGaussian", into = "RawGaussian")]
pub struct GaussianVec {
    mean: Vec<f64>,
    cov: SymMatrix,
    chol: LowerTriangular,
}

#[derive(Serialize, Deserialize)]
struct RawGaussian {
    mean: Vec<f64>,
    cov: SymMatrix,
}

impl TryFrom<RawGaussian> for GaussianVec {
    type Error = Error;
    fn try_from(raw: RawGaussian) -> Result<Self> {
        GaussianVec::new(raw.mean, raw.cov)
    }
}

impl From<GaussianVec> for RawGaussian {
    fn from(g: GaussianVec) -> Self {
        RawGaussian {
            mean: g.mean,
            cov: g.cov,
        }
    }
}

impl GaussianVec {
    pub fn new(mean: Vec<f64>, cov: SymMatrix) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::ShapeMismatch(format!(
                "mean has length {} but covariance is {}x{}",
                mean.len(),
                cov.dim(),
                cov.dim()
            )));
        }
        if let Some(x) = mean.iter().find(|x| !x.is_finite()) {
            return Err(domain(format!("mean entries must be finite, got {x}")));
        }
        let chol = cholesky_lower(&cov)?;
        Ok(GaussianVec { mean, cov, chol })
    }

    pub fn scalar(mean: f64, var: f64) -> Result<Self> {
        GaussianVec::new(vec![mean], SymMatrix::diag(&[var]))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &SymMatrix {
        &self.cov
    }

    pub fn cholesky(&self) -> &LowerTriangular {
        &self.chol
    }

    /// Marginal standard deviations `σ_i = √Σ_ii`.
    pub fn std_devs(&self) -> Vec<f64> {
        self.cov.diagonal().into_iter().map(f64::sqrt).collect()
    }

    /// Whether `ȳ ⪯ 0`.
    pub fn mean_nonpositive(&self) -> bool {
        self.mean.iter().all(|&m| m <= 0.0)
    }

    /// Signed Mahalanobis distances `r_i = −ȳ_i / σ_i` from the mean to each
    /// constraint hyperplane; negative when the nominal violates constraint `i`.
    pub fn signed_mahalanobis(&self) -> Vec<f64> {
        self.mean
            .iter()
            .zip(self.std_devs())
            .map(|(m, s)| -m / s)
            .collect()
    }

    /// Writes `ȳ + M·z` into `out`, drawing `z` from `rng`.
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut [f64], out: &mut [f64]) {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        self.chol.mul_vec_into(z, out);
        for (o, m) in out.iter_mut().zip(&self.mean) {
            *o += m;
        }
    }
}

/// `n` draws from `g`, reproducible from `seed` (see [`crate::stream`]).
pub fn sample(g: &GaussianVec, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = g.dim();
    map_blocks(n, seed, |rng, len| {
        let mut z = vec![0.0; d];
        (0..len)
            .map(|_| {
                let mut y = vec![0.0; d];
                g.draw_into(rng, &mut z, &mut y);
                y
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// A constraint `y = f(x̄, ū) + (∇ₓf + ∇ᵤf·K)·δx` with `δx ~ N(0, Σₓ)`.
#[derive(Clone, Debug)]
pub struct LinearConstraintModel {
    pub f_val: Vec<f64>,
    pub grad_x: Matrix,
    pub grad_u: Matrix,
    pub gain: Matrix,
    pub state_cov: SymMatrix,
}

impl LinearConstraintModel {
    fn check_shapes(&self) -> Result<()> {
        let d = self.f_val.len();
        let nx = self.state_cov.dim();
        let nu = self.gain.rows();
        let bad = |what: &str| Err(Error::ShapeMismatch(what.to_string()));
        if self.grad_x.rows() != d || self.grad_x.cols() != nx {
            return bad("grad_x must be d x N_x");
        }
        if self.grad_u.rows() != d || self.grad_u.cols() != nu {
            return bad("grad_u must be d x N_u");
        }
        if self.gain.cols() != nx {
            return bad("gain must be N_u x N_x");
        }
        Ok(())
    }
}

/// Distribution of a linearized constraint under linear feedback:
/// `ȳ = f(x̄, ū)`, `Σ_y = (∇ₓf + ∇ᵤf·K) Σₓ (∇ₓf + ∇ᵤf·K)ᵀ`.
pub fn constraint_distribution(m: &LinearConstraintModel) -> Result<GaussianVec> {
    m.check_shapes()?;
    cholesky_lower(&m.state_cov)?;
    let combined = m.grad_x.add(&m.grad_u.mul(&m.gain)?)?;
    let cov = congruence(&combined, &m.state_cov)?;
    GaussianVec::new(m.f_val.clone(), cov)
}

/// First-order model of `y = ‖u‖₂ − u_max` around the nominal control:
/// `ȳ = ‖ū‖ − u_max`, `Σ_y = ūᵀΣᵤū / ‖ū‖²`.
pub fn linearized_norm_constraint(
    u_mean: &[f64],
    u_cov: &SymMatrix,
    u_max: f64,
) -> Result<GaussianVec> {
    if u_mean.len() != u_cov.dim() {
        return Err(Error::ShapeMismatch(format!(
            "control has {} components but its covariance is {}x{}",
            u_mean.len(),
            u_cov.dim(),
            u_cov.dim()
        )));
    }
    let norm = u_mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(domain("nominal control has zero norm; the gradient is undefined"));
    }
    cholesky_lower(u_cov)?;
    let unit: Vec<f64> = u_mean.iter().map(|x| x / norm).collect();
    let var = congruence(&Matrix::row_vector(&unit), u_cov)?;
    GaussianVec::new(vec![norm - u_max], var)
}

/// Radii sorted ascending with `r̃₀ = 0` prepended, and the permutation.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedRadii {
    /// `[0, r̃₁, …, r̃_d]`.
    pub radii: Vec<f64>,
    /// `order[i]` is the (0-based) original index of `r̃_{i+1}`.
    pub order: Vec<usize>,
}

/// Ascending sort of `r`; ties keep their original index order.
pub fn sorted_radii(r: &[f64]) -> SortedRadii {
    let mut order: Vec<usize> = (0..r.len()).collect();
    // stable sort: ties stay in index order
    order.sort_by(|&i, &j| r[i].total_cmp(&r[j]));
    let mut radii = Vec::with_capacity(r.len() + 1);
    radii.push(0.0);
    radii.extend(order.iter().map(|&i| r[i]));
    SortedRadii { radii, order }
}
