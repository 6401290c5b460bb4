//! Dense kernels for the small symmetric matrices that appear as covariances.
//!
//! Dimensions here are tiny (a few dozen at most), so everything is stored
//! dense and row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric pivot tolerance, relative to the largest diagonal entry.
pub const CHOLESKY_PIVOT_TOL: f64 = 1e-13;
/// Relative asymmetry accepted when building a [`SymMatrix`] from full rows.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// General dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::ShapeMismatch("matrix must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    /// A single-row matrix.
    pub fn row_vector(v: &[f64]) -> Self {
        Matrix {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense symmetric matrix. Storage is full but every write goes to both
/// triangles, so `S[(i, j)] == S[(j, i)]` holds bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn identity(dim: usize) -> Self {
        SymMatrix::diag(&vec![1.0; dim])
    }

    pub fn diag(entries: &[f64]) -> Self {
        SymMatrix::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { 0.0 })
    }

    /// Builds from the lower triangle of `f`; `f(i, j)` is only called for `j ≤ i`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        SymMatrix { dim, data }
    }

    /// Accepts full rows, rejecting asymmetry beyond [`SYMMETRY_TOL`] relative to
    /// the largest entry; the stored matrix is the average of both triangles.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::ShapeMismatch("matrix must be non-empty".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("non-finite matrix entry {x} in row {i}")));
            }
        }
        let scale = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                let diff = (rows[i][j] - rows[j][i]).abs();
                if diff > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { row: i, col: j, diff });
                }
            }
        }
        Ok(SymMatrix::from_fn(dim, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// Symmetric part of a square [`Matrix`], `(A + Aᵀ)/2`.
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::ShapeMismatch(format!(
                "cannot symmetrize a {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
        Ok(SymMatrix::from_fn(m.rows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    /// Principal submatrix on the given indices, in that order.
    pub fn select(&self, idx: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &SymMatrix) -> SymMatrix {
        let n = self.dim;
        SymMatrix::from_fn(n + other.dim, |i, j| match (i < n, j < n) {
            (true, true) => self[(i, j)],
            (false, false) => other[(i - n, j - n)],
            _ => 0.0,
        })
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

/// Lower-triangular factor `M` with `Σ = M·Mᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    data: Vec<f64>,
}

impl LowerTriangular {
    /// Keeps the lower triangle of a square matrix and zeroes the rest.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::ShapeMismatch("lower-triangular factor must be square".into()));
        }
        let dim = m.rows();
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                data[i * dim + j] = m[(i, j)];
            }
        }
        Ok(LowerTriangular { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row `i`, truncated to its `i + 1` leading (possibly nonzero) entries.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..i * self.dim + i + 1]
    }

    /// `M·z` written into `out`.
    pub fn mul_vec_into(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.row(i).iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    /// `M·Mᵀ`.
    pub fn gram(&self) -> SymMatrix {
        SymMatrix::from_fn(self.dim, |i, j| {
            self.row(j).iter().zip(self.row(i)).map(|(a, b)| a * b).sum()
        })
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for LowerTriangular {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

/// Cholesky factor `M` (lower, positive diagonal) with `S = M·Mᵀ`.
///
/// Fails with [`Error::NotPositiveDefinite`] when a pivot drops to
/// `CHOLESKY_PIVOT_TOL × max diagonal` or below.
pub fn cholesky_lower(s: &SymMatrix) -> Result<LowerTriangular> {
    let n = s.dim();
    let max_diag = s.diagonal().into_iter().fold(0.0_f64, f64::max);
    let tol = CHOLESKY_PIVOT_TOL * max_diag;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = s[(j, j)];
        for k in 0..j {
            pivot -= l[j * n + k] * l[j * n + k];
        }
        if !(pivot > tol) {
            return Err(Error::NotPositiveDefinite { row: j, pivot });
        }
        let ljj = pivot.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / ljj;
        }
    }
    Ok(LowerTriangular { dim: n, data: l })
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Matrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-14;

/// Cyclic Jacobi with a threshold on the first sweeps; stops once the
/// off-diagonal Frobenius norm falls below `1e-14 · ‖S‖_F`.
pub fn sym_eigen(s: &SymMatrix) -> SymEigen {
    let n = s.dim();
    let mut a = s.to_matrix();
    let mut v = Matrix::identity(n);
    let stop = JACOBI_TOL * s.frobenius();

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            break;
        }
        // skip small rotations during the first sweeps
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 || apq.abs() <= threshold {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = c * arp - sn * arq;
                        a[(p, r)] = a[(r, p)];
                        a[(r, q)] = sn * arp + c * arq;
                        a[(q, r)] = a[(r, q)];
                    }
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - sn * vrq;
                    v[(r, q)] = sn * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, k)];
        }
    }
    SymEigen { values, vectors }
}

/// Eigenvalues in ascending order.
pub fn sym_eigenvalues(s: &SymMatrix) -> Vec<f64> {
    sym_eigen(s).values
}

/// `√λ_max(S)`, never below `√max_i S_ii`.
///
/// The floor is exact for PSD matrices and keeps `σ_i ≤ ρ` intact under
/// round-off in the eigensolver.
pub fn spectral_radius_sqrt(s: &SymMatrix) -> Result<f64> {
    let values = sym_eigenvalues(s);
    let lambda_max = *values.last().expect("matrix dimension is at least one");
    let scale = s.frobenius();
    if lambda_max < -1e-12 * scale {
        return Err(Error::NotPositiveSemidefinite(lambda_max));
    }
    let max_diag = s.diagonal().into_iter().fold(0.0_f64, f64::max);
    Ok(lambda_max.max(max_diag).max(0.0).sqrt())
}

/// `A·S·Aᵀ`, symmetrized.
pub fn congruence(a: &Matrix, s: &SymMatrix) -> Result<SymMatrix> {
    if a.cols() != s.dim() {
        return Err(Error::ShapeMismatch(format!(
            "congruence of a {}x{} matrix with a {}x{} covariance",
            a.rows(),
            a.cols(),
            s.dim(),
            s.dim()
        )));
    }
    let as_ = a.mul(&s.to_matrix())?;
    let full = as_.mul(&a.transpose())?;
    SymMatrix::symmetrize(&full)
}

/// Reconstructs `V·diag(max(λ, floor))·Vᵀ` with `floor = rel_floor · λ_max`,
/// the nearest (Frobenius) matrix whose spectrum is bounded below by `floor`.
pub fn clip_eigenvalues(s: &SymMatrix, rel_floor: f64) -> SymMatrix {
    let eig = sym_eigen(s);
    let lambda_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let floor = rel_floor * lambda_max;
    let clipped: Vec<f64> = eig.values.iter().map(|&l| l.max(floor)).collect();
    let v = &eig.vectors;
    SymMatrix::from_fn(s.dim(), |i, j| {
        (0..s.dim()).map(|k| v[(i, k)] * clipped[k] * v[(j, k)]).sum()
    })
}
