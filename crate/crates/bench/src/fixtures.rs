//! Constants of the low-thrust Earth–Mars transfer used by the tables, and the
//! small planar example.

use ccrisk::linalg::{clip_eigenvalues, sym_eigenvalues, SymMatrix};
use ccrisk::GaussianVec;
use serde::{Deserialize, Serialize};

/// Relative eigenvalue floor used to repair the rounded terminal covariance.
pub const CLIP_FLOOR: f64 = 1e-9;

/// Which printing of the terminal covariance to use. Both are rounded from
/// the same underlying matrix and neither is positive definite as printed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCovariance {
    /// Three significant figures.
    #[default]
    Source,
    /// Two significant figures, as typeset.
    Displayed,
}

#[derive(Clone, Debug)]
pub struct EarthMarsFixture {
    /// Initial state covariance, normalized units.
    pub sigma_x0: SymMatrix,
    /// Nominal first control [N].
    pub u0_mean: [f64; 3],
    /// First-control covariance [N²].
    pub sigma_u0: SymMatrix,
    /// Thrust magnitude limit [N].
    pub u_max: f64,
    /// Rounded mean of `‖u₀‖ − u_max` as published alongside the matrices.
    pub y_mean: f64,
    /// Rounded variance of `‖u₀‖ − u_max`.
    pub y_var: f64,
    /// Relative box half-width on the terminal state.
    pub epsilon: f64,
}

impl Default for EarthMarsFixture {
    fn default() -> Self {
        EarthMarsFixture {
            sigma_x0: SymMatrix::diag(&[2e-3, 2e-3, 2e-3, 2e-5, 2e-5, 2e-5]),
            u0_mean: [0.15567, 0.42294, -0.033632],
            sigma_u0: SymMatrix::from_rows(&[
                vec![1.49e-6, -6.68e-6, -1.28e-7],
                vec![-6.68e-6, 1.23e-4, 1.91e-6],
                vec![-1.28e-7, 1.91e-6, 4.36e-8],
            ])
            .expect("fixture matrix is symmetric"),
            u_max: 0.5,
            y_mean: -0.048070,
            y_var: 1.01e-4,
            epsilon: 5e-5,
        }
    }
}

/// Terminal covariance entries in units of 1e−12, three significant figures.
const SIGMA_XN_SOURCE: [[f64; 6]; 6] = [
    [109.0, 124.0, 0.574, -42.7, 60.6, 0.751],
    [124.0, 145.0, 0.765, -48.2, 70.4, 0.923],
    [0.574, 0.765, 0.358, -0.207, 0.358, 0.349],
    [-42.7, -48.2, -0.207, 16.7, -23.5, -0.281],
    [60.6, 70.4, 0.358, -23.5, 34.1, 0.439],
    [0.751, 0.923, 0.349, -0.281, 0.439, 0.342],
];

/// Terminal covariance entries in units of 1e−12, two significant figures.
const SIGMA_XN_DISPLAYED: [[f64; 6]; 6] = [
    [110.0, 12.0, 0.57, -43.0, 61.0, 0.75],
    [12.0, 15.0, 0.77, -48.0, 70.0, 0.92],
    [0.57, 0.77, 0.36, -0.21, 0.36, 0.35],
    [-43.0, -48.0, -0.21, 17.0, -24.0, -0.28],
    [61.0, 70.0, 0.36, -24.0, 34.0, 0.44],
    [0.75, 0.92, 0.35, -0.28, 0.44, 0.34],
];

impl EarthMarsFixture {
    /// The terminal covariance exactly as printed, scaled to normalized units.
    pub fn sigma_xn_raw(&self, which: TerminalCovariance) -> SymMatrix {
        let table = match which {
            TerminalCovariance::Source => &SIGMA_XN_SOURCE,
            TerminalCovariance::Displayed => &SIGMA_XN_DISPLAYED,
        };
        SymMatrix::from_fn(6, |i, j| table[i][j] * 1e-12)
    }

    /// The terminal covariance with eigenvalues clipped to
    /// `CLIP_FLOOR · λ_max`, so that it is positive definite.
    pub fn sigma_xn(&self, which: TerminalCovariance) -> SymMatrix {
        let raw = self.sigma_xn_raw(which);
        let lambda_min = sym_eigenvalues(&raw)[0];
        if lambda_min <= 0.0 {
            log::warn!(
                "terminal covariance ({which:?}) has eigenvalue {lambda_min:e}; clipping to \
                 {CLIP_FLOOR:e} of the largest"
            );
        }
        clip_eigenvalues(&raw, CLIP_FLOOR)
    }

    /// Rounded scalar distribution of the thrust-magnitude constraint.
    pub fn norm_constraint(&self) -> GaussianVec {
        GaussianVec::scalar(self.y_mean, self.y_var).expect("fixture variance is positive")
    }
}

/// Stand-in for the Mars arrival state, which was never published. Components
/// are of order one in normalized units and carry no physical meaning.
pub const PLACEHOLDER_TARGET: [f64; 6] = [0.95, 1.45, 0.095, 0.8, 1.15, 0.006];

/// The planar two-constraint example: `ȳ = [−2, −1]`, correlated covariance.
pub fn planar_example() -> GaussianVec {
    GaussianVec::new(
        vec![-2.0, -1.0],
        SymMatrix::from_rows(&[vec![1.1, -0.8], vec![-0.8, 1.0]]).expect("symmetric"),
    )
    .expect("positive definite")
}
