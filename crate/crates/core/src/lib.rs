//! Deterministic transcription of multidimensional Gaussian chance constraints
//! and the matching failure-risk estimators.
//!
//! A constraint output `y ~ N(ȳ, Σ)` is required to satisfy `P(y ⪯ 0) ≥ 1 − β`.
//! The [`transcription`] module turns that requirement into margins an optimizer
//! can check, [`risk`] computes the upper bounds on the true failure probability
//! that each transcription implies, and [`conservatism`] compares those bounds
//! against a seeded Monte-Carlo reference.

pub mod conservatism;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod risk;
pub mod special;
pub mod stream;
pub mod transcription;

pub use conservatism::{conservatism, hierarchy_report, ConservatismReport};
pub use error::{Error, Result};
pub use gaussian::{GaussianVec, LinearConstraintModel};
pub use linalg::{LowerTriangular, Matrix, SymMatrix};
pub use risk::{McEstimate, RiskEstimate, RiskMethod};
pub use special::Probability;
pub use transcription::{Method, TranscriptionVerdict};
