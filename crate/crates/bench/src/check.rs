//! Transcription check of a user-supplied constraint distribution.

use ccrisk::conservatism::hierarchy_report;
use ccrisk::risk::{
    risk_dth_order, risk_exact_1d, risk_first_order, risk_nakka_chung, risk_spectral,
};
use ccrisk::transcription::transcribe;
use ccrisk::{ConservatismReport, GaussianVec, Method, RiskEstimate, SymMatrix, TranscriptionVerdict};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Methods checked when the input names none.
pub const DEFAULT_METHODS: [Method; 3] = Method::MULTIDIMENSIONAL;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckInput {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    pub beta: f64,
    #[serde(default)]
    pub methods: Option<Vec<Method>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub dim: usize,
    pub beta: f64,
    pub verdicts: Vec<TranscriptionVerdict>,
    pub risks: Vec<RiskEstimate>,
    pub conservatism: Option<ConservatismReport>,
}

impl CheckReport {
    pub fn all_satisfied(&self) -> bool {
        self.verdicts.iter().all(|v| v.satisfied)
    }
}

/// Parses the check input; JSON errors carry their line and column.
pub fn parse_input(text: &str) -> Result<(GaussianVec, f64, Vec<Method>), CliError> {
    let input: CheckInput = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("invalid check input: {e}")))?;
    let cov = SymMatrix::from_rows(&input.cov)
        .map_err(|e| CliError::Usage(format!("invalid covariance: {e}")))?;
    let g = GaussianVec::new(input.mean, cov)
        .map_err(|e| CliError::Usage(format!("invalid distribution: {e}")))?;
    if !(input.beta > 0.0 && input.beta < 1.0) {
        return Err(CliError::Usage(format!("beta must lie in (0, 1), got {}", input.beta)));
    }
    let methods = input.methods.unwrap_or_else(|| DEFAULT_METHODS.to_vec());
    if methods.is_empty() {
        return Err(CliError::Usage("methods list is empty".into()));
    }
    Ok((g, input.beta, methods))
}

fn risk_for(method: Method, g: &GaussianVec) -> ccrisk::Result<RiskEstimate> {
    match method {
        Method::Linear1d => risk_exact_1d(g),
        Method::NakkaChung => risk_nakka_chung(g),
        Method::SpectralRadius => risk_spectral(g),
        Method::FirstOrder => risk_first_order(g),
        Method::DthOrder => risk_dth_order(g),
        Method::NormHighdim | Method::NormLowdim => Err(ccrisk::Error::Precondition(format!(
            "{} applies to control-norm constraints only",
            method.name()
        ))),
    }
}

/// Runs every requested method. `mc_samples > 0` adds a conservatism report
/// when the mean is `⪯ 0`.
///
/// A constraint the methods cannot handle (scalar-only method on a vector,
/// undefined risk bound) yields the report together with
/// [`CliError::Domain`]-class status via [`check_status`].
pub fn run_check(
    g: &GaussianVec,
    beta: f64,
    methods: &[Method],
    mc_samples: u64,
    seed: u64,
) -> Result<CheckReport, CliError> {
    let mut verdicts = Vec::with_capacity(methods.len());
    let mut risks = Vec::with_capacity(methods.len());
    for &m in methods {
        verdicts.push(transcribe(m, g, beta).map_err(CliError::from_core)?);
        risks.push(risk_for(m, g).map_err(CliError::from_core)?);
    }
    let conservatism = if mc_samples > 0 && g.mean_nonpositive() {
        Some(hierarchy_report(g, mc_samples as usize, seed).map_err(CliError::from_core)?)
    } else {
        None
    };
    Ok(CheckReport {
        dim: g.dim(),
        beta,
        verdicts,
        risks,
        conservatism,
    })
}

/// A risk bound was requested but does not exist for this distribution.
pub fn check_status(report: &CheckReport) -> Result<(), CliError> {
    match report.risks.iter().find(|r| !r.is_defined()) {
        Some(r) => Err(CliError::Domain(format!(
            "{} risk bound undefined: the mean must be componentwise nonpositive",
            r.method.name()
        ))),
        None => Ok(()),
    }
}
