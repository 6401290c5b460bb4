//! Conservatism of a risk bound relative to the true risk.
//!
//! `γ(β_T, β_R) = (β_T/β_R)·√((1 − β_R²)/(1 − β_T²))`: the factor by which the
//! bound overstates the risk, with a correction that blows up as the bound
//! approaches certain failure.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gaussian::GaussianVec;
use crate::risk::{
    mc_risk, risk_dth_order, risk_first_order, risk_spectral, McEstimate, RiskEstimate,
};
use crate::special::Probability;

/// `γ(β_T, β_R)` for `0 ≤ β_T ≤ 1` and `0 < β_R < 1`.
pub fn conservatism(beta_t: f64, beta_r: f64) -> Result<f64> {
    conservatism_of(Probability::new(beta_t)?, Probability::new(beta_r)?)
}

/// [`conservatism`] evaluated from both tails, so bounds that round to 1 in
/// `f64` still give a finite factor.
pub fn conservatism_of(beta_t: Probability, beta_r: Probability) -> Result<f64> {
    let br = beta_r.value();
    if !(br > 0.0 && br < 1.0) {
        return Err(Error::Domain(format!(
            "conservatism needs 0 < β_R < 1, got {br}"
        )));
    }
    let bt = beta_t.value();
    if beta_t.complement() == 0.0 {
        return Ok(f64::INFINITY);
    }
    let ratio = (beta_r.complement() * (1.0 + br)) / (beta_t.complement() * (1.0 + bt));
    Ok(bt / br * ratio.sqrt())
}

/// One estimator's bound and its conservatism against the reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MethodConservatism {
    pub estimate: RiskEstimate,
    /// `None` when the bound is undefined or the reference is 0 or 1.
    #[serde(serialize_with = "serialize_gamma")]
    pub gamma: Option<f64>,
}

/// Serializes an optional factor as a number, `"inf"`, or `null`.
pub fn serialize_gamma<S: Serializer>(g: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match g {
        Some(v) if v.is_infinite() => s.serialize_str("inf"),
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservatismReport {
    pub beta_r: McEstimate,
    /// Spectral, first-order and d-th-order, in that order.
    pub methods: Vec<MethodConservatism>,
    /// `β_T,d ≤ β_T,1 ≤ β_T,ρ` and the reference lies below `β_T,d` within
    /// five half-widths of its interval.
    pub hierarchy_ok: bool,
}

impl ConservatismReport {
    pub fn csv_header() -> &'static str {
        "beta_r,ci_low,ci_high,n_samples,seed,beta_spectral,gamma_spectral,\
         beta_first_order,gamma_first_order,beta_dth_order,gamma_dth_order,hierarchy_ok"
    }

    pub fn csv_row(&self) -> String {
        let mut fields = vec![
            self.beta_r.value().to_string(),
            self.beta_r.ci_low.to_string(),
            self.beta_r.ci_high.to_string(),
            self.beta_r.n_samples.to_string(),
            self.beta_r.seed.to_string(),
        ];
        for m in &self.methods {
            fields.push(m.estimate.risk().map_or(String::new(), |v| v.to_string()));
            fields.push(m.gamma.map_or(String::new(), |v| v.to_string()));
        }
        fields.push(self.hierarchy_ok.to_string());
        fields.join(",")
    }
}

/// Evaluates the three multidimensional bounds against a Monte-Carlo
/// reference of `mc_n` draws.
pub fn hierarchy_report(g: &GaussianVec, mc_n: usize, seed: u64) -> Result<ConservatismReport> {
    if !g.mean_nonpositive() {
        return Err(Error::Precondition(
            "the risk bounds need a componentwise nonpositive mean".into(),
        ));
    }
    let beta_r = mc_risk(g, mc_n, seed)?;
    let estimates = [risk_spectral(g)?, risk_first_order(g)?, risk_dth_order(g)?];
    let reference_usable = beta_r.hits > 0 && beta_r.hits < beta_r.n_samples;
    let methods = estimates
        .iter()
        .map(|&estimate| {
            let gamma = match (estimate.value, reference_usable) {
                (Some(v), true) => conservatism_of(v, beta_r.estimate).ok(),
                _ => None,
            };
            MethodConservatism { estimate, gamma }
        })
        .collect::<Vec<_>>();

    let risk = |i: usize| estimates[i].risk().unwrap_or(1.0);
    let hierarchy_ok = risk(2) <= risk(1)
        && risk(1) <= risk(0)
        && beta_r.value() <= risk(2) + 5.0 * beta_r.half_width();
    Ok(ConservatismReport {
        beta_r,
        methods,
        hierarchy_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    #[test]
    fn identity_and_asymptote() {
        for br in [1e-6, 0.01, 0.3, 0.9] {
            assert!((conservatism(br, br).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(conservatism(1.0, 0.5).unwrap(), f64::INFINITY);
        assert_eq!(conservatism(0.0, 0.5).unwrap(), 0.0);
        assert!(conservatism(0.5, 0.0).is_err());
        assert!(conservatism(0.5, 1.0).is_err());
    }

    #[test]
    fn spot_values() {
        let g = conservatism(0.035, 1e-6).unwrap();
        assert!((g / 3.50e4 - 1.0).abs() < 0.01, "{g}");
    }

    #[test]
    fn complements_keep_precision_near_one() {
        let bt = Probability::from_complement(4.5e-7).unwrap();
        let br = Probability::new(1e-5).unwrap();
        let g = conservatism_of(bt, br).unwrap();
        assert!((g / 1.054e8 - 1.0).abs() < 0.01, "{g}");
        let bt = Probability::from_complement(1e-20).unwrap();
        assert!(conservatism_of(bt, br).unwrap().is_finite());
    }

    #[test]
    fn monotone_in_bound() {
        let mut last = 0.0;
        for i in 1..100 {
            let g = conservatism(i as f64 / 100.0, 0.2).unwrap();
            assert!(g > last);
            last = g;
        }
    }

    #[test]
    fn report_on_fig1() {
        let g = GaussianVec::new(
            vec![-2.0, -1.0],
            SymMatrix::from_rows(&[vec![1.1, -0.8], vec![-0.8, 1.0]]).unwrap(),
        )
        .unwrap();
        let rep = hierarchy_report(&g, 100_000, 5).unwrap();
        assert!(rep.hierarchy_ok);
        assert_eq!(rep.methods.len(), 3);
        assert!(rep.methods.iter().all(|m| m.gamma.unwrap() >= 1.0));
        let row = rep.csv_row();
        assert_eq!(
            row.split(',').count(),
            ConservatismReport::csv_header().split(',').count()
        );
        let bad = GaussianVec::scalar(0.5, 1.0).unwrap();
        assert!(matches!(hierarchy_report(&bad, 10, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn gamma_serialization() {
        let est = risk_first_order(&GaussianVec::scalar(-1.0, 1.0).unwrap()).unwrap();
        let m = MethodConservatism {
            estimate: est,
            gamma: Some(f64::INFINITY),
        };
        let v = serde_json::to_value(m).unwrap();
        assert_eq!(v["gamma"], "inf");
        let m = MethodConservatism { estimate: est, gamma: None };
        assert!(serde_json::to_value(m).unwrap()["gamma"].is_null());
    }
}
