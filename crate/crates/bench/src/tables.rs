//! Method comparison tables for the transfer's thrust and terminal constraints.

use ccrisk::conservatism::{conservatism_of, serialize_gamma};
use ccrisk::risk::{
    mc_risk, risk_dth_order, risk_first_order, risk_nakka_chung, risk_norm_spectral,
    risk_spectral, McEstimate, RiskEstimate,
};
use ccrisk::{GaussianVec, Probability, Result, SymMatrix};
use serde::Serialize;

use crate::fixtures::{EarthMarsFixture, TerminalCovariance};
use crate::format::{percent, sig2};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub method: String,
    pub risk: Option<f64>,
    /// `1 − risk`, carried separately for bounds close to 1.
    pub risk_complement: Option<f64>,
    /// Risk in percent, two significant figures.
    pub risk_pct: String,
    /// Conservatism against the Monte-Carlo reference; `None` when unavailable.
    #[serde(serialize_with = "serialize_gamma")]
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultTable {
    pub table: String,
    pub dim: usize,
    pub mc_samples: u64,
    pub seed: u64,
    pub mc: Option<McEstimate>,
    pub rows: Vec<TableRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ResultTable {
    pub fn row(&self, method: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

fn reference_row(mc: Option<&McEstimate>) -> TableRow {
    match mc {
        Some(m) => TableRow {
            method: "mc".into(),
            risk: Some(m.value()),
            risk_complement: Some(m.estimate.complement()),
            risk_pct: percent(m.estimate),
            gamma: (m.hits > 0 && m.hits < m.n_samples).then_some(1.0),
        },
        None => TableRow {
            method: "mc".into(),
            risk: None,
            risk_complement: None,
            risk_pct: "n/a".into(),
            gamma: None,
        },
    }
}

fn estimate_row(name: &str, est: &RiskEstimate, mc: Option<&McEstimate>) -> TableRow {
    let reference = mc.filter(|m| m.hits > 0 && m.hits < m.n_samples);
    let gamma = match (est.value, reference) {
        (Some(v), Some(m)) => conservatism_of(v, m.estimate).ok(),
        _ => None,
    };
    TableRow {
        method: name.into(),
        risk: est.risk(),
        risk_complement: est.value.map(Probability::complement),
        risk_pct: est.value.map_or_else(|| "undefined".into(), percent),
        gamma,
    }
}

fn run_mc(g: &GaussianVec, mc_samples: u64, seed: u64) -> Result<Option<McEstimate>> {
    if mc_samples == 0 {
        return Ok(None);
    }
    log::info!("Monte-Carlo reference: {mc_samples} draws in dimension {}", g.dim());
    Ok(Some(mc_risk(g, mc_samples as usize, seed)?))
}

/// Thrust-magnitude constraint `‖u₀‖ ≤ u_max` on the first control.
pub fn run_table1(f: &EarthMarsFixture, mc_samples: u64, seed: u64) -> Result<ResultTable> {
    let y = f.norm_constraint();
    let mc = run_mc(&y, mc_samples, seed)?;
    let rows = vec![
        reference_row(mc.as_ref()),
        estimate_row(
            "norm_spectral",
            &risk_norm_spectral(&f.u0_mean, &f.sigma_u0, f.u_max)?,
            mc.as_ref(),
        ),
        estimate_row("nakka_chung", &risk_nakka_chung(&y)?, mc.as_ref()),
        estimate_row("first_order", &risk_first_order(&y)?, mc.as_ref()),
    ];
    Ok(ResultTable {
        table: "table1".into(),
        dim: 1,
        mc_samples,
        seed,
        mc,
        rows,
        note: None,
    })
}

/// Which terminal components enter the box constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BoxScope {
    /// Position components only: six constraints.
    Position,
    /// Full state: twelve constraints.
    Full,
}

impl BoxScope {
    fn indices(self) -> &'static [usize] {
        match self {
            BoxScope::Position => &[0, 1, 2],
            BoxScope::Full => &[0, 1, 2, 3, 4, 5],
        }
    }
}

/// Box constraints `±(x_N − x_t) ≤ ε|x_t|` as one Gaussian: mean
/// `−ε[|x_t|; |x_t|]`, block-diagonal covariance `diag(Σ, Σ)`.
pub fn box_constraints(
    f: &EarthMarsFixture,
    target: &[f64; 6],
    scope: BoxScope,
    which: TerminalCovariance,
) -> Result<GaussianVec> {
    let idx = scope.indices();
    let half: Vec<f64> = idx.iter().map(|&i| -f.epsilon * target[i].abs()).collect();
    let mean = [half.as_slice(), half.as_slice()].concat();
    let block: SymMatrix = f.sigma_xn(which).select(idx);
    GaussianVec::new(mean, block.block_diag(&block))
}

/// Terminal box constraints, compared across the three multidimensional bounds.
pub fn run_table2(
    f: &EarthMarsFixture,
    target: &[f64; 6],
    scope: BoxScope,
    which: TerminalCovariance,
    mc_samples: u64,
    seed: u64,
) -> Result<ResultTable> {
    let g = box_constraints(f, target, scope, which)?;
    let mc = run_mc(&g, mc_samples, seed)?;
    let rows = vec![
        reference_row(mc.as_ref()),
        estimate_row("spectral", &risk_spectral(&g)?, mc.as_ref()),
        estimate_row("first_order", &risk_first_order(&g)?, mc.as_ref()),
        estimate_row("dth_order", &risk_dth_order(&g)?, mc.as_ref()),
    ];
    Ok(ResultTable {
        table: format!("table2_{}", match scope {
            BoxScope::Position => "position",
            BoxScope::Full => "full",
        }),
        dim: g.dim(),
        mc_samples,
        seed,
        mc,
        rows,
        note: None,
    })
}

/// Fixed-width rendering for terminals.
pub fn render_text(t: &ResultTable) -> String {
    let mut out = format!(
        "{} (d = {}, Monte-Carlo samples = {}, seed = {})\n{:<14} {:>16} {:>12}\n",
        t.table, t.dim, t.mc_samples, t.seed, "method", "risk [%]", "gamma"
    );
    for r in &t.rows {
        let gamma = r.gamma.map_or_else(|| "n/a".into(), sig2);
        out.push_str(&format!("{:<14} {:>16} {:>12}\n", r.method, r.risk_pct, gamma));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::PLACEHOLDER_TARGET;

    #[test]
    fn table1_closed_forms() {
        let t = run_table1(&EarthMarsFixture::default(), 0, 1).unwrap();
        assert!(t.mc.is_none());
        assert!(t.rows.iter().all(|r| r.gamma.is_none()));
        let ns = t.row("norm_spectral").unwrap().risk.unwrap();
        assert!((ns - 0.0345).abs() < 5e-4, "{ns}");
        let nc = t.row("nakka_chung").unwrap().risk.unwrap();
        assert!((nc - 0.0419).abs() < 5e-4, "{nc}");
    }

    #[test]
    fn box_constraint_shape() {
        let f = EarthMarsFixture::default();
        let g = box_constraints(&f, &PLACEHOLDER_TARGET, BoxScope::Position, TerminalCovariance::Source)
            .unwrap();
        assert_eq!(g.dim(), 6);
        assert_eq!(g.mean()[0], g.mean()[3]);
        assert_eq!(g.cov()[(0, 3)], 0.0);
        assert_eq!(g.cov()[(1, 0)], g.cov()[(4, 3)]);
        let g = box_constraints(&f, &PLACEHOLDER_TARGET, BoxScope::Full, TerminalCovariance::Displayed)
            .unwrap();
        assert_eq!(g.dim(), 12);
    }

    #[test]
    fn text_rendering_lists_every_row() {
        let t = run_table1(&EarthMarsFixture::default(), 1000, 1).unwrap();
        let text = render_text(&t);
        assert_eq!(text.lines().count(), 2 + t.rows.len());
        assert!(text.contains("seed = 1"));
    }
}
