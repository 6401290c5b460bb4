//! Conservatism of the three multidimensional bounds as the dimension grows.
//!
//! For each dimension `d`, random Gaussians are drawn with mean components
//! around −1 and a lower-triangular generator `L` whose entries have scale
//! `l̃ = ‖ȳ‖₁ / (d^{3/2} Ψ_d⁻¹(β))`. By default the second parameters of
//! both generating laws, `N(−1, 0.1)` and `N(0, l̃)`, are variances. Each
//! instance is compared against its own Monte-Carlo reference; instances
//! whose reference records no failure have no measurable conservatism and
//! are left out of the statistics.

use ccrisk::conservatism::conservatism_of;
use ccrisk::risk::{mc_risk, risk_dth_order, risk_first_order, risk_spectral};
use ccrisk::special::psi_inv;
use ccrisk::stream::block_rng;
use ccrisk::{Error, GaussianVec, Result, RiskEstimate, SymMatrix};
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Give up on an instance after this many rejected draws.
const MAX_REDRAWS: u64 = 10_000;

pub const METHODS: [&str; 3] = ["spectral", "first_order", "dth_order"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub n_dists: usize,
    pub beta: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub mean_loc: f64,
    pub mean_scale: f64,
    /// Read `mean_scale` and `l̃` as variances; `false` reads them as
    /// standard deviations.
    pub second_param_is_variance: bool,
    pub quick: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dims: (1..=25).collect(),
            n_dists: 1000,
            beta: 1e-3,
            mc_samples: 100_000,
            seed: 0,
            mean_loc: -1.0,
            mean_scale: 0.1,
            second_param_is_variance: true,
            quick: false,
        }
    }
}

impl SweepConfig {
    /// The reduced configuration: 100 distributions per dimension.
    pub fn quick(mut self) -> Self {
        self.quick = true;
        self.n_dists = 100;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::Domain("dimensions must be at least 1".into()));
        }
        if self.n_dists == 0 || self.mc_samples == 0 {
            return Err(Error::Domain(
                "need at least one distribution and one Monte-Carlo sample".into(),
            ));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Domain(format!("β must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.mean_scale >= 0.0) {
            return Err(Error::Domain("mean scale must be nonnegative".into()));
        }
        Ok(())
    }

    fn spread(&self, param: f64) -> f64 {
        if self.second_param_is_variance {
            param.sqrt()
        } else {
            param
        }
    }
}

/// One random distribution and its conservatism factors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub dim: usize,
    pub index: usize,
    pub n_rejected: u64,
    pub beta_r: f64,
    pub mc_hits: u64,
    /// Bounds in [`METHODS`] order.
    pub beta_t: [f64; 3],
    /// Conservatism in [`METHODS`] order; NaN when no failure was sampled.
    pub gamma: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dim: usize,
    pub method: &'static str,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub n_rejected: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutput {
    pub instances: Vec<Instance>,
    pub summary: Vec<SummaryRow>,
}

impl SweepOutput {
    pub fn summary_row(&self, dim: usize, method: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.dim == dim && r.method == method)
    }
}

/// Draws a Gaussian for dimension `d`, redrawing until the mean is `⪯ 0`
/// and the covariance positive definite. Returns it with the rejection count.
pub fn draw_instance<R: Rng>(
    cfg: &SweepConfig,
    d: usize,
    rng: &mut R,
) -> Result<(GaussianVec, u64)> {
    let dof = d as u32;
    let quantile = psi_inv(cfg.beta, dof)?;
    let mean_sd = cfg.spread(cfg.mean_scale);
    let mut rejected = 0;
    loop {
        let mean: Vec<f64> = (0..d)
            .map(|_| cfg.mean_loc + mean_sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let l1: f64 = mean.iter().map(|m| m.abs()).sum();
        let l_scale = cfg.spread(l1 / ((d as f64).powf(1.5) * quantile));
        let mut l = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                l[i * d + j] = l_scale * rng.sample::<f64, _>(StandardNormal);
            }
        }
        let cov = SymMatrix::from_fn(d, |i, j| (0..=j).map(|k| l[i * d + k] * l[j * d + k]).sum());
        if mean.iter().all(|&m| m <= 0.0) {
            if let Ok(g) = GaussianVec::new(mean, cov) {
                return Ok((g, rejected));
            }
        }
        rejected += 1;
        if rejected >= MAX_REDRAWS {
            return Err(Error::Domain(format!(
                "no admissible distribution after {MAX_REDRAWS} draws at d = {d}"
            )));
        }
    }
}

fn gamma(est: &RiskEstimate, mc: &ccrisk::McEstimate) -> f64 {
    if mc.hits == 0 || mc.hits == mc.n_samples {
        return f64::NAN;
    }
    match est.value {
        Some(v) => conservatism_of(v, mc.estimate).unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

fn run_instance(cfg: &SweepConfig, d: usize, index: usize) -> Result<Instance> {
    // a key per run seed and a stream per task: runs under different seeds
    // share no instances
    let task = ((d as u64) << 32) | index as u64;
    let mut rng = block_rng(cfg.seed, task);
    let (g, n_rejected) = draw_instance(cfg, d, &mut rng)?;
    let mc = mc_risk(&g, cfg.mc_samples, rng.next_u64())?;
    let estimates = [risk_spectral(&g)?, risk_first_order(&g)?, risk_dth_order(&g)?];
    Ok(Instance {
        dim: d,
        index,
        n_rejected,
        beta_r: mc.value(),
        mc_hits: mc.hits,
        beta_t: estimates.map(|e| e.risk().unwrap_or(f64::NAN)),
        gamma: estimates.map(|e| gamma(&e, &mc)),
    })
}

/// Linear-interpolation quantile of sorted data (the common "type 7").
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let (a, b) = (sorted[lo], sorted[hi]);
    if a == b {
        return a;
    }
    a + (h - lo as f64) * (b - a)
}

/// `(median, q1, q3, whisker_lo, whisker_hi)` with whiskers at the most
/// extreme data within 1.5 IQR of the quartiles. NaNs are ignored.
pub fn box_stats(values: &[f64]) -> (f64, f64, f64, f64, f64) {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    }
    v.sort_by(f64::total_cmp);
    let median = quantile_sorted(&v, 0.5);
    let q1 = quantile_sorted(&v, 0.25);
    let q3 = quantile_sorted(&v, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = if iqr.is_finite() {
        (q1 - 1.5 * iqr, q3 + 1.5 * iqr)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    };
    let whisker_lo = v.iter().copied().find(|&x| x >= lo_fence).unwrap_or(q1);
    let whisker_hi = v.iter().rev().copied().find(|&x| x <= hi_fence).unwrap_or(q3);
    (median, q1, q3, whisker_lo, whisker_hi)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&d| (0..cfg.n_dists).map(move |k| (d, k)))
        .collect();
    let instances = tasks
        .par_iter()
        .map(|&(d, k)| run_instance(cfg, d, k))
        .collect::<Result<Vec<_>>>()?;

    let mut summary = Vec::with_capacity(cfg.dims.len() * METHODS.len());
    for &d in &cfg.dims {
        let here: Vec<&Instance> = instances.iter().filter(|i| i.dim == d).collect();
        let n_rejected = here.iter().map(|i| i.n_rejected).sum();
        if n_rejected > 0 {
            log::info!("d = {d}: {n_rejected} draws rejected and redrawn");
        }
        let unresolved = here.iter().filter(|i| i.gamma[0].is_nan()).count();
        if unresolved > 0 {
            log::warn!(
                "d = {d}: {unresolved} of {} instances had no sampled failure and are \
                 left out of the statistics",
                here.len()
            );
        }
        for (m, &method) in METHODS.iter().enumerate() {
            let gammas: Vec<f64> = here.iter().map(|i| i.gamma[m]).collect();
            let (median, q1, q3, whisker_lo, whisker_hi) = box_stats(&gammas);
            summary.push(SummaryRow {
                dim: d,
                method,
                median,
                q1,
                q3,
                whisker_lo,
                whisker_hi,
                n_rejected,
            });
        }
    }
    Ok(SweepOutput { instances, summary })
}
