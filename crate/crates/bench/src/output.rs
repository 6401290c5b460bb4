//! CSV and JSON writers. Floats are written in shortest round-trip form.

use std::io::Write;

use serde::Serialize;

use crate::check::CheckReport;
use crate::sweep::SweepOutput;
use crate::tables::ResultTable;
use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
    /// Aligned columns for reading in a terminal (tables only).
    Text,
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::other)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct TableCsvRow<'a> {
    table: &'a str,
    dim: usize,
    method: &'a str,
    risk: Option<f64>,
    risk_complement: Option<f64>,
    risk_pct: &'a str,
    gamma: Option<f64>,
    mc_samples: u64,
    seed: u64,
}

pub fn write_tables_csv<W: Write>(w: W, tables: &[ResultTable]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    for t in tables {
        for r in &t.rows {
            out.serialize(TableCsvRow {
                table: &t.table,
                dim: t.dim,
                method: &r.method,
                risk: r.risk,
                risk_complement: r.risk_complement,
                risk_pct: &r.risk_pct,
                gamma: r.gamma,
                mc_samples: t.mc_samples,
                seed: t.seed,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One record per (dimension, method): dim, method, median, q1, q3,
/// whisker_lo, whisker_hi, n_rejected.
pub fn write_sweep_csv<W: Write>(w: W, sweep: &SweepOutput) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    for row in &sweep.summary {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PlotRow<'a> {
    dim: usize,
    index: usize,
    method: &'a str,
    gamma: f64,
    beta_t: f64,
    beta_r: f64,
    mc_hits: u64,
}

/// Long-format per-instance data, one record per (instance, method).
pub fn write_plot_data<W: Write>(w: W, sweep: &SweepOutput) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    for inst in &sweep.instances {
        for (m, method) in crate::sweep::METHODS.iter().enumerate() {
            out.serialize(PlotRow {
                dim: inst.dim,
                index: inst.index,
                method,
                gamma: inst.gamma[m],
                beta_t: inst.beta_t[m],
                beta_r: inst.beta_r,
                mc_hits: inst.mc_hits,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CheckCsvRow<'a> {
    method: &'a str,
    beta: f64,
    satisfied: bool,
    max_margin: f64,
    risk: Option<f64>,
}

pub fn write_check_csv<W: Write>(w: W, report: &CheckReport) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    for (v, r) in report.verdicts.iter().zip(&report.risks) {
        out.serialize(CheckCsvRow {
            method: v.method.name(),
            beta: v.beta,
            satisfied: v.satisfied,
            max_margin: v.margins.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            risk: r.risk(),
        })?;
    }
    out.flush()?;
    Ok(())
}
