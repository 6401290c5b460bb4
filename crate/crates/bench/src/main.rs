use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ccrisk_bench::check::{check_status, parse_input, run_check};
use ccrisk_bench::fixtures::{EarthMarsFixture, TerminalCovariance, PLACEHOLDER_TARGET};
use ccrisk_bench::output::{
    write_check_csv, write_json, write_plot_data, write_sweep_csv, write_tables_csv, Format,
};
use ccrisk_bench::sweep::{run_sweep, SweepConfig};
use ccrisk_bench::tables::{render_text, run_table1, run_table2, BoxScope, ResultTable};
use ccrisk_bench::CliError;
use clap::{Parser, Subcommand};

/// Risk bounds for Gaussian chance constraints: transfer tables, dimension
/// sweep, and checks of user-supplied constraints.
///
/// Monte-Carlo references count failures directly, without importance
/// sampling; resolving a risk β takes well over 1/β samples.
#[derive(Parser, Debug)]
#[command(name = "ccrisk", version)]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo samples (accepts 1e8 notation); 0 skips the reference.
    #[arg(long, global = true, value_parser = parse_count)]
    mc_samples: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Reduced sweep: 100 distributions per dimension.
    #[arg(long, global = true)]
    quick: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Thrust-magnitude constraint on the first control (default 1e8 samples).
    Table1,
    /// Terminal box constraints (default 1e7 samples).
    Table2 {
        /// Target state, six comma-separated normalized components. Without it
        /// an invented placeholder is used and the output is not a reproduction.
        #[arg(long, value_parser = parse_target)]
        target_state: Option<[f64; 6]>,
        /// Constrained components; both when omitted.
        #[arg(long, value_enum)]
        scope: Option<BoxScope>,
        /// Printing of the terminal covariance to use.
        #[arg(long, value_enum, default_value_t = TerminalCovariance::Source)]
        terminal_cov: TerminalCovariance,
    },
    /// Conservatism against dimension on random Gaussians (default 1e5 samples).
    Sweep {
        /// Dimensions, as a range `1..25` or list `1,5,10`.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<Dims>,
        /// Distributions per dimension (default 1000, or 100 with --quick).
        #[arg(long)]
        n_dists: Option<usize>,
        #[arg(long, default_value_t = 1e-3)]
        beta: f64,
        /// Read the second parameter of the generating normal laws as a
        /// variance (the default).
        #[arg(long, conflicts_with = "second_param_is_std")]
        second_param_is_variance: bool,
        /// Read the second parameter of the generating normal laws as a
        /// standard deviation. The true risk then falls below what the
        /// Monte-Carlo reference resolves from about d = 15.
        #[arg(long)]
        second_param_is_std: bool,
        /// Also write per-instance long-format CSV for plotting.
        #[arg(long)]
        emit_plot_data: Option<PathBuf>,
    },
    /// Check a constraint given as JSON {"mean", "cov", "beta", "methods"}.
    Check {
        /// Input file, or `-` for stdin.
        input: PathBuf,
        /// Add a Monte-Carlo conservatism report (default 1e6 samples).
        #[arg(long)]
        mc: bool,
    },
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("not a nonnegative integer: {s}"))
    }
}

fn parse_target(s: &str) -> Result<[f64; 6], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("expected 6 components, got {}", v.len()))
}

/// A dimension list; a newtype so that clap takes it as one value.
#[derive(Clone, Debug)]
struct Dims(Vec<usize>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    let bad = |t: &str| format!("invalid dimension: {t}");
    let dims: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad(a))?;
        let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad(b))?;
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad(t)))
            .collect::<Result<_, _>>()?
    };
    if dims.is_empty() || dims.contains(&0) {
        return Err("dimensions must be a nonempty set of positive integers".into());
    }
    Ok(Dims(dims))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_tables(cli: &Cli, tables: &[ResultTable]) -> Result<(), CliError> {
    let mut w = open_output(&cli.out)?;
    match cli.format {
        Format::Csv => write_tables_csv(&mut w, tables)?,
        Format::Json => write_json(&mut w, tables)?,
        Format::Text => {
            for t in tables {
                writeln!(w, "{}", render_text(t))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let fixture = EarthMarsFixture::default();
    match &cli.command {
        Command::Table1 => {
            let n = cli.mc_samples.unwrap_or(100_000_000);
            let t = run_table1(&fixture, n, cli.seed)?;
            emit_tables(cli, &[t])
        }
        Command::Table2 {
            target_state,
            scope,
            terminal_cov,
        } => {
            let n = cli.mc_samples.unwrap_or(10_000_000);
            let note = target_state.is_none().then(|| {
                log::warn!("no --target-state given; using an invented placeholder target");
                "placeholder target state; not a reproduction".to_string()
            });
            let target = target_state.unwrap_or(PLACEHOLDER_TARGET);
            let scopes = match scope {
                Some(s) => vec![*s],
                None => vec![BoxScope::Position, BoxScope::Full],
            };
            let tables = scopes
                .into_iter()
                .map(|s| {
                    let mut t = run_table2(&fixture, &target, s, *terminal_cov, n, cli.seed)?;
                    t.note = note.clone();
                    Ok(t)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            emit_tables(cli, &tables)
        }
        Command::Sweep {
            dims,
            n_dists,
            beta,
            second_param_is_variance: _,
            second_param_is_std,
            emit_plot_data,
        } => {
            let mut cfg = SweepConfig {
                beta: *beta,
                seed: cli.seed,
                second_param_is_variance: !*second_param_is_std,
                ..SweepConfig::default()
            };
            if cli.quick {
                cfg = cfg.quick();
            }
            if let Some(d) = dims {
                cfg.dims = d.0.clone();
            }
            if let Some(n) = n_dists {
                cfg.n_dists = *n;
            }
            if let Some(n) = cli.mc_samples {
                cfg.mc_samples = n as usize;
            }
            if cfg.n_dists == 0 || cfg.mc_samples == 0 || !(cfg.beta > 0.0 && cfg.beta < 1.0) {
                return Err(CliError::Usage(
                    "sweep needs n_dists ≥ 1, mc-samples ≥ 1 and 0 < beta < 1".into(),
                ));
            }
            let out = run_sweep(&cfg)?;
            let mut w = open_output(&cli.out)?;
            match cli.format {
                Format::Json => write_json(&mut w, &out.summary)?,
                Format::Csv | Format::Text => write_sweep_csv(&mut w, &out)?,
            }
            w.flush()?;
            if let Some(path) = emit_plot_data {
                let mut p = BufWriter::new(File::create(path)?);
                write_plot_data(&mut p, &out)?;
                p.flush()?;
            }
            Ok(())
        }
        Command::Check { input, mc } => {
            let mut text = String::new();
            if input.as_os_str() == "-" {
                io::stdin().read_to_string(&mut text)?;
            } else {
                text = std::fs::read_to_string(input).map_err(|e| {
                    CliError::Usage(format!("cannot read {}: {e}", input.display()))
                })?;
            }
            let (g, beta, methods) = parse_input(&text)?;
            let n = if *mc { cli.mc_samples.unwrap_or(1_000_000) } else { 0 };
            let report = run_check(&g, beta, &methods, n, cli.seed)?;
            let mut w = open_output(&cli.out)?;
            match cli.format {
                Format::Csv => write_check_csv(&mut w, &report)?,
                Format::Json | Format::Text => write_json(&mut w, &report)?,
            }
            w.flush()?;
            check_status(&report)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
