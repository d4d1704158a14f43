//! Argument parsing and the three verbs.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{CommandFactory, Parser, Subcommand};
use nfix_core::estimate::{operator_norm, NormMethod};
use nfix_core::solver::{solve, SolverReport};
use nfix_core::Error;

use crate::problem::{Problem, ProblemFile};
use crate::suites::{run_suite, Suite, SuiteParams};
use crate::trace::{format_real, write_trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nfix", version, about = "Fixed-point solvers and property checks in n-normed spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the solver configured in a problem file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Trace CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
    },
    /// Run property suites and emit their reports as JSON.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "NFIX_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long = "n", default_value_t = 3)]
        order: usize,
        /// JSON destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the operator norm of a linear operator by all three formulas.
    Opnorm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            if !e.render().to_string().contains("Usage:") {
                let _ = writeln!(err, "\n{}", Cli::command().render_usage());
            }
            return EXIT_INVALID;
        }
    };
    let result = match cli.command {
        Command::Solve { config, out: trace, tol, max_iter } => cmd_solve(&config, trace.as_deref(), tol, max_iter, out),
        Command::Check { suite, trials, seed, dim, order, out: dest } => {
            cmd_check(suite, &SuiteParams { trials, seed, dim, order }, dest.as_deref(), out)
        }
        Command::Opnorm { config, budget } => cmd_opnorm(&config, budget, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INVALID
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Problem> {
    let file = ProblemFile::load(path)?;
    Ok(file.validate()?)
}

pub fn cmd_solve(
    config: &Path,
    trace: Option<&Path>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    let problem = load(config)?;
    let mut cfg = problem.solver.ok_or_else(|| anyhow!("solver: missing"))?;
    let x0 = problem.x0.ok_or_else(|| anyhow!("x0: missing"))?;
    if let Some(t) = tol {
        cfg = cfg.with_tol(t);
    }
    if let Some(m) = max_iter {
        cfg = cfg.with_max_iter(m);
    }
    let report = match solve(&problem.operator, &problem.space, &x0, &cfg) {
        Ok(r) => r,
        Err(e @ Error::NonFiniteIterate(_)) => {
            writeln!(out, "regime: {}", cfg.regime.kind().name())?;
            writeln!(out, "converged: false")?;
            writeln!(out, "diverged: {e}")?;
            return Ok(EXIT_NOT_CONVERGED);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = trace {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_trace(BufWriter::new(file), &report.trace)?;
    }
    write_summary(out, &report)?;
    Ok(if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn optional(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_else(|| "none".into())
}

pub fn write_summary(out: &mut dyn Write, r: &SolverReport) -> std::io::Result<()> {
    writeln!(out, "regime: {}", r.regime.name())?;
    writeln!(out, "iterations: {}", r.iterations)?;
    writeln!(out, "converged: {}", r.converged)?;
    writeln!(out, "certified_error: {}", optional(r.certified_error))?;
    writeln!(out, "fixed_point_residual: {}", format_real(r.fixed_point_residual))?;
    writeln!(out, "independence_ok: {}", r.independence_ok)?;
    writeln!(out, "uniqueness: {}", match r.uniqueness_note {
        nfix_core::solver::UniquenessNote::KernelModuloUnique => "unique modulo the anchor span",
        nfix_core::solver::UniquenessNote::IndependenceConditionFailed => "independence condition failed",
    })?;
    if let Some(m) = r.max_containment {
        writeln!(out, "max_containment: {}", format_real(m))?;
    }
    if let Some(f) = r.ratios.iter().copied().reduce(f64::max) {
        writeln!(out, "max_ratio: {}", format_real(f))?;
    }
    let coords: Vec<String> = r.fixed_point.as_slice().iter().map(|c| format_real(*c)).collect();
    writeln!(out, "fixed_point: [{}]", coords.join(", "))
}

pub fn cmd_check(suite: Suite, params: &SuiteParams, dest: Option<&Path>, out: &mut dyn Write) -> anyhow::Result<i32> {
    let reports = run_suite(suite, params)?;
    let mut json = serde_json::to_string_pretty(&reports)?;
    json.push('\n');
    match dest {
        Some(path) => {
            std::fs::write(path, &json).with_context(|| format!("cannot write {}", path.display()))?;
            for r in &reports {
                writeln!(
                    out,
                    "{} {}: {} failures in {} trials, worst violation {}",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.property_id,
                    r.failures,
                    r.trials,
                    format_real(r.worst_violation)
                )?;
            }
        }
        None => out.write_all(json.as_bytes())?,
    }
    Ok(if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

pub fn cmd_opnorm(config: &Path, budget: usize, out: &mut dyn Write) -> anyhow::Result<i32> {
    let problem = load(config)?;
    let mut kernel_preserved = true;
    for method in NormMethod::ALL {
        let est = operator_norm(&problem.operator, &problem.space, method, budget, problem.seed)?;
        kernel_preserved = est.kernel_preserved;
        let value = match est.value.finite() {
            Some(v) => format_real(v),
            None => "infinite".into(),
        };
        writeln!(out, "method {}: {value}", method.label())?;
    }
    writeln!(out, "budget: {budget}")?;
    writeln!(out, "kernel_preserved: {kernel_preserved}")?;
    Ok(EXIT_OK)
}
