use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use oldroyd_core::experiments::{self, Experiment, RunSpec, SolverSpec};
use oldroyd_core::Error;

/// Picard and Anderson-accelerated Picard solves of steady Oldroyd-B flow.
///
/// Settings are read from `--config` (JSON) when given, then overridden by
/// the flags below. Tables are printed to stdout and written, together with
/// per-run traces and the effective configuration, to the output directory.
#[derive(Debug, Parser)]
#[command(name = "oldroyd", version)]
struct Cli {
    /// mms, sweep or contraction. Defaults to the configuration file value,
    /// otherwise contraction.
    #[arg(long)]
    experiment: Option<Experiment>,

    /// JSON run specification.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Weissenberg numbers, comma separated (a single value except for sweeps).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    lambda: Option<Vec<f64>>,

    /// Polymeric viscosity fraction in (0, 1).
    #[arg(long)]
    alpha: Option<f64>,

    /// Anderson depth of the accelerated solver.
    #[arg(long)]
    m: Option<usize>,

    /// Damping of the accelerated solver.
    #[arg(long)]
    beta: Option<f64>,

    /// Stopping tolerance on the infinity norm of the residual.
    #[arg(long)]
    tol: Option<f64>,

    #[arg(long)]
    max_iter: Option<usize>,

    #[arg(long)]
    mesh_nx: Option<usize>,

    #[arg(long)]
    mesh_ny: Option<usize>,

    /// Start each sweep entry from the previous converged state.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    warm_start: Option<bool>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn spec(&self) -> oldroyd_core::Result<RunSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let mut spec = RunSpec::from_json(&text)?;
                if let Some(e) = self.experiment.filter(|e| *e != spec.experiment) {
                    // Switching experiment keeps the file's values but takes the
                    // new experiment's defaults for everything the file omits.
                    let mut value: serde_json::Value = serde_json::from_str(&text)?;
                    value["experiment"] = serde_json::to_value(e)?;
                    spec = RunSpec::from_json(&value.to_string())?;
                }
                spec
            }
            None => RunSpec::defaults_for(self.experiment.unwrap_or(Experiment::Contraction)),
        };
        if let Some(l) = &self.lambda {
            spec.lambdas = l.clone();
        }
        if let Some(a) = self.alpha {
            spec.alpha = a;
        }
        if self.m.is_some() || self.beta.is_some() {
            let base = spec.solvers.iter().rev().find(|s| !s.is_picard()).copied().unwrap_or(SolverSpec {
                depth: 10,
                beta: 1.0,
            });
            let accelerated = SolverSpec {
                depth: self.m.unwrap_or(base.depth),
                beta: self.beta.unwrap_or(base.beta),
            };
            spec.solvers = match spec.experiment {
                Experiment::Mms => vec![accelerated],
                _ if accelerated.is_picard() => vec![SolverSpec::PICARD],
                _ => vec![SolverSpec::PICARD, accelerated],
            };
        }
        if let Some(t) = self.tol {
            spec.tol = t;
        }
        if let Some(k) = self.max_iter {
            spec.max_iter = k;
        }
        if let Some(n) = self.mesh_nx {
            spec.nx = n;
        }
        if let Some(n) = self.mesh_ny {
            spec.ny = n;
        }
        if let Some(w) = self.warm_start {
            spec.warm_start = w;
        }
        if let Some(o) = &self.out {
            spec.out = o.clone();
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Dimension { .. } => 2,
        Error::Io { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.spec().and_then(|spec| {
        let table = experiments::run(&spec)?;
        Ok((spec, table))
    });
    match result {
        Ok((spec, table)) => {
            println!("{table}");
            eprintln!("results written to {}", spec.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
