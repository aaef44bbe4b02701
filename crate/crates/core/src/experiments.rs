//! Benchmark experiments driven by a JSON run specification.
//!
//! Every experiment writes into its output directory:
//! * `runspec.json`, the fully defaulted specification;
//! * a markdown and a CSV table (deterministic for a fixed specification);
//! * one iteration trace per table cell under `traces/`;
//! * for the contraction, VTK fields under `fields/`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::accelerator::{AaConfig, Damping, Status};
use crate::assembly::{Assembler, PhysicalParams};
use crate::error::{Error, Result};
use crate::fe_space::norms::error_norms;
use crate::fe_space::{DiscreteState, FeSpace, Norms};
use crate::mesh::{ContractionGeometry, TriMesh};
use crate::picard::{solve_with_map, FixedPointMap, InitialGuess};
use crate::problems::{contraction_bcs, manufactured_config, ContractionInflow, Manufactured};
use crate::vtk::export_vtk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Mms,
    Sweep,
    Contraction,
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mms" => Ok(Self::Mms),
            "sweep" => Ok(Self::Sweep),
            "contraction" => Ok(Self::Contraction),
            other => Err(Error::Config(format!(
                "unknown experiment {other:?}; expected mms, sweep or contraction"
            ))),
        }
    }
}

/// One solver column: plain Picard when `depth = 0` and `beta = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub depth: usize,
    pub beta: f64,
}

impl SolverSpec {
    pub const PICARD: SolverSpec = SolverSpec { depth: 0, beta: 1.0 };

    pub fn is_picard(&self) -> bool {
        self.depth == 0 && self.beta == 1.0
    }

    pub fn label(&self) -> String {
        if self.is_picard() {
            "Picard".into()
        } else {
            format!("AA m={} beta={}", self.depth, self.beta)
        }
    }

    fn slug(&self) -> String {
        if self.is_picard() {
            "picard".into()
        } else {
            format!("aa_m{}_b{}", self.depth, self.beta)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub experiment: Experiment,
    /// Base mesh. For the contraction, cells along x and y; for the
    /// manufactured problem only `sizes` is used.
    pub nx: usize,
    pub ny: usize,
    /// Number of uniformly refined contraction meshes, starting at `nx x ny`.
    pub levels: usize,
    /// Unit-square sizes of the manufactured study.
    pub sizes: Vec<usize>,
    pub geometry: ContractionGeometry,
    pub inflow: ContractionInflow,
    pub lambdas: Vec<f64>,
    pub alpha: f64,
    pub solvers: Vec<SolverSpec>,
    pub ridge: f64,
    pub safeguard_sigma: f64,
    pub first_step_damped: bool,
    pub tol: f64,
    pub max_iter: usize,
    pub divergence_threshold: f64,
    /// Start each sweep entry from the previous converged state of its column.
    pub warm_start: bool,
    pub out: PathBuf,
    pub write_vtk: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self::defaults_for(Experiment::Contraction)
    }
}

impl RunSpec {
    pub fn defaults_for(experiment: Experiment) -> Self {
        let aa = AaConfig::default();
        let base = Self {
            experiment,
            nx: 32,
            ny: 16,
            levels: 2,
            sizes: vec![8, 16, 32],
            geometry: ContractionGeometry::default(),
            inflow: ContractionInflow::default(),
            lambdas: vec![0.7],
            alpha: 8.0 / 9.0,
            solvers: vec![SolverSpec::PICARD, SolverSpec { depth: 20, beta: 0.5 }],
            ridge: aa.ridge,
            safeguard_sigma: aa.safeguard_sigma,
            first_step_damped: aa.first_step_damped,
            tol: aa.tol_inf,
            max_iter: 300,
            divergence_threshold: aa.divergence_threshold,
            warm_start: false,
            out: PathBuf::from("results"),
            write_vtk: true,
        };
        match experiment {
            Experiment::Contraction => base,
            Experiment::Mms => Self {
                lambdas: vec![0.0, 0.05],
                alpha: 0.5,
                solvers: vec![SolverSpec { depth: 5, beta: 1.0 }],
                max_iter: 100,
                ..base
            },
            Experiment::Sweep => Self {
                levels: 1,
                lambdas: (0..=17).map(|i| f64::from(i) / 10.0).collect(),
                solvers: vec![
                    SolverSpec::PICARD,
                    SolverSpec { depth: 1, beta: 1.0 },
                    SolverSpec { depth: 10, beta: 0.7 },
                    SolverSpec { depth: 20, beta: 0.5 },
                ],
                warm_start: true,
                write_vtk: false,
                ..base
            },
        }
    }

    /// Parse a JSON document; missing fields take the defaults of the
    /// experiment it names.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let experiment = match value.get("experiment") {
            Some(e) => serde_json::from_value(e.clone())?,
            None => Experiment::Contraction,
        };
        let mut merged = serde_json::to_value(Self::defaults_for(experiment))?;
        if let (Some(dst), Some(src)) = (merged.as_object_mut(), value.as_object()) {
            for (k, v) in src {
                dst.insert(k.clone(), v.clone());
            }
        }
        let spec: Self = serde_json::from_value(merged)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run specification serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::Config("lambda list is empty".into()));
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::Config("lambdas must be finite and >= 0".into()));
        }
        if self.experiment == Experiment::Sweep && self.lambdas.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("sweep lambdas must be nondecreasing".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("at least one solver column is required".into()));
        }
        for s in &self.solvers {
            self.aa_config(s).validate()?;
        }
        match self.experiment {
            Experiment::Mms => {
                if self.sizes.is_empty() || self.sizes.contains(&0) {
                    return Err(Error::Config("manufactured study needs positive mesh sizes".into()));
                }
            }
            _ => {
                if self.levels == 0 {
                    return Err(Error::Config("levels must be at least 1".into()));
                }
                TriMesh::contraction(&self.geometry, self.nx, self.ny)?;
            }
        }
        Ok(())
    }

    pub fn aa_config(&self, s: &SolverSpec) -> AaConfig {
        AaConfig {
            depth: s.depth,
            damping: Damping::Constant(s.beta),
            ridge: self.ridge,
            safeguard_sigma: self.safeguard_sigma,
            first_step_damped: self.first_step_damped,
            max_iter: self.max_iter,
            tol_inf: self.tol,
            divergence_threshold: self.divergence_threshold,
        }
    }
}

/// Outcome of one solve inside a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub status: Option<Status>,
    pub iterations: usize,
    /// Set when the fixed-point map failed (e.g. a singular linear system).
    pub error: Option<String>,
}

impl CellResult {
    pub fn converged(&self) -> bool {
        self.status == Some(Status::Converged)
    }

    /// Table entry: iteration count, `Diverge`, `>N` or `failed`.
    pub fn display(&self) -> String {
        match self.status {
            Some(Status::Converged) => self.iterations.to_string(),
            Some(Status::Diverged) => "Diverge".into(),
            Some(Status::MaxIter) => format!(">{}", self.iterations),
            None => "failed".into(),
        }
    }

    fn status_str(&self) -> String {
        self.status.map_or_else(|| "failed".into(), |s| s.to_string())
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("traces")).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn lambda_slug(l: f64) -> String {
    format!("{l}").replace('.', "p")
}

/// Solve once, persist the trace, and summarize.
fn run_cell(
    map: &mut FixedPointMap,
    guess: &InitialGuess,
    aa: &AaConfig,
    trace_path: &Path,
) -> Result<(CellResult, Option<DiscreteState>)> {
    match solve_with_map(map, guess, aa) {
        Ok((state, trace)) => {
            trace.write_csv(trace_path)?;
            let cell = CellResult {
                status: Some(trace.status),
                iterations: trace.iterations(),
                error: None,
            };
            Ok((cell, Some(state)))
        }
        Err(e @ (Error::MapEvaluation { .. } | Error::NonFinite(_) | Error::LinearSolver(_))) => {
            write(trace_path, &format!("{}\n# failed: {e}\n", crate::trace::CSV_HEADER))?;
            Ok((
                CellResult {
                    status: None,
                    iterations: 0,
                    error: Some(e.to_string()),
                },
                None,
            ))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Manufactured solution study

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmsRow {
    pub lambda: f64,
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub cell: CellResult,
    pub errors: Option<Norms>,
    /// Observed orders of `(|u|_0, |u|_1, |sigma|_0)` against the previous row.
    pub orders: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmsReport {
    pub rows: Vec<MmsRow>,
}

impl MmsReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::from(
            "| lambda | n | h | DoF | iterations | err u L2 | err u H1 | err sigma L2 | order u L2 | order u H1 | order sigma L2 |\n\
             |---|---|---|---|---|---|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            let e = |f: fn(&Norms) -> f64| r.errors.as_ref().map_or("-".into(), |n| format!("{:.4e}", f(n)));
            let o = |i: usize| r.orders.map_or("-".into(), |o| format!("{:.2}", o[i]));
            let _ = writeln!(
                s,
                "| {} | {} | {:.4} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.lambda,
                r.n,
                r.h,
                r.dofs,
                r.cell.display(),
                e(|n| n.l2_u),
                e(|n| n.h1_u()),
                e(|n| n.l2_sigma),
                o(0),
                o(1),
                o(2)
            );
        }
        s.push_str(
            "\nErrors are measured against the analytic lambda = 0 solution. For lambda > 0 \
             the same body force is used, so the errors level off at the O(lambda) model difference.\n",
        );
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,n,h,dofs,status,iterations,err_u_l2,err_u_h1,err_sigma_l2,order_u_l2,order_u_h1,order_sigma_l2\n");
        for r in &self.rows {
            let e = r.errors.map_or([f64::NAN; 3], |n| [n.l2_u, n.h1_u(), n.l2_sigma]);
            let o = r.orders.unwrap_or([f64::NAN; 3]);
            let _ = writeln!(
                s,
                "{},{},{:e},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.lambda,
                r.n,
                r.h,
                r.dofs,
                r.cell.status_str(),
                r.cell.iterations,
                e[0],
                e[1],
                e[2],
                o[0],
                o[1],
                o[2]
            );
        }
        s
    }
}

pub fn run_mms(spec: &RunSpec) -> Result<MmsReport> {
    spec.validate()?;
    prepare_dir(&spec.out)?;
    let solver = spec.solvers[0];
    let aa = spec.aa_config(&solver);
    let exact = Manufactured { alpha: spec.alpha };
    let mut rows: Vec<MmsRow> = Vec::new();
    for &lambda in &spec.lambdas {
        let mut prev: Option<(f64, Norms)> = None;
        for &n in &spec.sizes {
            let cfg = manufactured_config(n, lambda, spec.alpha, aa.clone())?;
            let mut map = FixedPointMap::new(&cfg)?;
            let path = spec.out.join("traces").join(format!("mms_l{}_n{n}_{}.csv", lambda_slug(lambda), solver.slug()));
            let (cell, state) = run_cell(&mut map, &InitialGuess::Stokes, &aa, &path)?;
            let h = cfg.space.mesh().h_max();
            let errors = state.filter(|_| cell.converged()).map(|s| error_norms(&cfg.space, &s, &exact));
            let orders = match (prev, errors) {
                (Some((hp, ep)), Some(e)) => {
                    let r = (hp / h).ln();
                    Some([
                        (ep.l2_u / e.l2_u).ln() / r,
                        (ep.h1_u() / e.h1_u()).ln() / r,
                        (ep.l2_sigma / e.l2_sigma).ln() / r,
                    ])
                }
                _ => None,
            };
            prev = errors.map(|e| (h, e));
            rows.push(MmsRow {
                lambda,
                n,
                h,
                dofs: cfg.space.layout().dim(),
                cell,
                errors,
                orders,
            });
        }
    }
    let report = MmsReport { rows };
    write(&spec.out.join("runspec.json"), &spec.to_json())?;
    write(&spec.out.join("mms.md"), &report.to_markdown())?;
    write(&spec.out.join("mms.csv"), &report.to_csv())?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Lambda sweep

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub lambdas: Vec<f64>,
    pub solvers: Vec<SolverSpec>,
    /// `cells[i][j]`: lambda `i`, solver `j`.
    pub cells: Vec<Vec<CellResult>>,
    pub nx: usize,
    pub ny: usize,
    pub warm_start: bool,
}

impl SweepReport {
    pub fn cell(&self, lambda_index: usize, solver: &SolverSpec) -> Option<&CellResult> {
        let j = self.solvers.iter().position(|s| s == solver)?;
        self.cells.get(lambda_index)?.get(j)
    }

    /// Largest lambda of the leading run of converged entries in a column.
    pub fn max_convergent_lambda(&self, solver: &SolverSpec) -> Option<f64> {
        let j = self.solvers.iter().position(|s| s == solver)?;
        let mut best = None;
        for (i, row) in self.cells.iter().enumerate() {
            if !row[j].converged() {
                break;
            }
            best = Some(self.lambdas[i]);
        }
        best
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| lambda |");
        for sv in &self.solvers {
            let _ = write!(s, " {} |", sv.label());
        }
        s.push_str("\n|---|");
        s.push_str(&"---|".repeat(self.solvers.len()));
        s.push('\n');
        for (l, row) in self.lambdas.iter().zip(&self.cells) {
            let _ = write!(s, "| {l:.1} |");
            for c in row {
                let _ = write!(s, " {} |", c.display());
            }
            s.push('\n');
        }
        let _ = write!(
            s,
            "\nIteration counts on the {}x{} half 4:1 contraction mesh, {}. \
             `Diverge`: residual above the divergence threshold or non-finite; \
             `>N`: no convergence within N evaluations. \
             Counts for flow past a cylinder come from a different geometry, \
             so only the qualitative pattern carries over.\n",
            self.nx,
            self.ny,
            if self.warm_start { "warm-started from the previous lambda" } else { "cold start from the lambda = 0 state" }
        );
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,solver,depth,beta,status,iterations\n");
        for (l, row) in self.lambdas.iter().zip(&self.cells) {
            for (sv, c) in self.solvers.iter().zip(row) {
                let _ = writeln!(s, "{l},{},{},{},{},{}", sv.label(), sv.depth, sv.beta, c.status_str(), c.iterations);
            }
        }
        s
    }
}

fn sweep_column(spec: &RunSpec, assembler: &Assembler, solver: &SolverSpec) -> Result<Vec<CellResult>> {
    let aa = spec.aa_config(solver);
    let mut previous: Option<DiscreteState> = None;
    let mut cells = Vec::with_capacity(spec.lambdas.len());
    for &lambda in &spec.lambdas {
        let bcs = contraction_bcs(&spec.geometry, spec.inflow, lambda, spec.alpha);
        let mut map = FixedPointMap::with_assembler(assembler.clone(), lambda, bcs)?;
        let guess = match (&previous, spec.warm_start) {
            (Some(s), true) => InitialGuess::Provided(s.clone()),
            _ => InitialGuess::Stokes,
        };
        let path = spec.out.join("traces").join(format!("sweep_l{}_{}.csv", lambda_slug(lambda), solver.slug()));
        let (cell, state) = run_cell(&mut map, &guess, &aa, &path)?;
        previous = if cell.converged() { state } else { None };
        cells.push(cell);
    }
    Ok(cells)
}

pub fn run_sweep(spec: &RunSpec) -> Result<SweepReport> {
    spec.validate()?;
    prepare_dir(&spec.out)?;
    let space = std::sync::Arc::new(FeSpace::new(TriMesh::contraction(&spec.geometry, spec.nx, spec.ny)?)?);
    let assembler = Assembler::new(space, &PhysicalParams::unforced(0.0, spec.alpha)?)?;
    // Columns are independent (warm starts chain only within a column).
    let columns: Vec<Result<Vec<CellResult>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = spec
            .solvers
            .iter()
            .map(|solver| {
                let assembler = assembler.clone();
                scope.spawn(move || sweep_column(spec, &assembler, solver))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut cells = vec![Vec::with_capacity(spec.solvers.len()); spec.lambdas.len()];
    for column in columns {
        for (row, cell) in cells.iter_mut().zip(column?) {
            row.push(cell);
        }
    }
    let report = SweepReport {
        lambdas: spec.lambdas.clone(),
        solvers: spec.solvers.clone(),
        cells,
        nx: spec.nx,
        ny: spec.ny,
        warm_start: spec.warm_start,
    };
    write(&spec.out.join("runspec.json"), &spec.to_json())?;
    write(&spec.out.join("sweep.md"), &report.to_markdown())?;
    write(&spec.out.join("sweep.csv"), &report.to_csv())?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Contraction benchmark

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionCell {
    pub solver: SolverSpec,
    pub cell: CellResult,
    pub norms: Option<Norms>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionRow {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub dofs: usize,
    pub results: Vec<ContractionCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub lambda: f64,
    pub alpha: f64,
    pub rows: Vec<ContractionRow>,
}

impl ContractionReport {
    pub fn to_markdown(&self) -> String {
        let mut s = format!("lambda = {}, alpha = {:.6}\n\n", self.lambda, self.alpha);
        s.push_str("| mesh | DoF | dx | dy | solver | iterations | norm u L2 | norm u H1 | seminorm u H1 | norm s L2 |\n");
        s.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            for c in &r.results {
                let n = |f: fn(&Norms) -> f64| c.norms.as_ref().map_or("-".into(), |n| format!("{:.6}", f(n)));
                let _ = writeln!(
                    s,
                    "| {}x{} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.nx,
                    r.ny,
                    r.dofs,
                    r.dx,
                    r.dy,
                    c.solver.label(),
                    c.cell.display(),
                    n(|n| n.l2_u),
                    n(|n| n.h1_u()),
                    n(|n| n.h1_semi_u),
                    n(|n| n.l2_sigma)
                );
            }
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("nx,ny,dx,dy,dofs,solver,status,iterations,u_l2,u_h1,u_h1_semi,s_l2\n");
        for r in &self.rows {
            for c in &r.results {
                let n = c.norms.map_or([f64::NAN; 4], |n| [n.l2_u, n.h1_u(), n.h1_semi_u, n.l2_sigma]);
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{:.10e},{:.10e},{:.10e},{:.10e}",
                    r.nx,
                    r.ny,
                    r.dx,
                    r.dy,
                    r.dofs,
                    c.solver.label(),
                    c.cell.status_str(),
                    c.cell.iterations,
                    n[0],
                    n[1],
                    n[2],
                    n[3]
                );
            }
        }
        s
    }
}

pub fn run_contraction(spec: &RunSpec) -> Result<ContractionReport> {
    spec.validate()?;
    prepare_dir(&spec.out)?;
    if spec.write_vtk {
        fs::create_dir_all(spec.out.join("fields")).map_err(|e| Error::io(&spec.out, e))?;
    }
    let lambda = spec.lambdas[0];
    let g = &spec.geometry;
    let mut rows = Vec::new();
    for level in 0..spec.levels {
        let (nx, ny) = (spec.nx << level, spec.ny << level);
        let space = std::sync::Arc::new(FeSpace::new(TriMesh::contraction(g, nx, ny)?)?);
        let assembler = Assembler::new(space.clone(), &PhysicalParams::unforced(lambda, spec.alpha)?)?;
        let mut results = Vec::new();
        for solver in &spec.solvers {
            let aa = spec.aa_config(solver);
            let bcs = contraction_bcs(g, spec.inflow, lambda, spec.alpha);
            let mut map = FixedPointMap::with_assembler(assembler.clone(), lambda, bcs)?;
            let stem = format!("contraction_{nx}x{ny}_{}", solver.slug());
            let (cell, state) = run_cell(&mut map, &InitialGuess::Stokes, &aa, &spec.out.join("traces").join(format!("{stem}.csv")))?;
            let norms = state.as_ref().filter(|_| cell.converged()).map(|s| space.norms(s));
            if let (true, Some(s)) = (spec.write_vtk && cell.converged(), &state) {
                export_vtk(&space, s, &spec.out.join("fields").join(format!("{stem}.vtk")))?;
            }
            results.push(ContractionCell {
                solver: *solver,
                cell,
                norms,
            });
        }
        rows.push(ContractionRow {
            nx,
            ny,
            dx: (g.upstream_length + g.downstream_length) / nx as f64,
            dy: g.upstream_height / ny as f64,
            dofs: space.layout().dim(),
            results,
        });
    }
    let report = ContractionReport {
        lambda,
        alpha: spec.alpha,
        rows,
    };
    write(&spec.out.join("runspec.json"), &spec.to_json())?;
    write(&spec.out.join("contraction.md"), &report.to_markdown())?;
    write(&spec.out.join("contraction.csv"), &report.to_csv())?;
    Ok(report)
}

/// Dispatch on `spec.experiment`; returns the markdown table.
pub fn run(spec: &RunSpec) -> Result<String> {
    Ok(match spec.experiment {
        Experiment::Mms => run_mms(spec)?.to_markdown(),
        Experiment::Sweep => run_sweep(spec)?.to_markdown(),
        Experiment::Contraction => run_contraction(spec)?.to_markdown(),
    })
}
