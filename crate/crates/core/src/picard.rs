//! The Picard fixed-point map and the plain and accelerated outer loops.

use std::sync::Arc;

use crate::accelerator::{self, AaConfig, Damping};
use crate::assembly::{Assembler, PhysicalParams, SparseSystem};
use crate::error::{Error, Result};
use crate::fe_space::bc::apply_constraints;
use crate::fe_space::{BoundaryConditions, DiscreteState, FeSpace};
use crate::linear_solver::LinearSolver;
use crate::trace::IterationTrace;

#[derive(Debug, Clone, Default)]
pub enum InitialGuess {
    Zero,
    /// The `lambda = 0` solution, one extra linear solve.
    #[default]
    Stokes,
    Provided(DiscreteState),
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub space: Arc<FeSpace>,
    pub params: PhysicalParams,
    pub aa: AaConfig,
    pub bcs: BoundaryConditions,
    pub initial_guess: InitialGuess,
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.aa.validate()?;
        self.bcs.check(self.space.mesh())
    }
}

/// `G`: solve the system linearized at the velocity of the input.
///
/// Only the velocity block of the input is read.
pub struct FixedPointMap {
    assembler: Assembler,
    bcs: BoundaryConditions,
    lambda: f64,
    constraints: Vec<(usize, f64)>,
    pin: Option<usize>,
    solver: LinearSolver,
    solves: usize,
}

impl std::fmt::Debug for FixedPointMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FixedPointMap")
            .field("lambda", &self.lambda)
            .field("constraints", &self.constraints.len())
            .field("pin", &self.pin)
            .field("solves", &self.solves)
            .finish()
    }
}

impl FixedPointMap {
    pub fn new(cfg: &SolveConfig) -> Result<Self> {
        cfg.validate()?;
        let assembler = Assembler::new(cfg.space.clone(), &cfg.params)?;
        Self::with_assembler(assembler, cfg.params.lambda, cfg.bcs.clone())
    }

    /// Reuse an assembler (and its cached lambda-independent terms).
    pub fn with_assembler(assembler: Assembler, lambda: f64, bcs: BoundaryConditions) -> Result<Self> {
        let space = assembler.space().clone();
        let mut constraints = bcs.velocity_constraints(&space)?;
        // With the normal velocity prescribed everywhere the pressure is
        // defined up to a constant: pin one value, shift to zero mean later.
        let pin = bcs
            .is_enclosed(space.mesh())
            .then(|| space.layout().pressure_dof(0));
        if let Some(p) = pin {
            constraints.push((p, 0.0));
        }
        let mut map = Self {
            assembler,
            bcs,
            lambda: 0.0,
            constraints,
            pin,
            solver: LinearSolver::new(),
            solves: 0,
        };
        map.set_lambda(lambda)?;
        Ok(map)
    }

    pub fn set_lambda(&mut self, lambda: f64) -> Result<()> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        self.lambda = lambda;
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn assembler(&self) -> &Assembler {
        &self.assembler
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        self.assembler.space()
    }

    /// Linear solves issued so far.
    pub fn solves(&self) -> usize {
        self.solves
    }

    /// Whether the pressure is pinned and shifted to zero mean.
    pub fn pressure_gauged(&self) -> bool {
        self.pin.is_some()
    }

    /// Linearized system at `u_k` with boundary conditions applied.
    pub fn linear_system(&self, u_k: &[f64]) -> Result<SparseSystem> {
        let mut sys = self.assembler.assemble(self.lambda, u_k, &self.bcs)?;
        apply_constraints(&mut sys.matrix, &mut sys.rhs, &self.constraints);
        Ok(sys)
    }

    pub fn apply(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        let layout = *self.space().layout();
        if x.len() != layout.dim() {
            return Err(Error::Dimension {
                context: "fixed-point map input",
                expected: layout.dim(),
                got: x.len(),
            });
        }
        let sys = self.linear_system(&x[layout.velocity_range()])?;
        let fact = self.solver.factorize(&sys.matrix, Some(&layout))?;
        self.solves += 1;
        let mut out = fact.solve(&sys.rhs)?;
        if self.pin.is_some() {
            let space = self.assembler.space().clone();
            space.shift_pressure_to_zero_mean(&mut out[layout.pressure_range()]);
        }
        Ok(out)
    }

    pub fn evaluate(&mut self, x: &DiscreteState) -> Result<DiscreteState> {
        let out = self.apply(&x.coeffs)?;
        DiscreteState::from_coeffs(x.layout, out)
    }
}

fn starting_point(map: &mut FixedPointMap, guess: &InitialGuess) -> Result<(Vec<f64>, usize)> {
    let layout = *map.space().layout();
    match guess {
        InitialGuess::Zero => Ok((vec![0.0; layout.dim()], 0)),
        InitialGuess::Stokes => {
            let lambda = map.lambda;
            map.lambda = 0.0;
            let x = map.apply(&vec![0.0; layout.dim()]);
            map.lambda = lambda;
            Ok((x?, 1))
        }
        InitialGuess::Provided(s) => {
            if s.layout != layout {
                return Err(Error::Dimension {
                    context: "provided initial guess",
                    expected: layout.dim(),
                    got: s.coeffs.len(),
                });
            }
            Ok((s.coeffs.clone(), 0))
        }
    }
}

/// Run the accelerator on `map` from `guess`.
pub fn solve_with_map(
    map: &mut FixedPointMap,
    guess: &InitialGuess,
    aa: &AaConfig,
) -> Result<(DiscreteState, IterationTrace)> {
    aa.validate()?;
    let layout = *map.space().layout();
    let (x0, setup_solves) = starting_point(map, guess)?;
    let mut rows = Vec::new();
    let out = accelerator::run(x0, |x| map.apply(x), aa, |r| rows.push(r.clone()))?;
    let trace = IterationTrace {
        rows,
        status: out.status,
        restarts: out.restarts,
        setup_solves,
    };
    Ok((DiscreteState::from_coeffs(layout, out.x)?, trace))
}

/// Plain Picard: `x <- G(x)`.
pub fn solve_picard(cfg: &SolveConfig) -> Result<(DiscreteState, IterationTrace)> {
    let mut map = FixedPointMap::new(cfg)?;
    let aa = AaConfig {
        depth: 0,
        damping: Damping::Constant(1.0),
        ..cfg.aa.clone()
    };
    solve_with_map(&mut map, &cfg.initial_guess, &aa)
}

/// Anderson-accelerated Picard over the full `(u, sigma, p)` vector.
pub fn solve_aa_picard(cfg: &SolveConfig) -> Result<(DiscreteState, IterationTrace)> {
    let mut map = FixedPointMap::new(cfg)?;
    solve_with_map(&mut map, &cfg.initial_guess, &cfg.aa)
}

/// `(||D(e_u)||^2 + ||e_sigma||^2)^(1/2)` between two discrete states.
pub fn problem_norm_distance(space: &FeSpace, a: &DiscreteState, b: &DiscreteState) -> f64 {
    space.norms(&a.difference(b)).star
}

/// Ratios of successive plain-Picard errors against `reference`, measured in
/// the problem norm. The sequence stops once the error is at or below
/// `floor`, at convergence, or after `cfg.aa.max_iter` steps. `floor` should
/// exceed the accuracy of `reference`, else the last ratios measure its error.
pub fn estimate_contraction_ratio(cfg: &SolveConfig, reference: &DiscreteState, floor: f64) -> Result<Vec<f64>> {
    let mut map = FixedPointMap::new(cfg)?;
    let space = map.space().clone();
    let (mut x, _) = starting_point(&mut map, &cfg.initial_guess)?;
    let layout = *space.layout();
    let err = |x: &[f64]| -> Result<f64> {
        let s = DiscreteState::from_coeffs(layout, x.to_vec())?;
        Ok(problem_norm_distance(&space, &s, reference))
    };
    let mut e_prev = err(&x)?;
    let mut ratios = Vec::new();
    for _ in 0..cfg.aa.max_iter {
        if e_prev <= floor {
            break;
        }
        let next = map.apply(&x)?;
        let res = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let e = err(&next)?;
        ratios.push(e / e_prev);
        if !res.is_finite() || res > cfg.aa.divergence_threshold || res < cfg.aa.tol_inf {
            break;
        }
        x = next;
        e_prev = e;
    }
    Ok(ratios)
}
