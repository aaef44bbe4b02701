//! Picard and Anderson-accelerated Picard iterations for steady Oldroyd-B
//! flow discretized with Taylor-Hood velocity/pressure and discontinuous
//! piecewise-linear stress.

pub mod accelerator;
pub mod assembly;
pub mod error;
pub mod experiments;
pub mod fe_space;
pub mod linear_solver;
pub mod mesh;
pub mod picard;
pub mod problems;
pub mod sparse;
pub mod trace;
pub mod vtk;

pub use accelerator::{AaConfig, AaOutcome, Damping, Status, StepRecord};
pub use assembly::{Assembler, PhysicalParams, SparseSystem};
pub use error::{Error, Result};
pub use experiments::{Experiment, RunSpec, SolverSpec};
pub use fe_space::{BoundaryConditions, DiscreteState, DofLayout, FeSpace, Field, Norms, SymTensor};
pub use mesh::{BoundaryLabel, ContractionGeometry, TriMesh};
pub use picard::{solve_aa_picard, solve_picard, FixedPointMap, InitialGuess, SolveConfig};
pub use problems::{ContractionInflow, Manufactured};
pub use trace::IterationTrace;
