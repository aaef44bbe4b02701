//! Ready-made problem setups.

use std::sync::Arc;

use crate::accelerator::AaConfig;
use crate::assembly::PhysicalParams;
use crate::error::Result;
use crate::fe_space::{BoundaryConditions, ExactSolution, FeSpace, SymTensor};
use crate::mesh::{BoundaryLabel, ContractionGeometry, TriMesh};
use crate::picard::{InitialGuess, SolveConfig};

fn g0(t: f64) -> f64 {
    t * t * (1.0 - t) * (1.0 - t)
}
fn g1(t: f64) -> f64 {
    2.0 * t - 6.0 * t * t + 4.0 * t * t * t
}
fn g2(t: f64) -> f64 {
    2.0 - 12.0 * t + 12.0 * t * t
}
fn g3(t: f64) -> f64 {
    -12.0 + 24.0 * t
}

/// Divergence-free velocity `curl psi`, `psi = x^2 (1-x)^2 y^2 (1-y)^2`, with
/// pressure `x^2 y^2 - 1/9` on the unit square.
///
/// The body force makes this the exact solution at `lambda = 0`, where the
/// stress is `2 alpha D(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub alpha: f64,
}

impl Manufactured {
    /// `f = -laplace(u) + grad(p)`.
    pub fn body_force(x: [f64; 2]) -> [f64; 2] {
        let [x, y] = x;
        let lap1 = g2(x) * g1(y) + g0(x) * g3(y);
        let lap2 = -g3(x) * g0(y) - g1(x) * g2(y);
        [-lap1 + 2.0 * x * y * y, -lap2 + 2.0 * x * x * y]
    }
}

impl ExactSolution for Manufactured {
    fn velocity(&self, x: [f64; 2]) -> [f64; 2] {
        [g0(x[0]) * g1(x[1]), -g1(x[0]) * g0(x[1])]
    }

    fn velocity_gradient(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let [x, y] = x;
        [
            [g1(x) * g1(y), g0(x) * g2(y)],
            [-g2(x) * g0(y), -g1(x) * g1(y)],
        ]
    }

    fn stress(&self, x: [f64; 2]) -> SymTensor {
        let g = self.velocity_gradient(x);
        let a = self.alpha;
        [2.0 * a * g[0][0], a * (g[0][1] + g[1][0]), 2.0 * a * g[1][1]]
    }

    fn pressure(&self, x: [f64; 2]) -> f64 {
        x[0] * x[0] * x[1] * x[1] - 1.0 / 9.0
    }
}

/// Manufactured problem on an `n x n` unit-square mesh with no-slip walls.
pub fn manufactured_config(n: usize, lambda: f64, alpha: f64, aa: AaConfig) -> Result<SolveConfig> {
    let space = Arc::new(FeSpace::new(TriMesh::unit_square(n)?)?);
    Ok(SolveConfig {
        space,
        params: PhysicalParams::new(lambda, alpha, Manufactured::body_force)?,
        aa,
        bcs: BoundaryConditions::new().no_slip(BoundaryLabel::Wall),
        initial_guess: InitialGuess::Stokes,
    })
}

/// Inflow data of the half contraction channel.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContractionInflow {
    /// Centerline velocity of the upstream Poiseuille profile.
    pub centerline_velocity: f64,
}

impl Default for ContractionInflow {
    /// Centerline speed 1/32, giving a half-channel flux of 1/48.
    fn default() -> Self {
        Self {
            centerline_velocity: 1.0 / 32.0,
        }
    }
}

impl ContractionInflow {
    /// Centerline speed giving unit mean velocity over the inlet.
    pub fn unit_mean() -> Self {
        Self {
            centerline_velocity: 1.5,
        }
    }

    /// Streamwise velocity at height `y` of an inlet of half-width `h`.
    pub fn profile(&self, h: f64, y: f64) -> f64 {
        self.centerline_velocity * (1.0 - (y / h) * (y / h))
    }

    /// Fully developed Oldroyd-B stress of the inlet profile.
    pub fn stress(&self, h: f64, y: f64, lambda: f64, alpha: f64) -> SymTensor {
        let shear = -2.0 * self.centerline_velocity * y / (h * h);
        [2.0 * lambda * alpha * shear * shear, alpha * shear, 0.0]
    }
}

/// Boundary conditions of the half contraction for given `lambda`, `alpha`.
pub fn contraction_bcs(
    geometry: &ContractionGeometry,
    inflow: ContractionInflow,
    lambda: f64,
    alpha: f64,
) -> BoundaryConditions {
    let h = geometry.upstream_height;
    BoundaryConditions::new()
        .no_slip(BoundaryLabel::Wall)
        .symmetry(BoundaryLabel::Symmetry)
        .natural(BoundaryLabel::Outflow)
        .dirichlet(BoundaryLabel::Inflow, move |x| [inflow.profile(h, x[1]), 0.0])
        .inflow_stress(BoundaryLabel::Inflow, move |x| inflow.stress(h, x[1], lambda, alpha))
}

/// Half 4:1 contraction: Poiseuille inflow with its fully developed stress,
/// no-slip walls, symmetry at `y = 0`, traction-free outflow.
pub fn contraction_config(
    geometry: &ContractionGeometry,
    inflow: ContractionInflow,
    nx: usize,
    ny: usize,
    lambda: f64,
    alpha: f64,
    aa: AaConfig,
) -> Result<SolveConfig> {
    let space = Arc::new(FeSpace::new(TriMesh::contraction(geometry, nx, ny)?)?);
    Ok(SolveConfig {
        space,
        params: PhysicalParams::unforced(lambda, alpha)?,
        aa,
        bcs: contraction_bcs(geometry, inflow, lambda, alpha),
        initial_guess: InitialGuess::Stokes,
    })
}
