//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use oldroyd_core::problems::contraction_bcs;
use oldroyd_core::{Assembler, BoundaryConditions, ContractionGeometry, ContractionInflow, FeSpace, PhysicalParams, TriMesh};

pub const LAMBDA: f64 = 0.7;
pub const ALPHA: f64 = 8.0 / 9.0;

pub struct Fixture {
    pub assembler: Assembler,
    pub bcs: BoundaryConditions,
    /// Smooth velocity to linearize about: the inflow profile extended
    /// through the domain.
    pub u_k: Vec<f64>,
}

pub fn contraction(nx: usize, ny: usize) -> Fixture {
    let geometry = ContractionGeometry::default();
    let inflow = ContractionInflow::default();
    let space = Arc::new(FeSpace::new(TriMesh::contraction(&geometry, nx, ny).expect("valid mesh")).expect("valid space"));
    let h = geometry.upstream_height;
    let u_k = space.interpolate_velocity(|x| [inflow.profile(h, x[1].min(h)), 0.0]);
    let assembler = Assembler::new(space, &PhysicalParams::unforced(LAMBDA, ALPHA).expect("valid parameters"))
        .expect("assembly succeeds");
    Fixture {
        assembler,
        bcs: contraction_bcs(&geometry, inflow, LAMBDA, ALPHA),
        u_k,
    }
}
