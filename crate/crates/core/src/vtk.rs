//! Legacy ASCII VTK export of a discrete state.
//!
//! Velocity and pressure are written at mesh vertices, the stress as the
//! element mean of the discontinuous field.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fe_space::{DiscreteState, FeSpace};

pub fn to_vtk_string(space: &FeSpace, state: &DiscreteState, title: &str) -> String {
    let mesh = space.mesh();
    let layout = space.layout();
    let (nv, nt) = (mesh.num_vertices(), mesh.num_triangles());
    let n = layout.velocity_nodes();
    let (u, s, p) = (state.velocity(), state.stress(), state.pressure());
    let mut out = String::with_capacity(128 * (nv + nt));
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(out, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {nv} double");
    for x in mesh.vertices() {
        let _ = writeln!(out, "{:e} {:e} 0e0", x[0], x[1]);
    }
    let _ = writeln!(out, "CELLS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {nt}");
    for _ in 0..nt {
        out.push_str("5\n");
    }
    let _ = writeln!(out, "POINT_DATA {nv}\nVECTORS velocity double");
    for v in 0..nv {
        let _ = writeln!(out, "{:e} {:e} 0e0", u[v], u[n + v]);
    }
    out.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
    for v in p {
        let _ = writeln!(out, "{v:e}");
    }
    let _ = writeln!(out, "CELL_DATA {nt}\nTENSORS stress double");
    for t in 0..nt {
        let m = space.stress_at(s, t, [1.0 / 3.0; 3]);
        let _ = writeln!(out, "{:e} {:e} 0e0\n{:e} {:e} 0e0\n0e0 0e0 0e0", m[0], m[1], m[1], m[2]);
    }
    out
}

pub fn export_vtk(space: &FeSpace, state: &DiscreteState, path: &Path) -> Result<()> {
    let title = path.file_stem().and_then(|s| s.to_str()).unwrap_or("oldroyd-b state");
    std::fs::write(path, to_vtk_string(space, state, title)).map_err(|e| Error::io(path, e))
}
