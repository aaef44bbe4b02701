//! Mixed finite-element space: continuous P2 velocity, discontinuous P1
//! symmetric stress, continuous P1 pressure.
//!
//! Global coefficient order is `velocity | stress | pressure`.
//!
//! * Velocity is blocked by component. Node `v < num_vertices` is a vertex
//!   and node `num_vertices + e` is the midpoint of edge `e`.
//! * Stress entry `(t, c, a)` is component `c` of `(s11, s12, s22)` at local
//!   vertex `a` of triangle `t`.
//! * Pressure is one value per vertex.

pub mod basis;
pub mod bc;
pub mod norms;
pub mod quadrature;

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::mesh::{TriMesh, LOCAL_EDGES};

pub use bc::{apply_constraints, apply_dirichlet_velocity, BoundaryConditions, VelocityCondition};
pub use norms::{ExactSolution, Norms};

/// Which block of the mixed vector a degree of freedom belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Velocity,
    Stress,
    Pressure,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Velocity => "velocity",
            Field::Stress => "stress",
            Field::Pressure => "pressure",
        })
    }
}

/// Symmetric tensor stored as `[s11, s12, s22]`.
pub type SymTensor = [f64; 3];

/// Full contraction `a : b` of two symmetric tensors.
#[inline]
pub fn ddot(a: &SymTensor, b: &SymTensor) -> f64 {
    a[0] * b[0] + 2.0 * a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_triangles: usize,
}

impl DofLayout {
    pub fn new(mesh: &TriMesh) -> Self {
        Self {
            num_vertices: mesh.num_vertices(),
            num_edges: mesh.num_edges(),
            num_triangles: mesh.num_triangles(),
        }
    }

    /// Number of scalar P2 nodes (vertices plus edge midpoints).
    pub fn velocity_nodes(&self) -> usize {
        self.num_vertices + self.num_edges
    }

    pub fn num_velocity(&self) -> usize {
        2 * self.velocity_nodes()
    }

    pub fn num_stress(&self) -> usize {
        9 * self.num_triangles
    }

    pub fn num_pressure(&self) -> usize {
        self.num_vertices
    }

    pub fn dim(&self) -> usize {
        self.num_velocity() + self.num_stress() + self.num_pressure()
    }

    pub fn velocity_range(&self) -> Range<usize> {
        0..self.num_velocity()
    }

    pub fn stress_range(&self) -> Range<usize> {
        let s = self.num_velocity();
        s..s + self.num_stress()
    }

    pub fn pressure_range(&self) -> Range<usize> {
        let s = self.num_velocity() + self.num_stress();
        s..s + self.num_pressure()
    }

    #[inline]
    pub fn velocity_dof(&self, node: usize, component: usize) -> usize {
        component * self.velocity_nodes() + node
    }

    #[inline]
    pub fn stress_dof(&self, triangle: usize, component: usize, local: usize) -> usize {
        self.num_velocity() + 9 * triangle + 3 * component + local
    }

    #[inline]
    pub fn pressure_dof(&self, vertex: usize) -> usize {
        self.num_velocity() + self.num_stress() + vertex
    }

    pub fn field_of(&self, dof: usize) -> Field {
        if dof < self.num_velocity() {
            Field::Velocity
        } else if dof < self.num_velocity() + self.num_stress() {
            Field::Stress
        } else {
            Field::Pressure
        }
    }
}

/// Affine data of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub vertices: [[f64; 2]; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad: [[f64; 2]; 3],
}

impl ElementGeometry {
    fn new(v: [[f64; 2]; 3]) -> Self {
        let twice = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        let grad = [0, 1, 2].map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            [(v[j][1] - v[k][1]) / twice, (v[k][0] - v[j][0]) / twice]
        });
        Self {
            vertices: v,
            area: 0.5 * twice,
            grad,
        }
    }

    pub fn point(&self, l: [f64; 3]) -> [f64; 2] {
        let v = &self.vertices;
        [
            l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
            l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
        ]
    }
}

/// A boundary edge located inside its owning triangle.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFace {
    pub triangle: usize,
    pub local_edge: usize,
    pub edge: usize,
    /// Index into [`TriMesh::boundary_edges`].
    pub boundary_index: usize,
    pub normal: [f64; 2],
    pub length: f64,
}

/// An interior edge shared by two triangles. `normal` points out of `minus`.
#[derive(Debug, Clone, Copy)]
pub struct InteriorFace {
    pub minus: (usize, usize),
    pub plus: (usize, usize),
    pub normal: [f64; 2],
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: TriMesh,
    layout: DofLayout,
    elements: Vec<ElementGeometry>,
    velocity_nodes: Vec<[usize; 6]>,
    boundary_faces: Vec<BoundaryFace>,
    interior_faces: Vec<InteriorFace>,
    area: f64,
}

impl FeSpace {
    pub fn new(mesh: TriMesh) -> Result<Self> {
        mesh.validate()?;
        let layout = DofLayout::new(&mesh);
        let topo = mesh.topology();
        let nv = mesh.num_vertices();
        let elements: Vec<_> = mesh
            .triangles()
            .iter()
            .map(|tri| ElementGeometry::new(tri.map(|v| mesh.vertices()[v])))
            .collect();
        let velocity_nodes = mesh
            .triangles()
            .iter()
            .zip(&topo.triangle_edges)
            .map(|(tri, edges)| [tri[0], tri[1], tri[2], nv + edges[0], nv + edges[1], nv + edges[2]])
            .collect();

        let face_geometry = |t: usize, le: usize| {
            let [a, b] = LOCAL_EDGES[le].map(|i| mesh.vertices()[mesh.triangles()[t][i]]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let length = dx.hypot(dy);
            // Counterclockwise triangles have the exterior on the right of each edge.
            ([dy / length, -dx / length], length)
        };

        let mut edge_of_pair = HashMap::with_capacity(topo.edges.len());
        for (e, pair) in topo.edges.iter().enumerate() {
            edge_of_pair.insert(*pair, e);
        }
        let mut boundary_faces = Vec::with_capacity(mesh.boundary_edges().len());
        for (bi, be) in mesh.boundary_edges().iter().enumerate() {
            let [a, b] = be.vertices;
            let key = if a < b { [a, b] } else { [b, a] };
            let edge = *edge_of_pair
                .get(&key)
                .ok_or_else(|| Error::Config(format!("boundary edge {key:?} is not a mesh edge")))?;
            let (triangle, local_edge) = topo.edge_triangles[edge].first;
            let (normal, length) = face_geometry(triangle, local_edge);
            boundary_faces.push(BoundaryFace {
                triangle,
                local_edge,
                edge,
                boundary_index: bi,
                normal,
                length,
            });
        }
        let interior_faces = topo
            .edge_triangles
            .iter()
            .filter_map(|nb| {
                let plus = nb.second?;
                let (normal, length) = face_geometry(nb.first.0, nb.first.1);
                Some(InteriorFace {
                    minus: nb.first,
                    plus,
                    normal,
                    length,
                })
            })
            .collect();
        let area = elements.iter().map(|e: &ElementGeometry| e.area).sum();
        Ok(Self {
            mesh,
            layout,
            elements,
            velocity_nodes,
            boundary_faces,
            interior_faces,
            area,
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn element(&self, t: usize) -> &ElementGeometry {
        &self.elements[t]
    }

    pub fn elements(&self) -> &[ElementGeometry] {
        &self.elements
    }

    /// Scalar P2 node ids of triangle `t` in local order.
    pub fn element_velocity_nodes(&self, t: usize) -> &[usize; 6] {
        &self.velocity_nodes[t]
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    pub fn interior_faces(&self) -> &[InteriorFace] {
        &self.interior_faces
    }

    pub fn domain_area(&self) -> f64 {
        self.area
    }

    /// Coordinates of every scalar P2 node.
    pub fn velocity_node_coords(&self) -> Vec<[f64; 2]> {
        let v = self.mesh.vertices();
        let mut out = v.to_vec();
        out.extend(self.mesh.topology().edges.iter().map(|&[a, b]| {
            [0.5 * (v[a][0] + v[b][0]), 0.5 * (v[a][1] + v[b][1])]
        }));
        out
    }

    pub fn zero_state(&self) -> DiscreteState {
        DiscreteState::zeros(self.layout)
    }

    pub fn interpolate_velocity(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let n = self.layout.velocity_nodes();
        let mut out = vec![0.0; 2 * n];
        for (i, x) in self.velocity_node_coords().into_iter().enumerate() {
            let u = f(x);
            out[i] = u[0];
            out[n + i] = u[1];
        }
        out
    }

    pub fn interpolate_pressure(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.mesh.vertices().iter().map(|&x| f(x)).collect()
    }

    pub fn interpolate_stress(&self, f: impl Fn([f64; 2]) -> SymTensor) -> Vec<f64> {
        let mut out = vec![0.0; self.layout.num_stress()];
        for (t, el) in self.elements.iter().enumerate() {
            for a in 0..3 {
                let s = f(el.vertices[a]);
                for c in 0..3 {
                    out[9 * t + 3 * c + a] = s[c];
                }
            }
        }
        out
    }

    pub fn interpolate(
        &self,
        u: impl Fn([f64; 2]) -> [f64; 2],
        sigma: impl Fn([f64; 2]) -> SymTensor,
        p: impl Fn([f64; 2]) -> f64,
    ) -> DiscreteState {
        let mut coeffs = self.interpolate_velocity(u);
        coeffs.extend(self.interpolate_stress(sigma));
        coeffs.extend(self.interpolate_pressure(p));
        DiscreteState {
            coeffs,
            layout: self.layout,
        }
    }

    /// Velocity value and gradient `g[i][j] = du_i/dx_j` on triangle `t`.
    pub fn velocity_at(&self, u: &[f64], t: usize, l: [f64; 3]) -> ([f64; 2], [[f64; 2]; 2]) {
        let n = self.layout.velocity_nodes();
        let phi = basis::p2_values(l);
        let dphi = basis::p2_gradients(l, &self.elements[t].grad);
        let mut val = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        for (q, &node) in self.velocity_nodes[t].iter().enumerate() {
            for i in 0..2 {
                let c = u[i * n + node];
                val[i] += c * phi[q];
                grad[i][0] += c * dphi[q][0];
                grad[i][1] += c * dphi[q][1];
            }
        }
        (val, grad)
    }

    /// Stress value on triangle `t` from a stress block.
    pub fn stress_at(&self, s: &[f64], t: usize, l: [f64; 3]) -> SymTensor {
        let b = &s[9 * t..9 * t + 9];
        [0, 1, 2].map(|c| l[0] * b[3 * c] + l[1] * b[3 * c + 1] + l[2] * b[3 * c + 2])
    }

    pub fn pressure_at(&self, p: &[f64], t: usize, l: [f64; 3]) -> f64 {
        let tri = self.mesh.triangles()[t];
        l[0] * p[tri[0]] + l[1] * p[tri[1]] + l[2] * p[tri[2]]
    }

    /// Mean of a pressure block over the domain.
    pub fn pressure_mean(&self, p: &[f64]) -> f64 {
        let total: f64 = self
            .mesh
            .triangles()
            .iter()
            .zip(&self.elements)
            .map(|(tri, el)| el.area * (p[tri[0]] + p[tri[1]] + p[tri[2]]) / 3.0)
            .sum();
        total / self.area
    }

    /// Subtract the mean so the pressure lies in L^2_0.
    pub fn shift_pressure_to_zero_mean(&self, p: &mut [f64]) {
        let mean = self.pressure_mean(p);
        p.iter_mut().for_each(|v| *v -= mean);
    }

    pub fn norms(&self, state: &DiscreteState) -> Norms {
        norms::norms(self, state)
    }
}

/// A coefficient vector tagged with the layout it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    pub coeffs: Vec<f64>,
    pub layout: DofLayout,
}

impl DiscreteState {
    pub fn zeros(layout: DofLayout) -> Self {
        Self {
            coeffs: vec![0.0; layout.dim()],
            layout,
        }
    }

    pub fn from_coeffs(layout: DofLayout, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != layout.dim() {
            return Err(Error::Dimension {
                context: "state coefficients",
                expected: layout.dim(),
                got: coeffs.len(),
            });
        }
        Ok(Self { coeffs, layout })
    }

    pub fn velocity(&self) -> &[f64] {
        &self.coeffs[self.layout.velocity_range()]
    }

    pub fn stress(&self) -> &[f64] {
        &self.coeffs[self.layout.stress_range()]
    }

    pub fn pressure(&self) -> &[f64] {
        &self.coeffs[self.layout.pressure_range()]
    }

    pub fn velocity_mut(&mut self) -> &mut [f64] {
        let r = self.layout.velocity_range();
        &mut self.coeffs[r]
    }

    pub fn stress_mut(&mut self) -> &mut [f64] {
        let r = self.layout.stress_range();
        &mut self.coeffs[r]
    }

    pub fn pressure_mut(&mut self) -> &mut [f64] {
        let r = self.layout.pressure_range();
        &mut self.coeffs[r]
    }

    /// Coefficient-wise difference `self - other`.
    pub fn difference(&self, other: &DiscreteState) -> DiscreteState {
        debug_assert_eq!(self.layout, other.layout);
        DiscreteState {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
            layout: self.layout,
        }
    }
}
