//! Boundary-condition registry and strong enforcement by row replacement.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{FeSpace, SymTensor};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryLabel, TriMesh};
use crate::sparse::CsrMatrix;

pub type VectorFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type TensorFn = Arc<dyn Fn([f64; 2]) -> SymTensor + Send + Sync>;

/// Velocity condition on one boundary label.
///
/// Where labels meet, a full Dirichlet condition overrides a single
/// component, which overrides a natural condition. Ties between full
/// conditions go to the label that comes first in [`BoundaryLabel::ALL`].
#[derive(Clone)]
pub enum VelocityCondition {
    Dirichlet(VectorFn),
    /// Prescribe one Cartesian component, leave the other free.
    Component { component: usize, value: ScalarFn },
    /// Traction-free (do-nothing).
    Natural,
}

impl fmt::Debug for VelocityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dirichlet(_) => f.write_str("Dirichlet"),
            Self::Component { component, .. } => write!(f, "Component({component})"),
            Self::Natural => f.write_str("Natural"),
        }
    }
}

#[derive(Clone, Default)]
pub struct BoundaryConditions {
    velocity: BTreeMap<BoundaryLabel, VelocityCondition>,
    inflow_stress: BTreeMap<BoundaryLabel, TensorFn>,
}

impl fmt::Debug for BoundaryConditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryConditions")
            .field("velocity", &self.velocity)
            .field("inflow_stress", &self.inflow_stress.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl BoundaryConditions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dirichlet(
        mut self,
        label: BoundaryLabel,
        f: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        self.velocity.insert(label, VelocityCondition::Dirichlet(Arc::new(f)));
        self
    }

    pub fn no_slip(self, label: BoundaryLabel) -> Self {
        self.dirichlet(label, |_| [0.0, 0.0])
    }

    /// Zero normal velocity on a horizontal symmetry line.
    pub fn symmetry(mut self, label: BoundaryLabel) -> Self {
        self.velocity.insert(
            label,
            VelocityCondition::Component {
                component: 1,
                value: Arc::new(|_| 0.0),
            },
        );
        self
    }

    pub fn natural(mut self, label: BoundaryLabel) -> Self {
        self.velocity.insert(label, VelocityCondition::Natural);
        self
    }

    /// Stress carried into the domain where the flow enters through `label`.
    pub fn inflow_stress(
        mut self,
        label: BoundaryLabel,
        f: impl Fn([f64; 2]) -> SymTensor + Send + Sync + 'static,
    ) -> Self {
        self.inflow_stress.insert(label, Arc::new(f));
        self
    }

    pub fn velocity_condition(&self, label: BoundaryLabel) -> Option<&VelocityCondition> {
        self.velocity.get(&label)
    }

    pub fn inflow_stress_for(&self, label: BoundaryLabel) -> Option<&TensorFn> {
        self.inflow_stress.get(&label)
    }

    /// Every label present on the mesh must have a velocity condition.
    pub fn check(&self, mesh: &TriMesh) -> Result<()> {
        for label in mesh.labels() {
            if !self.velocity.contains_key(&label) {
                return Err(Error::Config(format!(
                    "boundary label {label:?} has no velocity condition"
                )));
            }
        }
        Ok(())
    }

    /// True when the normal velocity is prescribed on the whole boundary, so
    /// the pressure is only determined up to a constant.
    pub fn is_enclosed(&self, mesh: &TriMesh) -> bool {
        mesh.labels()
            .iter()
            .all(|l| !matches!(self.velocity.get(l), Some(VelocityCondition::Natural)))
    }

    /// Constrained velocity DoFs and their values, sorted by DoF.
    pub fn velocity_constraints(&self, space: &FeSpace) -> Result<Vec<(usize, f64)>> {
        self.check(space.mesh())?;
        let layout = space.layout();
        let nv = layout.num_vertices;
        let coords = space.velocity_node_coords();
        // Per node and component: (rank, label order, label).
        let mut best: BTreeMap<(usize, usize), (u8, usize, BoundaryLabel)> = BTreeMap::new();
        let order = |l: BoundaryLabel| BoundaryLabel::ALL.iter().position(|&x| x == l).unwrap_or(usize::MAX);
        for face in space.boundary_faces() {
            let label = space.mesh().boundary_edges()[face.boundary_index].label;
            let nodes = {
                let [a, b] = space.mesh().boundary_edges()[face.boundary_index].vertices;
                [a, b, nv + face.edge]
            };
            let comps: &[(usize, u8)] = match &self.velocity[&label] {
                VelocityCondition::Dirichlet(_) => &[(0, 2), (1, 2)],
                VelocityCondition::Component { component: 0, .. } => &[(0, 1)],
                VelocityCondition::Component { .. } => &[(1, 1)],
                VelocityCondition::Natural => &[],
            };
            for &node in &nodes {
                for &(c, rank) in comps {
                    let cand = (rank, order(label), label);
                    best.entry((node, c))
                        .and_modify(|cur| {
                            if rank > cur.0 || (rank == cur.0 && cand.1 < cur.1) {
                                *cur = cand;
                            }
                        })
                        .or_insert(cand);
                }
            }
        }
        let mut out: Vec<(usize, f64)> = best
            .into_iter()
            .map(|((node, c), (_, _, label))| {
                let x = coords[node];
                let v = match &self.velocity[&label] {
                    VelocityCondition::Dirichlet(f) => f(x)[c],
                    VelocityCondition::Component { value, .. } => value(x),
                    VelocityCondition::Natural => unreachable!("natural conditions constrain nothing"),
                };
                (layout.velocity_dof(node, c), v)
            })
            .collect();
        out.sort_by_key(|&(d, _)| d);
        if let Some((d, _)) = out.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite boundary value at velocity DoF {d}")));
        }
        Ok(out)
    }
}

/// Replace constrained rows by identity rows and eliminate the constrained
/// columns, moving their contribution to the right-hand side.
///
/// Eliminated entries are stored as explicit zeros so the pattern is kept.
/// Applying the same constraints twice leaves the system unchanged.
pub fn apply_constraints(matrix: &mut CsrMatrix, rhs: &mut [f64], constraints: &[(usize, f64)]) {
    let n = matrix.n();
    assert_eq!(rhs.len(), n);
    let mut value = vec![None; n];
    for &(d, v) in constraints {
        value[d] = Some(v);
    }
    let pattern = matrix.pattern().clone();
    let (row_ptr, col_idx) = (pattern.row_ptr(), pattern.col_idx());
    let vals = matrix.values_mut();
    for i in 0..n {
        let range = row_ptr[i]..row_ptr[i + 1];
        if let Some(g) = value[i] {
            for k in range {
                vals[k] = if col_idx[k] == i { 1.0 } else { 0.0 };
            }
            rhs[i] = g;
        } else {
            for k in range {
                if let Some(g) = value[col_idx[k]] {
                    rhs[i] -= vals[k] * g;
                    vals[k] = 0.0;
                }
            }
        }
    }
}

pub fn apply_dirichlet_velocity(
    bcs: &BoundaryConditions,
    matrix: &mut CsrMatrix,
    rhs: &mut [f64],
    space: &FeSpace,
) -> Result<()> {
    let c = bcs.velocity_constraints(space)?;
    apply_constraints(matrix, rhs, &c);
    Ok(())
}
