//! Assembly of the linearized (Picard) Oldroyd-B system.
//!
//! For a frozen background velocity `u_k` the unknowns `(u, sigma, p)` satisfy
//!
//! ```text
//! (sigma, tau) + lambda [ b_h(u_k; sigma, tau) + c_h(u_k; sigma, tau)
//!     - (grad u_k sigma + sigma grad u_k^T, tau) ] - 2 alpha (D(u), tau) = lambda (inflow stress)
//! (sigma, D(v)) + 2 (1 - alpha) (D(u), D(v)) - (p, div v)              = (f, v)
//! (q, div u)                                                            = 0
//! ```
//!
//! The stress is discontinuous, so the transport form is written element by
//! element with a central flux on interior edges:
//!
//! ```text
//! b_h(u; s, t) = sum_K ((u . grad) s + 1/2 (div u) s, t)_K
//!              - sum_{interior e} ((u . n) [s], {t})_e
//!              - 1/2 ((u . n) s, t)_{boundary}
//! ```
//!
//! `b_h(u; s, s) = 0` for every `u` and `s`. The boundary term
//! `c_h(u; s, t) = 1/2 (|u . n| s, t)_{boundary}` completes `b_h` to an upwind
//! boundary treatment: stress enters through inflow edges with the value
//! registered in the boundary conditions and leaves freely elsewhere.
//! Both vanish when `u_k = 0` on the boundary.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fe_space::basis::{p2_gradients, p2_values};
use crate::fe_space::bc::{BoundaryConditions, VectorFn};
use crate::fe_space::quadrature::{LINE_GAUSS3, TRIANGLE_DEG4};
use crate::fe_space::{ddot, FeSpace, SymTensor};
use crate::mesh::LOCAL_EDGES;
use crate::sparse::{CsrMatrix, Pattern};

/// Unit symmetric tensors dual to the stored stress components.
const E: [SymTensor; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
/// `E[c] : E[d]` is `EE[c]` when `c == d` and zero otherwise.
const EE: [f64; 3] = [1.0, 2.0, 1.0];

#[derive(Clone)]
pub struct PhysicalParams {
    /// Weissenberg number.
    pub lambda: f64,
    /// Polymeric viscosity fraction, strictly between 0 and 1.
    pub alpha: f64,
    pub body_force: VectorFn,
}

impl fmt::Debug for PhysicalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhysicalParams")
            .field("lambda", &self.lambda)
            .field("alpha", &self.alpha)
            .finish_non_exhaustive()
    }
}

impl PhysicalParams {
    pub fn new(
        lambda: f64,
        alpha: f64,
        body_force: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    ) -> Result<Self> {
        let p = Self {
            lambda,
            alpha,
            body_force: Arc::new(body_force),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn unforced(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(lambda, alpha, |_| [0.0, 0.0])
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Symmetric part `D` of the P2 basis function `phi_q e_c`.
#[inline]
fn sym_grad(c: usize, g: [f64; 2]) -> SymTensor {
    if c == 0 {
        [g[0], 0.5 * g[1], 0.0]
    } else {
        [0.0, 0.5 * g[0], g[1]]
    }
}

/// `L S + S L^T` for a velocity gradient `L` and symmetric `S`.
#[inline]
pub(crate) fn rotational(l: &[[f64; 2]; 2], s: &SymTensor) -> SymTensor {
    let m = [
        [l[0][0] * s[0] + l[0][1] * s[1], l[0][0] * s[1] + l[0][1] * s[2]],
        [l[1][0] * s[0] + l[1][1] * s[1], l[1][0] * s[1] + l[1][1] * s[2]],
    ];
    [2.0 * m[0][0], m[0][1] + m[1][0], 2.0 * m[1][1]]
}

/// Barycentric coordinates of the point at parameter `s` along local edge `le`.
#[inline]
fn edge_point(le: usize, s: f64) -> [f64; 3] {
    let mut l = [0.0; 3];
    let [a, b] = LOCAL_EDGES[le];
    l[a] = 1.0 - s;
    l[b] = s;
    l
}

/// Builds the sparsity pattern once and caches every lambda-independent term.
#[derive(Debug, Clone)]
pub struct Assembler {
    space: Arc<FeSpace>,
    alpha: f64,
    pattern: Arc<Pattern>,
    base: CsrMatrix,
    load: Vec<f64>,
}

impl Assembler {
    pub fn new(space: Arc<FeSpace>, params: &PhysicalParams) -> Result<Self> {
        params.validate()?;
        let pattern = Arc::new(build_pattern(&space));
        let (base, load) = assemble_base(&space, &pattern, params);
        Ok(Self {
            space,
            alpha: params.alpha,
            pattern,
            base,
            load,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        &self.pattern
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Matrix of the system with `lambda = 0`.
    pub fn base_matrix(&self) -> &CsrMatrix {
        &self.base
    }

    /// `(f, v)` for every velocity test function, zero elsewhere.
    pub fn load(&self) -> &[f64] {
        &self.load
    }

    /// Stress-stress block of `b_h(u_k; ., .)` alone.
    pub fn transport_matrix(&self, u_k: &[f64]) -> Result<CsrMatrix> {
        self.check_velocity(u_k)?;
        let mut m = CsrMatrix::zeros(self.pattern.clone());
        add_transport(&self.space, u_k, &mut m, true, false);
        Ok(m)
    }

    /// Everything multiplied by `lambda` in the stress equation.
    pub fn dynamic_matrix(&self, u_k: &[f64]) -> Result<CsrMatrix> {
        self.check_velocity(u_k)?;
        let mut m = CsrMatrix::zeros(self.pattern.clone());
        add_transport(&self.space, u_k, &mut m, true, true);
        Ok(m)
    }

    /// Right-hand side carried by inflow edges, before scaling by `lambda`.
    pub fn inflow_rhs(&self, u_k: &[f64], bcs: &BoundaryConditions) -> Vec<f64> {
        let space = &*self.space;
        let layout = space.layout();
        let mut rhs = vec![0.0; layout.dim()];
        for face in space.boundary_faces() {
            let label = space.mesh().boundary_edges()[face.boundary_index].label;
            let Some(sigma_in) = bcs.inflow_stress_for(label) else {
                continue;
            };
            let el = space.element(face.triangle);
            for (s, w) in LINE_GAUSS3 {
                let l = edge_point(face.local_edge, s);
                let (u, _) = space.velocity_at(u_k, face.triangle, l);
                let un = u[0] * face.normal[0] + u[1] * face.normal[1];
                if un >= 0.0 {
                    continue;
                }
                let sig = sigma_in(el.point(l));
                let wl = -w * face.length * un;
                for c in 0..3 {
                    let v = wl * ddot(&E[c], &sig);
                    for a in 0..3 {
                        rhs[layout.stress_dof(face.triangle, c, a)] += v * l[a];
                    }
                }
            }
        }
        rhs
    }

    /// Unconstrained linearized system for background velocity `u_k`.
    pub fn assemble(&self, lambda: f64, u_k: &[f64], bcs: &BoundaryConditions) -> Result<SparseSystem> {
        self.check_velocity(u_k)?;
        let mut matrix = self.base.clone();
        let mut rhs = self.load.clone();
        if lambda != 0.0 {
            matrix.axpy(lambda, &self.dynamic_matrix(u_k)?);
            for (r, v) in rhs.iter_mut().zip(self.inflow_rhs(u_k, bcs)) {
                *r += lambda * v;
            }
        }
        Ok(SparseSystem { matrix, rhs })
    }

    fn check_velocity(&self, u_k: &[f64]) -> Result<()> {
        let n = self.space.layout().num_velocity();
        if u_k.len() != n {
            return Err(Error::Dimension {
                context: "background velocity",
                expected: n,
                got: u_k.len(),
            });
        }
        if u_k.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("background velocity"));
        }
        Ok(())
    }
}

/// Global DoFs of one triangle: 12 velocity, 9 stress, 3 pressure.
fn element_dofs(space: &FeSpace, t: usize) -> [usize; 24] {
    let layout = space.layout();
    let nodes = space.element_velocity_nodes(t);
    let tri = space.mesh().triangles()[t];
    let mut d = [0; 24];
    for c in 0..2 {
        for q in 0..6 {
            d[6 * c + q] = layout.velocity_dof(nodes[q], c);
        }
    }
    for c in 0..3 {
        for a in 0..3 {
            d[12 + 3 * c + a] = layout.stress_dof(t, c, a);
        }
    }
    for a in 0..3 {
        d[21 + a] = layout.pressure_dof(tri[a]);
    }
    d
}

fn build_pattern(space: &FeSpace) -> Pattern {
    let layout = space.layout();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); layout.dim()];
    for t in 0..layout.num_triangles {
        let d = element_dofs(space, t);
        let (vel, stress, pres) = (&d[..12], &d[12..21], &d[21..]);
        for &i in vel {
            rows[i].extend_from_slice(&d);
        }
        for &i in stress {
            rows[i].extend_from_slice(vel);
            rows[i].extend_from_slice(stress);
        }
        for &i in pres {
            rows[i].extend_from_slice(vel);
        }
    }
    for f in space.interior_faces() {
        let (tm, tp) = (f.minus.0, f.plus.0);
        let sm: Vec<usize> = (0..9).map(|k| layout.stress_dof(tm, k / 3, k % 3)).collect();
        let sp: Vec<usize> = (0..9).map(|k| layout.stress_dof(tp, k / 3, k % 3)).collect();
        for &i in &sm {
            rows[i].extend_from_slice(&sp);
        }
        for &i in &sp {
            rows[i].extend_from_slice(&sm);
        }
    }
    Pattern::from_rows(rows)
}

fn assemble_base(space: &FeSpace, pattern: &Arc<Pattern>, params: &PhysicalParams) -> (CsrMatrix, Vec<f64>) {
    let alpha = params.alpha;
    let mut m = CsrMatrix::zeros(pattern.clone());
    let mut load = vec![0.0; space.layout().dim()];
    for (t, el) in space.elements().iter().enumerate() {
        let d = element_dofs(space, t);
        let mut local = [[0.0f64; 24]; 24];
        for (l, w) in TRIANGLE_DEG4 {
            let w = w * el.area;
            let phi = p2_values(l);
            let dphi = p2_gradients(l, &el.grad);
            let f = (params.body_force)(el.point(l));
            let dv: [SymTensor; 12] = std::array::from_fn(|i| sym_grad(i / 6, dphi[i % 6]));
            for i in 0..12 {
                let (c, p) = (i / 6, i % 6);
                load[d[i]] += w * f[c] * phi[p];
                for j in 0..12 {
                    local[i][j] += 2.0 * (1.0 - alpha) * w * ddot(&dv[i], &dv[j]);
                }
                for k in 0..9 {
                    let (sc, sa) = (k / 3, k % 3);
                    let coupling = w * l[sa] * ddot(&E[sc], &dv[i]);
                    local[i][12 + k] += coupling;
                    local[12 + k][i] -= 2.0 * alpha * coupling;
                }
                for a in 0..3 {
                    let v = w * l[a] * dphi[p][c];
                    local[i][21 + a] -= v;
                    local[21 + a][i] += v;
                }
            }
        }
        // Stress mass matrix, exact: int l_a l_b = area (1 + delta_ab) / 12.
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    let mab = el.area * if a == b { 2.0 } else { 1.0 } / 12.0;
                    local[12 + 3 * c + a][12 + 3 * c + b] += EE[c] * mab;
                }
            }
        }
        for i in 0..24 {
            for j in 0..24 {
                if local[i][j] != 0.0 || i == j {
                    m.add(d[i], d[j], local[i][j]);
                }
            }
        }
    }
    (m, load)
}

/// Adds the stress-stress transport terms for background velocity `u`.
///
/// With `with_rest` the boundary completion `c_h` and the rotational terms
/// are added as well, giving the full `lambda` coefficient.
fn add_transport(space: &FeSpace, u: &[f64], m: &mut CsrMatrix, with_b: bool, with_rest: bool) {
    let layout = space.layout();
    for (t, el) in space.elements().iter().enumerate() {
        let mut local = [[0.0f64; 9]; 9];
        for (l, w) in TRIANGLE_DEG4 {
            let w = w * el.area;
            let (uv, g) = space.velocity_at(u, t, l);
            let div = g[0][0] + g[1][1];
            let adv = [0, 1, 2].map(|b| uv[0] * el.grad[b][0] + uv[1] * el.grad[b][1]);
            for c in 0..3 {
                for a in 0..3 {
                    if with_b {
                        for b in 0..3 {
                            local[3 * c + a][3 * c + b] += w * EE[c] * l[a] * (adv[b] + 0.5 * div * l[b]);
                        }
                    }
                    if with_rest {
                        for dcomp in 0..3 {
                            let r = ddot(&E[c], &rotational(&g, &E[dcomp]));
                            for b in 0..3 {
                                local[3 * c + a][3 * dcomp + b] -= w * r * l[a] * l[b];
                            }
                        }
                    }
                }
            }
        }
        for i in 0..9 {
            for j in 0..9 {
                m.add(
                    layout.stress_dof(t, i / 3, i % 3),
                    layout.stress_dof(t, j / 3, j % 3),
                    local[i][j],
                );
            }
        }
    }

    if with_b {
        let tris = space.mesh().triangles();
        for f in space.interior_faces() {
            let (tm, lem) = f.minus;
            let (tp, _) = f.plus;
            let [g0, g1] = LOCAL_EDGES[lem].map(|i| tris[tm][i]);
            let pos = |g: usize| tris[tp].iter().position(|&v| v == g).expect("shared vertex");
            let (p0, p1) = (pos(g0), pos(g1));
            let mut local = [[[[0.0f64; 3]; 3]; 2]; 2];
            for (s, w) in LINE_GAUSS3 {
                let lm = edge_point(lem, s);
                let mut lp = [0.0; 3];
                lp[p0] = 1.0 - s;
                lp[p1] = s;
                let (uv, _) = space.velocity_at(u, tm, lm);
                let un = uv[0] * f.normal[0] + uv[1] * f.normal[1];
                let side = [lm, lp];
                for (ts, lt) in side.iter().enumerate() {
                    for (rs, lr) in side.iter().enumerate() {
                        let sign = if rs == 0 { 1.0 } else { -1.0 };
                        for a in 0..3 {
                            for b in 0..3 {
                                local[ts][rs][a][b] -= 0.5 * sign * w * f.length * un * lt[a] * lr[b];
                            }
                        }
                    }
                }
            }
            let tri = [tm, tp];
            for ts in 0..2 {
                for rs in 0..2 {
                    for c in 0..3 {
                        for a in 0..3 {
                            for b in 0..3 {
                                m.add(
                                    layout.stress_dof(tri[ts], c, a),
                                    layout.stress_dof(tri[rs], c, b),
                                    EE[c] * local[ts][rs][a][b],
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    for face in space.boundary_faces() {
        let t = face.triangle;
        let mut local = [[0.0f64; 3]; 3];
        for (s, w) in LINE_GAUSS3 {
            let l = edge_point(face.local_edge, s);
            let (uv, _) = space.velocity_at(u, t, l);
            let un = uv[0] * face.normal[0] + uv[1] * face.normal[1];
            let mut coef = 0.0;
            if with_b {
                coef -= 0.5 * un;
            }
            if with_rest {
                coef += 0.5 * un.abs();
            }
            for a in 0..3 {
                for b in 0..3 {
                    local[a][b] += w * face.length * coef * l[a] * l[b];
                }
            }
        }
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    m.add(layout.stress_dof(t, c, a), layout.stress_dof(t, c, b), EE[c] * local[a][b]);
                }
            }
        }
    }
}

/// `b_h(u; sigma, tau)` by direct quadrature, including the edge terms.
///
/// `u` is a velocity block, `sigma` and `tau` stress blocks.
pub fn evaluate_form_b(space: &FeSpace, u: &[f64], sigma: &[f64], tau: &[f64]) -> f64 {
    let mut total = 0.0;
    for (t, el) in space.elements().iter().enumerate() {
        for (l, w) in TRIANGLE_DEG4 {
            let w = w * el.area;
            let (uv, g) = space.velocity_at(u, t, l);
            let div = g[0][0] + g[1][1];
            let s = space.stress_at(sigma, t, l);
            let tv = space.stress_at(tau, t, l);
            let b = &sigma[9 * t..9 * t + 9];
            let grad_s: [SymTensor; 2] = [0, 1].map(|k| {
                [0, 1, 2].map(|c| (0..3).map(|a| b[3 * c + a] * el.grad[a][k]).sum())
            });
            let adv = [0, 1, 2].map(|c| uv[0] * grad_s[0][c] + uv[1] * grad_s[1][c]);
            total += w * (ddot(&adv, &tv) + 0.5 * div * ddot(&s, &tv));
        }
    }
    let tris = space.mesh().triangles();
    for f in space.interior_faces() {
        let (tm, lem) = f.minus;
        let (tp, _) = f.plus;
        let [g0, g1] = LOCAL_EDGES[lem].map(|i| tris[tm][i]);
        let pos = |g: usize| tris[tp].iter().position(|&v| v == g).expect("shared vertex");
        for (s, w) in LINE_GAUSS3 {
            let lm = edge_point(lem, s);
            let mut lp = [0.0; 3];
            lp[pos(g0)] = 1.0 - s;
            lp[pos(g1)] = s;
            let (uv, _) = space.velocity_at(u, tm, lm);
            let un = uv[0] * f.normal[0] + uv[1] * f.normal[1];
            let (sm, sp) = (space.stress_at(sigma, tm, lm), space.stress_at(sigma, tp, lp));
            let (tm_, tp_) = (space.stress_at(tau, tm, lm), space.stress_at(tau, tp, lp));
            let jump = [sm[0] - sp[0], sm[1] - sp[1], sm[2] - sp[2]];
            let avg = [0.5 * (tm_[0] + tp_[0]), 0.5 * (tm_[1] + tp_[1]), 0.5 * (tm_[2] + tp_[2])];
            total -= w * f.length * un * ddot(&jump, &avg);
        }
    }
    for face in space.boundary_faces() {
        for (s, w) in LINE_GAUSS3 {
            let l = edge_point(face.local_edge, s);
            let (uv, _) = space.velocity_at(u, face.triangle, l);
            let un = uv[0] * face.normal[0] + uv[1] * face.normal[1];
            let sv = space.stress_at(sigma, face.triangle, l);
            let tv = space.stress_at(tau, face.triangle, l);
            total -= 0.5 * w * face.length * un * ddot(&sv, &tv);
        }
    }
    total
}

/// Terms of the discrete energy balance obtained by testing the stress
/// equation with `sigma` and the momentum equation with `2 alpha u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub sigma_sq: f64,
    pub d_sq: f64,
    /// `(f, u)` with the same quadrature as the load vector.
    pub work: f64,
    /// `(grad u_k sigma + sigma grad u_k^T, sigma)`.
    pub rotational: f64,
    pub residual: f64,
}

/// Energy balance of a solution `state_next` of the system linearized at `u_k`.
///
/// The residual is
/// `||sigma||^2 + 4 alpha (1 - alpha) ||D(u)||^2 - 2 alpha (f, u) - lambda (rotational)`
/// and vanishes, up to solver accuracy, when `u` and `u_k` vanish on the boundary.
pub fn energy_balance(
    assembler: &Assembler,
    state_next: &crate::fe_space::DiscreteState,
    u_k: &[f64],
    lambda: f64,
) -> EnergyBalance {
    let space = &**assembler.space();
    let alpha = assembler.alpha();
    let (u, s) = (state_next.velocity(), state_next.stress());
    let (mut sigma_sq, mut d_sq, mut rot) = (0.0, 0.0, 0.0);
    for (t, el) in space.elements().iter().enumerate() {
        for (l, w) in TRIANGLE_DEG4 {
            let w = w * el.area;
            let (_, g) = space.velocity_at(u, t, l);
            let (_, gk) = space.velocity_at(u_k, t, l);
            let sv = space.stress_at(s, t, l);
            let d = [g[0][0], 0.5 * (g[0][1] + g[1][0]), g[1][1]];
            sigma_sq += w * ddot(&sv, &sv);
            d_sq += w * ddot(&d, &d);
            rot += w * ddot(&rotational(&gk, &sv), &sv);
        }
    }
    let work: f64 = assembler.load()[..u.len()].iter().zip(u).map(|(f, v)| f * v).sum();
    let residual = sigma_sq + 4.0 * alpha * (1.0 - alpha) * d_sq - 2.0 * alpha * work - lambda * rot;
    EnergyBalance {
        sigma_sq,
        d_sq,
        work,
        rotational: rot,
        residual,
    }
}

/// Absolute value of the energy-balance residual.
pub fn energy_identity_residual(
    assembler: &Assembler,
    state_next: &crate::fe_space::DiscreteState,
    u_k: &[f64],
    lambda: f64,
) -> f64 {
    energy_balance(assembler, state_next, u_k, lambda).residual.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize, alpha: f64) -> Assembler {
        let space = Arc::new(FeSpace::new(TriMesh::unit_square(n).unwrap()).unwrap());
        Assembler::new(space, &PhysicalParams::new(0.0, alpha, |x| [x[1], -x[0]]).unwrap()).unwrap()
    }

    fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn rejects_alpha_outside_unit_interval() {
        assert!(PhysicalParams::unforced(0.0, 1.0).is_err());
        assert!(PhysicalParams::unforced(0.0, 0.0).is_err());
        assert!(PhysicalParams::unforced(-1.0, 0.5).is_err());
    }

    #[test]
    fn zero_background_gives_lambda_free_system() {
        let a = setup(3, 0.5);
        let bcs = BoundaryConditions::new();
        let u0 = vec![0.0; a.space().layout().num_velocity()];
        let s1 = a.assemble(0.0, &u0, &bcs).unwrap();
        let s2 = a.assemble(7.5, &u0, &bcs).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn continuity_block_is_negative_transpose_of_gradient_block() {
        let a = setup(3, 0.3);
        let m = a.base_matrix();
        let l = a.space().layout();
        for i in l.pressure_range() {
            let (cols, vals) = m.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j < l.num_velocity() {
                    assert_eq!(v, -m.get(j, i));
                }
            }
        }
    }

    #[test]
    fn transport_block_is_skew() {
        let a = setup(4, 0.5);
        let l = *a.space().layout();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random(l.num_velocity(), &mut rng);
        let b = a.transport_matrix(&u).unwrap();
        let mut s = vec![0.0; l.dim()];
        let sblock = random(l.num_stress(), &mut rng);
        s[l.stress_range()].copy_from_slice(&sblock);
        let scale: f64 = b.values().iter().map(|v| v.abs()).sum::<f64>() * sblock.iter().map(|v| v * v).sum::<f64>();
        assert!(b.bilinear(&s, &s).abs() < 1e-13 * scale);
        assert!(evaluate_form_b(a.space(), &u, &sblock, &sblock).abs() < 1e-12);
    }

    #[test]
    fn matrix_and_direct_form_agree() {
        let a = setup(3, 0.5);
        let l = *a.space().layout();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random(l.num_velocity(), &mut rng);
        let (sb, tb) = (random(l.num_stress(), &mut rng), random(l.num_stress(), &mut rng));
        let mut s = vec![0.0; l.dim()];
        let mut t = vec![0.0; l.dim()];
        s[l.stress_range()].copy_from_slice(&sb);
        t[l.stress_range()].copy_from_slice(&tb);
        let m = a.transport_matrix(&u).unwrap();
        let direct = evaluate_form_b(a.space(), &u, &sb, &tb);
        assert!((m.bilinear(&t, &s) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn form_b_vanishes_for_trivial_inputs() {
        let a = setup(2, 0.5);
        let sp = a.space();
        let sigma = sp.interpolate_stress(|_| [1.0, 2.0, 3.0]);
        let tau = sp.interpolate_stress(|_| [-1.0, 0.5, 2.0]);
        let zero = vec![0.0; sp.layout().num_velocity()];
        assert_eq!(evaluate_form_b(sp, &zero, &sigma, &tau), 0.0);
        let uniform = sp.interpolate_velocity(|_| [1.0, 0.0]);
        // Constant fields: only the boundary term survives, and it cancels between x = 0 and x = 1.
        assert!(evaluate_form_b(sp, &uniform, &sigma, &tau).abs() < 1e-14);
    }

    #[test]
    fn viscous_block_is_positive_semidefinite() {
        let a = setup(3, 0.2);
        let l = *a.space().layout();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut v = vec![0.0; l.dim()];
            let r = random(l.num_velocity(), &mut rng);
            v[..l.num_velocity()].copy_from_slice(&r);
            assert!(a.base_matrix().bilinear(&v, &v) >= -1e-14);
        }
    }
}
