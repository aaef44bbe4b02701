//! L2-type norms of discrete states and of their errors against exact fields.

use serde::Serialize;

use super::quadrature::TRIANGLE_DEG4;
use super::{ddot, DiscreteState, FeSpace, SymTensor};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Norms {
    pub l2_u: f64,
    pub h1_semi_u: f64,
    pub l2_sigma: f64,
    pub l2_p: f64,
    /// `||D(u)||`.
    pub d_norm_u: f64,
    /// `(||D(u)||^2 + ||sigma||^2)^(1/2)`.
    pub star: f64,
}

impl Norms {
    /// Full H1 norm `(||u||^2 + ||grad u||^2)^(1/2)`.
    pub fn h1_u(&self) -> f64 {
        self.l2_u.hypot(self.h1_semi_u)
    }
}

/// Smooth reference solution for error measurement.
pub trait ExactSolution {
    fn velocity(&self, x: [f64; 2]) -> [f64; 2];
    /// `g[i][j] = du_i/dx_j`.
    fn velocity_gradient(&self, x: [f64; 2]) -> [[f64; 2]; 2];
    fn stress(&self, x: [f64; 2]) -> SymTensor;
    fn pressure(&self, x: [f64; 2]) -> f64;
}

struct Zero;

impl ExactSolution for Zero {
    fn velocity(&self, _: [f64; 2]) -> [f64; 2] {
        [0.0; 2]
    }
    fn velocity_gradient(&self, _: [f64; 2]) -> [[f64; 2]; 2] {
        [[0.0; 2]; 2]
    }
    fn stress(&self, _: [f64; 2]) -> SymTensor {
        [0.0; 3]
    }
    fn pressure(&self, _: [f64; 2]) -> f64 {
        0.0
    }
}

pub fn norms(space: &FeSpace, state: &DiscreteState) -> Norms {
    error_norms(space, state, &Zero)
}

/// Norms of `state - exact`, integrated with the degree-4 rule.
pub fn error_norms(space: &FeSpace, state: &DiscreteState, exact: &dyn ExactSolution) -> Norms {
    let (u, s, p) = (state.velocity(), state.stress(), state.pressure());
    let mut acc = [0.0f64; 5];
    for (t, el) in space.elements().iter().enumerate() {
        for (l, w) in TRIANGLE_DEG4 {
            let w = w * el.area;
            let x = el.point(l);
            let (uh, gh) = space.velocity_at(u, t, l);
            let (ue, ge) = (exact.velocity(x), exact.velocity_gradient(x));
            let eu = [uh[0] - ue[0], uh[1] - ue[1]];
            let eg = [
                [gh[0][0] - ge[0][0], gh[0][1] - ge[0][1]],
                [gh[1][0] - ge[1][0], gh[1][1] - ge[1][1]],
            ];
            let sh = space.stress_at(s, t, l);
            let se = exact.stress(x);
            let es = [sh[0] - se[0], sh[1] - se[1], sh[2] - se[2]];
            let ep = space.pressure_at(p, t, l) - exact.pressure(x);
            let d = [eg[0][0], 0.5 * (eg[0][1] + eg[1][0]), eg[1][1]];
            acc[0] += w * (eu[0] * eu[0] + eu[1] * eu[1]);
            acc[1] += w * (eg[0][0].powi(2) + eg[0][1].powi(2) + eg[1][0].powi(2) + eg[1][1].powi(2));
            acc[2] += w * ddot(&es, &es);
            acc[3] += w * ep * ep;
            acc[4] += w * ddot(&d, &d);
        }
    }
    let [l2_u, h1_semi_u, l2_sigma, l2_p, d_norm_u] = acc.map(f64::sqrt);
    Norms {
        l2_u,
        h1_semi_u,
        l2_sigma,
        l2_p,
        d_norm_u,
        star: d_norm_u.hypot(l2_sigma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;

    fn square(n: usize) -> FeSpace {
        FeSpace::new(TriMesh::unit_square(n).unwrap()).unwrap()
    }

    #[test]
    fn shear_flow_gradient_norms() {
        let s = square(3);
        let st = s.interpolate(|x| [x[1], 0.0], |_| [0.0; 3], |_| 0.0);
        let n = s.norms(&st);
        assert!((n.h1_semi_u - 1.0).abs() < 1e-12);
        assert!((n.d_norm_u - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((n.l2_u - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_state_has_zero_norms() {
        let s = square(2);
        assert_eq!(s.norms(&s.zero_state()), Norms::default());
    }

    #[test]
    fn polynomial_fields_have_closed_form_norms() {
        let s = square(4);
        // sigma = (x, 1, y): integral of x^2 + 2 + y^2 = 8/3.
        // p = x + y: integral of (x + y)^2 = 7/6.
        let st = s.interpolate(|_| [0.0; 2], |x| [x[0], 1.0, x[1]], |x| x[0] + x[1]);
        let n = s.norms(&st);
        assert!((n.l2_sigma - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((n.l2_p - (7.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert!((n.star - n.l2_sigma).abs() < 1e-15);
    }
}
