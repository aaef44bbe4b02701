//! Lagrange shape functions in barycentric form.
//!
//! P2 local numbering: vertices 0, 1, 2, then the midpoints of edges
//! (0,1), (1,2), (2,0), matching [`crate::mesh::LOCAL_EDGES`].

pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

pub fn p2_gradients(l: [f64; 3], grad: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let comb = |a: f64, ga: [f64; 2], b: f64, gb: [f64; 2]| {
        [a * ga[0] + b * gb[0], a * ga[1] + b * gb[1]]
    };
    [
        comb(4.0 * l[0] - 1.0, grad[0], 0.0, grad[0]),
        comb(4.0 * l[1] - 1.0, grad[1], 0.0, grad[1]),
        comb(4.0 * l[2] - 1.0, grad[2], 0.0, grad[2]),
        comb(4.0 * l[1], grad[0], 4.0 * l[0], grad[1]),
        comb(4.0 * l[2], grad[1], 4.0 * l[1], grad[2]),
        comb(4.0 * l[0], grad[2], 4.0 * l[2], grad[0]),
    ]
}

/// Barycentric coordinates of the six P2 nodes.
pub const P2_NODES: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.5, 0.5, 0.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_is_nodal() {
        for (i, node) in P2_NODES.iter().enumerate() {
            let v = p2_values(*node);
            for (j, vj) in v.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vj - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn p2_gradients_sum_to_zero() {
        let g = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        let grads = p2_gradients([0.2, 0.3, 0.5], &g);
        for d in 0..2 {
            let s: f64 = grads.iter().map(|gr| gr[d]).sum();
            assert!(s.abs() < 1e-14);
        }
    }
}
