//! Quadrature rules on the reference triangle and the unit interval.

/// Six-point rule exact for polynomials of total degree 4.
///
/// Points are barycentric coordinates; weights sum to one and are scaled by
/// the element area at the call site.
pub const TRIANGLE_DEG4: [([f64; 3], f64); 6] = {
    const A: f64 = 0.445_948_490_915_965;
    const B: f64 = 0.091_576_213_509_771;
    const WA: f64 = 0.223_381_589_678_011;
    const WB: f64 = 0.109_951_743_655_322;
    [
        ([1.0 - 2.0 * A, A, A], WA),
        ([A, 1.0 - 2.0 * A, A], WA),
        ([A, A, 1.0 - 2.0 * A], WA),
        ([1.0 - 2.0 * B, B, B], WB),
        ([B, 1.0 - 2.0 * B, B], WB),
        ([B, B, 1.0 - 2.0 * B], WB),
    ]
};

/// Three-point Gauss-Legendre rule on [0, 1], exact to degree 5.
pub const LINE_GAUSS3: [(f64, f64); 3] = {
    // sqrt(3/5) / 2
    const D: f64 = 0.387_298_334_620_741_7;
    [(0.5 - D, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + D, 5.0 / 18.0)]
};

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn triangle_rule_is_exact_to_degree_four() {
        // integral of l0^a l1^b l2^c over the reference triangle (area 1/2) is
        // a! b! c! 2! / (a+b+c+2)! * (1/2); the rule integrates over unit "area".
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                for c in 0..=(4 - a - b) {
                    let exact = factorial(a) * factorial(b) * factorial(c) * 2.0
                        / factorial(a + b + c + 2);
                    let approx: f64 = TRIANGLE_DEG4
                        .iter()
                        .map(|(l, w)| w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32))
                        .sum();
                    assert!((exact - approx).abs() < 1e-14, "{a} {b} {c}: {exact} vs {approx}");
                }
            }
        }
    }

    #[test]
    fn line_rule_is_exact_to_degree_five() {
        for k in 0..=5 {
            let approx: f64 = LINE_GAUSS3.iter().map(|(s, w)| w * s.powi(k)).sum();
            assert!((approx - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
