//! Legendre polynomials and Gauss-Legendre quadrature on the reference
//! interval [-1, 1].
//!
//! The broken polynomial spaces use raw (non-normalized) Legendre
//! polynomials, so the cell mass matrix is diagonal with entries
//! h_n / (2k + 1) and the endpoint values are (-1)^k at -1 and 1 at +1.

/// Value of the k-th Legendre polynomial at `xi` via the three-term
/// recurrence. Total on all inputs; |value| <= 1 on [-1, 1].
pub fn legendre_eval(k: usize, xi: f64) -> f64 {
    legendre_eval_with_deriv(k, xi).0
}

/// Value and derivative of the k-th Legendre polynomial at `xi`.
///
/// The derivative uses the summation recurrence
/// P'_{n+1} = P'_{n-1} + (2n+1) P_n, which stays exact at xi = +/-1.
pub fn legendre_eval_with_deriv(k: usize, xi: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut dp_prev) = (1.0, 0.0); // P_0
    let (mut p, mut dp) = (xi, 1.0); // P_1
    for n in 1..k {
        let nf = n as f64;
        let p_next = ((2.0 * nf + 1.0) * xi * p - nf * p_prev) / (nf + 1.0);
        let dp_next = dp_prev + (2.0 * nf + 1.0) * p;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
    }
    (p, dp)
}

/// Endpoint derivative P'_k(+1) = k(k+1)/2; P'_k(-1) = (-1)^{k-1} k(k+1)/2.
pub fn legendre_deriv_at_right(k: usize) -> f64 {
    (k * (k + 1)) as f64 / 2.0
}

/// Integral of P'_j P'_k over [-1, 1]: m(m+1) for j+k even (m = min(j,k)),
/// zero otherwise. Used for exact broken-H1 seminorms and stiffness blocks.
pub fn legendre_deriv_gram(j: usize, k: usize) -> f64 {
    if (j + k) % 2 != 0 {
        return 0.0;
    }
    let m = j.min(k);
    (m * (m + 1)) as f64
}

/// Integral of P'_k P_j over [-1, 1]: equals 2 for j < k with j+k odd,
/// zero otherwise (from P'_k = sum of (2m+1) P_m over m < k, m+k odd).
pub fn legendre_deriv_value_gram(j: usize, k: usize) -> f64 {
    if j < k && (j + k) % 2 == 1 {
        2.0
    } else {
        0.0
    }
}

/// A quadrature rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Largest polynomial degree integrated exactly.
    pub exactness_degree: usize,
}

impl QuadratureRule {
    /// Gauss-Legendre rule with `n` points (exact for degree 2n - 1).
    ///
    /// Nodes are found by Newton iteration on P_n starting from the
    /// Chebyshev-like initial guesses; the construction is deterministic.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_eval_with_deriv(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-15 {
                    let (p2, d2) = legendre_eval_with_deriv(n, z);
                    z -= p2 / d2;
                    dp = legendre_eval_with_deriv(n, z).1;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            points[i] = -z;
            points[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            points[n / 2] = 0.0;
        }
        QuadratureRule {
            points,
            weights,
            exactness_degree: 2 * n - 1,
        }
    }

    /// Integrate `f` over [a, b] by mapping the reference rule.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.points.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn endpoint_values() {
        // (-1)^k at the left endpoint, 1 at the right, exactly, for k <= 12.
        for k in 0..=12 {
            assert_eq!(legendre_eval(k, 1.0), 1.0);
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(legendre_eval(k, -1.0), expected);
        }
    }

    #[test]
    fn spec_values() {
        assert_eq!(legendre_eval(3, 1.0), 1.0);
        assert_eq!(legendre_eval(3, -1.0), -1.0);
        assert_eq!(legendre_eval(0, 0.37), 1.0);
    }

    #[test]
    fn bounded_on_reference_interval() {
        for k in 0..=10 {
            for i in 0..=200 {
                let xi = -1.0 + 2.0 * (i as f64) / 200.0;
                assert!(legendre_eval(k, xi).abs() <= 1.0 + 1e-14);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let eps = 1e-6;
        for k in 1..=8 {
            for &xi in &[-0.9, -0.3, 0.1, 0.7] {
                let (_, dp) = legendre_eval_with_deriv(k, xi);
                let fd = (legendre_eval(k, xi + eps) - legendre_eval(k, xi - eps)) / (2.0 * eps);
                assert_abs_diff_eq!(dp, fd, epsilon = 1e-6 * (1.0 + dp.abs()));
            }
        }
    }

    #[test]
    fn endpoint_derivative_formula() {
        for k in 0..=10 {
            let (_, dp) = legendre_eval_with_deriv(k, 1.0);
            assert_abs_diff_eq!(dp, legendre_deriv_at_right(k), epsilon = 1e-12);
            let (_, dm) = legendre_eval_with_deriv(k, -1.0);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(dm, sign * legendre_deriv_at_right(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn deriv_gram_matches_quadrature() {
        let rule = QuadratureRule::gauss_legendre(12);
        for j in 0..=5 {
            for k in 0..=5 {
                let num = rule.integrate(-1.0, 1.0, |x| {
                    legendre_eval_with_deriv(j, x).1 * legendre_eval_with_deriv(k, x).1
                });
                assert_abs_diff_eq!(num, legendre_deriv_gram(j, k), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn deriv_value_gram_matches_quadrature() {
        let rule = QuadratureRule::gauss_legendre(12);
        for j in 0..=5 {
            for k in 0..=5 {
                let num = rule.integrate(-1.0, 1.0, |x| {
                    legendre_eval(j, x) * legendre_eval_with_deriv(k, x).1
                });
                assert_abs_diff_eq!(num, legendre_deriv_value_gram(j, k), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_weights_sum_to_two() {
        for n in 1..=16 {
            let rule = QuadratureRule::gauss_legendre(n);
            let total: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn quadrature_exact_for_monomials() {
        for n in 1..=10 {
            let rule = QuadratureRule::gauss_legendre(n);
            for d in 0..=rule.exactness_degree {
                let num = rule.integrate(-1.0, 1.0, |x| x.powi(d as i32));
                let exact = if d % 2 == 0 {
                    2.0 / (d as f64 + 1.0)
                } else {
                    0.0
                };
                assert_abs_diff_eq!(num, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn quadrature_on_shifted_interval() {
        let rule = QuadratureRule::gauss_legendre(4);
        let val = rule.integrate(0.25, 0.75, |x| x * x);
        assert_abs_diff_eq!(
            val,
            (0.75f64.powi(3) - 0.25f64.powi(3)) / 3.0,
            epsilon = 1e-14
        );
    }
}
