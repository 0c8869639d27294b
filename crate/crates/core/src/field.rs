//! Broken-polynomial fields: per-cell Legendre expansions, L2 projection,
//! traces, jumps/averages and the dG norms.

use std::sync::Arc;

use crate::basis::{
    legendre_deriv_at_right, legendre_deriv_gram, legendre_eval, legendre_eval_with_deriv,
    QuadratureRule,
};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryMode, GhostParity, Mesh1D};

/// A piecewise polynomial of degree `q` with Legendre coefficients per cell.
///
/// On cell `I_n` the field evaluates to `sum_k coeffs[n][k] l_k^n(x)` where
/// `l_k^n` is the k-th Legendre polynomial mapped to the cell. The mass
/// matrix in this basis is diagonal with entries `h_n / (2k + 1)`.
#[derive(Debug, Clone)]
pub struct DgFunction {
    mesh: Arc<Mesh1D>,
    degree: usize,
    parity: GhostParity,
    coeffs: Vec<f64>,
}

/// The three norms returned by [`DgFunction::dg_norms`].
#[derive(Debug, Clone, Copy)]
pub struct DgNorms {
    pub l2: f64,
    pub seminorm: f64,
    pub norm: f64,
}

impl DgFunction {
    pub fn zeros(mesh: Arc<Mesh1D>, degree: usize) -> Self {
        assert!(degree >= 1, "dG degree must be at least 1");
        let len = mesh.n_cells() * (degree + 1);
        DgFunction {
            mesh,
            degree,
            parity: GhostParity::Even,
            coeffs: vec![0.0; len],
        }
    }

    pub fn from_coeffs(mesh: Arc<Mesh1D>, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), mesh.n_cells() * (degree + 1));
        DgFunction {
            mesh,
            degree,
            parity: GhostParity::Even,
            coeffs,
        }
    }

    /// L2 projection of `g` onto the broken space, cell by cell:
    /// `coeffs[n][k] = (2k+1)/h_n * integral over I_n of g l_k^n`.
    /// The default rule has 2(q+1) points (exactness degree 4q+3).
    pub fn l2_project(mesh: Arc<Mesh1D>, degree: usize, g: impl Fn(f64) -> f64) -> Self {
        let rule = QuadratureRule::gauss_legendre(2 * (degree + 1));
        Self::l2_project_with(mesh, degree, g, &rule)
    }

    pub fn l2_project_with(
        mesh: Arc<Mesh1D>,
        degree: usize,
        g: impl Fn(f64) -> f64,
        rule: &QuadratureRule,
    ) -> Self {
        let mut f = Self::zeros(mesh, degree);
        let nb = degree + 1;
        for n in 0..f.mesh.n_cells() {
            for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
                let x = f.mesh.from_reference(n, xi);
                let gv = g(x);
                for k in 0..nb {
                    // h_n/2 from the map and (2k+1)/h_n from the inverse mass
                    // combine into (2k+1)/2.
                    f.coeffs[n * nb + k] += w * gv * legendre_eval(k, xi) * (k as f64 + 0.5);
                }
            }
        }
        f
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn parity(&self) -> GhostParity {
        self.parity
    }

    pub fn with_parity(mut self, parity: GhostParity) -> Self {
        self.parity = parity;
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, cell: usize, k: usize) -> f64 {
        self.coeffs[cell * (self.degree + 1) + k]
    }

    pub fn set_coeff(&mut self, cell: usize, k: usize, value: f64) {
        self.coeffs[cell * (self.degree + 1) + k] = value;
    }

    pub fn same_space(&self, other: &DgFunction) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) && self.degree == other.degree
    }

    /// Evaluate on cell `n` at reference coordinate `xi`.
    pub fn eval_on_cell(&self, n: usize, xi: f64) -> f64 {
        let nb = self.degree + 1;
        let mut acc = 0.0;
        for k in 0..nb {
            acc += self.coeffs[n * nb + k] * legendre_eval(k, xi);
        }
        acc
    }

    /// Evaluate at a physical point (cell interiors; at a node the trace
    /// from the containing cell per `locate` is returned).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.mesh.locate(x);
        self.eval_on_cell(n, self.mesh.to_reference(n, x))
    }

    /// d/dx on cell `n` at reference coordinate `xi`.
    pub fn eval_deriv_on_cell(&self, n: usize, xi: f64) -> f64 {
        let nb = self.degree + 1;
        let scale = 2.0 / self.mesh.cell_size(n);
        let mut acc = 0.0;
        for k in 1..nb {
            acc += self.coeffs[n * nb + k] * legendre_eval_with_deriv(k, xi).1;
        }
        acc * scale
    }

    /// Trace at the left endpoint of cell `n` (exact: sum of (-1)^k c_k).
    pub fn trace_left(&self, n: usize) -> f64 {
        let nb = self.degree + 1;
        let mut acc = 0.0;
        for k in 0..nb {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * self.coeffs[n * nb + k];
        }
        acc
    }

    /// Trace at the right endpoint of cell `n` (exact: sum of c_k).
    pub fn trace_right(&self, n: usize) -> f64 {
        let nb = self.degree + 1;
        self.coeffs[n * nb..(n + 1) * nb].iter().sum()
    }

    /// Derivative trace at the left endpoint of cell `n`.
    pub fn deriv_trace_left(&self, n: usize) -> f64 {
        let nb = self.degree + 1;
        let scale = 2.0 / self.mesh.cell_size(n);
        let mut acc = 0.0;
        for k in 1..nb {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * legendre_deriv_at_right(k) * self.coeffs[n * nb + k];
        }
        acc * scale
    }

    /// Derivative trace at the right endpoint of cell `n`.
    pub fn deriv_trace_right(&self, n: usize) -> f64 {
        let nb = self.degree + 1;
        let scale = 2.0 / self.mesh.cell_size(n);
        let mut acc = 0.0;
        for k in 1..nb {
            acc += legendre_deriv_at_right(k) * self.coeffs[n * nb + k];
        }
        acc * scale
    }

    /// Left/right traces of the field at face `face`, with periodic wrap or
    /// ghost-parity completion at walls.
    fn face_traces(&self, face: usize) -> Result<(f64, f64)> {
        let n = self.mesh.n_cells();
        let n_faces = self.mesh.n_faces();
        if face >= n_faces {
            return Err(Error::FaceOutOfRange { face, n_faces });
        }
        match self.mesh.boundary_mode() {
            BoundaryMode::Periodic => {
                let left_cell = (face + n - 1) % n;
                Ok((self.trace_right(left_cell), self.trace_left(face % n)))
            }
            BoundaryMode::Natural => {
                if face == 0 {
                    let interior = self.trace_left(0);
                    let ghost = match self.parity {
                        GhostParity::Even => interior,
                        GhostParity::Odd => -interior,
                    };
                    Ok((ghost, interior))
                } else if face == n {
                    let interior = self.trace_right(n - 1);
                    let ghost = match self.parity {
                        GhostParity::Even => interior,
                        GhostParity::Odd => -interior,
                    };
                    Ok((interior, ghost))
                } else {
                    Ok((self.trace_right(face - 1), self.trace_left(face)))
                }
            }
        }
    }

    /// Jump `[[f]] = f(x^-) - f(x^+)` at a face.
    pub fn jump(&self, face: usize) -> Result<f64> {
        let (l, r) = self.face_traces(face)?;
        Ok(l - r)
    }

    /// Average `{f} = (f(x^-) + f(x^+)) / 2` at a face.
    pub fn average(&self, face: usize) -> Result<f64> {
        let (l, r) = self.face_traces(face)?;
        Ok(0.5 * (l + r))
    }

    /// Integral over the whole domain: only the k = 0 coefficients survive.
    pub fn integral(&self) -> f64 {
        let nb = self.degree + 1;
        self.mesh
            .cell_sizes()
            .iter()
            .enumerate()
            .map(|(n, &h)| h * self.coeffs[n * nb])
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.mesh.domain_length()
    }

    /// L2 inner product over the domain, exact via the diagonal mass matrix.
    pub fn inner_product(&self, other: &DgFunction) -> Result<f64> {
        if !self.same_space(other) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.inner_product_unchecked(other))
    }

    pub(crate) fn inner_product_unchecked(&self, other: &DgFunction) -> f64 {
        let nb = self.degree + 1;
        let mut acc = 0.0;
        for (n, &h) in self.mesh.cell_sizes().iter().enumerate() {
            for k in 0..nb {
                acc +=
                    self.coeffs[n * nb + k] * other.coeffs[n * nb + k] * h / (2.0 * k as f64 + 1.0);
            }
        }
        acc
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner_product_unchecked(self).max(0.0).sqrt()
    }

    /// Broken-H1 part of the dG seminorm, exact via the derivative Gram.
    pub fn broken_h1_seminorm_sq(&self) -> f64 {
        let nb = self.degree + 1;
        let mut acc = 0.0;
        for (n, &h) in self.mesh.cell_sizes().iter().enumerate() {
            let c = &self.coeffs[n * nb..(n + 1) * nb];
            let mut cell = 0.0;
            for j in 1..nb {
                for k in 1..nb {
                    cell += c[j] * c[k] * legendre_deriv_gram(j, k);
                }
            }
            acc += cell * 2.0 / h;
        }
        acc
    }

    /// Faces entering the dG seminorm: all N faces for periodic meshes,
    /// interior faces only for natural ones (walls are controlled by the
    /// gradient operators, not by the norm).
    pub fn seminorm_faces(&self) -> std::ops::Range<usize> {
        match self.mesh.boundary_mode() {
            BoundaryMode::Periodic => 0..self.mesh.n_cells(),
            BoundaryMode::Natural => 1..self.mesh.n_cells(),
        }
    }

    /// Squared jump part of the dG seminorm:
    /// `sum over faces of 2 [[f]]^2 / (h_left + h_right)`.
    pub fn jump_seminorm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for face in self.seminorm_faces() {
            let j = self.jump(face).expect("face in range");
            acc += j * j / self.mesh.face_h(face);
        }
        acc
    }

    /// (l2, dG seminorm, full dG norm).
    pub fn dg_norms(&self) -> DgNorms {
        let l2_sq = self.inner_product_unchecked(self).max(0.0);
        let semi_sq = self.broken_h1_seminorm_sq() + self.jump_seminorm_sq();
        DgNorms {
            l2: l2_sq.sqrt(),
            seminorm: semi_sq.max(0.0).sqrt(),
            norm: (l2_sq + semi_sq).max(0.0).sqrt(),
        }
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> DgFunction {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// self += a * other (same space required).
    pub fn axpy(&mut self, a: f64, other: &DgFunction) {
        debug_assert!(self.same_space(other));
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
    }
}

impl std::ops::Add<&DgFunction> for &DgFunction {
    type Output = DgFunction;
    fn add(self, rhs: &DgFunction) -> DgFunction {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl std::ops::Sub<&DgFunction> for &DgFunction {
    type Output = DgFunction;
    fn sub(self, rhs: &DgFunction) -> DgFunction {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(mesh: &Arc<Mesh1D>, q: usize, seed: u64) -> DgFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = DgFunction::zeros(mesh.clone(), q);
        for c in f.coeffs_mut() {
            *c = rng.random_range(-1.0..1.0);
        }
        f
    }

    #[test]
    fn orthogonality_gives_diagonal_mass() {
        let mesh = build_mesh(0.0, 1.0, 5, 0.25, 3, BoundaryMode::Periodic).unwrap();
        let q = 3;
        for n in 0..mesh.n_cells() {
            let h = mesh.cell_size(n);
            for k in 0..=q {
                for kp in 0..=q {
                    let mut a = DgFunction::zeros(mesh.clone(), q);
                    let mut b = DgFunction::zeros(mesh.clone(), q);
                    a.set_coeff(n, k, 1.0);
                    b.set_coeff(n, kp, 1.0);
                    let ip = a.inner_product(&b).unwrap();
                    let expected = if k == kp {
                        h / (2.0 * k as f64 + 1.0)
                    } else {
                        0.0
                    };
                    assert!((ip - expected).abs() < 1e-13 * h);
                }
            }
        }
    }

    #[test]
    fn projection_reproduces_polynomials() {
        // g(x) = x lies in the space for q = 1 on any mesh.
        let mesh = build_mesh(0.0, 1.0, 7, 0.2, 11, BoundaryMode::Periodic).unwrap();
        let f = DgFunction::l2_project(mesh.clone(), 1, |x| x);
        for n in 0..mesh.n_cells() {
            for &xi in &[-0.7, 0.0, 0.4, 1.0] {
                let x = mesh.from_reference(n, xi);
                assert_abs_diff_eq!(f.eval_on_cell(n, xi), x, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn projection_idempotent_on_broken_space() {
        let mesh = build_mesh(0.0, 1.0, 6, 0.15, 5, BoundaryMode::Periodic).unwrap();
        let q = 3;
        let f = random_field(&mesh, q, 1);
        let g = DgFunction::l2_project(mesh.clone(), q, |x| f.eval(x));
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn projection_error_third_order_for_q2() {
        // L2 error of projecting sin(2 pi x) decays with order q + 1 = 3.
        let rule = QuadratureRule::gauss_legendre(8);
        let mut errs = Vec::new();
        for &n in &[8usize, 16, 32] {
            let mesh = Mesh1D::uniform(0.0, 1.0, n, BoundaryMode::Periodic).unwrap();
            let f =
                DgFunction::l2_project(mesh.clone(), 2, |x| (2.0 * std::f64::consts::PI * x).sin());
            let mut err_sq = 0.0;
            for c in 0..mesh.n_cells() {
                let (a, b) = mesh.cell_bounds(c);
                err_sq += rule.integrate(a, b, |x| {
                    let d = f.eval_on_cell(c, mesh.to_reference(c, x))
                        - (2.0 * std::f64::consts::PI * x).sin();
                    d * d
                });
            }
            errs.push(err_sq.sqrt());
        }
        let eoc1 = (errs[0] / errs[1]).ln() / 2f64.ln();
        let eoc2 = (errs[1] / errs[2]).ln() / 2f64.ln();
        assert!((eoc1 - 3.0).abs() < 0.2, "eoc {eoc1}");
        assert!((eoc2 - 3.0).abs() < 0.1, "eoc {eoc2}");
    }

    #[test]
    fn jumps_of_continuous_functions_vanish() {
        // x^2 - x is continuous across the periodic wrap as well.
        let mesh = build_mesh(0.0, 1.0, 9, 0.2, 2, BoundaryMode::Periodic).unwrap();
        let f = DgFunction::l2_project(mesh.clone(), 2, |x| x * x - x);
        for face in 0..mesh.n_faces() {
            assert!(f.jump(face).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn indicator_jump_and_average() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, BoundaryMode::Periodic).unwrap();
        let mut f = DgFunction::zeros(mesh, 2);
        f.set_coeff(1, 0, 1.0);
        // Face 1 sits between cell 0 (zero) and cell 1 (one).
        assert_abs_diff_eq!(f.jump(1).unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.average(1).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn jump_average_identity() {
        // [[f]] + 2 (f(x^+) - {f}) = 0 at every interior face.
        let mesh = build_mesh(0.0, 1.0, 8, 0.1, 9, BoundaryMode::Periodic).unwrap();
        let f = random_field(&mesh, 3, 4);
        for face in 1..mesh.n_cells() {
            let plus = f.trace_left(face);
            let res = f.jump(face).unwrap() + 2.0 * (plus - f.average(face).unwrap());
            assert!(res.abs() < 1e-13);
        }
    }

    #[test]
    fn natural_ghost_traces() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, BoundaryMode::Natural).unwrap();
        let f = random_field(&mesh, 2, 8);
        let even = f.clone().with_parity(GhostParity::Even);
        let odd = f.clone().with_parity(GhostParity::Odd);
        assert_abs_diff_eq!(even.jump(0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            even.average(0).unwrap(),
            even.trace_left(0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            odd.jump(0).unwrap(),
            -2.0 * odd.trace_left(0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(odd.average(0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            odd.jump(4).unwrap(),
            2.0 * odd.trace_right(3),
            epsilon = 1e-15
        );
        assert!(f.jump(5).is_err());
    }

    #[test]
    fn dg_norm_of_constants() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 8, BoundaryMode::Periodic).unwrap();
        let f = DgFunction::l2_project(mesh, 2, |_| -3.0);
        let norms = f.dg_norms();
        assert_abs_diff_eq!(norms.l2, 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(norms.seminorm, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(norms.norm, 3.0, epsilon = 1e-13);
    }

    #[test]
    fn broken_h1_matches_quadrature_oracle() {
        // Brute-force quadrature of (f')^2, independent of the Gram formula.
        let mesh = build_mesh(0.0, 1.0, 4, 0.2, 13, BoundaryMode::Periodic).unwrap();
        let f = random_field(&mesh, 3, 21);
        let rule = QuadratureRule::gauss_legendre(10);
        let mut oracle = 0.0;
        for n in 0..mesh.n_cells() {
            let (a, b) = mesh.cell_bounds(n);
            oracle += rule.integrate(a, b, |x| {
                let d = f.eval_deriv_on_cell(n, mesh.to_reference(n, x));
                d * d
            });
        }
        assert_abs_diff_eq!(
            f.broken_h1_seminorm_sq(),
            oracle,
            epsilon = 1e-11 * (1.0 + oracle)
        );

        // Single l_1 coefficient on one cell: the seminorm is 4 / h.
        let mut g = DgFunction::zeros(mesh.clone(), 3);
        g.set_coeff(2, 1, 1.0);
        assert_abs_diff_eq!(
            g.broken_h1_seminorm_sq(),
            4.0 / mesh.cell_size(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dg_norm_definitional_consistency() {
        let mesh = build_mesh(0.0, 1.0, 8, 0.1, 17, BoundaryMode::Periodic).unwrap();
        let f = random_field(&mesh, 2, 33);
        let norms = f.dg_norms();
        assert_abs_diff_eq!(
            norms.norm * norms.norm,
            norms.l2 * norms.l2 + norms.seminorm * norms.seminorm,
            epsilon = 1e-12
        );
    }

    #[test]
    fn inner_product_symmetric_and_positive() {
        let mesh = build_mesh(0.0, 1.0, 8, 0.1, 19, BoundaryMode::Periodic).unwrap();
        let f = random_field(&mesh, 3, 7);
        let g = random_field(&mesh, 3, 8);
        let fg = f.inner_product(&g).unwrap();
        let gf = g.inner_product(&f).unwrap();
        assert_abs_diff_eq!(fg, gf, epsilon = 1e-15 * (1.0 + fg.abs()));
        assert!(f.inner_product(&f).unwrap() >= 0.0);
    }

    #[test]
    fn inner_product_rejects_mismatch() {
        let mesh_a = Mesh1D::uniform(0.0, 1.0, 8, BoundaryMode::Periodic).unwrap();
        let mesh_b = Mesh1D::uniform(0.0, 1.0, 8, BoundaryMode::Periodic).unwrap();
        let f = DgFunction::zeros(mesh_a.clone(), 2);
        let g = DgFunction::zeros(mesh_b, 2);
        assert!(f.inner_product(&g).is_err());
        let h = DgFunction::zeros(mesh_a, 3);
        assert!(f.inner_product(&h).is_err());
    }

    #[test]
    fn integral_uses_mean_coefficients() {
        let mesh = build_mesh(0.0, 2.0, 6, 0.2, 23, BoundaryMode::Periodic).unwrap();
        let f = random_field(&mesh, 2, 40);
        let nb = 3;
        let expected: f64 = mesh
            .cell_sizes()
            .iter()
            .enumerate()
            .map(|(n, &h)| h * f.coeffs()[n * nb])
            .sum();
        assert_abs_diff_eq!(f.integral(), expected, epsilon = 1e-14);
    }
}
