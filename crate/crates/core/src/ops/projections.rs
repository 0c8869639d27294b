//! Projection operators onto the broken space: the elliptic (Riesz)
//! projection with respect to the interior-penalty form, the
//! endpoint-interpolating projections, the gradient-matching projection and
//! the stress projection built from them.

use crate::basis::{legendre_eval, QuadratureRule};
use crate::dynamics::EnergyDensity;
use crate::error::{Error, Result};
use crate::field::DgFunction;
use crate::mesh::{GhostParity, Mesh1D};
use crate::ops::assembly::Discretization;
use crate::ops::solve::solve_bordered;

/// Which cell endpoint an endpoint projection interpolates.
///
/// `Plus` pins the value at the left endpoint of each cell (the trace from
/// the right); `Minus` pins the right endpoint (the trace from the left).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointSide {
    Plus,
    Minus,
}

/// Moments `integral over I_n of f l_j^n dx` for all cells and j <= q.
pub(crate) fn weak_moments(
    mesh: &Mesh1D,
    degree: usize,
    f: impl Fn(f64) -> f64,
    rule: &QuadratureRule,
) -> Vec<f64> {
    let nb = degree + 1;
    let mut out = vec![0.0; mesh.n_cells() * nb];
    for n in 0..mesh.n_cells() {
        let h = mesh.cell_size(n);
        for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.from_reference(n, xi);
            let fv = f(x) * w * 0.5 * h;
            for j in 0..nb {
                out[n * nb + j] += fv * legendre_eval(j, xi);
            }
        }
    }
    out
}

fn integral_of(mesh: &Mesh1D, f: impl Fn(f64) -> f64, rule: &QuadratureRule) -> f64 {
    (0..mesh.n_cells())
        .map(|n| {
            let (a, b) = mesh.cell_bounds(n);
            rule.integrate(a, b, &f)
        })
        .sum()
}

/// Linear functional picking the integral of a field from its coefficients.
fn mean_constraint_row(mesh: &Mesh1D, degree: usize) -> Vec<f64> {
    let nb = degree + 1;
    let mut c = vec![0.0; mesh.n_cells() * nb];
    for (n, &h) in mesh.cell_sizes().iter().enumerate() {
        c[n * nb] = h;
    }
    c
}

fn measurement_rule(degree: usize) -> QuadratureRule {
    QuadratureRule::gauss_legendre(2 * (degree + 2))
}

/// Elliptic projection: the unique mean-matching field with
/// `a_h^d(P w, psi) = integral(-w'' psi)` for all psi, the orientation that
/// pairs the positive-definite penalty form with the negative Laplacian so
/// that P approximates the identity. Periodic meshes only; the form is
/// singular on constants, so the mean is pinned by a bordered solve.
pub fn elliptic_projection(
    disc: &Discretization,
    w: impl Fn(f64) -> f64,
    wxx: impl Fn(f64) -> f64,
) -> Result<DgFunction> {
    if !disc.mesh().is_periodic() {
        return Err(Error::InvalidParameter(
            "elliptic projection requires a periodic mesh".into(),
        ));
    }
    let rule = measurement_rule(disc.degree());
    let mut rhs = weak_moments(disc.mesh(), disc.degree(), &wxx, &rule);
    for r in &mut rhs {
        *r = -*r;
    }
    let c = mean_constraint_row(disc.mesh(), disc.degree());
    let g = integral_of(disc.mesh(), &w, &rule);
    let a = disc.ip_weak_matrix().to_dense();
    let x = solve_bordered(&a, &c, &rhs, g)?;
    Ok(DgFunction::from_coeffs(
        disc.mesh().clone(),
        disc.degree(),
        x,
    ))
}

/// Endpoint projection: interpolates `w` at one endpoint of every cell and
/// matches all moments against polynomials of degree q - 1. Solved cell by
/// cell in closed form via the Legendre endpoint values.
pub fn endpoint_projection(
    mesh: &std::sync::Arc<Mesh1D>,
    degree: usize,
    w: impl Fn(f64) -> f64,
    side: EndpointSide,
) -> DgFunction {
    let nb = degree + 1;
    let rule = measurement_rule(degree);
    let mut f = DgFunction::zeros(mesh.clone(), degree);
    let moments = weak_moments(mesh, degree, &w, &rule);
    for n in 0..mesh.n_cells() {
        let h = mesh.cell_size(n);
        // Moments fix the first q coefficients (same as the L2 projection).
        for k in 0..degree {
            f.set_coeff(n, k, (2.0 * k as f64 + 1.0) / h * moments[n * nb + k]);
        }
        // The endpoint condition fixes the top coefficient.
        let (xl, xr) = mesh.cell_bounds(n);
        match side {
            EndpointSide::Plus => {
                // value at the left endpoint: sum_k (-1)^k c_k = w(x_n)
                let mut partial = 0.0;
                for k in 0..degree {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    partial += sign * f.coeff(n, k);
                }
                let sign_q = if degree % 2 == 0 { 1.0 } else { -1.0 };
                f.set_coeff(n, degree, sign_q * (w(xl) - partial));
            }
            EndpointSide::Minus => {
                // value at the right endpoint: sum_k c_k = w(x_{n+1})
                let mut partial = 0.0;
                for k in 0..degree {
                    partial += f.coeff(n, k);
                }
                f.set_coeff(n, degree, w(xr) - partial);
            }
        }
    }
    f
}

/// Result of the gradient-matching projection: the projected field and the
/// elliptic projection of the derivative it matches.
pub struct GradientMatch {
    pub field: DgFunction,
    pub riesz_of_derivative: DgFunction,
}

/// Gradient-matching projection: the unique field Q with
/// `G-[Q] = P[w']` and `integral(Q) = integral(w)`, where `P` is the
/// elliptic projection. `wxxx` supplies the second derivative of w'.
pub fn gradient_matching_projection(
    disc: &Discretization,
    w: impl Fn(f64) -> f64,
    wx: impl Fn(f64) -> f64,
    wxxx: impl Fn(f64) -> f64,
) -> Result<GradientMatch> {
    let p = elliptic_projection(disc, &wx, &wxxx)?;
    let scale = 1.0 + p.l2_norm();
    if p.integral().abs() > 1e-10 * scale {
        return Err(Error::LinearSolveFailure(format!(
            "gradient-matching projection: right-hand side has mean {:.3e}, expected zero",
            p.integral()
        )));
    }
    // Solve B- q = M p with the mean pinned; parity plays no role on the
    // periodic meshes this projection lives on.
    let b = disc.grad_minus_weak(GhostParity::Even).to_dense();
    let mut rhs = p.coeffs().to_vec();
    for (r, m) in rhs.iter_mut().zip(disc.mass()) {
        *r *= m;
    }
    let c = mean_constraint_row(disc.mesh(), disc.degree());
    let rule = measurement_rule(disc.degree());
    let g = integral_of(disc.mesh(), &w, &rule);
    let x = solve_bordered(&b, &c, &rhs, g)?;
    let q = DgFunction::from_coeffs(disc.mesh().clone(), disc.degree(), x);
    let residual = (&disc.grad_minus(&q) - &p).l2_norm();
    if residual > 1e-11 * scale {
        return Err(Error::LinearSolveFailure(format!(
            "gradient-matching projection: residual {residual:.3e}"
        )));
    }
    Ok(GradientMatch {
        field: q,
        riesz_of_derivative: p,
    })
}

/// Stress projection: the field `R = P_q[W'(u)] - gamma Lap_h(P[u])`,
/// defined weakly by
/// `integral(R psi) = integral(W'(u) psi) + gamma a_h^d(P[u], psi)`.
/// Together with the elliptic-projection identity this makes R agree with
/// the L2 projection of the exact stress `W'(u) - gamma u''`.
pub fn stress_projection(
    disc: &Discretization,
    energy: &EnergyDensity,
    gamma: f64,
    u: impl Fn(f64) -> f64,
    uxx: impl Fn(f64) -> f64,
) -> Result<DgFunction> {
    let pu = elliptic_projection(disc, &u, &uxx)?;
    let rule = measurement_rule(disc.degree());
    let mut weak = weak_moments(disc.mesh(), disc.degree(), |x| energy.dw(u(x)), &rule);
    let a_pu = disc.ip_weak_matrix().apply(pu.coeffs());
    for (w, a) in weak.iter_mut().zip(&a_pu) {
        *w += gamma * a;
    }
    for (w, im) in weak.iter_mut().zip(disc.inv_mass()) {
        *w *= im;
    }
    Ok(DgFunction::from_coeffs(
        disc.mesh().clone(),
        disc.degree(),
        weak,
    ))
}
