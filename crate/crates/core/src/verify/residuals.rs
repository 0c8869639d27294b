//! Residuals of the perturbed scheme satisfied by the projected reference
//! fields, evaluated level by level on a mesh ladder.
//!
//! With `P` the elliptic projection, `Q` the gradient-matching projection
//! and `R` the stress projection, the audit computes (time-frozen fields,
//! time-derivative terms dropped):
//!
//! ```text
//! R_u   = P[v'] - G-[Q[v]]                       (zero by construction)
//! R_tau = P_q[ W'(u) - W'(P[u]) ]                (order q+1)
//! R_v   = P_q[tau'] - G+[R[tau]]
//!         + mu (P_q[v''] - G+[G-[Q[v]]])          (order q)
//! ```

use crate::basis::QuadratureRule;
use crate::dynamics::ModelParams;
use crate::error::{Error, Result};
use crate::field::DgFunction;
use crate::mesh::{BoundaryMode, Mesh1D};
use crate::ops::assembly::Discretization;
use crate::ops::projections::{
    elliptic_projection, gradient_matching_projection, stress_projection,
};

use super::exact::ExactSolution;

/// L2 norms of the three residual fields at one refinement level.
#[derive(Debug, Clone, Copy)]
pub struct ResidualNorms {
    pub n_cells: usize,
    pub h: f64,
    pub r_u: f64,
    pub r_tau: f64,
    pub r_v: f64,
}

/// Run the audit on uniform periodic meshes with the given cell counts.
pub fn projection_residual_audit(
    exact: &ExactSolution,
    params: &ModelParams,
    n_list: &[usize],
) -> Result<Vec<ResidualNorms>> {
    if !exact.periodic {
        return Err(Error::InvalidParameter(
            "the residual audit runs on periodic references only".into(),
        ));
    }
    let q = params.degree;
    let rule = QuadratureRule::gauss_legendre(2 * (q + 2));
    let t = 0.0;
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mesh = Mesh1D::uniform(exact.domain.0, exact.domain.1, n, BoundaryMode::Periodic)?;
        let disc = Discretization::new(mesh.clone(), q, params.penalty);

        let u = |x: f64| (exact.u)(t, x);
        let uxx = |x: f64| (exact.uxx)(t, x);
        let v = |x: f64| (exact.v)(t, x);
        let vx = |x: f64| (exact.vx)(t, x);
        let vxxx = |x: f64| (exact.vxxx)(t, x);

        let gm = gradient_matching_projection(&disc, v, vx, vxxx)?;
        let r_u = (&gm.riesz_of_derivative - &disc.grad_minus(&gm.field)).l2_norm();

        let pu = elliptic_projection(&disc, u, uxx)?;
        let energy = params.energy;
        let r_tau_field = DgFunction::l2_project_with(
            mesh.clone(),
            q,
            |x| energy.dw(u(x)) - energy.dw(pu.eval(x)),
            &rule,
        );
        let r_tau = r_tau_field.l2_norm();

        let rtau = stress_projection(&disc, &energy, params.gamma, u, uxx)?;
        let gamma = params.gamma;
        let dtau = |x: f64| energy.ddw(u(x)) * (exact.ux)(t, x) - gamma * (exact.uxxx)(t, x);
        let mut r_v = DgFunction::l2_project_with(mesh.clone(), q, dtau, &rule);
        r_v.axpy(-1.0, &disc.grad_plus(&rtau));
        if params.mu != 0.0 {
            let pvxx = DgFunction::l2_project_with(mesh.clone(), q, |x| (exact.vxx)(t, x), &rule);
            r_v.axpy(params.mu, &pvxx);
            r_v.axpy(-params.mu, &disc.grad_plus(&disc.grad_minus(&gm.field)));
        }

        out.push(ResidualNorms {
            n_cells: n,
            h: mesh.h_max(),
            r_u,
            r_tau,
            r_v: r_v.l2_norm(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::EnergyDensity;
    use crate::verify::eoc::eoc;
    use crate::verify::exact::manufactured_periodic;

    #[test]
    fn first_equation_residual_vanishes() {
        let exact = manufactured_periodic();
        let params = ModelParams::new(1e-2, 1e-2, EnergyDensity::DoubleWell, 2).unwrap();
        let rows = projection_residual_audit(&exact, &params, &[8, 16]).unwrap();
        for row in rows {
            assert!(row.r_u <= 1e-11, "r_u {:.3e}", row.r_u);
        }
    }

    #[test]
    fn zero_energy_density_kills_r_tau() {
        let exact = manufactured_periodic();
        let params = ModelParams::new(1.0, 0.0, EnergyDensity::Zero, 2).unwrap();
        let rows = projection_residual_audit(&exact, &params, &[8, 16]).unwrap();
        for row in rows {
            assert!(row.r_tau < 1e-12);
        }
    }

    #[test]
    fn rejects_wall_references() {
        let exact = manufactured_periodic();
        let wall = ExactSolution {
            periodic: false,
            ..exact
        };
        let params = ModelParams::new(1e-2, 1e-2, EnergyDensity::DoubleWell, 1).unwrap();
        assert!(projection_residual_audit(&wall, &params, &[8]).is_err());
    }

    #[test]
    fn residual_orders_q2() {
        let exact = manufactured_periodic();
        let params = ModelParams::new(1e-2, 1e-2, EnergyDensity::DoubleWell, 2).unwrap();
        let rows = projection_residual_audit(&exact, &params, &[16, 32, 64]).unwrap();
        let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let tau: Vec<f64> = rows.iter().map(|r| r.r_tau).collect();
        let v: Vec<f64> = rows.iter().map(|r| r.r_v).collect();
        let tau_eoc = eoc(&tau, &h).unwrap();
        let v_eoc = eoc(&v, &h).unwrap();
        assert!((tau_eoc[2] - 3.0).abs() < 0.3, "tau eoc {:?}", tau_eoc);
        assert!((v_eoc[2] - 2.0).abs() < 0.3, "v eoc {:?}", v_eoc);
    }
}
