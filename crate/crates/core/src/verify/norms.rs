//! Error norms of a discrete trajectory against a reference solution.
//!
//! Spatial integrals use a 2(q+2)-point rule per cell, finer than the
//! assembly quadrature, so the measurement out-resolves the solution error.
//! The dG error norm combines the L2 error, the broken derivative against
//! the analytic derivative, and the jump terms of the discrete field alone
//! (the reference is continuous).

use crate::basis::QuadratureRule;
use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::field::DgFunction;

use super::exact::ExactSolution;

/// Spatial error measures of one state.
#[derive(Debug, Clone, Copy)]
pub struct SpatialErrors {
    pub u_l2: f64,
    pub u_dg: f64,
    pub v_l2: f64,
    pub v_dg: f64,
    /// dG seminorm part of the velocity error (for mu-weighted reporting).
    pub v_dg_semi_sq: f64,
}

fn field_errors(
    f: &DgFunction,
    t: f64,
    val: &dyn Fn(f64, f64) -> f64,
    deriv: &dyn Fn(f64, f64) -> f64,
    rule: &QuadratureRule,
) -> (f64, f64, f64) {
    let mesh = f.mesh();
    let mut l2_sq = 0.0;
    let mut grad_sq = 0.0;
    for n in 0..mesh.n_cells() {
        let h = mesh.cell_size(n);
        for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.from_reference(n, xi);
            let dv = f.eval_on_cell(n, xi) - val(t, x);
            let dg = f.eval_deriv_on_cell(n, xi) - deriv(t, x);
            l2_sq += 0.5 * h * w * dv * dv;
            grad_sq += 0.5 * h * w * dg * dg;
        }
    }
    let jump_sq = f.jump_seminorm_sq();
    (l2_sq, grad_sq, jump_sq)
}

/// Errors of a single state against the reference at its own time.
pub fn spatial_errors(
    state: &State,
    exact: &ExactSolution,
    rule: &QuadratureRule,
) -> SpatialErrors {
    let t = state.time;
    let (ul2, ugrad, ujump) = field_errors(&state.u, t, &*exact.u, &*exact.ux, rule);
    let (vl2, vgrad, vjump) = field_errors(&state.v, t, &*exact.v, &*exact.vx, rule);
    SpatialErrors {
        u_l2: ul2.sqrt(),
        u_dg: (ul2 + ugrad + ujump).sqrt(),
        v_l2: vl2.sqrt(),
        v_dg: (vl2 + vgrad + vjump).sqrt(),
        v_dg_semi_sq: vgrad + vjump,
    }
}

/// Trajectory norms: L-infinity in time for the strain (L2 and dG) and the
/// velocity (L2), L2 in time of the velocity dG norm (trapezoid rule).
#[derive(Debug, Clone, Copy)]
pub struct ErrorNorms {
    pub u_linf_l2: f64,
    pub u_linf_dg: f64,
    pub v_linf_l2: f64,
    pub v_l2_dg: f64,
    /// sqrt(mu * integral of the velocity dG *seminorm* squared), the
    /// weighting the stability estimate uses; reported as metadata.
    pub v_l2_dg_mu_weighted: f64,
}

/// Streaming accumulator so convergence runs need not store trajectories.
pub struct ErrorAccumulator<'a> {
    exact: &'a ExactSolution,
    rule: QuadratureRule,
    last_time: Option<f64>,
    last_v_dg_sq: f64,
    last_v_semi_sq: f64,
    first_u_l2: Option<f64>,
    u_linf_l2: f64,
    u_linf_dg: f64,
    v_linf_l2: f64,
    v_dg_sq_integral: f64,
    v_semi_sq_integral: f64,
}

impl<'a> ErrorAccumulator<'a> {
    pub fn new(exact: &'a ExactSolution, degree: usize) -> Self {
        ErrorAccumulator {
            exact,
            rule: QuadratureRule::gauss_legendre(2 * (degree + 2)),
            last_time: None,
            last_v_dg_sq: 0.0,
            last_v_semi_sq: 0.0,
            first_u_l2: None,
            u_linf_l2: 0.0,
            u_linf_dg: 0.0,
            v_linf_l2: 0.0,
            v_dg_sq_integral: 0.0,
            v_semi_sq_integral: 0.0,
        }
    }

    /// L2 strain error of the first recorded state (the projection error
    /// when the run starts from projected initial data).
    pub fn initial_u_l2(&self) -> Option<f64> {
        self.first_u_l2
    }

    pub fn update(&mut self, state: &State) {
        let e = spatial_errors(state, self.exact, &self.rule);
        if self.first_u_l2.is_none() {
            self.first_u_l2 = Some(e.u_l2);
        }
        self.u_linf_l2 = self.u_linf_l2.max(e.u_l2);
        self.u_linf_dg = self.u_linf_dg.max(e.u_dg);
        self.v_linf_l2 = self.v_linf_l2.max(e.v_l2);
        let v_dg_sq = e.v_dg * e.v_dg;
        if let Some(prev) = self.last_time {
            let dt = state.time - prev;
            self.v_dg_sq_integral += 0.5 * dt * (self.last_v_dg_sq + v_dg_sq);
            self.v_semi_sq_integral += 0.5 * dt * (self.last_v_semi_sq + e.v_dg_semi_sq);
        }
        self.last_time = Some(state.time);
        self.last_v_dg_sq = v_dg_sq;
        self.last_v_semi_sq = e.v_dg_semi_sq;
    }

    pub fn finish(&self, mu: f64) -> ErrorNorms {
        ErrorNorms {
            u_linf_l2: self.u_linf_l2,
            u_linf_dg: self.u_linf_dg,
            v_linf_l2: self.v_linf_l2,
            v_l2_dg: self.v_dg_sq_integral.max(0.0).sqrt(),
            v_l2_dg_mu_weighted: (mu * self.v_semi_sq_integral).max(0.0).sqrt(),
        }
    }
}

/// Norms over a stored, time-ordered trajectory.
pub fn error_norms(trajectory: &[State], exact: &ExactSolution, mu: f64) -> Result<ErrorNorms> {
    let first = trajectory
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let mut acc = ErrorAccumulator::new(exact, first.u.degree());
    for s in trajectory {
        acc.update(s);
    }
    Ok(acc.finish(mu))
}
