//! The semi-discrete scheme in its reduced (u, v) form and its
//! Crank-Nicolson time discretization with a Newton solve per step.
//!
//! The right-hand side is
//!
//! ```text
//! du/dt = G-[v]
//! dv/dt = G+[ P_q[W'(u)] - gamma Lap_h u ] + mu G+[G-[v]]
//! ```
//!
//! with the auxiliary stress eliminated; it is recovered in
//! post-processing by [`super::recover_tau`].
//!
//! Newton systems are banded in an interleaved per-cell ordering on
//! natural-boundary meshes (the Jacobian couples at most second
//! neighbours); periodic meshes add corner blocks, and those runs are
//! small, so they use a dense factorization.

use crate::basis::{legendre_eval, QuadratureRule};
use crate::error::{Error, Result};
use crate::field::DgFunction;
use crate::mesh::GhostParity;
use crate::ops::assembly::Discretization;
use crate::ops::banded::BandedMatrix;
use crate::ops::block::BlockMat;
use crate::ops::solve::solve_dense;

use super::energy::{project_stress_nonlinearity, viscous_dissipation_rate};
use super::{ModelParams, State};

/// Semi-discrete right-hand side (du/dt, dv/dt).
pub fn rhs(disc: &Discretization, state: &State, params: &ModelParams) -> (DgFunction, DgFunction) {
    let du = disc.grad_minus(&state.v);
    let tau = {
        let mut t = project_stress_nonlinearity(disc, &state.u, params);
        t.axpy(-params.gamma, &disc.discrete_laplacian(&state.u));
        t.with_parity(GhostParity::Even)
    };
    let mut dv = disc.grad_plus(&tau);
    if params.mu != 0.0 {
        dv.axpy(params.mu, &disc.grad_plus(&du));
    }
    (du, dv)
}

/// Exact linearization of [`rhs`] at a state. Only the projected W'' block
/// depends on the state; the remaining blocks are fixed compositions of the
/// assembled operators.
pub struct SchemeJacobian {
    /// Block-diagonal matrix of `P_q[W''(u_h) z]`.
    pub w2_block: BlockMat,
    /// `G+ (P_q[W'' .] - gamma Lap_h)`, the (v, u) block.
    pub j21: BlockMat,
}

fn w2_blockdiag(disc: &Discretization, u: &DgFunction, params: &ModelParams) -> BlockMat {
    let nb = disc.degree() + 1;
    let rule = QuadratureRule::gauss_legendre(2 * nb);
    let lvals: Vec<Vec<f64>> = rule
        .points
        .iter()
        .map(|&xi| (0..nb).map(|j| legendre_eval(j, xi)).collect())
        .collect();
    let mut m = BlockMat::new(disc.mesh().n_cells(), nb);
    for n in 0..disc.mesh().n_cells() {
        let blk = m.block_mut(n, n);
        for (g, &w) in rule.weights.iter().enumerate() {
            let xi = rule.points[g];
            let wval = params.energy.ddw(u.eval_on_cell(n, xi)) * w;
            let l = &lvals[g];
            for j in 0..nb {
                let row = wval * l[j] * (j as f64 + 0.5);
                for k in 0..nb {
                    blk[(j, k)] += row * l[k];
                }
            }
        }
    }
    m
}

/// Build the Jacobian blocks at a state.
pub fn jacobian(disc: &Discretization, state: &State, params: &ModelParams) -> SchemeJacobian {
    let w2 = w2_blockdiag(disc, &state.u, params);
    let mut j21 = disc.grad_plus_action(GhostParity::Even).matmul(&w2);
    j21.axpy(-params.gamma, disc.gp_lap_action());
    SchemeJacobian { w2_block: w2, j21 }
}

impl SchemeJacobian {
    /// Apply the linearization to a direction (du, dv).
    pub fn apply(
        &self,
        disc: &Discretization,
        params: &ModelParams,
        du: &DgFunction,
        dv: &DgFunction,
    ) -> (DgFunction, DgFunction) {
        let out_u = disc.grad_minus_action(GhostParity::Odd).apply(dv.coeffs());
        let mut out_v = self.j21.apply(du.coeffs());
        if params.mu != 0.0 {
            let visc = disc.gpgm_action().apply(dv.coeffs());
            for (o, v) in out_v.iter_mut().zip(&visc) {
                *o += params.mu * v;
            }
        }
        let mesh = disc.mesh().clone();
        let q = disc.degree();
        (
            DgFunction::from_coeffs(mesh.clone(), q, out_u).with_parity(GhostParity::Even),
            DgFunction::from_coeffs(mesh, q, out_v).with_parity(GhostParity::Odd),
        )
    }
}

/// Convergence report of one Newton solve.
#[derive(Debug, Clone, Copy)]
pub struct NewtonStats {
    pub iterations: usize,
    pub residual: f64,
}

const NEWTON_REL_TOL: f64 = 1e-11;
const NEWTON_MAX_ITERS: usize = 25;

struct CnSystem<'a> {
    disc: &'a Discretization,
    params: &'a ModelParams,
    dt: f64,
}

impl CnSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.disc.n_dofs()
    }

    /// Interleaved index of (cell, field, mode): per-cell [u modes, v modes].
    fn parts(&self, jac: &SchemeJacobian) -> [(BlockMat, f64, usize, usize); 3] {
        let half = -0.5 * self.dt;
        [
            (
                self.disc.grad_minus_action(GhostParity::Odd).clone(),
                half,
                0,
                1,
            ),
            (jac.j21.clone(), half, 1, 0),
            (self.disc.gpgm_action().clone(), half * self.params.mu, 1, 1),
        ]
    }

    /// Solve (I - dt/2 J) x = b for the interleaved vector b.
    fn solve(&self, jac: &SchemeJacobian, b: &[f64]) -> Result<Vec<f64>> {
        let nb = self.disc.degree() + 1;
        let s = 2 * nb;
        let dim = self.dim();
        let parts = self.parts(jac);
        if self.disc.mesh().is_periodic() {
            let mut a = nalgebra::DMatrix::zeros(dim, dim);
            for i in 0..dim {
                a[(i, i)] = 1.0;
            }
            for (mat, factor, rf, cf) in &parts {
                for (r, c, blk) in mat.blocks() {
                    for i in 0..nb {
                        for j in 0..nb {
                            a[(r * s + rf * nb + i, c * s + cf * nb + j)] += factor * blk[(i, j)];
                        }
                    }
                }
            }
            solve_dense(a, b)
        } else {
            let band = 3 * s - 1;
            let mut a = BandedMatrix::zeros(dim, band, band);
            for i in 0..dim {
                a.add(i, i, 1.0);
            }
            for (mat, factor, rf, cf) in &parts {
                for (r, c, blk) in mat.blocks() {
                    for i in 0..nb {
                        for j in 0..nb {
                            a.add(
                                r * s + rf * nb + i,
                                c * s + cf * nb + j,
                                factor * blk[(i, j)],
                            );
                        }
                    }
                }
            }
            let lu = a.factor()?;
            let mut x = b.to_vec();
            lu.solve_in_place(&mut x);
            Ok(x)
        }
    }
}

fn interleave(disc: &Discretization, u: &[f64], v: &[f64], out: &mut [f64]) {
    let nb = disc.degree() + 1;
    for n in 0..disc.mesh().n_cells() {
        for k in 0..nb {
            out[n * 2 * nb + k] = u[n * nb + k];
            out[n * 2 * nb + nb + k] = v[n * nb + k];
        }
    }
}

/// Mass-weighted L2 norm of an (u, v) residual pair.
fn pair_norm(disc: &Discretization, fu: &[f64], fv: &[f64]) -> f64 {
    let mass = disc.mass();
    let mut acc = 0.0;
    for i in 0..mass.len() {
        acc += mass[i] * (fu[i] * fu[i] + fv[i] * fv[i]);
    }
    acc.max(0.0).sqrt()
}

/// One Crank-Nicolson step `z+ = z + dt/2 (f(z) + f(z+))`, solved by Newton
/// iteration with the previous state as initial guess.
pub fn step_crank_nicolson(
    disc: &Discretization,
    state: &State,
    dt: f64,
    params: &ModelParams,
) -> Result<(State, NewtonStats)> {
    assert!(dt > 0.0, "time step must be positive");
    let (f_old_u, f_old_v) = rhs(disc, state, params);
    let tol = NEWTON_REL_TOL * (1.0 + state.norm());
    let sys = CnSystem { disc, params, dt };

    let mut z = state.clone();
    let mut best_residual = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let (f_new_u, f_new_v) = rhs(disc, &z, params);
        let m = disc.n_dofs();
        let mut res_u = vec![0.0; m];
        let mut res_v = vec![0.0; m];
        for i in 0..m {
            res_u[i] = z.u.coeffs()[i]
                - state.u.coeffs()[i]
                - 0.5 * dt * (f_old_u.coeffs()[i] + f_new_u.coeffs()[i]);
            res_v[i] = z.v.coeffs()[i]
                - state.v.coeffs()[i]
                - 0.5 * dt * (f_old_v.coeffs()[i] + f_new_v.coeffs()[i]);
        }
        let residual = pair_norm(disc, &res_u, &res_v);
        best_residual = best_residual.min(residual);
        if residual <= tol {
            z.time = state.time + dt;
            return Ok((
                z,
                NewtonStats {
                    iterations,
                    residual,
                },
            ));
        }
        if iterations >= NEWTON_MAX_ITERS {
            return Err(Error::NewtonDivergence {
                time: state.time,
                residual: best_residual,
                iterations,
            });
        }

        let jac = jacobian(disc, &z, params);
        let mut b = vec![0.0; sys.dim()];
        for r in res_u.iter_mut().chain(res_v.iter_mut()) {
            *r = -*r;
        }
        interleave(disc, &res_u, &res_v, &mut b);
        let delta = sys.solve(&jac, &b)?;
        let nb = disc.degree() + 1;
        for n in 0..disc.mesh().n_cells() {
            for k in 0..nb {
                let i = n * nb + k;
                z.u.coeffs_mut()[i] += delta[n * 2 * nb + k];
                z.v.coeffs_mut()[i] += delta[n * 2 * nb + nb + k];
            }
        }
        iterations += 1;
    }
}

/// Energy and accumulated viscous dissipation at recorded times.
#[derive(Debug, Clone, Default)]
pub struct EnergyLog {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Trapezoid accumulation of `mu |G-[v_h]|^2` over all steps taken.
    pub dissipation_integral: Vec<f64>,
}

/// Outcome of [`evolve_with`].
pub struct EvolveSummary {
    pub final_state: State,
    pub steps: usize,
    pub max_newton_iters: usize,
}

/// March to `t_final` with steps of size `dt` (a final partial step lands
/// exactly on `t_final`). `on_step` sees every state, including the initial
/// one, together with the dissipation integral accumulated so far.
pub fn evolve_with(
    disc: &Discretization,
    z0: State,
    t_final: f64,
    dt: f64,
    params: &ModelParams,
    mut on_step: impl FnMut(&State, f64),
) -> Result<EvolveSummary> {
    if !(t_final > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(
            "evolve needs positive horizon and step".into(),
        ));
    }
    let mut state = z0;
    state.time = 0.0;
    let mut diss = 0.0;
    let mut rate_prev = viscous_dissipation_rate(disc, &state, params);
    on_step(&state, diss);
    let mut steps = 0;
    let mut max_newton = 0;
    let eps = 1e-12 * t_final;
    while state.time < t_final - eps {
        let step_dt = dt.min(t_final - state.time);
        let (next, stats) = step_crank_nicolson(disc, &state, step_dt, params)?;
        max_newton = max_newton.max(stats.iterations);
        state = next;
        steps += 1;
        let rate = viscous_dissipation_rate(disc, &state, params);
        diss += 0.5 * step_dt * (rate_prev + rate);
        rate_prev = rate;
        on_step(&state, diss);
    }
    Ok(EvolveSummary {
        final_state: state,
        steps,
        max_newton_iters: max_newton,
    })
}

/// A stored trajectory with its energy log.
pub struct Trajectory {
    pub states: Vec<State>,
    pub log: EnergyLog,
    pub max_newton_iters: usize,
}

/// March to `t_final`, storing every `record_every`-th state (plus the
/// initial and final ones) along with the energy log.
pub fn evolve(
    disc: &Discretization,
    z0: State,
    t_final: f64,
    dt: f64,
    params: &ModelParams,
    record_every: usize,
) -> Result<Trajectory> {
    let every = record_every.max(1);
    let mut states = Vec::new();
    let mut log = EnergyLog::default();
    let mut counter = 0usize;
    let summary = evolve_with(disc, z0, t_final, dt, params, |state, diss| {
        let record = counter % every == 0;
        counter += 1;
        if record {
            states.push(state.clone());
            log.times.push(state.time);
            log.energy.push(discrete_energy_of(disc, state, params));
            log.dissipation_integral.push(diss);
        }
    })?;
    if states.last().map(|s| s.time) != Some(summary.final_state.time) {
        let state = &summary.final_state;
        states.push(state.clone());
        log.times.push(state.time);
        log.energy.push(discrete_energy_of(disc, state, params));
        log.dissipation_integral
            .push(log.dissipation_integral.last().copied().unwrap_or(0.0));
    }
    Ok(Trajectory {
        states,
        log,
        max_newton_iters: summary.max_newton_iters,
    })
}

fn discrete_energy_of(disc: &Discretization, state: &State, params: &ModelParams) -> f64 {
    super::energy::discrete_energy(disc, state, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::EnergyDensity;
    use crate::mesh::{BoundaryMode, Mesh1D};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(
        n: usize,
        q: usize,
        mode: BoundaryMode,
        gamma: f64,
        mu: f64,
    ) -> (Discretization, ModelParams) {
        let domain = match mode {
            BoundaryMode::Periodic => (0.0, 1.0),
            BoundaryMode::Natural => (-1.0, 1.0),
        };
        let mesh = Mesh1D::uniform(domain.0, domain.1, n, mode).unwrap();
        let params = ModelParams::new(gamma, mu, EnergyDensity::DoubleWell, q).unwrap();
        (Discretization::new(mesh, q, params.penalty), params)
    }

    fn random_state(disc: &Discretization, seed: u64, amp: f64) -> State {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = DgFunction::zeros(disc.mesh().clone(), disc.degree());
        let mut v = DgFunction::zeros(disc.mesh().clone(), disc.degree());
        for c in u.coeffs_mut() {
            *c = amp * rng.random_range(-1.0..1.0);
        }
        for c in v.coeffs_mut() {
            *c = amp * rng.random_range(-1.0..1.0);
        }
        State::new(0.0, u, v).unwrap()
    }

    #[test]
    fn well_bottom_is_a_fixed_point_of_rhs() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Natural] {
            let (disc, params) = setup(8, 2, mode, 1e-3, 1e-3);
            for sign in [-1.0, 1.0] {
                let u = DgFunction::l2_project(disc.mesh().clone(), 2, |_| sign);
                let v = DgFunction::zeros(disc.mesh().clone(), 2);
                let z = State::new(0.0, u, v).unwrap();
                let (du, dv) = rhs(&disc, &z, &params);
                assert!(du.l2_norm() < 1e-13);
                assert!(dv.l2_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_velocity_freezes_strain() {
        let (disc, params) = setup(8, 2, BoundaryMode::Periodic, 1e-3, 1e-3);
        let mut z = random_state(&disc, 3, 0.5);
        for c in z.v.coeffs_mut() {
            *c = 0.0;
        }
        let (du, _) = rhs(&disc, &z, &params);
        assert!(du.l2_norm() < 1e-14);
    }

    #[test]
    fn jacobian_block_structure() {
        // The (u, v) block is exactly the G- action; (u, u) vanishes.
        let (disc, params) = setup(6, 2, BoundaryMode::Periodic, 1e-2, 1e-2);
        let z = random_state(&disc, 5, 0.4);
        let jac = jacobian(&disc, &z, &params);
        let zero = DgFunction::zeros(disc.mesh().clone(), 2);
        let dv = random_state(&disc, 6, 1.0).v;
        let (ju, _) = jac.apply(&disc, &params, &zero, &dv);
        let expected = disc.grad_minus(&dv.clone().with_parity(GhostParity::Odd));
        assert!((&ju - &expected).l2_norm() < 1e-13);
        let du = random_state(&disc, 7, 1.0).u;
        let (ju2, _) = jac.apply(&disc, &params, &du, &zero);
        assert!(ju2.l2_norm() < 1e-14);
    }

    #[test]
    fn jacobian_independent_of_state_for_quadratic_well() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 6, BoundaryMode::Periodic).unwrap();
        let params =
            ModelParams::new(1e-2, 1e-2, EnergyDensity::Quadratic { stiffness: 3.0 }, 2).unwrap();
        let disc = Discretization::new(mesh, 2, params.penalty);
        let a = jacobian(&disc, &random_state(&disc, 1, 0.5), &params);
        let b = jacobian(&disc, &random_state(&disc, 2, 0.5), &params);
        let diff = (a.j21.to_dense() - b.j21.to_dense()).abs().max();
        assert!(diff < 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Natural] {
            let (disc, params) = setup(6, 2, mode, 1e-2, 1e-2);
            for seed in 0..5 {
                let z = random_state(&disc, 100 + seed, 0.5);
                let dir = random_state(&disc, 200 + seed, 1.0);
                let jac = jacobian(&disc, &z, &params);
                let (ju, jv) = jac.apply(&disc, &params, &dir.u, &dir.v);
                let mut slopes = Vec::new();
                for &eps in &[1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
                    let mut zp = z.clone();
                    zp.u.axpy(eps, &dir.u);
                    zp.v.axpy(eps, &dir.v);
                    let (fu, fv) = rhs(&disc, &z, &params);
                    let (fpu, fpv) = rhs(&disc, &zp, &params);
                    let mut du = &fpu - &fu;
                    du.scale(1.0 / eps);
                    let mut dv = &fpv - &fv;
                    dv.scale(1.0 / eps);
                    let err =
                        ((&du - &ju).l2_norm().powi(2) + (&dv - &jv).l2_norm().powi(2)).sqrt();
                    slopes.push((eps.ln(), err.max(1e-300).ln()));
                }
                let slope = least_squares_slope(&slopes);
                assert!(
                    (slope - 1.0).abs() < 0.1,
                    "fd slope {slope} (mode {mode:?}, seed {seed})"
                );
            }
        }
    }

    fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn well_bottom_fixed_point_survives_many_steps() {
        let (disc, params) = setup(6, 1, BoundaryMode::Natural, 1e-3, 1e-3);
        let u = DgFunction::l2_project(disc.mesh().clone(), 1, |_| 1.0);
        let v = DgFunction::zeros(disc.mesh().clone(), 1);
        let z0 = State::new(0.0, u.clone(), v).unwrap();
        let mut z = z0.clone();
        for _ in 0..1000 {
            let (next, _) = step_crank_nicolson(&disc, &z, 1e-3, &params).unwrap();
            z = next;
        }
        assert!((&z.u - &u).l2_norm() < 1e-12);
        assert!(z.v.l2_norm() < 1e-12);
    }

    #[test]
    fn quadratic_well_takes_one_newton_iteration_and_matches_trapezoid() {
        // Linear dynamics: CN is the trapezoidal rule, Newton is exact in
        // one update.
        let mesh = Mesh1D::uniform(0.0, 1.0, 6, BoundaryMode::Periodic).unwrap();
        let params =
            ModelParams::new(1e-2, 1e-2, EnergyDensity::Quadratic { stiffness: 2.0 }, 1).unwrap();
        let disc = Discretization::new(mesh, 1, params.penalty);
        let z = random_state(&disc, 9, 0.3);
        let dt = 1e-3;
        let (next, stats) = step_crank_nicolson(&disc, &z, dt, &params).unwrap();
        assert!(stats.iterations <= 1, "iterations {}", stats.iterations);

        // Independent trapezoid solve on the dense linear system.
        let m = disc.n_dofs();
        let jac = jacobian(&disc, &z, &params);
        let mut a = nalgebra::DMatrix::zeros(2 * m, 2 * m);
        let mut b = nalgebra::DVector::zeros(2 * m);
        // Columns of J from unit directions (linear map, so this is exact).
        for col in 0..2 * m {
            let mut du = DgFunction::zeros(disc.mesh().clone(), 1);
            let mut dv = DgFunction::zeros(disc.mesh().clone(), 1);
            if col < m {
                du.coeffs_mut()[col] = 1.0;
            } else {
                dv.coeffs_mut()[col - m] = 1.0;
            }
            let (ju, jv) = jac.apply(&disc, &params, &du, &dv);
            for r in 0..m {
                a[(r, col)] = ju.coeffs()[r];
                a[(m + r, col)] = jv.coeffs()[r];
            }
        }
        let (fu, fv) = rhs(&disc, &z, &params);
        for r in 0..m {
            b[r] = fu.coeffs()[r];
            b[m + r] = fv.coeffs()[r];
        }
        let id = nalgebra::DMatrix::<f64>::identity(2 * m, 2 * m);
        let lhs = &id - &a * (dt / 2.0);
        let zvec = {
            let mut zv = nalgebra::DVector::zeros(2 * m);
            for r in 0..m {
                zv[r] = z.u.coeffs()[r];
                zv[m + r] = z.v.coeffs()[r];
            }
            zv
        };
        // (I - dt/2 A) z+ = z + dt/2 (A z + f(z) + f0)… for the affine map
        // f(z) = A z + f0 we can write CN as
        // (I - dt/2 A) z+ = z + dt/2 f(z).
        let rhs_vec =
            &zvec + b * (dt / 2.0) + (&a * &zvec) * (dt / 2.0) - (&a * &zvec) * (dt / 2.0);
        let sol = lhs.lu().solve(&rhs_vec).unwrap();
        for r in 0..m {
            assert_abs_diff_eq!(next.u.coeffs()[r], sol[r], epsilon = 1e-10);
            assert_abs_diff_eq!(next.v.coeffs()[r], sol[m + r], epsilon = 1e-10);
        }
    }

    #[test]
    fn newton_divergence_is_reported() {
        // A far-from-equilibrium state with an absurd step defeats Newton;
        // the step reports divergence instead of looping.
        let (disc, params) = setup(16, 2, BoundaryMode::Periodic, 1e-3, 0.0);
        let z = random_state(&disc, 1, 4.0);
        match step_crank_nicolson(&disc, &z, 100.0, &params) {
            Err(crate::error::Error::NewtonDivergence { iterations, .. }) => {
                assert_eq!(iterations, 25);
            }
            other => panic!("expected NewtonDivergence, got {other:?}"),
        }
    }

    #[test]
    fn evolve_single_step_trajectory() {
        let (disc, params) = setup(6, 1, BoundaryMode::Periodic, 1e-2, 1e-2);
        let z = random_state(&disc, 11, 0.2);
        let traj = evolve(&disc, z, 1e-3, 1e-3, &params, 1).unwrap();
        assert_eq!(traj.states.len(), 2);
        assert_abs_diff_eq!(traj.states[1].time, 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn means_conserved_on_periodic_trajectories() {
        let (disc, params) = setup(12, 2, BoundaryMode::Periodic, 1e-2, 1e-2);
        let z0 = random_state(&disc, 13, 0.3);
        let mu0 = z0.u.integral();
        let mv0 = z0.v.integral();
        let traj = evolve(&disc, z0, 0.02, 1e-3, &params, 1).unwrap();
        for s in &traj.states {
            assert!((s.u.integral() - mu0).abs() <= 1e-11);
            assert!((s.v.integral() - mv0).abs() <= 1e-11);
        }
    }

    #[test]
    fn energy_nonincreasing_on_viscous_runs() {
        let (disc, params) = setup(12, 2, BoundaryMode::Periodic, 1e-2, 5e-2);
        let z0 = State::new(
            0.0,
            DgFunction::l2_project(disc.mesh().clone(), 2, |x| {
                0.3 * (2.0 * std::f64::consts::PI * x).sin()
            }),
            DgFunction::l2_project(disc.mesh().clone(), 2, |x| {
                0.2 * (2.0 * std::f64::consts::PI * x).cos()
            }),
        )
        .unwrap();
        let traj = evolve(&disc, z0, 0.05, 5e-4, &params, 1).unwrap();
        let tol = 1e-8;
        for w in traj.log.energy.windows(2) {
            assert!(w[1] <= w[0] + tol, "energy rose: {} -> {}", w[0], w[1]);
        }
        // The dissipation identity holds to time-discretization accuracy.
        let e0 = traj.log.energy[0];
        let defect =
            traj.log.energy.last().unwrap() + traj.log.dissipation_integral.last().unwrap() - e0;
        assert!(defect.abs() < 1e-5, "defect {defect:.3e}");
    }
}
