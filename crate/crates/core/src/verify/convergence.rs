//! The convergence-study harness: evolve the standing phase boundary on a
//! ladder of meshes with dt = h^2 and tabulate error norms with their
//! estimated orders.

use rayon::prelude::*;

use crate::dynamics::{
    discrete_energy, evolve_with, modified_entropy, reduced_relative_entropy, EnergyDensity,
    ModelParams, State,
};
use crate::error::Result;
use crate::field::DgFunction;
use crate::mesh::{BoundaryMode, Mesh1D};
use crate::ops::assembly::Discretization;

use super::exact::tanh_steady_state;
use super::norms::ErrorAccumulator;

/// Time-step selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtRule {
    /// dt = h^2, the scaling the benchmark tables use.
    HSquared,
    Fixed(f64),
}

impl DtRule {
    pub fn dt(&self, h: f64) -> f64 {
        match self {
            DtRule::HSquared => h * h,
            DtRule::Fixed(dt) => *dt,
        }
    }
}

/// One row of the report: errors and the slope into this level.
#[derive(Debug, Clone, Copy)]
pub struct ReportRow {
    pub n_cells: usize,
    pub err_u_linf_l2: f64,
    pub eoc_u_l2: f64,
    pub err_u_linf_dg: f64,
    pub eoc_u_dg: f64,
    pub err_v_linf_l2: f64,
    pub eoc_v_l2: f64,
    pub err_v_l2_dg: f64,
    pub eoc_v_dg: f64,
    pub failed: bool,
}

/// Extra per-level measurements that do not appear in the table itself.
#[derive(Debug, Clone)]
pub struct LevelDiagnostics {
    pub n_cells: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub max_newton_iters: usize,
    /// Strain L2 error at t = 0 (the projection error of the initial data).
    pub initial_u_l2: f64,
    /// Reduced relative entropy at T against the projected steady state.
    pub eta_r_final: f64,
    pub eta_m_final: f64,
    pub v_l2_dg_mu_weighted: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub wall_seconds: f64,
    pub error: Option<String>,
}

/// Full study outcome in the benchmark table layout.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub degree: usize,
    pub gamma: f64,
    pub mu: f64,
    pub sigma: f64,
    pub t_final: f64,
    pub dt_rule: DtRule,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    pub diagnostics: Vec<LevelDiagnostics>,
}

impl ConvergenceReport {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.failed)
    }
}

struct LevelOutcome {
    row_errors: [f64; 4],
    diag: LevelDiagnostics,
}

fn run_level(
    params: &ModelParams,
    n: usize,
    t_final: f64,
    dt_rule: DtRule,
) -> Result<LevelOutcome> {
    let started = std::time::Instant::now();
    let q = params.degree;
    let mesh = Mesh1D::uniform(-1.0, 1.0, n, BoundaryMode::Natural)?;
    let disc = Discretization::new(mesh.clone(), q, params.penalty);
    let exact = tanh_steady_state(params)?;
    let h = mesh.h_max();
    let dt = dt_rule.dt(h);

    let u0 = DgFunction::l2_project(mesh.clone(), q, |x| (exact.u)(0.0, x));
    let v0 = DgFunction::zeros(mesh.clone(), q);
    let z0 = State::new(0.0, u0.clone(), v0.clone())?;
    let energy_initial = discrete_energy(&disc, &z0, params);

    let mut acc = ErrorAccumulator::new(&exact, q);
    let mut diss_final = 0.0;
    let summary = evolve_with(&disc, z0, t_final, dt, params, |state, diss| {
        acc.update(state);
        diss_final = diss;
    })?;
    let initial_u_l2 = acc.initial_u_l2().unwrap_or(f64::NAN);
    let norms = acc.finish(params.mu);

    // Entropy distance to the projected steady state (velocity reference is
    // zero, so the history term is a quarter of the dissipation integral).
    let reference = State::new(summary.final_state.time, u0, v0)?;
    let eta_r = reduced_relative_entropy(
        &disc,
        &summary.final_state,
        &reference,
        0.25 * diss_final,
        params,
    )?;
    let eta_m = modified_entropy(
        &disc,
        &summary.final_state,
        &reference,
        0.25 * diss_final,
        params,
    )?;
    let energy_final = discrete_energy(&disc, &summary.final_state, params);

    Ok(LevelOutcome {
        row_errors: [
            norms.u_linf_l2,
            norms.u_linf_dg,
            norms.v_linf_l2,
            norms.v_l2_dg,
        ],
        diag: LevelDiagnostics {
            n_cells: n,
            h,
            dt,
            steps: summary.steps,
            max_newton_iters: summary.max_newton_iters,
            initial_u_l2,
            eta_r_final: eta_r,
            eta_m_final: eta_m,
            v_l2_dg_mu_weighted: norms.v_l2_dg_mu_weighted,
            energy_initial,
            energy_final,
            wall_seconds: started.elapsed().as_secs_f64(),
            error: None,
        },
    })
}

fn pairwise_slope(prev: f64, cur: f64, h_prev: f64, h_cur: f64) -> f64 {
    if prev > 0.0 && cur > 0.0 && prev.is_finite() && cur.is_finite() {
        (cur / prev).ln() / (h_cur / h_prev).ln()
    } else {
        f64::NAN
    }
}

/// Run the benchmark study: standing tanh profile, wall boundaries,
/// dt from the rule, levels independent (executed on the thread pool).
/// A failing level is marked failed rather than aborting the study.
pub fn run_convergence_study_with(
    params: &ModelParams,
    n_list: &[usize],
    t_final: f64,
    dt_rule: DtRule,
    seed: u64,
) -> ConvergenceReport {
    let outcomes: Vec<std::result::Result<LevelOutcome, String>> = n_list
        .par_iter()
        .map(|&n| run_level(params, n, t_final, dt_rule).map_err(|e| e.to_string()))
        .collect();

    let mut rows = Vec::with_capacity(n_list.len());
    let mut diagnostics = Vec::with_capacity(n_list.len());
    for (i, (&n, outcome)) in n_list.iter().zip(&outcomes).enumerate() {
        let h = 2.0 / n as f64;
        match outcome {
            Ok(level) => {
                let e = level.row_errors;
                let mut eocs = [0.0; 4];
                if i > 0 {
                    if let Ok(prev_level) = &outcomes[i - 1] {
                        let hp = 2.0 / n_list[i - 1] as f64;
                        for (k, eoc) in eocs.iter_mut().enumerate() {
                            *eoc = pairwise_slope(prev_level.row_errors[k], e[k], hp, h);
                        }
                    } else {
                        eocs = [f64::NAN; 4];
                    }
                }
                rows.push(ReportRow {
                    n_cells: n,
                    err_u_linf_l2: e[0],
                    eoc_u_l2: eocs[0],
                    err_u_linf_dg: e[1],
                    eoc_u_dg: eocs[1],
                    err_v_linf_l2: e[2],
                    eoc_v_l2: eocs[2],
                    err_v_l2_dg: e[3],
                    eoc_v_dg: eocs[3],
                    failed: false,
                });
                diagnostics.push(level.diag.clone());
            }
            Err(msg) => {
                rows.push(ReportRow {
                    n_cells: n,
                    err_u_linf_l2: f64::NAN,
                    eoc_u_l2: f64::NAN,
                    err_u_linf_dg: f64::NAN,
                    eoc_u_dg: f64::NAN,
                    err_v_linf_l2: f64::NAN,
                    eoc_v_l2: f64::NAN,
                    err_v_l2_dg: f64::NAN,
                    eoc_v_dg: f64::NAN,
                    failed: true,
                });
                diagnostics.push(LevelDiagnostics {
                    n_cells: n,
                    h,
                    dt: dt_rule.dt(h),
                    steps: 0,
                    max_newton_iters: 0,
                    initial_u_l2: f64::NAN,
                    eta_r_final: f64::NAN,
                    eta_m_final: f64::NAN,
                    v_l2_dg_mu_weighted: f64::NAN,
                    energy_initial: f64::NAN,
                    energy_final: f64::NAN,
                    wall_seconds: 0.0,
                    error: Some(msg.clone()),
                });
            }
        }
    }

    ConvergenceReport {
        degree: params.degree,
        gamma: params.gamma,
        mu: params.mu,
        sigma: params.penalty.sigma,
        t_final,
        dt_rule,
        seed,
        rows,
        diagnostics,
    }
}

/// Benchmark defaults: gamma = mu = 1e-3, dt = h^2.
pub fn run_convergence_study(
    params: &ModelParams,
    n_list: &[usize],
    t_final: f64,
) -> ConvergenceReport {
    run_convergence_study_with(params, n_list, t_final, DtRule::HSquared, 0)
}

/// Standard benchmark parameters for a given degree.
pub fn benchmark_params(degree: usize) -> ModelParams {
    ModelParams::new(1e-3, 1e-3, EnergyDensity::DoubleWell, degree)
        .expect("benchmark parameters are valid")
}
