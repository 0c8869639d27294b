//! The `evolve` subcommand: march one configuration and write the
//! time-series log (energy, dissipation, entropy distance, means).

use std::io::Write;

use dged_core::dynamics::{
    discrete_energy, evolve_with, reduced_relative_entropy, EnergyDensity, ModelParams, State,
};
use dged_core::field::DgFunction;
use dged_core::mesh::{BoundaryMode, Mesh1D};
use dged_core::ops::assembly::{Discretization, PenaltyConfig};
use dged_core::verify::{manufactured_periodic, tanh_steady_state};

use crate::config::ResolvedConfig;
use crate::output::sci;

pub fn run(cfg: &ResolvedConfig) -> i32 {
    let mut params =
        match ModelParams::new(cfg.gamma, cfg.mu, EnergyDensity::DoubleWell, cfg.degree) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        };
    if let Some(s) = cfg.sigma {
        params.penalty = PenaltyConfig::new(s);
    }

    // Initial data: the standing phase boundary (plus an optional smooth
    // bump compatible with the walls) on natural meshes; the manufactured
    // smooth fields on periodic ones.
    let (domain, has_exact) = match cfg.boundary {
        BoundaryMode::Natural => ((-1.0, 1.0), true),
        BoundaryMode::Periodic => ((0.0, 1.0), false),
    };
    let mesh = match Mesh1D::uniform(domain.0, domain.1, cfg.n, cfg.boundary) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let disc = Discretization::new(mesh.clone(), cfg.degree, params.penalty);
    let eps = cfg.ic_perturb;

    let (u0, v0, u_ref) = match cfg.boundary {
        BoundaryMode::Natural => {
            let exact = match tanh_steady_state(&params) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let u0 = DgFunction::l2_project(mesh.clone(), cfg.degree, |x| {
                (exact.u)(0.0, x) + eps * (std::f64::consts::PI * x).cos()
            });
            let v0 = DgFunction::zeros(mesh.clone(), cfg.degree);
            let u_ref = DgFunction::l2_project(mesh.clone(), cfg.degree, |x| (exact.u)(0.0, x));
            (u0, v0, Some(u_ref))
        }
        BoundaryMode::Periodic => {
            let m = manufactured_periodic();
            let u0 = DgFunction::l2_project(mesh.clone(), cfg.degree, |x| {
                (m.u)(0.0, x) + eps * (2.0 * std::f64::consts::PI * x).cos()
            });
            let v0 = DgFunction::l2_project(mesh.clone(), cfg.degree, |x| (m.v)(0.0, x));
            (u0, v0, None)
        }
    };

    let z0 = match State::new(0.0, u0, v0) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let h = mesh.h_max();
    let dt = cfg.dt.unwrap_or(h * h);

    let out_path = cfg
        .output
        .clone()
        .unwrap_or_else(|| std::path::PathBuf::from("evolve.csv"));
    let mut file = match std::fs::File::create(&out_path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", out_path.display());
            return 1;
        }
    };
    let header_meta = [
        format!("# dged evolve"),
        format!("# gamma = {}", sci(cfg.gamma)),
        format!("# mu = {}", sci(cfg.mu)),
        format!("# sigma = {}", sci(params.penalty.sigma)),
        format!("# degree = {}", cfg.degree),
        format!("# N = {}", cfg.n),
        format!("# T = {}", sci(cfg.t_final)),
        format!("# dt = {}", sci(dt)),
        format!("# boundary = {}", cfg.boundary_name()),
        format!("# ic_perturb = {}", sci(eps)),
        format!("# seed = {}", cfg.seed),
    ];
    for line in &header_meta {
        if writeln!(file, "{line}").is_err() {
            return 1;
        }
    }
    let header = if has_exact {
        "t,energy,dissipation_integral,eta_R_vs_exact,mean_u,mean_v"
    } else {
        "t,energy,dissipation_integral,mean_u,mean_v"
    };
    if writeln!(file, "{header}").is_err() {
        return 1;
    }

    let every = cfg.record_every.max(1);
    let mut counter = 0usize;
    let mut rows: Vec<String> = Vec::new();
    let result = evolve_with(&disc, z0, cfg.t_final, dt, &params, |state, diss| {
        let record = counter % every == 0;
        counter += 1;
        if !record {
            return;
        }
        let energy = discrete_energy(&disc, state, &params);
        let mean_u = state.u.mean();
        let mean_v = state.v.mean();
        let row = if let Some(u_ref) = &u_ref {
            let reference = State::new(
                state.time,
                u_ref.clone(),
                DgFunction::zeros(mesh.clone(), cfg.degree),
            )
            .expect("same space");
            let eta = reduced_relative_entropy(&disc, state, &reference, 0.25 * diss, &params)
                .expect("same space");
            format!(
                "{},{},{},{},{},{}",
                sci(state.time),
                sci(energy),
                sci(diss),
                sci(eta),
                sci(mean_u),
                sci(mean_v)
            )
        } else {
            format!(
                "{},{},{},{},{}",
                sci(state.time),
                sci(energy),
                sci(diss),
                sci(mean_u),
                sci(mean_v)
            )
        };
        rows.push(row);
    });

    match result {
        Ok(_) => {
            for row in &rows {
                if writeln!(file, "{row}").is_err() {
                    return 1;
                }
            }
            drop(file);
            if let Err(e) = crate::output::read_csv(&out_path) {
                eprintln!(
                    "error: emitted file {} fails to re-read: {e}",
                    out_path.display()
                );
                return 1;
            }
            eprintln!(
                "evolve: {} steps recorded to {}",
                rows.len(),
                out_path.display()
            );
            0
        }
        Err(e) => {
            for row in &rows {
                let _ = writeln!(file, "{row}");
            }
            eprintln!("error: solver failed: {e}");
            1
        }
    }
}
