//! The `converge` subcommand: run the benchmark ladder and write the table.

use dged_core::dynamics::{EnergyDensity, ModelParams};
use dged_core::mesh::BoundaryMode;
use dged_core::ops::assembly::PenaltyConfig;
use dged_core::verify::run_convergence_study_with;

use crate::config::ResolvedConfig;
use crate::output;

pub fn run(cfg: &ResolvedConfig, full: bool, plot_data: bool, latex: bool) -> i32 {
    if cfg.boundary != BoundaryMode::Natural {
        eprintln!(
            "error: converge benchmarks the wall-bounded steady state; use --boundary natural"
        );
        return 2;
    }
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
        if params.penalty.is_below_floor(cfg.degree) {
            eprintln!(
                "warning: sigma {} is below the coercivity floor {}",
                s,
                PenaltyConfig::sigma_floor(cfg.degree)
            );
        }
    }
    let mut n_list = cfg.n_list.clone();
    if full {
        for n in [512usize, 1024] {
            if !n_list.contains(&n) {
                n_list.push(n);
            }
        }
        n_list.sort_unstable();
    }

    let started = std::time::Instant::now();
    let report = run_convergence_study_with(&params, &n_list, cfg.t_final, cfg.dt_rule(), cfg.seed);
    let wall = started.elapsed().as_secs_f64();

    let out = cfg
        .output
        .clone()
        .unwrap_or_else(|| std::path::PathBuf::from("converge.csv"));
    if let Err(e) = output::write_converge_csv(&out, &report, cfg, wall) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return 1;
    }
    // Every emitted file must parse back through our own reader.
    if let Err(e) = output::read_csv(&out) {
        eprintln!("error: emitted file {} fails to re-read: {e}", out.display());
        return 1;
    }
    if plot_data {
        let p = output::with_suffix(&out, ".plot.csv");
        if let Err(e) = output::write_plot_data(&p, &report).and_then(|_| output::read_csv(&p).map(|_| ()))
        {
            eprintln!("error: cannot write {}: {e}", p.display());
            return 1;
        }
    }
    if latex {
        let p = output::with_suffix(&out, ".tex");
        if let Err(e) = output::write_latex(&p, &report) {
            eprintln!("error: cannot write {}: {e}", p.display());
            return 1;
        }
    }
    eprintln!(
        "converge: q={} levels {:?} T={} wrote {} ({:.1}s)",
        cfg.degree,
        n_list,
        cfg.t_final,
        out.display(),
        wall
    );
    if report.any_failed() {
        for d in &report.diagnostics {
            if let Some(err) = &d.error {
                eprintln!("level N={} failed: {err}", d.n_cells);
            }
        }
        1
    } else {
        0
    }
}
