//! The `props` subcommand: run the lemma-level property suite and print one
//! PASS/FAIL line per property with the measured values.

use std::io::Write;

use dged_core::dynamics::{EnergyDensity, ModelParams};
use dged_core::mesh::{build_mesh, BoundaryMode, Mesh1D};
use dged_core::ops::assembly::PenaltyConfig;
use dged_core::verify::properties::{
    ip_spd_measurement, kernel_measurement, ladder_ratios, max_duality_defect,
    max_oracle_deviation, projection_orders, riesz_sup_stability, stress_projection_order,
    RatioKind,
};
use dged_core::verify::{manufactured_periodic, projection_residual_audit};

use crate::config::ResolvedConfig;

struct Reporter {
    lines: Vec<(bool, String)>,
}

impl Reporter {
    fn new() -> Self {
        Reporter { lines: Vec::new() }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        let tag = if passed { "PASS" } else { "FAIL" };
        self.lines.push((passed, format!("{tag} {name}: {detail}")));
    }

    fn first_failure(&self) -> Option<&str> {
        self.lines
            .iter()
            .find(|(ok, _)| !ok)
            .map(|(_, line)| line.as_str())
    }
}

pub fn run(cfg: &ResolvedConfig, fast: bool) -> i32 {
    let mut rep = Reporter::new();
    let seed = cfg.seed;

    let (dual_qs, pairs): (&[usize], usize) = if fast {
        (&[1, 2], 20)
    } else {
        (&[1, 2, 3, 4], 100)
    };
    let ladder: Vec<usize> = if fast {
        vec![16, 32, 64]
    } else {
        vec![16, 32, 64, 128, 256]
    };
    let order_ladder: Vec<usize> = if fast {
        vec![16, 32, 64]
    } else {
        vec![16, 32, 64, 128]
    };
    let order_qs: Vec<usize> = if fast { vec![1, 2] } else { vec![1, 2, 3] };
    let oracle_ns: Vec<usize> = if fast { vec![4, 8] } else { vec![4, 8, 16] };
    let oracle_qs: Vec<usize> = if fast { vec![1, 2] } else { vec![1, 2, 3] };

    match max_duality_defect(dual_qs, 32, pairs, seed) {
        Ok(worst) => rep.check(
            "duality",
            worst < 1e-12,
            format!("max normalized defect {worst:.3e} (tol 1e-12)"),
        ),
        Err(e) => rep.check("duality", false, format!("error: {e}")),
    }

    for q in [1usize, 2] {
        let mesh_u = Mesh1D::uniform(0.0, 1.0, 8, BoundaryMode::Periodic).unwrap();
        let mesh_p = build_mesh(0.0, 1.0, 8, 0.2, seed ^ 5, BoundaryMode::Periodic).unwrap();
        for (tag, mesh) in [("uniform", mesh_u), ("perturbed", mesh_p)] {
            match kernel_measurement(&mesh, q, 10, seed) {
                Ok(m) => rep.check(
                    &format!("kernel_rank(q={q},{tag})"),
                    m.gm_nullity == 1
                        && m.gp_nullity == 1
                        && m.ip_nullity == 1
                        && m.max_constant_defect < 1e-10
                        && m.max_range_mean < 1e-13,
                    format!(
                        "nullity G-={} G+={} a_h^d={} const-defect {:.2e} range-mean {:.2e}",
                        m.gm_nullity,
                        m.gp_nullity,
                        m.ip_nullity,
                        m.max_constant_defect,
                        m.max_range_mean
                    ),
                ),
                Err(e) => rep.check(&format!("kernel_rank(q={q},{tag})"), false, format!("{e}")),
            }
        }
    }

    for q in [1usize, 2] {
        match ladder_ratios(RatioKind::Poincare, q, &ladder, 40, false, seed) {
            Ok(r) => {
                let ok = r.iter().all(|&x| x <= 1.1 * r[0] + 1e-12);
                rep.check(
                    &format!("poincare_ratio(q={q})"),
                    ok,
                    format!("|phi|/|G-phi| per level {:?}", rounded(&r)),
                );
            }
            Err(e) => rep.check(&format!("poincare_ratio(q={q})"), false, format!("{e}")),
        }
        match ladder_ratios(RatioKind::GradCoercivity, q, &ladder, 40, false, seed ^ 1) {
            Ok(r) => {
                let ok = r.iter().all(|&x| x <= 1.1 * r[0] + 1e-12);
                rep.check(
                    &format!("grad_coercivity_ratio(q={q})"),
                    ok,
                    format!("|w|_dG/|G-w| per level {:?}", rounded(&r)),
                );
            }
            Err(e) => rep.check(
                &format!("grad_coercivity_ratio(q={q})"),
                false,
                format!("{e}"),
            ),
        }
        match ladder_ratios(RatioKind::InverseStability, q, &ladder, 40, false, seed ^ 2) {
            Ok(r) => {
                let ok = *r.last().unwrap() <= 1.1 * r[0];
                rep.check(
                    &format!("inverse_stability(q={q})"),
                    ok,
                    format!("|G w|/|h^-1 w| per level {:?}", rounded(&r)),
                );
            }
            Err(e) => rep.check(&format!("inverse_stability(q={q})"), false, format!("{e}")),
        }
    }

    // The penalty form: symmetry, positivity on the mean-zero subspace and
    // the measured coercivity constant. Sensitive to --sigma.
    for q in [1usize, 2] {
        let sigma = cfg.sigma.unwrap_or(PenaltyConfig::recommended(q).sigma);
        let mesh = build_mesh(0.0, 1.0, 16, 0.2, seed ^ 9, BoundaryMode::Periodic).unwrap();
        match ip_spd_measurement(&mesh, q, sigma, 40, seed) {
            Ok(m) => rep.check(
                &format!("ip_coercivity(q={q},sigma={sigma})"),
                m.asymmetry <= 1e-13
                    && m.min_mean_zero_eigenvalue > 0.0
                    && m.min_coercivity_ratio > 0.0,
                format!(
                    "asymmetry {:.2e} min mean-zero eig {:.3e} min a(w,w)/|w|_dG^2 {:.3e}",
                    m.asymmetry, m.min_mean_zero_eigenvalue, m.min_coercivity_ratio
                ),
            ),
            Err(e) => rep.check(&format!("ip_coercivity(q={q})"), false, format!("{e}")),
        }
    }

    match max_oracle_deviation(&oracle_ns, &oracle_qs, seed) {
        Ok(worst) => rep.check(
            "oracle_match",
            worst <= 1e-12,
            format!("max entrywise deviation {worst:.3e} (tol 1e-12)"),
        ),
        Err(e) => rep.check("oracle_match", false, format!("{e}")),
    }

    for &q in &order_qs {
        match projection_orders(q, &order_ladder) {
            Ok(o) => {
                let target = q as f64;
                let ok = (o.riesz_l2 - (target + 1.0)).abs() <= 0.3
                    && (o.riesz_dg - target).abs() <= 0.3
                    && (o.s_plus - (target + 1.0)).abs() <= 0.3
                    && (o.s_minus - (target + 1.0)).abs() <= 0.3
                    && o.q_vs_s >= target + 1.0 - 0.4;
                rep.check(
                    &format!("projection_orders(q={q})"),
                    ok,
                    format!(
                        "riesz L2 {:.2} dG {:.2} S+ {:.2} S- {:.2} Q-S+ {:.2} (Q-S+ bound is one-sided)",
                        o.riesz_l2, o.riesz_dg, o.s_plus, o.s_minus, o.q_vs_s
                    ),
                );
            }
            Err(e) => rep.check(&format!("projection_orders(q={q})"), false, format!("{e}")),
        }
        match stress_projection_order(q, &order_ladder, cfg.gamma.max(1e-2)) {
            Ok(rate) => rep.check(
                &format!("stress_projection_order(q={q})"),
                (rate - (q as f64 + 1.0)).abs() <= 0.3,
                format!("|R[tau]-tau| order {rate:.2} (target {})", q + 1),
            ),
            Err(e) => rep.check(
                &format!("stress_projection_order(q={q})"),
                false,
                format!("{e}"),
            ),
        }
    }

    match riesz_sup_stability(2, if fast { &[16, 32] } else { &[16, 32, 64, 128] }) {
        Ok(ratios) => {
            let worst = ratios
                .iter()
                .map(|&(v, d)| v.max(d))
                .fold(0.0_f64, f64::max);
            rep.check(
                "riesz_sup_stability",
                worst <= 3.0,
                format!("max |Pw|/|w| and |(Pw)'|/|w'| ratio {worst:.3} (bound 3.0)"),
            );
        }
        Err(e) => rep.check("riesz_sup_stability", false, format!("{e}")),
    }

    let audit_qs: &[usize] = if fast { &[1] } else { &[1, 2] };
    for &q in audit_qs {
        let params = ModelParams::new(1e-2, 1e-2, EnergyDensity::DoubleWell, q).unwrap();
        let exact = manufactured_periodic();
        match projection_residual_audit(&exact, &params, &order_ladder) {
            Ok(rows) => {
                let max_ru = rows.iter().map(|r| r.r_u).fold(0.0_f64, f64::max);
                let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
                let tau: Vec<f64> = rows.iter().map(|r| r.r_tau).collect();
                let v: Vec<f64> = rows.iter().map(|r| r.r_v).collect();
                let te = dged_core::verify::eoc(&tau, &h)
                    .map(|e| 0.5 * (e[e.len() - 1] + e[e.len() - 2]))
                    .unwrap_or(f64::NAN);
                let ve = dged_core::verify::eoc(&v, &h)
                    .map(|e| 0.5 * (e[e.len() - 1] + e[e.len() - 2]))
                    .unwrap_or(f64::NAN);
                let ok = max_ru <= 1e-11
                    && (te - (q as f64 + 1.0)).abs() <= 0.3
                    && (ve - q as f64).abs() <= 0.3;
                rep.check(
                    &format!("residual_audit(q={q})"),
                    ok,
                    format!("max|R_u| {max_ru:.2e} R_tau order {te:.2} R_v order {ve:.2}"),
                );
            }
            Err(e) => rep.check(&format!("residual_audit(q={q})"), false, format!("{e}")),
        }
    }

    let mut report_text = String::new();
    for (_, line) in &rep.lines {
        println!("{line}");
        report_text.push_str(line);
        report_text.push('\n');
    }
    if let Some(path) = &cfg.output {
        if let Ok(mut f) = std::fs::File::create(path) {
            let _ = f.write_all(report_text.as_bytes());
        }
    }
    match rep.first_failure() {
        Some(line) => {
            eprintln!("first failing property: {line}");
            1
        }
        None => 0,
    }
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}
