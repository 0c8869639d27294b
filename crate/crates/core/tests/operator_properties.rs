//! Mesh-ladder stability trends of the discrete operators and related
//! invariants that complement the acceptance criteria.

use dged_core::basis::QuadratureRule;
use dged_core::field::DgFunction;
use dged_core::mesh::{BoundaryMode, Mesh1D};
use dged_core::verify::properties::{ladder_ratios, riesz_sup_stability, RatioKind};
use dged_core::verify::{benchmark_params, run_convergence_study};

const LADDER: [usize; 5] = [16, 32, 64, 128, 256];

#[test]
fn inverse_stability_ratio_does_not_grow() {
    for q in [1usize, 2] {
        for perturbed in [false, true] {
            let r = ladder_ratios(RatioKind::InverseStability, q, &LADDER, 40, perturbed, 0xA5)
                .unwrap();
            let first = r[0];
            let last = *r.last().unwrap();
            assert!(
                last <= 1.1 * first,
                "q={q} perturbed={perturbed}: ratio grew {first:.3} -> {last:.3}"
            );
        }
    }
}

#[test]
fn poincare_ratio_bounded_uniformly() {
    for q in [1usize, 2] {
        let r = ladder_ratios(RatioKind::Poincare, q, &LADDER, 40, false, 0xB7).unwrap();
        for (i, &x) in r.iter().enumerate() {
            assert!(
                x <= 1.1 * r[0] + 1e-12,
                "q={q}: ratio at level {i} is {x:.4}, first {:.4}",
                r[0]
            );
        }
    }
}

#[test]
fn gradient_coercivity_ratio_bounded_uniformly() {
    for q in [1usize, 2] {
        let r = ladder_ratios(RatioKind::GradCoercivity, q, &LADDER, 40, false, 0xC9).unwrap();
        for (i, &x) in r.iter().enumerate() {
            assert!(
                x <= 1.1 * r[0] + 1e-12,
                "q={q}: ratio at level {i} is {x:.4}, first {:.4}",
                r[0]
            );
        }
    }
}

#[test]
fn riesz_projection_sup_stable_on_front_profiles() {
    let ratios = riesz_sup_stability(2, &[16, 32, 64, 128]).unwrap();
    for (i, &(v, d)) in ratios.iter().enumerate() {
        assert!(
            v <= 3.0 && d <= 3.0,
            "level {i}: sup ratios value {v:.3} derivative {d:.3} exceed 3.0"
        );
    }
}

#[test]
fn l2_projection_error_order_q_plus_one() {
    // |f - P_q f|_L2 decays at order q + 1 for smooth f.
    let f = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
    let rule = QuadratureRule::gauss_legendre(12);
    for q in [1usize, 2] {
        let mut errs = Vec::new();
        for &n in &[16usize, 32, 64] {
            let mesh = Mesh1D::uniform(0.0, 1.0, n, BoundaryMode::Periodic).unwrap();
            let p = DgFunction::l2_project(mesh.clone(), q, f);
            let mut e = 0.0;
            for c in 0..mesh.n_cells() {
                let (a, b) = mesh.cell_bounds(c);
                e += rule.integrate(a, b, |x| {
                    let d = p.eval_on_cell(c, mesh.to_reference(c, x)) - f(x);
                    d * d
                });
            }
            errs.push(e.sqrt());
        }
        let eoc = (errs[1] / errs[2]).ln() / 2f64.ln();
        assert!(eoc >= q as f64 + 1.0 - 0.2, "q={q}: eoc {eoc}");
    }
}

#[test]
fn steady_state_stays_near_its_initial_projection() {
    // Over the benchmark horizon the strain error never exceeds 10x the
    // initial projection error at any level.
    for q in [1usize, 2] {
        let params = benchmark_params(q);
        let report = run_convergence_study(&params, &[16, 32, 64], 0.5);
        assert!(!report.any_failed());
        for (row, diag) in report.rows.iter().zip(&report.diagnostics) {
            assert!(
                row.err_u_linf_l2 <= 10.0 * diag.initial_u_l2,
                "q={q} N={}: max error {:.3e} vs initial {:.3e}",
                row.n_cells,
                row.err_u_linf_l2,
                diag.initial_u_l2
            );
        }
    }
}
