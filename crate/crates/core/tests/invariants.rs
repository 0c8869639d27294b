//! Property-based invariants of the building blocks.

use proptest::prelude::*;

use dged_core::field::DgFunction;
use dged_core::mesh::{build_mesh, BoundaryMode};
use dged_core::verify::eoc;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mesh_invariants_hold_for_any_seed(
        n in 2usize..64,
        perturbation in 0.0f64..0.39,
        seed in any::<u64>(),
    ) {
        let mesh = build_mesh(-1.0, 2.0, n, perturbation, seed, BoundaryMode::Periodic).unwrap();
        prop_assert_eq!(mesh.n_cells(), n);
        prop_assert_eq!(mesh.nodes()[0], -1.0);
        prop_assert_eq!(*mesh.nodes().last().unwrap(), 2.0);
        for w in mesh.nodes().windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        let worst = (1.0 + 2.0 * perturbation) / (1.0 - 2.0 * perturbation);
        prop_assert!(mesh.h_max() / mesh.h_min() <= worst.max(4.0) * (1.0 + 1e-9));
    }

    #[test]
    fn jump_average_identity_everywhere(
        coeffs in prop::collection::vec(-10.0f64..10.0, 6 * 3),
        face in 1usize..6,
    ) {
        let mesh = build_mesh(0.0, 1.0, 6, 0.2, 7, BoundaryMode::Periodic).unwrap();
        let f = DgFunction::from_coeffs(mesh, 2, coeffs);
        let plus_trace = f.trace_left(face);
        let lhs = f.jump(face).unwrap() + 2.0 * (plus_trace - f.average(face).unwrap());
        prop_assert!(lhs.abs() <= 1e-12 * (1.0 + plus_trace.abs()));
    }

    #[test]
    fn dg_norm_is_consistent(
        coeffs in prop::collection::vec(-5.0f64..5.0, 8 * 2),
    ) {
        let mesh = build_mesh(0.0, 1.0, 8, 0.15, 3, BoundaryMode::Periodic).unwrap();
        let f = DgFunction::from_coeffs(mesh, 1, coeffs);
        let norms = f.dg_norms();
        let lhs = norms.norm * norms.norm;
        let rhs = norms.l2 * norms.l2 + norms.seminorm * norms.seminorm;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn projection_is_idempotent_on_the_broken_space(
        coeffs in prop::collection::vec(-3.0f64..3.0, 5 * 3),
    ) {
        let mesh = build_mesh(0.0, 1.0, 5, 0.2, 11, BoundaryMode::Periodic).unwrap();
        let f = DgFunction::from_coeffs(mesh.clone(), 2, coeffs);
        let g = DgFunction::l2_project(mesh, 2, |x| f.eval(x));
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-11 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn eoc_recovers_power_laws(
        rate in 0.25f64..6.0,
        scale in 0.1f64..10.0,
    ) {
        let h: Vec<f64> = (0..5).map(|i| 0.5f64.powi(i)).collect();
        let e: Vec<f64> = h.iter().map(|&x| scale * x.powf(rate)).collect();
        let slopes = eoc(&e, &h).unwrap();
        for &s in &slopes[1..] {
            prop_assert!((s - rate).abs() <= 1e-9);
        }
    }
}
