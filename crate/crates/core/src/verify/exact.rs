//! Closed-form reference solutions with the derivatives the projection
//! machinery needs.

use std::sync::Arc;

use crate::dynamics::ModelParams;
use crate::error::{Error, Result};

type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A reference solution (u, v) of the regularized system together with the
/// spatial derivatives required by the elliptic and gradient-matching
/// projections (up to third order).
#[derive(Clone)]
pub struct ExactSolution {
    pub domain: (f64, f64),
    pub periodic: bool,
    pub u: SpaceTimeFn,
    pub ux: SpaceTimeFn,
    pub uxx: SpaceTimeFn,
    pub uxxx: SpaceTimeFn,
    pub v: SpaceTimeFn,
    pub vx: SpaceTimeFn,
    pub vxx: SpaceTimeFn,
    pub vxxx: SpaceTimeFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactSolution")
            .field("domain", &self.domain)
            .field("periodic", &self.periodic)
            .finish()
    }
}

/// The standing phase-boundary profile `u = tanh(x sqrt(2/gamma))`, `v = 0`
/// on [-1, 1] with wall boundary conditions. It balances the double-well
/// stress against capillarity: `W'(u) = gamma u''` pointwise, so the
/// recovered stress vanishes identically.
pub fn tanh_steady_state(params: &ModelParams) -> Result<ExactSolution> {
    if !params.energy.is_double_well() {
        return Err(Error::InvalidParameter(
            "the tanh steady state requires the double-well energy".into(),
        ));
    }
    let a = (2.0 / params.gamma).sqrt();
    let u = move |_t: f64, x: f64| (a * x).tanh();
    let ux = move |_t: f64, x: f64| {
        let s = (a * x).tanh();
        a * (1.0 - s * s)
    };
    let uxx = move |_t: f64, x: f64| {
        let s = (a * x).tanh();
        -2.0 * a * a * s * (1.0 - s * s)
    };
    let uxxx = move |_t: f64, x: f64| {
        let s = (a * x).tanh();
        -2.0 * a * a * a * (1.0 - s * s) * (1.0 - 3.0 * s * s)
    };
    let sol = ExactSolution {
        domain: (-1.0, 1.0),
        periodic: false,
        u: Arc::new(u),
        ux: Arc::new(ux),
        uxx: Arc::new(uxx),
        uxxx: Arc::new(uxxx),
        v: Arc::new(|_, _| 0.0),
        vx: Arc::new(|_, _| 0.0),
        vxx: Arc::new(|_, _| 0.0),
        vxxx: Arc::new(|_, _| 0.0),
    };
    // Build-time sanity check: the profile solves W'(u) = gamma u''.
    let gamma = params.gamma;
    let energy = params.energy;
    for i in 0..50 {
        let x = -1.0 + 2.0 * (i as f64 + 0.5) / 50.0;
        let residual = energy.dw((sol.u)(0.0, x)) - gamma * (sol.uxx)(0.0, x);
        if residual.abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "steady-state residual {residual:.3e} at x = {x}"
            )));
        }
    }
    Ok(sol)
}

/// Time-frozen smooth periodic fields on [0, 1], used by the
/// projection-residual audit: `u = 0.3 sin(2 pi x)`, `v = 0.2 cos(2 pi x)`.
pub fn manufactured_periodic() -> ExactSolution {
    let p = 2.0 * std::f64::consts::PI;
    ExactSolution {
        domain: (0.0, 1.0),
        periodic: true,
        u: Arc::new(move |_, x| 0.3 * (p * x).sin()),
        ux: Arc::new(move |_, x| 0.3 * p * (p * x).cos()),
        uxx: Arc::new(move |_, x| -0.3 * p * p * (p * x).sin()),
        uxxx: Arc::new(move |_, x| -0.3 * p * p * p * (p * x).cos()),
        v: Arc::new(move |_, x| 0.2 * (p * x).cos()),
        vx: Arc::new(move |_, x| -0.2 * p * (p * x).sin()),
        vxx: Arc::new(move |_, x| -0.2 * p * p * (p * x).cos()),
        vxxx: Arc::new(move |_, x| 0.2 * p * p * p * (p * x).sin()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::EnergyDensity;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tanh_profile_values() {
        let params = ModelParams::new(2.0, 0.0, EnergyDensity::DoubleWell, 1).unwrap();
        let sol = tanh_steady_state(&params).unwrap();
        // gamma = 2 gives u(x) = tanh(x).
        assert_abs_diff_eq!((sol.u)(0.0, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((sol.ux)(0.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!((sol.u)(0.0, 0.7), 0.7f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn sharp_interface_saturates() {
        let params = ModelParams::new(1e-3, 0.0, EnergyDensity::DoubleWell, 1).unwrap();
        let sol = tanh_steady_state(&params).unwrap();
        assert_abs_diff_eq!((sol.u)(0.0, 0.5), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_non_double_well() {
        let params =
            ModelParams::new(1e-3, 0.0, EnergyDensity::Quadratic { stiffness: 1.0 }, 1).unwrap();
        assert!(tanh_steady_state(&params).is_err());
    }

    #[test]
    fn manufactured_derivatives_consistent() {
        let sol = manufactured_periodic();
        let eps = 1e-6;
        for i in 0..10 {
            let x = 0.05 + 0.1 * i as f64;
            let fd = ((sol.u)(0.0, x + eps) - (sol.u)(0.0, x - eps)) / (2.0 * eps);
            assert_abs_diff_eq!(fd, (sol.ux)(0.0, x), epsilon = 1e-5);
            let fd2 = ((sol.vx)(0.0, x + eps) - (sol.vx)(0.0, x - eps)) / (2.0 * eps);
            assert_abs_diff_eq!(fd2, (sol.vxx)(0.0, x), epsilon = 1e-4);
            let fd3 = ((sol.uxx)(0.0, x + eps) - (sol.uxx)(0.0, x - eps)) / (2.0 * eps);
            assert_abs_diff_eq!(fd3, (sol.uxxx)(0.0, x), epsilon = 1e-3);
        }
    }
}
