//! The regularized elastodynamics model and its semi-discrete evolution.

mod energy;
mod scheme;

pub use energy::{
    discrete_energy, modified_entropy, recover_tau, reduced_relative_entropy,
    viscous_dissipation_rate,
};
pub use scheme::{
    evolve, evolve_with, jacobian, rhs, step_crank_nicolson, EnergyLog, EvolveSummary, NewtonStats,
    SchemeJacobian, Trajectory,
};

use crate::error::{Error, Result};
use crate::field::DgFunction;
use crate::mesh::GhostParity;
use crate::ops::assembly::PenaltyConfig;

/// Stored energy density W(u) with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyDensity {
    /// The double well (u^2 - 1)^2 with minima at the two phases u = +/-1.
    DoubleWell,
    /// Quadratic well s u^2 / 2 (linear stress; handy for tests).
    Quadratic {
        stiffness: f64,
    },
    Zero,
}

impl EnergyDensity {
    pub fn w(&self, u: f64) -> f64 {
        match self {
            EnergyDensity::DoubleWell => {
                let s = u * u - 1.0;
                s * s
            }
            EnergyDensity::Quadratic { stiffness } => 0.5 * stiffness * u * u,
            EnergyDensity::Zero => 0.0,
        }
    }

    pub fn dw(&self, u: f64) -> f64 {
        match self {
            EnergyDensity::DoubleWell => 4.0 * u * (u * u - 1.0),
            EnergyDensity::Quadratic { stiffness } => stiffness * u,
            EnergyDensity::Zero => 0.0,
        }
    }

    pub fn ddw(&self, u: f64) -> f64 {
        match self {
            EnergyDensity::DoubleWell => 12.0 * u * u - 4.0,
            EnergyDensity::Quadratic { stiffness } => *stiffness,
            EnergyDensity::Zero => 0.0,
        }
    }

    pub fn is_double_well(&self) -> bool {
        matches!(self, EnergyDensity::DoubleWell)
    }

    /// Check that W'' matches a centered difference of W' at sample points.
    pub fn derivatives_consistent(&self) -> bool {
        let eps = 1e-5;
        for i in 0..=40 {
            let u = -2.0 + 0.1 * i as f64;
            let fd = (self.dw(u + eps) - self.dw(u - eps)) / (2.0 * eps);
            let exact = self.ddw(u);
            if (fd - exact).abs() > 1e-6 * (1.0 + exact.abs()) {
                return false;
            }
        }
        true
    }
}

/// Physical and discretization parameters of a run.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Capillarity coefficient (> 0).
    pub gamma: f64,
    /// Viscosity coefficient (>= 0).
    pub mu: f64,
    pub energy: EnergyDensity,
    pub degree: usize,
    pub penalty: PenaltyConfig,
}

impl ModelParams {
    pub fn new(gamma: f64, mu: f64, energy: EnergyDensity, degree: usize) -> Result<Self> {
        let p = ModelParams {
            gamma,
            mu,
            energy,
            degree,
            penalty: PenaltyConfig::recommended(degree),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.mu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mu must be nonnegative, got {}",
                self.mu
            )));
        }
        if self.degree < 1 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        if !(self.penalty.sigma > 0.0) {
            return Err(Error::InvalidParameter("sigma must be positive".into()));
        }
        if !self.energy.derivatives_consistent() {
            return Err(Error::InvalidParameter(
                "energy density derivatives are inconsistent".into(),
            ));
        }
        Ok(())
    }
}

/// The pair (u_h, v_h) at a time instant. The strain carries even ghost
/// parity (zero normal derivative at walls), the velocity odd parity (zero
/// value at walls).
#[derive(Debug, Clone)]
pub struct State {
    pub time: f64,
    pub u: DgFunction,
    pub v: DgFunction,
}

impl State {
    pub fn new(time: f64, u: DgFunction, v: DgFunction) -> Result<Self> {
        if !u.same_space(&v) {
            return Err(Error::SpaceMismatch);
        }
        Ok(State {
            time,
            u: u.with_parity(GhostParity::Even),
            v: v.with_parity(GhostParity::Odd),
        })
    }

    /// Combined L2 norm of both fields.
    pub fn norm(&self) -> f64 {
        let uu = self.u.inner_product_unchecked(&self.u);
        let vv = self.v.inner_product_unchecked(&self.v);
        (uu + vv).max(0.0).sqrt()
    }
}
