//! Run configuration: defaults, optional TOML config file, environment
//! variables and flags, merged in increasing priority.

use std::path::PathBuf;

use serde::Deserialize;

use dged_core::mesh::BoundaryMode;
use dged_core::verify::DtRule;

/// Values accepted in a TOML config file. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub degree: Option<usize>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub boundary: Option<String>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub record_every: Option<usize>,
    pub ic_perturb: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config file {}: {e}", path.display()))
    }
}

/// Fully resolved configuration used by every subcommand.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub gamma: f64,
    pub mu: f64,
    pub sigma: Option<f64>,
    pub degree: usize,
    pub t_final: f64,
    pub dt: Option<f64>,
    pub boundary: BoundaryMode,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub n: usize,
    pub n_list: Vec<usize>,
    pub record_every: usize,
    pub ic_perturb: f64,
}

impl ResolvedConfig {
    pub fn dt_rule(&self) -> DtRule {
        match self.dt {
            Some(dt) => DtRule::Fixed(dt),
            None => DtRule::HSquared,
        }
    }

    /// Mirror of the benchmark defaults: gamma = mu = 1e-3, q = 1, T = 0.5,
    /// dt = h^2, wall boundaries.
    pub fn defaults() -> Self {
        ResolvedConfig {
            gamma: 1e-3,
            mu: 1e-3,
            sigma: None,
            degree: 1,
            t_final: 0.5,
            dt: None,
            boundary: BoundaryMode::Natural,
            seed: 0,
            output: None,
            n: 64,
            n_list: vec![16, 32, 64, 128, 256],
            record_every: 1,
            ic_perturb: 0.0,
        }
    }

    /// Validate ranges, naming the offending flag.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 0.0) {
            return Err(format!("--gamma must be positive (got {})", self.gamma));
        }
        if !(self.mu >= 0.0) {
            return Err(format!("--mu must be nonnegative (got {})", self.mu));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0) {
                return Err(format!("--sigma must be positive (got {s})"));
            }
        }
        if self.degree < 1 {
            return Err("--degree must be at least 1".into());
        }
        if !(self.t_final > 0.0) {
            return Err(format!("--T must be positive (got {})", self.t_final));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(format!("--dt must be positive (got {dt})"));
            }
        }
        if self.n < 2 {
            return Err(format!("--N must be at least 2 (got {})", self.n));
        }
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| n < 2) {
            return Err("--n-list entries must all be at least 2".into());
        }
        if self.record_every == 0 {
            return Err("--record-every must be at least 1".into());
        }
        Ok(())
    }

    pub fn boundary_name(&self) -> &'static str {
        match self.boundary {
            BoundaryMode::Periodic => "periodic",
            BoundaryMode::Natural => "natural",
        }
    }

    pub fn dt_rule_name(&self) -> String {
        match self.dt {
            Some(dt) => format!("fixed({dt:e})"),
            None => "h^2".into(),
        }
    }
}

pub fn parse_boundary(s: &str) -> Result<BoundaryMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "periodic" => Ok(BoundaryMode::Periodic),
        "natural" => Ok(BoundaryMode::Natural),
        other => Err(format!(
            "--boundary must be 'periodic' or 'natural' (got '{other}')"
        )),
    }
}
