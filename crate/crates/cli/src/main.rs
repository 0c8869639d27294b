//! `dged`: a 1D discontinuous Galerkin solver for viscosity-capillarity
//! regularized elastodynamics.
//!
//! Subcommands: `converge` (benchmark ladder with EOC table), `evolve`
//! (single-run time series), `props` (lemma-level operator property suite).
//! Exit codes: 0 success, 1 numerical failure or failed property, 2 usage
//! error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_boundary, FileConfig, ResolvedConfig};

#[derive(Parser)]
#[command(
    name = "dged",
    about = "1D dG solver for viscosity-capillarity elastodynamics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Optional TOML config file (flags and DGED_* env vars override it).
    #[arg(long, env = "DGED_CONFIG")]
    config: Option<PathBuf>,

    /// Capillarity coefficient (> 0).
    #[arg(long, env = "DGED_GAMMA", allow_negative_numbers = true)]
    gamma: Option<f64>,

    /// Viscosity coefficient (>= 0).
    #[arg(long, env = "DGED_MU", allow_negative_numbers = true)]
    mu: Option<f64>,

    /// Interior-penalty parameter (default 4 (q+1)^2).
    #[arg(long, env = "DGED_SIGMA", allow_negative_numbers = true)]
    sigma: Option<f64>,

    /// Polynomial degree q >= 1.
    #[arg(long, env = "DGED_DEGREE")]
    degree: Option<usize>,

    /// Final time.
    #[arg(long = "T", env = "DGED_T", allow_negative_numbers = true)]
    t_final: Option<f64>,

    /// Fixed time step (default rule: dt = h^2).
    #[arg(long, env = "DGED_DT", allow_negative_numbers = true)]
    dt: Option<f64>,

    /// Boundary mode: natural (walls) or periodic.
    #[arg(long, env = "DGED_BOUNDARY")]
    boundary: Option<String>,

    /// Seed for mesh perturbations and random probes.
    #[arg(long, env = "DGED_SEED")]
    seed: Option<u64>,

    /// Output file path.
    #[arg(long, short = 'o', env = "DGED_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the mesh-refinement benchmark and write the EOC table as CSV.
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated cell counts per level.
        #[arg(long, value_delimiter = ',', env = "DGED_N_LIST")]
        n_list: Option<Vec<usize>>,
        /// Extend the ladder to N = 512 and 1024 (no runtime bound).
        #[arg(long)]
        full: bool,
        /// Also write (log h, log err) pairs for plotting.
        #[arg(long)]
        emit_plot_data: bool,
        /// Also write the table as LaTeX rows.
        #[arg(long)]
        latex: bool,
    },
    /// Evolve one configuration and write the time-series log.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of mesh cells.
        #[arg(long = "N", env = "DGED_N")]
        n: Option<usize>,
        /// Record every k-th step.
        #[arg(long, env = "DGED_RECORD_EVERY")]
        record_every: Option<usize>,
        /// Amplitude of a wall-compatible cosine bump added to the strain.
        #[arg(long, env = "DGED_IC_PERTURB", allow_negative_numbers = true)]
        ic_perturb: Option<f64>,
    },
    /// Run the operator property suite; exit 0 iff every property passes.
    Props {
        #[command(flatten)]
        common: CommonArgs,
        /// Smaller ladders and fewer probes (smoke mode).
        #[arg(long)]
        fast: bool,
    },
}

fn resolve(common: &CommonArgs) -> Result<ResolvedConfig, String> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let defaults = ResolvedConfig::defaults();
    let boundary = match &common.boundary {
        Some(s) => parse_boundary(s)?,
        None => match &file.boundary {
            Some(s) => parse_boundary(s)?,
            None => defaults.boundary,
        },
    };
    Ok(ResolvedConfig {
        gamma: common.gamma.or(file.gamma).unwrap_or(defaults.gamma),
        mu: common.mu.or(file.mu).unwrap_or(defaults.mu),
        sigma: common.sigma.or(file.sigma),
        degree: common.degree.or(file.degree).unwrap_or(defaults.degree),
        t_final: common.t_final.or(file.t_final).unwrap_or(defaults.t_final),
        dt: common.dt.or(file.dt),
        boundary,
        seed: common.seed.or(file.seed).unwrap_or(defaults.seed),
        output: common.output.clone().or(file.output),
        n: file.n.unwrap_or(defaults.n),
        n_list: file.n_list.unwrap_or(defaults.n_list),
        record_every: file.record_every.unwrap_or(defaults.record_every),
        ic_perturb: file.ic_perturb.unwrap_or(defaults.ic_perturb),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Converge {
            common,
            n_list,
            full,
            emit_plot_data,
            latex,
        } => {
            let mut cfg = match resolve(common) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(n_list) = n_list {
                cfg.n_list = n_list.clone();
            }
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            commands::converge::run(&cfg, *full, *emit_plot_data, *latex)
        }
        Command::Evolve {
            common,
            n,
            record_every,
            ic_perturb,
        } => {
            let mut cfg = match resolve(common) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(n) = n {
                cfg.n = *n;
            }
            if let Some(r) = record_every {
                cfg.record_every = *r;
            }
            if let Some(p) = ic_perturb {
                cfg.ic_perturb = *p;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            commands::evolve::run(&cfg)
        }
        Command::Props { common, fast } => {
            let cfg = match resolve(common) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            commands::props::run(&cfg, *fast)
        }
    };
    ExitCode::from(code as u8)
}
