//! Verification tools: reference solutions, error norms, convergence
//! studies, projection-residual audits and independent operator oracles.

pub mod convergence;
pub mod eoc;
pub mod exact;
pub mod norms;
pub mod oracle;
pub mod properties;
pub mod residuals;

pub use convergence::{
    benchmark_params, run_convergence_study, run_convergence_study_with, ConvergenceReport, DtRule,
    LevelDiagnostics, ReportRow,
};
pub use eoc::{eoc, trailing_two_average};
pub use exact::{manufactured_periodic, tanh_steady_state, ExactSolution};
pub use norms::{error_norms, spatial_errors, ErrorAccumulator, ErrorNorms, SpatialErrors};
pub use oracle::{dense_oracle, OracleKind};
pub use residuals::{projection_residual_audit, ResidualNorms};
