//! Discrete operators: one-sided gradients, interior-penalty form, discrete
//! Laplacian, projections and the sparse linear algebra behind them.

pub mod assembly;
pub mod banded;
pub mod block;
pub mod projections;
pub mod rank;
pub mod solve;

pub use assembly::{DgOperator, Discretization, GradSide, PenaltyConfig};
pub use projections::{
    elliptic_projection, endpoint_projection, gradient_matching_projection, stress_projection,
    EndpointSide, GradientMatch,
};
pub use rank::{constant_defect, kernel_info, kernel_rank};
