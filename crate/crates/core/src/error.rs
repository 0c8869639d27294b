//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    MeshInvalid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("face index {face} out of range (mesh has {n_faces} faces)")]
    FaceOutOfRange { face: usize, n_faces: usize },

    #[error("fields live on different meshes or have different degrees")]
    SpaceMismatch,

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error(
        "Newton iteration diverged at t = {time:.6e} (residual {residual:.3e} after {iterations} iterations)"
    )]
    NewtonDivergence {
        time: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("problem size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
