//! One-dimensional meshes with periodic or natural (wall) boundaries.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How the domain endpoints are treated.
///
/// `Periodic` identifies the two endpoints, so face 0 couples the last and
/// first cells. `Natural` models walls with the weak conditions
/// du/dx = 0 and v = 0; fields carry a [`GhostParity`] that fixes their
/// ghost traces there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    Periodic,
    Natural,
}

/// Ghost-trace convention of a field at natural-mode walls.
///
/// `Even` mirrors the interior trace (zero jump, enforcing a zero normal
/// derivative weakly); `Odd` negates it (zero average, enforcing a zero
/// boundary value weakly). Ignored on periodic meshes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhostParity {
    Even,
    Odd,
}

/// Default bound on the ratio between the largest and smallest cell.
pub const DEFAULT_MAX_CELL_RATIO: f64 = 4.0;

/// A partition of [left, right] into cells.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    left: f64,
    right: f64,
    nodes: Vec<f64>,
    cell_sizes: Vec<f64>,
    boundary_mode: BoundaryMode,
}

impl Mesh1D {
    /// Build a mesh from an explicit node list, validating the invariants.
    pub fn from_nodes(
        nodes: Vec<f64>,
        boundary_mode: BoundaryMode,
        max_cell_ratio: f64,
    ) -> Result<Arc<Self>> {
        if nodes.len() < 3 {
            return Err(Error::MeshInvalid("need at least 2 cells".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::MeshInvalid(format!(
                    "nodes not strictly increasing near x = {}",
                    w[0]
                )));
            }
        }
        let cell_sizes: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let h_max = cell_sizes.iter().cloned().fold(f64::MIN, f64::max);
        let h_min = cell_sizes.iter().cloned().fold(f64::MAX, f64::min);
        if h_max / h_min > max_cell_ratio * (1.0 + 1e-12) {
            return Err(Error::MeshInvalid(format!(
                "cell ratio {:.3} exceeds bound {:.3}",
                h_max / h_min,
                max_cell_ratio
            )));
        }
        Ok(Arc::new(Mesh1D {
            left: nodes[0],
            right: *nodes.last().unwrap(),
            nodes,
            cell_sizes,
            boundary_mode,
        }))
    }

    /// Uniform partition into `n` cells.
    pub fn uniform(
        left: f64,
        right: f64,
        n: usize,
        boundary_mode: BoundaryMode,
    ) -> Result<Arc<Self>> {
        build_mesh(left, right, n, 0.0, 0, boundary_mode)
    }

    pub fn n_cells(&self) -> usize {
        self.cell_sizes.len()
    }

    /// Number of distinct faces: N for periodic, N + 1 for natural.
    pub fn n_faces(&self) -> usize {
        match self.boundary_mode {
            BoundaryMode::Periodic => self.n_cells(),
            BoundaryMode::Natural => self.n_cells() + 1,
        }
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn domain_length(&self) -> f64 {
        self.right - self.left
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cell_sizes(&self) -> &[f64] {
        &self.cell_sizes
    }

    pub fn cell_size(&self, n: usize) -> f64 {
        self.cell_sizes[n]
    }

    pub fn cell_bounds(&self, n: usize) -> (f64, f64) {
        (self.nodes[n], self.nodes[n + 1])
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        self.boundary_mode
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary_mode == BoundaryMode::Periodic
    }

    pub fn h_max(&self) -> f64 {
        self.cell_sizes.iter().cloned().fold(f64::MIN, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.cell_sizes.iter().cloned().fold(f64::MAX, f64::min)
    }

    /// Local face length: the average of the two adjacent cell sizes, with
    /// periodic wrap and one-sided mirroring at walls.
    pub fn face_h(&self, face: usize) -> f64 {
        let n = self.n_cells();
        let (hl, hr) = match self.boundary_mode {
            BoundaryMode::Periodic => {
                let f = face % n;
                let left_cell = (f + n - 1) % n;
                (self.cell_sizes[left_cell], self.cell_sizes[f])
            }
            BoundaryMode::Natural => {
                if face == 0 {
                    (self.cell_sizes[0], self.cell_sizes[0])
                } else if face == n {
                    (self.cell_sizes[n - 1], self.cell_sizes[n - 1])
                } else {
                    (self.cell_sizes[face - 1], self.cell_sizes[face])
                }
            }
        };
        0.5 * (hl + hr)
    }

    /// Locate the cell containing `x` (clamped to the domain).
    pub fn locate(&self, x: f64) -> usize {
        if x <= self.left {
            return 0;
        }
        if x >= self.right {
            return self.n_cells() - 1;
        }
        match self
            .nodes
            .binary_search_by(|node| node.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.n_cells() - 1),
            Err(i) => i - 1,
        }
    }

    /// Map a point of cell `n` to the reference coordinate in [-1, 1].
    pub fn to_reference(&self, n: usize, x: f64) -> f64 {
        2.0 * (x - self.nodes[n]) / self.cell_sizes[n] - 1.0
    }

    /// Map a reference coordinate in [-1, 1] to cell `n`.
    pub fn from_reference(&self, n: usize, xi: f64) -> f64 {
        self.nodes[n] + 0.5 * (xi + 1.0) * self.cell_sizes[n]
    }
}

/// Build a mesh of `n` cells on [left, right]; interior nodes are shifted
/// by deterministic pseudo-random offsets of at most `perturbation * h`
/// drawn from a ChaCha stream seeded with `seed`.
pub fn build_mesh(
    left: f64,
    right: f64,
    n: usize,
    perturbation: f64,
    seed: u64,
    boundary_mode: BoundaryMode,
) -> Result<Arc<Mesh1D>> {
    if n < 2 {
        return Err(Error::MeshInvalid(format!(
            "need at least 2 cells, got {n}"
        )));
    }
    if !(right > left) {
        return Err(Error::MeshInvalid(
            "domain must have positive length".into(),
        ));
    }
    if !(0.0..0.4).contains(&perturbation) {
        return Err(Error::MeshInvalid(format!(
            "perturbation {perturbation} outside [0, 0.4)"
        )));
    }
    let h = (right - left) / n as f64;
    let mut nodes: Vec<f64> = (0..=n).map(|i| left + i as f64 * h).collect();
    nodes[n] = right;
    if perturbation > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for node in nodes.iter_mut().take(n).skip(1) {
            let shift: f64 = rng.random_range(-1.0..1.0);
            *node += shift * perturbation * h;
        }
    }
    // Adjacent cells can differ by at most (1+2p)/(1-2p); widen the ratio
    // bound accordingly for strong perturbations.
    let worst = (1.0 + 2.0 * perturbation) / (1.0 - 2.0 * perturbation);
    let ratio = DEFAULT_MAX_CELL_RATIO.max(worst * (1.0 + 1e-9));
    Mesh1D::from_nodes(nodes, boundary_mode, ratio)
}
