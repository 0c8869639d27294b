//! Brute-force dense rebuilds of the assembled operators, straight from
//! their defining variational identities.
//!
//! The oracle shares no assembly code with the production path: volume
//! terms come from a high-order quadrature loop, traces from direct
//! Legendre evaluation at the endpoints. Production assemblies use
//! closed-form Gram matrices and endpoint tables instead, so agreement is
//! meaningful evidence.
//!
//! All comparisons happen on weak (mass-weighted) matrices, where the
//! defining identities live and entries stay O(sigma / h); for the discrete
//! Laplacian the oracle returns the matrix of `integral(psi Lap w)`, i.e.
//! the negated oracle bilinear form, to be compared against the
//! mass-weighted production action.

use nalgebra::DMatrix;

use crate::basis::{legendre_eval, legendre_eval_with_deriv, QuadratureRule};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryMode, GhostParity, Mesh1D};

/// Which operator to rebuild.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    GradMinus,
    GradPlus,
    IpForm,
    DiscreteLaplacian,
}

const SIZE_CAP: usize = 2000;
const ORACLE_POINTS: usize = 16;

struct Basis<'a> {
    mesh: &'a Mesh1D,
    nb: usize,
}

impl Basis<'_> {
    fn idx(&self, cell: usize, k: usize) -> usize {
        cell * self.nb + k
    }

    /// Trace of basis function k at the left (-1) or right (+1) end of its
    /// cell, via the evaluation recurrence.
    fn trace(&self, k: usize, right: bool) -> f64 {
        legendre_eval(k, if right { 1.0 } else { -1.0 })
    }

    /// Physical derivative trace at a cell end.
    fn deriv_trace(&self, cell: usize, k: usize, right: bool) -> f64 {
        let xi = if right { 1.0 } else { -1.0 };
        legendre_eval_with_deriv(k, xi).1 * 2.0 / self.mesh.cell_size(cell)
    }
}

/// Entry-by-entry rebuild of an operator on (mesh, degree); `parity` selects
/// the wall treatment of the differentiated field for the gradients (it is
/// ignored for the bilinear forms and on periodic meshes).
pub fn dense_oracle(
    mesh: &Mesh1D,
    degree: usize,
    sigma: f64,
    parity: GhostParity,
    kind: OracleKind,
) -> Result<DMatrix<f64>> {
    let nb = degree + 1;
    let dim = mesh.n_cells() * nb;
    if dim > SIZE_CAP {
        return Err(Error::SizeCap {
            size: dim,
            cap: SIZE_CAP,
        });
    }
    let rule = QuadratureRule::gauss_legendre(ORACLE_POINTS);
    let basis = Basis { mesh, nb };
    let mut m = DMatrix::zeros(dim, dim);
    let n = mesh.n_cells();

    // Volume terms by quadrature on each cell.
    for cell in 0..n {
        for j in 0..nb {
            for k in 0..nb {
                let v = match kind {
                    OracleKind::GradMinus | OracleKind::GradPlus => {
                        // integral over I_n of d/dx(trial_k) test_j: the cell
                        // map factors cancel (2/h * h/2 = 1).
                        rule.integrate(-1.0, 1.0, |xi| {
                            legendre_eval_with_deriv(k, xi).1 * legendre_eval(j, xi)
                        })
                    }
                    OracleKind::IpForm | OracleKind::DiscreteLaplacian => {
                        rule.integrate(-1.0, 1.0, |xi| {
                            legendre_eval_with_deriv(k, xi).1 * legendre_eval_with_deriv(j, xi).1
                        }) * 2.0
                            / mesh.cell_size(cell)
                    }
                };
                m[(basis.idx(cell, j), basis.idx(cell, k))] += v;
            }
        }
    }

    // Interior faces (with the wrap face on periodic meshes).
    let faces: Vec<(usize, usize, usize)> = match mesh.boundary_mode() {
        BoundaryMode::Periodic => (0..n).map(|f| (f, (f + n - 1) % n, f % n)).collect(),
        BoundaryMode::Natural => (1..n).map(|f| (f, f - 1, f)).collect(),
    };

    for (face, lc, rc) in faces {
        match kind {
            OracleKind::GradMinus | OracleKind::GradPlus => {
                // -[[trial]] * test(x_f from the minus/plus side).
                let (test_cell, test_right) = match kind {
                    OracleKind::GradMinus => (lc, true),
                    _ => (rc, false),
                };
                for j in 0..nb {
                    let tj = basis.trace(j, test_right);
                    for k in 0..nb {
                        // jump = trial from the left cell minus from the right
                        m[(basis.idx(test_cell, j), basis.idx(lc, k))] -= basis.trace(k, true) * tj;
                        m[(basis.idx(test_cell, j), basis.idx(rc, k))] +=
                            basis.trace(k, false) * tj;
                    }
                }
            }
            OracleKind::IpForm | OracleKind::DiscreteLaplacian => {
                let hf = mesh.face_h(face);
                let cells = [lc, rc];
                let trial_jump = |slot: usize, k: usize| -> f64 {
                    if slot == 0 {
                        basis.trace(k, true)
                    } else {
                        -basis.trace(k, false)
                    }
                };
                let trial_davg = |slot: usize, k: usize| -> f64 {
                    0.5 * basis.deriv_trace(cells[slot], k, slot == 0)
                };
                for (ri, _) in cells.iter().enumerate() {
                    for (ci, _) in cells.iter().enumerate() {
                        for j in 0..nb {
                            for k in 0..nb {
                                let v = -trial_jump(ri, j) * trial_davg(ci, k)
                                    - trial_jump(ci, k) * trial_davg(ri, j)
                                    + sigma / hf * trial_jump(ri, j) * trial_jump(ci, k);
                                m[(basis.idx(cells[ri], j), basis.idx(cells[ci], k))] += v;
                            }
                        }
                    }
                }
            }
        }
    }

    // Wall faces on natural meshes: odd fields get the half-weighted ghost
    // jump terms, and the bilinear forms carry nothing.
    if mesh.boundary_mode() == BoundaryMode::Natural
        && parity == GhostParity::Odd
        && matches!(kind, OracleKind::GradMinus | OracleKind::GradPlus)
    {
        for j in 0..nb {
            for k in 0..nb {
                let left = basis.trace(j, false) * basis.trace(k, false);
                m[(basis.idx(0, j), basis.idx(0, k))] += left;
                let right = basis.trace(j, true) * basis.trace(k, true);
                m[(basis.idx(n - 1, j), basis.idx(n - 1, k))] -= right;
            }
        }
    }

    if kind == OracleKind::DiscreteLaplacian {
        m.neg_mut();
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, Mesh1D};
    use crate::ops::assembly::{Discretization, PenaltyConfig};

    #[test]
    fn oracle_matches_production_gradients_small_case() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, BoundaryMode::Periodic).unwrap();
        let disc = Discretization::new(mesh.clone(), 1, PenaltyConfig::recommended(1));
        let o = dense_oracle(&mesh, 1, 0.0, GhostParity::Even, OracleKind::GradMinus).unwrap();
        let p = disc.grad_minus_weak(GhostParity::Even).to_dense();
        assert!((o - p).abs().max() < 1e-12);
    }

    #[test]
    fn oracle_ip_symmetric() {
        let mesh = build_mesh(0.0, 1.0, 6, 0.2, 3, BoundaryMode::Periodic).unwrap();
        let o = dense_oracle(&mesh, 2, 36.0, GhostParity::Even, OracleKind::IpForm).unwrap();
        assert!((o.clone() - o.transpose()).abs().max() < 1e-13);
    }

    #[test]
    fn oracle_duality_transpose_identity() {
        // The weak matrices satisfy B+ = -(B-)^T on periodic meshes.
        let mesh = build_mesh(0.0, 1.0, 5, 0.15, 7, BoundaryMode::Periodic).unwrap();
        let bp = dense_oracle(&mesh, 2, 0.0, GhostParity::Even, OracleKind::GradPlus).unwrap();
        let bm = dense_oracle(&mesh, 2, 0.0, GhostParity::Even, OracleKind::GradMinus).unwrap();
        assert!((bp + bm.transpose()).abs().max() < 1e-12);
    }

    #[test]
    fn size_cap_enforced() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 1024, BoundaryMode::Periodic).unwrap();
        assert!(matches!(
            dense_oracle(&mesh, 3, 1.0, GhostParity::Even, OracleKind::IpForm),
            Err(Error::SizeCap { .. })
        ));
    }
}
