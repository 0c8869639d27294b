//! Assembly of the discrete operators: one-sided gradients, the symmetric
//! interior-penalty form and the discrete Laplacian derived from it.
//!
//! All matrices act on cell-major Legendre coefficient vectors. "Weak"
//! matrices represent bilinear quantities (`psi^T B w` is an integral);
//! "action" matrices include the inverse mass and map coefficients to
//! coefficients.
//!
//! On natural-boundary meshes the wall faces are handled by ghost parity:
//! even fields contribute nothing there (zero ghost jump), odd fields get
//! the half-weighted ghost jump terms `+w(x_0^+) psi(x_0^+)` and
//! `-w(x_N^-) psi(x_N^-)`. With this choice the duality between the two
//! gradients holds exactly for even/odd pairs, which is what the energy
//! balance of the scheme needs. The interior-penalty form carries no wall
//! terms (weak zero-Neumann condition).

use std::sync::Arc;

use crate::basis::{legendre_deriv_at_right, legendre_deriv_gram, legendre_deriv_value_gram};
use crate::error::{Error, Result};
use crate::field::DgFunction;
use crate::mesh::{BoundaryMode, GhostParity, Mesh1D};
use crate::ops::block::BlockMat;

/// Interior-penalty parameter.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyConfig {
    pub sigma: f64,
}

impl PenaltyConfig {
    /// Default penalty 4 (q+1)^2: comfortably above the coercivity floor.
    pub fn recommended(degree: usize) -> Self {
        PenaltyConfig {
            sigma: 4.0 * ((degree + 1) * (degree + 1)) as f64,
        }
    }

    /// Heuristic coercivity floor (q+1)^2; below it the penalized form may
    /// lose positivity, which the property suite demonstrates.
    pub fn sigma_floor(degree: usize) -> f64 {
        ((degree + 1) * (degree + 1)) as f64
    }

    pub fn new(sigma: f64) -> Self {
        PenaltyConfig { sigma }
    }

    pub fn is_below_floor(&self, degree: usize) -> bool {
        self.sigma < Self::sigma_floor(degree)
    }
}

/// A sparse block operator plus the metadata identifying its space.
#[derive(Debug, Clone)]
pub struct DgOperator {
    pub mesh: Arc<Mesh1D>,
    pub degree: usize,
    pub weak: BlockMat,
}

impl DgOperator {
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        self.weak.to_dense()
    }
}

fn endpoint_value(k: usize, right: bool) -> f64 {
    if right || k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal mass matrix entries h_n / (2k + 1).
pub fn mass_diagonal(mesh: &Mesh1D, degree: usize) -> Vec<f64> {
    let nb = degree + 1;
    let mut d = vec![0.0; mesh.n_cells() * nb];
    for (n, &h) in mesh.cell_sizes().iter().enumerate() {
        for k in 0..nb {
            d[n * nb + k] = h / (2.0 * k as f64 + 1.0);
        }
    }
    d
}

/// Which one-sided trace of the test function a gradient uses at a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradSide {
    Minus,
    Plus,
}

/// Weak matrix of a one-sided discrete gradient for fields of the given
/// ghost parity.
pub fn grad_weak(mesh: &Mesh1D, degree: usize, side: GradSide, parity: GhostParity) -> BlockMat {
    let nb = degree + 1;
    let n = mesh.n_cells();
    let mut b = BlockMat::new(n, nb);

    // Volume terms: integral of (d/dx trial) * test over each cell is
    // mesh-independent in the Legendre basis.
    for cell in 0..n {
        let blk = b.block_mut(cell, cell);
        for j in 0..nb {
            for k in 0..nb {
                blk[(j, k)] += legendre_deriv_value_gram(j, k);
            }
        }
    }

    // Interior faces (plus the wrap face on periodic meshes): subtract the
    // jump of the trial weighted by the one-sided test trace.
    let faces: Vec<(usize, usize)> = match mesh.boundary_mode() {
        BoundaryMode::Periodic => (0..n).map(|f| ((f + n - 1) % n, f)).collect(),
        BoundaryMode::Natural => (1..n).map(|f| (f - 1, f)).collect(),
    };
    for (lc, rc) in faces {
        // Jump functional: +1 on left-cell coefficients, -(-1)^k on right.
        // Test trace: from the left cell (value 1) for Minus, from the right
        // cell (value (-1)^j) for Plus.
        match side {
            GradSide::Minus => {
                for j in 0..nb {
                    for k in 0..nb {
                        b.add_entry(lc, lc, j, k, -1.0);
                        b.add_entry(lc, rc, j, k, endpoint_value(k, false));
                    }
                }
            }
            GradSide::Plus => {
                for j in 0..nb {
                    let tj = endpoint_value(j, false);
                    for k in 0..nb {
                        b.add_entry(rc, lc, j, k, -tj);
                        b.add_entry(rc, rc, j, k, tj * endpoint_value(k, false));
                    }
                }
            }
        }
    }

    // Wall faces: only odd-parity fields contribute; both gradients get the
    // same half-weighted ghost terms because the ghost of the test trace is
    // its interior value either way.
    if mesh.boundary_mode() == BoundaryMode::Natural && parity == GhostParity::Odd {
        for j in 0..nb {
            let tj = endpoint_value(j, false);
            for k in 0..nb {
                b.add_entry(0, 0, j, k, tj * endpoint_value(k, false));
                b.add_entry(n - 1, n - 1, j, k, -1.0);
            }
        }
    }

    b
}

/// Weak matrix of the symmetric interior-penalty form. Exactly symmetric by
/// construction; wall faces carry no terms on natural meshes.
pub fn ip_weak(mesh: &Mesh1D, degree: usize, sigma: f64) -> BlockMat {
    let nb = degree + 1;
    let n = mesh.n_cells();
    let mut a = BlockMat::new(n, nb);

    for (cell, &h) in mesh.cell_sizes().iter().enumerate() {
        let blk = a.block_mut(cell, cell);
        for j in 0..nb {
            for k in 0..nb {
                blk[(j, k)] += 2.0 / h * legendre_deriv_gram(j, k);
            }
        }
    }

    let faces: Vec<(usize, usize, usize)> = match mesh.boundary_mode() {
        BoundaryMode::Periodic => (0..n).map(|f| (f, (f + n - 1) % n, f)).collect(),
        BoundaryMode::Natural => (1..n).map(|f| (f, f - 1, f)).collect(),
    };

    // Per-face linear functionals on the two adjacent cells:
    // jump J and derivative average G, indexed by (cell slot, coefficient).
    for (face, lc, rc) in faces {
        let hf = mesh.face_h(face);
        let hl = mesh.cell_size(lc);
        let hr = mesh.cell_size(rc);
        let cells = [lc, rc];
        let mut jump = [[0.0; 8]; 2];
        let mut davg = [[0.0; 8]; 2];
        for k in 0..nb {
            jump[0][k] = 1.0;
            jump[1][k] = -endpoint_value(k, false);
            davg[0][k] = legendre_deriv_at_right(k) / hl;
            davg[1][k] = -endpoint_value(k, false) * legendre_deriv_at_right(k) / hr;
        }
        for (ri, &rcell) in cells.iter().enumerate() {
            for (ci, &ccell) in cells.iter().enumerate() {
                let blk = a.block_mut(rcell, ccell);
                for j in 0..nb {
                    for k in 0..nb {
                        blk[(j, k)] += -jump[ri][j] * davg[ci][k] - jump[ci][k] * davg[ri][j]
                            + sigma / hf * jump[ri][j] * jump[ci][k];
                    }
                }
            }
        }
    }

    a
}

/// All operators of one (mesh, degree, penalty) triple, assembled once.
pub struct Discretization {
    mesh: Arc<Mesh1D>,
    degree: usize,
    penalty: PenaltyConfig,
    mass: Vec<f64>,
    inv_mass: Vec<f64>,
    gm_weak: [BlockMat; 2],
    gp_weak: [BlockMat; 2],
    gm_act: [BlockMat; 2],
    gp_act: [BlockMat; 2],
    ip: BlockMat,
    lap_act: BlockMat,
    /// G+ then G- with the parities the scheme uses (tau even, v odd).
    gpgm_act: BlockMat,
    /// G+ composed with the discrete Laplacian action.
    gp_lap_act: BlockMat,
}

fn parity_index(p: GhostParity) -> usize {
    match p {
        GhostParity::Even => 0,
        GhostParity::Odd => 1,
    }
}

impl Discretization {
    pub fn new(mesh: Arc<Mesh1D>, degree: usize, penalty: PenaltyConfig) -> Self {
        let mass = mass_diagonal(&mesh, degree);
        let inv_mass: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();

        let assemble_pair = |side: GradSide| -> [BlockMat; 2] {
            let even = grad_weak(&mesh, degree, side, GhostParity::Even);
            let odd = if mesh.is_periodic() {
                even.clone()
            } else {
                grad_weak(&mesh, degree, side, GhostParity::Odd)
            };
            [even, odd]
        };
        let gm_weak = assemble_pair(GradSide::Minus);
        let gp_weak = assemble_pair(GradSide::Plus);

        let to_action = |weak: &BlockMat| -> BlockMat {
            let mut act = weak.clone();
            act.scale_rows(&inv_mass);
            act
        };
        let gm_act = [to_action(&gm_weak[0]), to_action(&gm_weak[1])];
        let gp_act = [to_action(&gp_weak[0]), to_action(&gp_weak[1])];

        let ip = ip_weak(&mesh, degree, penalty.sigma);
        let mut lap_act = ip.clone();
        lap_act.scale_rows(&inv_mass);
        lap_act.scale(-1.0);

        let gp_scheme = &gp_act[parity_index(GhostParity::Even)];
        let gm_scheme = &gm_act[parity_index(GhostParity::Odd)];
        let gpgm_act = gp_scheme.matmul(gm_scheme);
        let gp_lap_act = gp_scheme.matmul(&lap_act);

        Discretization {
            mesh,
            degree,
            penalty,
            mass,
            inv_mass,
            gm_weak,
            gp_weak,
            gm_act,
            gp_act,
            ip,
            lap_act,
            gpgm_act,
            gp_lap_act,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn penalty(&self) -> PenaltyConfig {
        self.penalty
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn inv_mass(&self) -> &[f64] {
        &self.inv_mass
    }

    pub fn n_dofs(&self) -> usize {
        self.mass.len()
    }

    pub fn grad_minus_weak(&self, parity: GhostParity) -> &BlockMat {
        &self.gm_weak[parity_index(parity)]
    }

    pub fn grad_plus_weak(&self, parity: GhostParity) -> &BlockMat {
        &self.gp_weak[parity_index(parity)]
    }

    pub fn grad_minus_action(&self, parity: GhostParity) -> &BlockMat {
        &self.gm_act[parity_index(parity)]
    }

    pub fn grad_plus_action(&self, parity: GhostParity) -> &BlockMat {
        &self.gp_act[parity_index(parity)]
    }

    pub fn ip_weak_matrix(&self) -> &BlockMat {
        &self.ip
    }

    pub fn laplacian_action(&self) -> &BlockMat {
        &self.lap_act
    }

    pub fn gpgm_action(&self) -> &BlockMat {
        &self.gpgm_act
    }

    pub fn gp_lap_action(&self) -> &BlockMat {
        &self.gp_lap_act
    }

    pub fn operator(&self, weak: &BlockMat) -> DgOperator {
        DgOperator {
            mesh: self.mesh.clone(),
            degree: self.degree,
            weak: weak.clone(),
        }
    }

    fn check_space(&self, f: &DgFunction) -> Result<()> {
        if !Arc::ptr_eq(f.mesh(), &self.mesh) || f.degree() != self.degree {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn flipped(p: GhostParity) -> GhostParity {
        match p {
            GhostParity::Even => GhostParity::Odd,
            GhostParity::Odd => GhostParity::Even,
        }
    }

    /// G-[f]: the boundary treatment follows the parity of `f`; the result
    /// carries the opposite parity (a derivative flips the ghost symmetry).
    pub fn grad_minus(&self, f: &DgFunction) -> DgFunction {
        debug_assert!(self.check_space(f).is_ok());
        let y = self.gm_act[parity_index(f.parity())].apply(f.coeffs());
        DgFunction::from_coeffs(self.mesh.clone(), self.degree, y)
            .with_parity(Self::flipped(f.parity()))
    }

    pub fn grad_plus(&self, f: &DgFunction) -> DgFunction {
        debug_assert!(self.check_space(f).is_ok());
        let y = self.gp_act[parity_index(f.parity())].apply(f.coeffs());
        DgFunction::from_coeffs(self.mesh.clone(), self.degree, y)
            .with_parity(Self::flipped(f.parity()))
    }

    /// The bilinear interior-penalty form a_h^d(w, v); symmetric.
    pub fn ip_form(&self, w: &DgFunction, v: &DgFunction) -> Result<f64> {
        self.check_space(w)?;
        self.check_space(v)?;
        let aw = self.ip.apply(w.coeffs());
        Ok(aw.iter().zip(v.coeffs()).map(|(a, b)| a * b).sum())
    }

    /// Discrete Laplacian: the unique field with
    /// `integral(phi Lap w) = -a_h^d(w, phi)` for all phi.
    pub fn discrete_laplacian(&self, w: &DgFunction) -> DgFunction {
        debug_assert!(self.check_space(w).is_ok());
        let y = self.lap_act.apply(w.coeffs());
        DgFunction::from_coeffs(self.mesh.clone(), self.degree, y).with_parity(w.parity())
    }

    /// Defect of the duality identity:
    /// `integral(G+[phi] psi) + integral(phi G-[psi])`. Zero (to rounding)
    /// on periodic meshes for any pair and on natural meshes for pairs of
    /// opposite parity.
    pub fn duality_defect(&self, phi: &DgFunction, psi: &DgFunction) -> Result<f64> {
        self.check_space(phi)?;
        self.check_space(psi)?;
        let a = self.grad_plus(phi).inner_product(psi)?;
        let b = phi.inner_product(&self.grad_minus(psi))?;
        Ok(a + b)
    }
}
