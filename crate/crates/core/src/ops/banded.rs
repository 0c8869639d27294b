//! Banded LU factorization with partial pivoting (LAPACK gbtrf-style
//! storage), used for the Crank-Nicolson systems on natural-boundary
//! meshes where the Jacobian is block-pentadiagonal.

use crate::error::{Error, Result};

/// A general banded matrix with `kl` subdiagonals and `ku` superdiagonals.
///
/// Storage uses the LAPACK band layout with `kl` extra rows for pivot fill:
/// entry (i, j) lives at `data[j * ldab + (kl + ku + i - j)]`.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        (j <= i + self.ku.min(self.n)) && (i <= j + self.kl) && j + self.ku >= i
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(
            i + self.ku >= j && j + self.kl >= i,
            "entry ({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let idx = self.idx(i, j);
        self.data[idx] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku < j || j + self.kl < i {
            return 0.0;
        }
        self.data[self.idx(i, j)]
    }

    /// Factor in place (partial pivoting). Returns the pivot vector.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let ku_eff = self.kl + self.ku; // fill widens the upper band
        let mut ipiv = vec![0usize; n];
        for col in 0..n {
            // Pivot search over the kl rows below the diagonal.
            let last = (col + kl).min(n - 1);
            let mut piv = col;
            let mut piv_val = self.data[self.idx(col, col)].abs();
            for r in (col + 1)..=last {
                let v = self.data[self.idx(r, col)].abs();
                if v > piv_val {
                    piv = r;
                    piv_val = v;
                }
            }
            if piv_val == 0.0 {
                return Err(Error::LinearSolveFailure(format!(
                    "banded LU: zero pivot at column {col}"
                )));
            }
            ipiv[col] = piv;
            if piv != col {
                // Swap rows col and piv across the active band.
                let jmax = (col + ku_eff).min(n - 1);
                for j in col..=jmax {
                    let a = self.idx(col, j);
                    let b = self.idx(piv, j);
                    self.data.swap(a, b);
                }
            }
            let diag = self.data[self.idx(col, col)];
            for r in (col + 1)..=last {
                let idx_rc = self.idx(r, col);
                let m = self.data[idx_rc] / diag;
                self.data[idx_rc] = m;
                if m != 0.0 {
                    let jmax = (col + ku_eff).min(n - 1);
                    for j in (col + 1)..=jmax {
                        let src = self.idx(col, j);
                        let dst = self.idx(r, j);
                        self.data[dst] -= m * self.data[src];
                    }
                }
            }
        }
        Ok(BandedLu { mat: self, ipiv })
    }
}

/// Factored banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu {
    mat: BandedMatrix,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Solve A x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.mat.n;
        let kl = self.mat.kl;
        let ku_eff = self.mat.kl + self.mat.ku;
        debug_assert_eq!(b.len(), n);
        // Forward substitution with row swaps.
        for col in 0..n {
            let piv = self.ipiv[col];
            if piv != col {
                b.swap(col, piv);
            }
            let last = (col + kl).min(n - 1);
            let bc = b[col];
            if bc != 0.0 {
                for r in (col + 1)..=last {
                    b[r] -= self.mat.data[self.mat.idx(r, col)] * bc;
                }
            }
        }
        // Back substitution.
        for col in (0..n).rev() {
            let mut acc = b[col];
            let jmax = (col + ku_eff).min(n - 1);
            for j in (col + 1)..=jmax {
                acc -= self.mat.data[self.mat.idx(col, j)] * b[j];
            }
            b[col] = acc / self.mat.data[self.mat.idx(col, col)];
        }
    }
}
