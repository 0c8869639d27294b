//! Dense direct solves, including the bordered systems that pin the mean of
//! fields living in the kernel of a singular operator.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn solve_dense(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let lu = a.lu();
    lu.solve(&DVector::from_column_slice(b))
        .map(|x| x.as_slice().to_vec())
        .ok_or_else(|| Error::LinearSolveFailure("dense LU: singular matrix".into()))
}

/// Solve the augmented system
///
/// ```text
/// [ A  c ] [x]   [ b ]
/// [ c^T 0] [l] = [ g ]
/// ```
///
/// appending the constraint `c^T x = g` as an extra row/column. Used for
/// operators that are singular exactly on constants.
pub fn solve_bordered(a: &DMatrix<f64>, c: &[f64], b: &[f64], g: f64) -> Result<Vec<f64>> {
    let m = a.nrows();
    debug_assert_eq!(c.len(), m);
    debug_assert_eq!(b.len(), m);
    let mut aug = DMatrix::zeros(m + 1, m + 1);
    aug.view_mut((0, 0), (m, m)).copy_from(a);
    for i in 0..m {
        aug[(i, m)] = c[i];
        aug[(m, i)] = c[i];
    }
    let mut rhs = Vec::with_capacity(m + 1);
    rhs.extend_from_slice(b);
    rhs.push(g);
    let mut x = solve_dense(aug, &rhs)?;
    x.truncate(m);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bordered_solve_pins_the_kernel() {
        // A = graph Laplacian of a 3-cycle (kernel = constants); the
        // constraint picks the representative with prescribed sum.
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let c = [1.0, 1.0, 1.0];
        // Mean-zero right-hand side keeps the system consistent.
        let b = [1.0, -1.0, 0.0];
        let x = solve_bordered(&a, &c, &b, 6.0).unwrap();
        let sum: f64 = x.iter().sum();
        assert!((sum - 6.0).abs() < 1e-12);
        // Residual A x + lambda c = b with lambda = 0 here.
        let ax = &a * DVector::from_column_slice(&x);
        for i in 0..3 {
            assert!((ax[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_solve_reports_singularity() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(solve_dense(a, &[1.0, 1.0]).is_err());
    }
}
