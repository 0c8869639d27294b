//! Numerical kernel ranks of assembled operators via singular values.

use nalgebra::DMatrix;

/// Relative singular-value threshold below which a direction counts as
/// kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-10;

/// Nullity of a square matrix: singular values below
/// `KERNEL_THRESHOLD * sigma_max`.
pub fn kernel_rank(m: &DMatrix<f64>) -> usize {
    kernel_info(m).0
}

/// Nullity of an assembled operator.
pub fn operator_kernel_rank(op: &crate::ops::assembly::DgOperator) -> usize {
    kernel_rank(&op.to_dense())
}

/// Nullity together with a unit right-singular vector of the smallest
/// singular value (a kernel representative when the nullity is positive).
pub fn kernel_info(m: &DMatrix<f64>) -> (usize, Vec<f64>) {
    let svd = m.clone().svd(false, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let tol = KERNEL_THRESHOLD * smax;
    let nullity = sv.iter().filter(|&&s| s <= tol).count();
    let mut min_idx = 0;
    for (i, &s) in sv.iter().enumerate() {
        if s < sv[min_idx] {
            min_idx = i;
        }
    }
    let vt = svd.v_t.expect("requested V^T");
    let null_vec: Vec<f64> = vt.row(min_idx).iter().cloned().collect();
    (nullity, null_vec)
}

/// How far a coefficient vector is from representing a constant field:
/// `min over c of |f - c|_L2^2 / |f|_L2^2`.
pub fn constant_defect(f: &crate::field::DgFunction) -> f64 {
    let norm_sq = f.inner_product_unchecked(f);
    if norm_sq == 0.0 {
        return 0.0;
    }
    let mean = f.mean();
    let best_const_sq = mean * mean * f.mesh().domain_length();
    ((norm_sq - best_const_sq) / norm_sq).max(0.0)
}
