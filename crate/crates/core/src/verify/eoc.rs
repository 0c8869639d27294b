//! Estimated order of convergence: the local slope of log(error) against
//! log(h).

use crate::error::{Error, Result};

/// EOC sequence aligned with the levels: entry 0 is 0 by convention, entry
/// i+1 holds the slope from level i into level i+1.
pub fn eoc(errors: &[f64], h_values: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != h_values.len() || errors.len() < 2 {
        return Err(Error::InvalidParameter(
            "eoc needs matching error/h lists of length >= 2".into(),
        ));
    }
    if errors.iter().chain(h_values).any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter(
            "eoc needs strictly positive errors and mesh sizes".into(),
        ));
    }
    let mut out = vec![0.0; errors.len()];
    for i in 0..errors.len() - 1 {
        out[i + 1] = (errors[i + 1] / errors[i]).ln() / (h_values[i + 1] / h_values[i]).ln();
    }
    Ok(out)
}

/// Mean of the last two slopes, the quantity tied to acceptance thresholds.
pub fn trailing_two_average(eocs: &[f64]) -> f64 {
    let n = eocs.len();
    assert!(n >= 3, "need at least two slopes");
    0.5 * (eocs[n - 1] + eocs[n - 2])
}
