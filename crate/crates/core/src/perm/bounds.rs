use super::{permanent_ryser, SquareBitMatrix, EXACT_DIM_LIMIT};
use crate::error::Result;
use statrs::function::gamma::ln_gamma;

/// Natural log of the exact permanent; None when the permanent is zero.
///
/// The integer permanent is computed exactly first and converted to
/// log-domain only at the end.
pub fn log_permanent(m: &SquareBitMatrix) -> Result<Option<f64>> {
    m.check_dim(EXACT_DIM_LIMIT)?;
    Ok(permanent_ryser(m)?.ln())
}

/// Log-domain Bregman-Minc bound: sum over rows of log(d_i!)/d_i.
///
/// A zero-degree row contributes 0 to the bound; the permanent is then 0
/// and the bound is vacuous. For nonzero permanents,
/// log_permanent(m) <= bregman_minc_log_bound(m).
pub fn bregman_minc_log_bound(m: &SquareBitMatrix) -> f64 {
    let mut total = 0.0;
    for i in 0..m.n() {
        let d = m.row_degree(i) as f64;
        if d > 0.0 {
            total += ln_gamma(d + 1.0) / d;
        }
    }
    total
}
