//! Shared numerical substrate: log-space values, scaled determinants,
//! adaptive quadrature and bracketing root finding.

mod det;
mod quadrature;
mod roots;
mod scaled;

pub use det::{det_scaled, det_scaled_entries, Matrix};
pub use quadrature::{
    integrate, integrate_estimate, integrate_nested, integrate_semi_infinite, Estimate,
    QuadratureSpec, UpperLimit,
};
pub use roots::{find_root_monotone, try_find_root};
pub use scaled::ScaledValue;

use crate::error::{Error, Result};

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "log_gamma requires a finite x > 0, got {x}"
        )));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `ln Γ(k)` for a positive integer, as an exact sum of logarithms for
/// small `k`.
pub(crate) fn log_gamma_int(k: u32) -> f64 {
    debug_assert!(k >= 1);
    if k <= 64 {
        (2..k).map(|i| f64::from(i).ln()).sum()
    } else {
        statrs::function::gamma::ln_gamma(f64::from(k))
    }
}

/// `ln n!`.
pub(crate) fn log_factorial(n: u32) -> f64 {
    log_gamma_int(n + 1)
}
