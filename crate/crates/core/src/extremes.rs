//! Gap probabilities and extreme-eigenvalue laws.
//!
//! By Andréief's identity the probability of finding no eigenvalue in
//! `(0, x)` (resp. `(x, ∞)`) is `n! C_n det[χ_{j,k}]` with `χ` the moment
//! integral restricted to the complementary interval. Differentiating the
//! determinant row by row gives the densities of `λ_min` and `λ_max`.

use crate::ensemble::EnsembleContext;
use crate::error::{Error, Result};
use crate::numerics::{det_scaled, find_root_monotone, Matrix};

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::Domain(format!(
            "gap argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

fn check_index(ctx: &EnsembleContext, j: usize, k: usize) -> Result<()> {
    let n = ctx.n();
    if !(1..=n).contains(&j) || !(1..=n).contains(&k) {
        return Err(Error::Index(format!(
            "kernel index ({j}, {k}) outside 1..={n}"
        )));
    }
    Ok(())
}

/// `χ_{j,k}((0,x)) = ∫_x^∞ e^{-λ/a} λ^{nA-n+k-1} f_j(λ) dλ` (1-based `j`, `k`).
pub fn chi_lower(ctx: &EnsembleContext, j: usize, k: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    check_index(ctx, j, k)?;
    Ok(lower_entry(ctx, j - 1, k - 1, x))
}

/// `χ_{j,k}((x,∞)) = h_{j,k} - χ_{j,k}((0,x))`.
pub fn chi_upper(ctx: &EnsembleContext, j: usize, k: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    check_index(ctx, j, k)?;
    Ok(upper_entry(ctx, j - 1, k - 1, x))
}

fn lower_entry(ctx: &EnsembleContext, j: usize, k: usize, x: f64) -> f64 {
    ctx.upper_moment(j, ctx.power(k), x)
}

fn upper_entry(ctx: &EnsembleContext, j: usize, k: usize, x: f64) -> f64 {
    let h = ctx.h_matrix()[(j, k)];
    let v = h - lower_entry(ctx, j, k, x);
    // cancellation noise near x = 0
    if v < 0.0 && v > -1e-12 * h {
        0.0
    } else {
        v
    }
}

/// Derivative row `e^{-x/a} x^{nA-n+k-1} f_j(x)` shared by both densities.
fn density_row(ctx: &EnsembleContext, j: usize, x: f64) -> Vec<f64> {
    let cfg = ctx.cfg();
    let f = ctx.f(j, x);
    (0..ctx.n())
        .map(|k| {
            let q = ctx.power(k);
            let log = -x / cfg.a + f64::from(q - 1) * x.ln();
            log.exp() * f
        })
        .collect()
}

fn prefactor_det(ctx: &EnsembleContext, m: &Matrix) -> f64 {
    (ctx.log_nfact_cn() * det_scaled(m)).to_f64()
}

/// `E((0,x))`: probability that every eigenvalue is at least `x`, i.e. the
/// survival function of `λ_min`.
pub fn gap_lower(ctx: &EnsembleContext, x: f64) -> Result<f64> {
    check_x(x)?;
    let m = Matrix::from_fn(ctx.n(), |j, k| lower_entry(ctx, j, k, x));
    Ok(prefactor_det(ctx, &m).clamp(0.0, 1.0))
}

/// `E((x,∞))`: probability that every eigenvalue is at most `x`, i.e. the
/// CDF of `λ_max`.
pub fn gap_upper(ctx: &EnsembleContext, x: f64) -> Result<f64> {
    check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let m = Matrix::from_fn(ctx.n(), |j, k| upper_entry(ctx, j, k, x));
    Ok(prefactor_det(ctx, &m).clamp(0.0, 1.0))
}

fn row_replacement_sum(ctx: &EnsembleContext, x: f64, base: &Matrix) -> f64 {
    (0..ctx.n())
        .map(|i| {
            let mut m = base.clone();
            m.set_row(i, &density_row(ctx, i, x));
            prefactor_det(ctx, &m)
        })
        .sum()
}

/// Density of the smallest eigenvalue, `-dE((0,x))/dx`.
pub fn pdf_min(ctx: &EnsembleContext, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "pdf_min needs a finite x > 0, got {x}"
        )));
    }
    let base = Matrix::from_fn(ctx.n(), |j, k| lower_entry(ctx, j, k, x));
    Ok(row_replacement_sum(ctx, x, &base).max(0.0))
}

/// Density of the largest eigenvalue, `dE((x,∞))/dx`.
pub fn pdf_max(ctx: &EnsembleContext, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "pdf_max needs a finite x > 0, got {x}"
        )));
    }
    let base = Matrix::from_fn(ctx.n(), |j, k| upper_entry(ctx, j, k, x));
    Ok(row_replacement_sum(ctx, x, &base).max(0.0))
}

/// Point `x*` where the CDF of `λ_max` reaches `1 - 1e-6`.
pub fn upper_support_edge(ctx: &EnsembleContext) -> Result<f64> {
    let target = 1.0 - 1e-6;
    let a = ctx.cfg().a;
    let mut hi = a * f64::from(ctx.cfg().n_a).max(1.0) * 10.0;
    while gap_upper(ctx, hi)? < target {
        hi *= 2.0;
        if hi > 1e12 * a {
            return Err(Error::Consistency(
                "largest-eigenvalue CDF never reaches 1".into(),
            ));
        }
    }
    let lg = |t: f64| {
        gap_upper(ctx, t.exp())
            .map(|v| v - target)
            .unwrap_or(f64::NAN)
    };
    let root = find_root_monotone(lg, (1e-3 * a).ln(), hi.ln(), 1e-10)?;
    Ok(root.exp())
}

/// Default abscissae for extreme-eigenvalue curves: 200 log-spaced points
/// over `[1e-3 a, x*]`.
pub fn default_grid(ctx: &EnsembleContext) -> Result<Vec<f64>> {
    let lo = 1e-3 * ctx.cfg().a;
    let hi = upper_support_edge(ctx)?;
    Ok(log_grid(lo, hi, 200))
}

pub(crate) fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp())
        .collect()
}
