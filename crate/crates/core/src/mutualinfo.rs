//! Law of the user-A mutual information `I_A = Σ_j log2(1 + λ_j)`.
//!
//! Two exact routes are provided and kept independent of each other:
//!
//! - **direct**: the delta (or step) constraint on `Σ log2(1+λ_j)` is moved
//!   into the upper limits of a nested integral of the joint density;
//! - **Laplace**: the determinant form of the moment generating function is
//!   inverted analytically, which turns the density into a convolution over
//!   per-eigenvalue rates `t_j = x_j - x_{j+1}`,
//!   `x_1 = I ≥ x_2 ≥ … ≥ x_n ≥ x_{n+1} = 0`, with `λ_j = 2^{t_j} - 1`:
//!
//!   `p(I) = n! C_n (ln 2)^n 2^I ∫ Δ(λ) Π_j λ_j^{nA-n} e^{-λ_j/a} f_j(λ_j) dx_n … dx_2`.
//!
//! Mean and variance come from the one- and two-point correlation
//! functions and feed the Gaussian approximation. Rates are in bits/s/Hz;
//! natural logarithms appear only inside the integrands.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::curve::MiMethod;
use crate::ensemble::{ChannelConfig, EnsembleContext};
use crate::error::{Error, Result};
use crate::montecarlo;
use crate::numerics::{
    det_scaled, integrate, integrate_nested, integrate_semi_infinite, log_gamma_int, try_find_root,
    Matrix,
};
use crate::specfun::TricomiSeries;

/// Mean and variance of `I_A` in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
}

impl MomentSummary {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance >= 0.0) || !mean.is_finite() || !variance.is_finite() {
            return Err(Error::Consistency(format!(
                "invalid moments: mean {mean}, variance {variance}"
            )));
        }
        Ok(MomentSummary { mean, variance })
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `½ erfc((μ - R) / sqrt(2σ²))`; a unit step at `μ` when `σ² = 0`.
    pub fn gaussian_outage(&self, rate: f64) -> f64 {
        if self.variance == 0.0 {
            return match rate.partial_cmp(&self.mean) {
                Some(std::cmp::Ordering::Less) => 0.0,
                Some(std::cmp::Ordering::Equal) => 0.5,
                _ => 1.0,
            };
        }
        0.5 * erfc((self.mean - rate) / (2.0 * self.variance).sqrt())
    }

    /// Normal density with these moments.
    pub fn gaussian_pdf(&self, x: f64) -> f64 {
        let v = self.variance;
        (-(x - self.mean).powi(2) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
    }
}

fn check_rate(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "rate must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

/// Exact route used when the caller does not pick one: direct integration
/// for `n <= 2`, the convolution form beyond.
pub fn default_exact_method(n: usize) -> MiMethod {
    if n <= 2 {
        MiMethod::DirectJpdf
    } else {
        MiMethod::LaplaceConvolution
    }
}

/// Density of `I_A` at `i` by integrating the joint eigenvalue density over
/// `λ_2..λ_n`, with `λ_1 = 2^i / Π_{j≥2}(1+λ_j) - 1` fixed by the delta
/// constraint and limits `u_μ = 2^i / Π_{j=2}^{μ-1}(1+λ_j) - 1`.
pub fn mi_pdf_direct(ctx: &EnsembleContext, i: f64) -> Result<f64> {
    check_rate(i)?;
    let n = ctx.n();
    let target = i.exp2();
    if n == 1 {
        let lambda = (i * LN_2).exp_m1();
        if lambda <= 0.0 {
            // boundary value: nonzero only when the weight has no λ power
            return Ok(if ctx.cfg().n_a == ctx.cfg().n {
                LN_2 * (ctx.log_cn().log_mag()).exp() * ctx.f(0, 0.0)
            } else {
                0.0
            });
        }
        return Ok(LN_2 * target * ctx.jpdf_unchecked(&[lambda]));
    }
    let limits: Vec<_> = (0..n - 1)
        .map(|_| move |outer: &[f64]| target / outer.iter().map(|l| 1.0 + l).product::<f64>() - 1.0)
        .collect();
    if n > 16 {
        return Err(Error::Domain(format!(
            "direct route supports n <= 16, got {n}"
        )));
    }
    let integrand = |rest: &[f64]| -> f64 {
        let denom: f64 = rest.iter().map(|l| 1.0 + l).product();
        let one_plus = target / denom;
        let l1 = one_plus - 1.0;
        if !(l1 > 0.0) {
            return 0.0;
        }
        let mut lam = [0.0; 16];
        lam[0] = l1;
        lam[1..n].copy_from_slice(rest);
        LN_2 * one_plus * ctx.jpdf_unchecked(&lam[..n])
    };
    integrate_nested(integrand, &limits, ctx.quadrature())
}

/// `P(I_A < R)` as an `n`-fold integral of the joint density over
/// `λ_μ < v_μ = 2^R / Π_{j<μ}(1+λ_j) - 1`.
pub fn outage_direct(ctx: &EnsembleContext, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if rate == 0.0 {
        return Ok(0.0);
    }
    let n = ctx.n();
    let target = rate.exp2();
    let limits: Vec<_> = (0..n)
        .map(|_| move |outer: &[f64]| target / outer.iter().map(|l| 1.0 + l).product::<f64>() - 1.0)
        .collect();
    let v = integrate_nested(
        |lam: &[f64]| ctx.jpdf_unchecked(lam),
        &limits,
        ctx.quadrature(),
    )?;
    Ok(v.clamp(0.0, 1.0))
}

/// Moment generating function `E[e^{-s I_A}] = n! C_n det[ψ_{j,k}(s)]` on
/// the real axis, with
/// `ψ_{j,k}(s) = ∫ (1+λ)^{-s/ln2} λ^{nA-n+k-1} e^{-λ/a} f_j(λ) dλ`.
pub fn mgf(ctx: &EnsembleContext, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "mgf argument must be finite and >= 0, got {s}"
        )));
    }
    let n = ctx.n();
    let a = ctx.cfg().a;
    let exponent = s / LN_2;
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let q = f64::from(ctx.power(k));
            let psi = integrate_semi_infinite(
                |l: f64| {
                    if l == 0.0 && q > 1.0 {
                        return 0.0;
                    }
                    let log = -exponent * l.ln_1p() + (q - 1.0) * l.ln() - l / a;
                    log.exp() * ctx.f(j, l)
                },
                ctx.quadrature(),
            )?;
            entries.push(psi);
        }
    }
    let m = Matrix::from_fn(n, |j, k| entries[j * n + k]);
    Ok((ctx.log_nfact_cn() * det_scaled(&m)).to_f64())
}

/// Closed-form density of `I_A` for a single receive antenna:
///
/// `p(I) = a^{-nA} b^{-nB} / Γ(nA) · ln2 · 2^I (2^I - 1)^{nA-1}
///        · exp(-(2^I - 1)/a) · U(nB, nA+nB+1; 1/b + (2^I - 1)/a)`.
pub fn mi_pdf_n1(ctx: &EnsembleContext, i: f64) -> Result<f64> {
    let cfg = ctx.cfg();
    if cfg.n != 1 {
        return Err(Error::Domain(format!(
            "single-antenna closed form called with n = {}",
            cfg.n
        )));
    }
    check_rate(i)?;
    let u = TricomiSeries::new(i64::from(cfg.n_b), i64::from(cfg.n_a + cfg.n_b + 1))?;
    let x = (i * LN_2).exp_m1();
    let na = f64::from(cfg.n_a);
    let power = if cfg.n_a == 1 {
        0.0
    } else if x <= 0.0 {
        return Ok(0.0);
    } else {
        (na - 1.0) * x.ln()
    };
    let log = -na * cfg.a.ln() - f64::from(cfg.n_b) * cfg.b.ln() - log_gamma_int(cfg.n_a)
        + LN_2.ln()
        + i * LN_2
        + power
        - x / cfg.a;
    Ok(log.exp() * u.eval(1.0 / cfg.b + x / cfg.a))
}

/// Convolution integrand for the Laplace route. `xs = [x_1, …, x_n]`,
/// non-increasing, `x_{n+1} = 0`.
fn laplace_integrand(ctx: &EnsembleContext, xs: &[f64], lambdas: &mut [f64]) -> f64 {
    let n = ctx.n();
    let mut log = ctx.log_nfact_cn().log_mag() + (n as f64) * LN_2.ln() + xs[0] * LN_2;
    for j in 0..n {
        let next = if j + 1 < n { xs[j + 1] } else { 0.0 };
        let t = xs[j] - next;
        let l = (t * LN_2).exp_m1();
        if !(l > 0.0) {
            return 0.0;
        }
        lambdas[j] = l;
        log += ctx.log_weight(l) + ctx.f(j, l).ln();
    }
    let mut vander = 1.0;
    for j in 0..n {
        for k in 0..j {
            vander *= lambdas[j] - lambdas[k];
        }
    }
    vander * log.exp()
}

/// Density of `I_A` from the analytic inverse Laplace transform, an
/// `(n-1)`-fold integral over `I ≥ x_2 ≥ … ≥ x_n ≥ 0`.
pub fn mi_pdf_laplace(ctx: &EnsembleContext, i: f64) -> Result<f64> {
    check_rate(i)?;
    let n = ctx.n();
    if n == 1 {
        return mi_pdf_n1(ctx, i);
    }
    if i == 0.0 {
        return Ok(0.0);
    }
    let limits: Vec<_> = (0..n - 1)
        .map(|_| move |outer: &[f64]| outer.last().copied().unwrap_or(i))
        .collect();
    let integrand = |rest: &[f64]| -> f64 {
        let mut xs = [0.0; 16];
        let mut lam = [0.0; 16];
        xs[0] = i;
        xs[1..n].copy_from_slice(rest);
        laplace_integrand(ctx, &xs[..n], &mut lam[..n])
    };
    if n > 16 {
        return Err(Error::Domain(format!(
            "convolution route supports n <= 16, got {n}"
        )));
    }
    Ok(integrate_nested(integrand, &limits, ctx.quadrature())?.max(0.0))
}

/// `P(I_A < R) = ∫_0^R p(x_1) dx_1` over the convolution form.
pub fn outage_laplace(ctx: &EnsembleContext, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if rate == 0.0 {
        return Ok(0.0);
    }
    let n = ctx.n();
    if n == 1 {
        let v = integrate(
            |x| mi_pdf_n1(ctx, x).unwrap_or(f64::NAN),
            0.0,
            rate,
            ctx.quadrature(),
        )?;
        return Ok(v.clamp(0.0, 1.0));
    }
    if n > 16 {
        return Err(Error::Domain(format!(
            "convolution route supports n <= 16, got {n}"
        )));
    }
    let limits: Vec<_> = (0..n)
        .map(|_| move |outer: &[f64]| outer.last().copied().unwrap_or(rate))
        .collect();
    let integrand = |xs: &[f64]| -> f64 {
        let mut lam = [0.0; 16];
        laplace_integrand(ctx, xs, &mut lam[..n])
    };
    Ok(integrate_nested(integrand, &limits, ctx.quadrature())?.clamp(0.0, 1.0))
}

/// Density of `I_A` by the chosen exact route (or the Gaussian approximation).
pub fn mi_pdf(ctx: &EnsembleContext, i: f64, method: MiMethod) -> Result<f64> {
    match method {
        MiMethod::DirectJpdf => mi_pdf_direct(ctx, i),
        MiMethod::LaplaceConvolution => mi_pdf_laplace(ctx, i),
        MiMethod::GaussianApprox => Ok(moments(ctx)?.gaussian_pdf(i)),
        MiMethod::MonteCarlo => Err(Error::Domain(
            "Monte Carlo densities are histograms; use the montecarlo module".into(),
        )),
    }
}

/// Outage probability by the chosen route. The Monte Carlo route draws the
/// default ensemble of [`montecarlo::DEFAULT_SEED`] / [`montecarlo::DEFAULT_COUNT`].
pub fn outage(ctx: &EnsembleContext, rate: f64, method: MiMethod) -> Result<f64> {
    match method {
        MiMethod::DirectJpdf => outage_direct(ctx, rate),
        MiMethod::LaplaceConvolution => outage_laplace(ctx, rate),
        MiMethod::GaussianApprox => gaussian_outage(ctx, rate),
        MiMethod::MonteCarlo => {
            check_rate(rate)?;
            let ens = montecarlo::sample_eigenvalues(
                ctx.cfg(),
                montecarlo::DEFAULT_SEED,
                montecarlo::DEFAULT_COUNT,
            )?;
            let mi = montecarlo::empirical_mi(&ens);
            Ok(montecarlo::empirical_cdf(&mi, &[rate])?[0])
        }
    }
}

/// `μ = ∫ R_1(λ) log2(1+λ) dλ`.
pub fn mi_mean(ctx: &EnsembleContext) -> Result<f64> {
    integrate_semi_infinite(
        |l| {
            if l <= 0.0 {
                return 0.0;
            }
            ctx.correlation_unchecked(&[l]) * l.ln_1p() / LN_2
        },
        ctx.quadrature(),
    )
}

/// `σ² = ∫ R_1 log2²(1+λ) + ∫∫ R_2 log2(1+λ_1) log2(1+λ_2) - μ²`.
pub fn mi_variance(ctx: &EnsembleContext) -> Result<f64> {
    Ok(moments(ctx)?.variance)
}

/// Mean and variance together (the mean is needed for the variance anyway).
pub fn moments(ctx: &EnsembleContext) -> Result<MomentSummary> {
    let spec = ctx.quadrature();
    let mean = mi_mean(ctx)?;
    let diag = integrate_semi_infinite(
        |l| {
            if l <= 0.0 {
                return 0.0;
            }
            ctx.correlation_unchecked(&[l]) * (l.ln_1p() / LN_2).powi(2)
        },
        spec,
    )?;
    let cross = if ctx.n() >= 2 {
        let inf = |_: &[f64]| f64::INFINITY;
        integrate_nested(
            |ls: &[f64]| {
                if ls[0] <= 0.0 || ls[1] <= 0.0 {
                    return 0.0;
                }
                ctx.correlation_unchecked(ls) * (ls[0].ln_1p() / LN_2) * (ls[1].ln_1p() / LN_2)
            },
            &[inf, inf],
            spec,
        )?
    } else {
        0.0
    };
    let variance = diag + cross - mean * mean;
    if variance < -1e-8 {
        return Err(Error::Consistency(format!(
            "negative variance {variance:e}"
        )));
    }
    MomentSummary::new(mean, variance.max(0.0))
}

/// Gaussian approximation of the outage probability.
pub fn gaussian_outage(ctx: &EnsembleContext, rate: f64) -> Result<f64> {
    Ok(moments(ctx)?.gaussian_outage(rate))
}

/// Rate `R` with `p_out(R) = ε`, by bracketing root finding on
/// `[0, μ + 10σ]` (the Gaussian route may extend the bracket below zero).
pub fn outage_rate(ctx: &EnsembleContext, eps: f64, method: MiMethod) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!(
            "outage level must lie in (0, 1), got {eps}"
        )));
    }
    match method {
        MiMethod::GaussianApprox => {
            let m = moments(ctx)?;
            Ok(gaussian_outage_rate(&m, eps))
        }
        MiMethod::MonteCarlo => {
            let ens = montecarlo::sample_eigenvalues(
                ctx.cfg(),
                montecarlo::DEFAULT_SEED,
                montecarlo::DEFAULT_COUNT,
            )?;
            montecarlo::empirical_quantile(&montecarlo::empirical_mi(&ens), eps)
        }
        exact => {
            let m = moments(ctx)?;
            let hi = m.mean + 10.0 * m.std_dev();
            try_find_root(|r| Ok(outage(ctx, r, exact)? - eps), 0.0, hi, 1e-6)
        }
    }
}

/// Root of the Gaussian outage curve at level `eps`.
pub fn gaussian_outage_rate(m: &MomentSummary, eps: f64) -> f64 {
    let sd = m.std_dev();
    if sd == 0.0 {
        return m.mean;
    }
    let lo = (m.mean - 10.0 * sd).min(0.0);
    let hi = m.mean + 10.0 * sd;
    crate::numerics::find_root_monotone(|r| m.gaussian_outage(r) - eps, lo, hi, 1e-10)
        .expect("Gaussian outage brackets every level in (0, 1) on μ ± 10σ")
}

/// Converts a per-factor power ratio in dB to its linear value.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One point of an outage-rate sweep over the user-A power ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a_db: f64,
    pub n: u32,
    pub rate: f64,
}

/// `R_out(ε)` for every `(n, a_dB)` pair, with the remaining channel
/// parameters taken from `cfg`. Rows are grouped by `n`, then ascending `a`.
pub fn outage_rate_sweep(
    cfg: &ChannelConfig,
    a_db: &[f64],
    ns: &[u32],
    eps: f64,
    method: MiMethod,
) -> Result<Vec<SweepRow>> {
    if a_db.is_empty() || ns.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a_db.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "sweep grid in dB must be strictly ascending".into(),
        ));
    }
    let mut rows = Vec::with_capacity(a_db.len() * ns.len());
    for &n in ns {
        for &db in a_db {
            let point = cfg.with_n(n)?.with_a(db_to_linear(db))?;
            let ctx = EnsembleContext::new(point)?;
            rows.push(SweepRow {
                a_db: db,
                n,
                rate: outage_rate(&ctx, eps, method)?,
            });
        }
    }
    Ok(rows)
}
