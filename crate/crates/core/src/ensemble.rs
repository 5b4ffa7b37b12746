//! Joint eigenvalue law of `W = (I_n + b H_B H_B†)^{-1} (a H_A H_A†)`.
//!
//! The eigenvalues form a biorthogonal ensemble
//!
//! `P(λ) = C_n Δ(λ) Π_i e^{-λ_i/a} λ_i^{nA-n} det[f_j(λ_k)]`,
//! `f_j(λ) = U(nB-j+1, nA+nB-j+2; 1/b + λ/a)`,
//!
//! whose moments `h_{j,k} = ∫ e^{-λ/a} λ^{nA-n+k-1} f_j(λ) dλ` fix the
//! normalization through `C_n^{-1} = n! det[h_{j,k}]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    det_scaled, log_factorial, log_gamma_int, Matrix, QuadratureSpec, ScaledValue,
};
use crate::specfun::TricomiSeries;

/// Antenna counts and per-antenna SNR factors of the two-user channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Receive antennas, i.e. the dimension of `W`.
    pub n: u32,
    #[serde(rename = "nA")]
    pub n_a: u32,
    #[serde(rename = "nB")]
    pub n_b: u32,
    /// `SNR_A / nA`.
    pub a: f64,
    /// `SNR_B / nB`.
    pub b: f64,
}

impl ChannelConfig {
    pub fn new(n: u32, n_a: u32, n_b: u32, a: f64, b: f64) -> Result<Self> {
        let cfg = ChannelConfig { n, n_a, n_b, a, b };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if self.n_a < self.n {
            return Err(Error::InvalidConfig(format!(
                "nA ({}) must be at least n ({})",
                self.n_a, self.n
            )));
        }
        // The interference Wishart term needs nB >= n for the eigenvalue law
        // (and every Tricomi index in it) to exist.
        if self.n_b < self.n {
            return Err(Error::InvalidConfig(format!(
                "nB ({}) must be at least n ({})",
                self.n_b, self.n
            )));
        }
        for (name, v) in [("a", self.a), ("b", self.b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Same antennas, different receive dimension.
    pub fn with_n(&self, n: u32) -> Result<Self> {
        Self::new(n, self.n_a, self.n_b, self.a, self.b)
    }

    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(self.n, self.n_a, self.n_b, a, self.b)
    }
}

/// `ln C_n` from the closed form
/// `C_n^{-1} = n! a^{n nA - n(n-1)/2} b^{n nB} Π_{j=1}^n Γ(j) Γ(nA-j+1)`.
pub fn log_norm_constant(cfg: &ChannelConfig) -> Result<ScaledValue> {
    cfg.validate()?;
    let n = cfg.n;
    let a_power = f64::from(n) * f64::from(cfg.n_a) - f64::from(n * (n - 1)) / 2.0;
    let b_power = f64::from(n) * f64::from(cfg.n_b);
    let gammas: f64 = (1..=n)
        .map(|j| log_gamma_int(j) + log_gamma_int(cfg.n_a - j + 1))
        .sum();
    let log_inv = log_factorial(n) + a_power * cfg.a.ln() + b_power * cfg.b.ln() + gammas;
    Ok(ScaledValue::from_ln(-log_inv))
}

/// Precomputed state shared by every density of one channel configuration.
#[derive(Debug, Clone)]
pub struct EnsembleContext {
    cfg: ChannelConfig,
    quadrature: QuadratureSpec,
    log_cn: ScaledValue,
    h: Matrix,
    // shifted[j][s] = U(nB-j, nA+nB-j+1-s; .) for 0-based j, s = 0..=nA.
    // s = 0 is f_{j+1}; s = r+1 is the kernel of ∫ e^{-t} t^r U(.; c+t) dt.
    shifted: Vec<Vec<TricomiSeries>>,
}

impl EnsembleContext {
    pub fn new(cfg: ChannelConfig) -> Result<Self> {
        cfg.validate()?;
        let quadrature = QuadratureSpec::default()
            .with_tolerances(1e-10, 1e-14)
            .with_exponential_tail(cfg.a);
        let n = cfg.n as usize;
        let shifted = (0..n)
            .map(|j| {
                let alpha = i64::from(cfg.n_b) - j as i64;
                let gamma = i64::from(cfg.n_a) + i64::from(cfg.n_b) - j as i64 + 1;
                (0..=i64::from(cfg.n_a))
                    .map(|s| TricomiSeries::new(alpha, gamma - s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ctx = EnsembleContext {
            cfg,
            quadrature,
            log_cn: log_norm_constant(&cfg)?,
            h: Matrix::zeros(n),
            shifted,
        };
        ctx.h = Matrix::from_fn(n, |j, k| ctx.moment(j, ctx.power(k)));
        Ok(ctx)
    }

    /// Replaces the quadrature settings used by every integral built on
    /// this context.
    pub fn with_quadrature(mut self, spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        self.quadrature = spec;
        Ok(self)
    }

    pub fn cfg(&self) -> &ChannelConfig {
        &self.cfg
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    pub fn n(&self) -> usize {
        self.cfg.n as usize
    }

    pub fn log_cn(&self) -> ScaledValue {
        self.log_cn
    }

    /// `n! C_n`, the prefactor of every determinant formula.
    pub fn log_nfact_cn(&self) -> ScaledValue {
        self.log_cn * ScaledValue::from_ln(log_factorial(self.cfg.n))
    }

    pub fn h_matrix(&self) -> &Matrix {
        &self.h
    }

    /// `n! C_n det[h]`, which equals one by construction of `C_n`.
    pub fn normalization_identity(&self) -> f64 {
        (self.log_nfact_cn() * det_scaled(&self.h)).to_f64()
    }

    /// Exponent `q = nA - n + k` for 0-based column `k`; the moment kernel is
    /// `λ^{q-1}`.
    pub(crate) fn power(&self, k: usize) -> u32 {
        self.cfg.n_a - self.cfg.n + k as u32 + 1
    }

    /// `f_{j+1}(λ)` for 0-based `j`.
    pub fn f(&self, j: usize, lambda: f64) -> f64 {
        self.shifted[j][0].eval(1.0 / self.cfg.b + lambda / self.cfg.a)
    }

    /// `ln(e^{-λ/a} λ^{nA-n})`.
    pub(crate) fn log_weight(&self, lambda: f64) -> f64 {
        let p = self.cfg.n_a - self.cfg.n;
        let poly = if p == 0 {
            0.0
        } else {
            f64::from(p) * lambda.ln()
        };
        -lambda / self.cfg.a + poly
    }

    /// `∫_0^∞ e^{-λ/a} λ^{q-1} f_{j+1}(λ) dλ = a^q Γ(q) U(α_j, γ_j - q; 1/b)`.
    pub(crate) fn moment(&self, j: usize, q: u32) -> f64 {
        let a = self.cfg.a;
        let log = f64::from(q) * a.ln() + log_gamma_int(q);
        log.exp() * self.shifted[j][q as usize].eval(1.0 / self.cfg.b)
    }

    /// Upper incomplete moment `∫_x^∞ e^{-λ/a} λ^{q-1} f_{j+1}(λ) dλ` for
    /// `1 <= q <= nA`, by shifting `λ = x + μ` and expanding
    /// `(x + μ)^{q-1}` binomially:
    ///
    /// `e^{-x/a} Σ_{r=0}^{q-1} Γ(q)/Γ(q-r) a^{r+1} x^{q-r-1} U(α_j, γ_j-r-1; 1/b + x/a)`.
    pub(crate) fn upper_moment(&self, j: usize, q: u32, x: f64) -> f64 {
        debug_assert!(q >= 1 && q <= self.cfg.n_a);
        debug_assert!(x >= 0.0);
        if x == 0.0 {
            return self.moment(j, q);
        }
        let a = self.cfg.a;
        let arg = 1.0 / self.cfg.b + x / a;
        let (la, lx) = (a.ln(), x.ln());
        let lg_q = log_gamma_int(q);
        let mut sum = 0.0;
        for r in 0..q {
            let log =
                lg_q - log_gamma_int(q - r) + f64::from(r + 1) * la + f64::from(q - r - 1) * lx
                    - x / a;
            sum += log.exp() * self.shifted[j][r as usize + 1].eval(arg);
        }
        sum
    }

    fn check_lambdas(lambdas: &[f64]) -> Result<()> {
        if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::Domain(format!(
                "eigenvalues must be finite and positive, got {bad}"
            )));
        }
        Ok(())
    }

    fn has_coincidence(lambdas: &[f64]) -> bool {
        lambdas
            .iter()
            .enumerate()
            .any(|(i, x)| lambdas[i + 1..].iter().any(|y| y == x))
    }

    /// `h_{j,k}` for 1-based indices.
    pub fn h_entry(&self, j: usize, k: usize) -> Result<f64> {
        let n = self.n();
        if !(1..=n).contains(&j) || !(1..=n).contains(&k) {
            return Err(Error::Index(format!("h index ({j}, {k}) outside 1..={n}")));
        }
        Ok(self.h[(j - 1, k - 1)])
    }

    /// Joint eigenvalue density at `lambdas` (length `n`, unordered).
    pub fn jpdf(&self, lambdas: &[f64]) -> Result<f64> {
        let n = self.n();
        if lambdas.len() != n {
            return Err(Error::Domain(format!(
                "expected {n} eigenvalues, got {}",
                lambdas.len()
            )));
        }
        Self::check_lambdas(lambdas)?;
        Ok(self.jpdf_unchecked(lambdas))
    }

    /// [`jpdf`](Self::jpdf) without argument validation.
    pub(crate) fn jpdf_unchecked(&self, lambdas: &[f64]) -> f64 {
        let n = self.n();
        if Self::has_coincidence(lambdas) {
            return 0.0;
        }
        let mut vander_sign = 1.0;
        let mut log = self.log_cn.log_mag();
        for (k, lk) in lambdas.iter().enumerate() {
            log += self.log_weight(*lk);
            for lj in &lambdas[k + 1..] {
                let d = lj - lk;
                vander_sign *= d.signum();
                log += d.abs().ln();
            }
        }
        let fmat = Matrix::from_fn(n, |j, k| self.f(j, lambdas[k]));
        let det = det_scaled(&fmat);
        let sign = vander_sign * f64::from(det.sign());
        if sign <= 0.0 {
            return 0.0;
        }
        (log + det.log_mag()).exp()
    }

    /// `r`-point correlation function `R_r(λ_1..λ_r)`, `r = lambdas.len()`,
    /// evaluated as one bordered `(n+r)×(n+r)` determinant
    /// `(-1)^r n! C_n Π e^{-λ_l/a} λ_l^{nA-n} det[[0, λ_l^{k-1}], [f_j(λ_l), h]]`.
    pub fn correlation_r(&self, lambdas: &[f64]) -> Result<f64> {
        let n = self.n();
        let r = lambdas.len();
        if r == 0 || r > n {
            return Err(Error::Index(format!(
                "correlation order {r} outside 1..={n}"
            )));
        }
        Self::check_lambdas(lambdas)?;
        Ok(self.correlation_unchecked(lambdas))
    }

    pub(crate) fn correlation_unchecked(&self, lambdas: &[f64]) -> f64 {
        let n = self.n();
        let r = lambdas.len();
        if Self::has_coincidence(lambdas) {
            return 0.0;
        }
        let dim = n + r;
        let mut m = Matrix::zeros(dim);
        for (l, lam) in lambdas.iter().enumerate() {
            let mut p = 1.0;
            for k in 0..n {
                m[(l, r + k)] = p;
                p *= lam;
            }
        }
        for j in 0..n {
            for (l, lam) in lambdas.iter().enumerate() {
                m[(r + j, l)] = self.f(j, *lam);
            }
            for k in 0..n {
                m[(r + j, r + k)] = self.h[(j, k)];
            }
        }
        let det = det_scaled(&m);
        let sign = if r.is_multiple_of(2) { 1 } else { -1 } * i32::from(det.sign());
        if sign <= 0 {
            return 0.0;
        }
        let weights: f64 = lambdas.iter().map(|l| self.log_weight(*l)).sum();
        (self.log_nfact_cn().log_mag() + weights + det.log_mag()).exp()
    }

    /// Single-eigenvalue marginal density `R_1(λ) / n`.
    pub fn marginal_density(&self, lambda: f64) -> Result<f64> {
        Ok(self.correlation_r(&[lambda])? / self.n() as f64)
    }

    /// Two-eigenvalue joint density `R_2 / (n (n-1))`; needs `n >= 2`.
    pub fn pair_density(&self, l1: f64, l2: f64) -> Result<f64> {
        let n = self.n() as f64;
        Ok(self.correlation_r(&[l1, l2])? / (n * (n - 1.0)))
    }
}
