//! Confluent hypergeometric function of the second kind, `U(α, γ; x)`,
//! for positive integer `α` and integer `γ ≥ α + 1`.
//!
//! In that family the Euler integral
//! `U = Γ(α)^{-1} ∫_0^∞ e^{-xt} t^{α-1} (1+t)^{γ-α-1} dt`
//! has a polynomial factor `(1+t)^N`, `N = γ - α - 1`, and integrates term
//! by term to the finite sum
//!
//! `U(α, γ; x) = Σ_{m=0}^{N} C(N, m) (α)_m x^{-(α+m)}`.
//!
//! All terms are positive, so the sum has no cancellation.

use crate::error::{Error, Result};
use crate::numerics::{log_gamma_int, ScaledValue};

/// Validated arguments of [`tricomi_u`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TricomiParams {
    alpha: u32,
    gamma: u32,
    x: f64,
}

impl TricomiParams {
    pub fn new(alpha: i64, gamma: i64, x: f64) -> Result<Self> {
        if alpha < 1 {
            return Err(Error::Domain(format!(
                "Tricomi U needs alpha >= 1, got {alpha}"
            )));
        }
        if gamma - alpha - 1 < 0 {
            return Err(Error::Domain(format!(
                "Tricomi U needs gamma - alpha - 1 >= 0, got alpha {alpha}, gamma {gamma}"
            )));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!(
                "Tricomi U needs a finite x > 0, got {x}"
            )));
        }
        let to_u32 = |v: i64| {
            u32::try_from(v).map_err(|_| Error::Domain(format!("parameter {v} too large")))
        };
        Ok(TricomiParams {
            alpha: to_u32(alpha)?,
            gamma: to_u32(gamma)?,
            x,
        })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

/// `U(α, γ; x)`.
pub fn tricomi_u(p: &TricomiParams) -> f64 {
    TricomiSeries::new_unchecked(p.alpha, p.gamma).eval(p.x)
}

/// `U(α, γ; x)` as a log-space value (always positive).
pub fn tricomi_u_log(p: &TricomiParams) -> ScaledValue {
    TricomiSeries::new_unchecked(p.alpha, p.gamma).eval_log(p.x)
}

/// Precomputed coefficients of `U(α, γ; ·)` for fixed integer parameters,
/// reused across many arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct TricomiSeries {
    alpha: u32,
    gamma: u32,
    // ln(C(N, m) (α)_m), m = 0..=N
    log_coeffs: Vec<f64>,
    coeffs: Vec<f64>,
}

impl TricomiSeries {
    pub fn new(alpha: i64, gamma: i64) -> Result<Self> {
        let p = TricomiParams::new(alpha, gamma, 1.0)?;
        Ok(Self::new_unchecked(p.alpha, p.gamma))
    }

    fn new_unchecked(alpha: u32, gamma: u32) -> Self {
        let n = gamma - alpha - 1;
        let log_binom =
            |m: u32| log_gamma_int(n + 1) - log_gamma_int(m + 1) - log_gamma_int(n - m + 1);
        let log_coeffs: Vec<f64> = (0..=n)
            .map(|m| log_binom(m) + log_gamma_int(alpha + m) - log_gamma_int(alpha))
            .collect();
        let coeffs = log_coeffs.iter().map(|l| l.exp()).collect();
        TricomiSeries {
            alpha,
            gamma,
            log_coeffs,
            coeffs,
        }
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    /// `U(α, γ; x)` for `x > 0`. Falls back to the log-space sum when the
    /// terms would leave the `f64` range.
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x > 0.0);
        let lx = x.ln();
        let hi = self.log_coeffs[0] - f64::from(self.alpha) * lx;
        let lo = self.log_coeffs[self.log_coeffs.len() - 1] - f64::from(self.gamma - 1) * lx;
        if hi.abs().max(lo.abs()) > 600.0 {
            return self.eval_log(x).to_f64();
        }
        let y = 1.0 / x;
        let mut power = x.powi(-(self.alpha as i32));
        let mut sum = 0.0;
        let mut comp = 0.0;
        for c in &self.coeffs {
            let t = c * power - comp;
            let s = sum + t;
            comp = (s - sum) - t;
            sum = s;
            power *= y;
        }
        sum
    }

    pub fn eval_log(&self, x: f64) -> ScaledValue {
        debug_assert!(x > 0.0);
        let lx = x.ln();
        let logs = self
            .log_coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c - (f64::from(self.alpha) + m as f64) * lx);
        let max = logs.clone().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for l in logs {
            let t = (l - max).exp() - comp;
            let s = sum + t;
            comp = (s - sum) - t;
            sum = s;
        }
        ScaledValue::from_ln(max + sum.ln())
    }
}
