//! Exact eigenvalue statistics of the complex Wishart quotient ensemble
//! `W = (I + b H_B H_B†)^{-1} (a H_A H_A†)` and the resulting law of the
//! user-A mutual information `I_A = Σ log2(1 + λ_j)` in a two-user MIMO
//! multiple-access channel with Rayleigh fading.
//!
//! The crate is layered bottom-up:
//!
//! - [`numerics`]: log-space values, scaled determinants, adaptive quadrature.
//! - [`specfun`]: the Tricomi function `U(α, γ; x)` for integer parameters.
//! - [`ensemble`]: joint eigenvalue density and correlation functions.
//! - [`extremes`]: gap probabilities and extreme-eigenvalue densities.
//! - [`mutualinfo`]: density, outage probability and moments of `I_A`.
//! - [`montecarlo`]: a sampling oracle built from the matrix definition.
//! - [`curve`]: tabulated curves and their CSV/JSON encodings.

pub mod curve;
pub mod ensemble;
pub mod error;
pub mod extremes;
pub mod montecarlo;
pub mod mutualinfo;
pub mod numerics;
pub mod specfun;

pub use ensemble::{ChannelConfig, EnsembleContext};
pub use error::{Error, Result};
pub use numerics::{QuadratureSpec, ScaledValue};
