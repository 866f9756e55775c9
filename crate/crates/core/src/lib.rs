//! Numerical spectral analysis of the binary inflation family
//! ρ_m : 0 ↦ 01^m, 1 ↦ 0.
//!
//! Modules, bottom-up:
//! - [`zlambda`]: exact arithmetic in Z[λ];
//! - [`substitution`]: rules, matrices, fixed points, recodings;
//! - [`fourier`]: Fourier matrix B(k), its torus lift, A(k) and A_U(k);
//! - [`cocycle`]: matrix cocycles, Lyapunov exponents, mean log-norm tables;
//! - [`mahler`]: logarithmic Mahler measures of the q, r, s families;
//! - [`paircorr`]: pair correlations, renormalisation, periodograms;
//! - [`output`]: CSV/SVG emission and the CLI-facing commands.

// `!(x > 0.0)` is used throughout to reject NaN together with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cocycle;
pub mod error;
pub mod fourier;
pub mod mahler;
pub mod output;
pub mod paircorr;
mod par;
pub mod poly;
pub mod quadrature;
pub mod substitution;
pub mod zlambda;

pub use par::configure_threads_from_env;

pub use error::{Error, Result};
