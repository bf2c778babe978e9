//! # renyivar
//!
//! Relative entropy, Rényi divergences and their stationary Markov-chain rate
//! analogs on finite alphabets, together with the closed-form optimizers of
//! their variational characterizations in terms of relative entropy.
//!
//! Every extremum the library constructs is paired with a certifier
//! ([`var_iid::certify_inequality`], [`var_markov::certify_markov_inequality`], ...)
//! and with independent brute-force machinery in [`oracles`].
//!
//! ## Layout
//!
//! | module | contents |
//! |---|---|
//! | [`dist`] | [`Dist`], [`Alpha`], relative entropy, Rényi divergence |
//! | [`var_iid`] | i.i.d. objective, geometric-mixture optimizer, Gibbs tilt, exponential-integral formulas |
//! | [`spectral`] | nonnegative matrices, classes, Perron data, growth rate |
//! | [`markov`] | stationary pair measures, kernels, divergence rates |
//! | [`var_markov`] | eigenvector-twisted optimizers for the rate formulas |
//! | [`oracles`] | finite-n recursions, random search, random instance generators |
//!
//! States are indexed from 0. Logarithms are natural.

#![forbid(unsafe_code)]

pub mod dist;
mod error;
mod ext_real;
pub mod markov;
mod numeric;
pub mod oracles;
pub mod spectral;
pub mod tol;
pub mod var_iid;
pub mod var_markov;

pub use dist::{Alpha, Dist};
pub use error::{Error, Result};
pub use ext_real::ExtReal;
pub use markov::PairMeasure;
pub use spectral::NonnegMatrix;
pub use var_iid::{BoundedFn, CertResult, Regime, VarSolution};
pub use var_markov::{EdgeFn, MarkovVarSolution};

/// Crate version, echoed in certificates.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
