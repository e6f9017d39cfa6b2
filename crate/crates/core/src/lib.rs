//! Sparse signal recovery by iteratively reweighted l1 minimization.
//!
//! The crate bundles everything needed to run reweighted-l1 experiments at
//! desk scale: deterministic problem generators, dense inner solvers for the
//! four weighted convex programs (equality-constrained l1, quadratically
//! constrained l1, the Dantzig selector, and residual-l1 decoding), the
//! generic reweighting driver, weighted total-variation recovery from
//! partial Fourier data, l1-analysis recovery in redundant Gabor frames,
//! and brute-force l0 oracles for certifying solutions on tiny instances.

pub mod analysis;
pub mod convex;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod reweight;
pub mod rng;
pub mod tv;

mod bpdn;

pub use error::{Error, Result};
