//! Ground-state quantum Fisher information from quasi-adiabatic energy
//! fluctuations.
//!
//! A parameter of a gapped Hamiltonian is ramped quadratically (zero initial
//! rate, final rate `v`) into a target point. The final-time expectation of
//! `(H − E₀)²` is `F v²/4 + O(v³)`, where `F` is the quantum Fisher
//! information of the target ground state. This crate simulates that
//! protocol and checks it against spectral and analytic references.

// `!(x > 0.0)` style tests also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod format;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod propagator;
pub mod protocol;

pub use error::{Error, Result};
