//! Locally differentially private estimation of a Gaussian mean.
//!
//! The sign mechanism releases `sgn(X − c)` through randomized response.
//! Centred at the true mean it maximizes the Fisher information among all
//! ε-LDP channels for `ε ≤ 1.04`; the [`lp`] module checks this
//! computationally through the staircase linear program and its dual.
//! [`estimators`] turns the mechanism into one-, two- and three-stage
//! estimators, and [`sim`] is the seeded Monte Carlo harness used to
//! measure their scaled mean squared error.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod estimators;
pub mod lp;
pub mod mechanisms;
pub mod numerics;
pub mod quantized;
pub mod sim;

pub use error::{Error, Result};
pub use mechanisms::{MechanismMatrix, PrivacyParams, SanitizedBit};
pub use quantized::{FisherInfo, QuantizedModel};
