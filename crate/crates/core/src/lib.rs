//! Fuzzy-number sequences, their Euler means, and numerical checks of a
//! Tauberian rate condition.
//!
//! * [`fuzzy`]: fuzzy numbers stored as α-cuts on a level
//!   grid, with addition, scalar multiplication and the sup-Hausdorff
//!   metric `D`.
//! * [`euler`]: Euler weights and means `t^p_n`, the ceiling composition
//!   `E_r(E_p) = E_q` and a simple limit detector.
//! * [`tauberian`]: the gap statistic `√n·D(u_{n−1}, u_n)` and a rate
//!   classifier.
//! * [`binomial`]: normal-approximation sandwich bounds on the binomial CDF
//!   with floating and exact rational oracles.
//! * [`experiment`]: the batch runner behind the `fuzzy-euler` binary.

#![allow(clippy::excessive_precision)]

pub mod binomial;
pub mod error;
pub mod euler;
pub mod experiment;
pub mod fuzzy;
pub mod special;
pub mod tauberian;

pub use error::{Error, Result};
pub use euler::{ceiling_composition, euler_mean, euler_transform, euler_weights, EulerParams};
pub use fuzzy::{crisp, metric_d, weighted_sum, FuzzyNumber, FuzzySequence};
pub use tauberian::{classify_rate, sequence_gap, series_gap, GapSeries, RateClass, RateVerdict};
