//! Wasserstein-distance valuation and procurement of differentially-private data.
//!
//! The crate is `no_std` (with `alloc`) and purely computational. It covers
//!
//! * synthetic one-dimensional populations, Euclidean aggregation and local
//!   DP noise ([`distributions`]),
//! * the 1-Wasserstein distance and the PDF/CDF based alternatives it is
//!   compared against ([`distances`]),
//! * individual WD composition with DP, Lipschitz and Hoeffding bounds
//!   ([`valuation`]),
//! * task losses for parameter estimation ([`tasks`]),
//! * Myerson-style point-wise procurement mechanisms, their MISOCP
//!   reformulation and monotonicity checks ([`mechanisms`]),
//! * the comparison mechanisms: central, random, SMQ, greedy knapsack and
//!   Shapley-based cooperative games ([`benchmarks`]).
//!
//! IO, configuration and the experiment driver live in the `wdmarket-sim`
//! companion crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod benchmarks;
pub mod distances;
pub mod distributions;
pub mod mechanisms;
pub mod rng;
pub mod special;
pub mod stats;
pub mod tasks;
pub mod valuation;

mod error;

pub use error::{Error, Result};
