//! Interactive PAC-verification of Boolean-function learners at desk scale.
//!
//! A verifier with limited oracle access checks an untrusted prover's
//! hypothesis. Functions are explicit truth tables, so every estimator can
//! be compared against exact ground truth.

pub mod boolfn;
pub mod erm;
pub mod error;
pub mod f2;
pub mod fourier;
pub mod nw;
pub mod prover;
pub mod rng;
pub mod stats;
pub mod tolerant;
pub mod transform;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{Counters, Verdict};
