//! Oblivious transfer and secure two-party function computation over binary
//! erasure sources and channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`bits`] and [`function`]: bit matrices, bit strings, function tables.
//! - [`erasure`] and [`randomness`]: the erasure resource and labelled,
//!   replayable randomness streams.
//! - [`engine`]: two-party sessions, transcripts and party views.
//! - [`swot`], [`boot`], [`gsfc`]: the three protocols.
//! - [`analysis`]: closed-form rates, capacity bounds, abort probabilities,
//!   parameter search and the exact privacy auditors.
//! - [`sim`]: the seeded Monte Carlo harness.
//!
//! Rate arithmetic is generic over [`RateScalar`], so the same formulas can be
//! evaluated in `f64`, `f32` or exactly over the rationals ([`ExactRate`]).

pub mod analysis;
pub mod bits;
pub mod boot;
pub mod engine;
pub mod erasure;
mod error;
pub mod function;
pub mod gsfc;
pub mod randomness;
mod scalar;
pub mod sim;
pub mod swot;

pub use error::{Error, Result};
pub use scalar::RateScalar;

pub use bits::{Bit, BitMatrix, BitString};
pub use erasure::{ErasureParams, ErasureSequence, ErasureSymbol, IndexPartition};
pub use function::{FunctionOutputs, FunctionSpec, SourceSamples};
pub use randomness::{Coins, SeededCoins, StreamId, StreamLabel};

/// Exact rational rates, used wherever a closed form must hold with equality.
pub type ExactRate = num_rational::Ratio<i64>;

/// Rate report evaluated in double precision.
pub type RateReport64 = analysis::rates::RateReport<f64>;
/// Rate report evaluated exactly.
pub type ExactRateReport = analysis::rates::RateReport<ExactRate>;
/// Joint distribution in double precision.
pub type JointDistribution64 = analysis::info::JointDistribution<f64>;
