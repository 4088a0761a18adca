//! Symmetric Tardos fingerprinting codes: parameter optimisation, codebook
//! generation, scoring, collusion attacks and Monte Carlo validation.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

// `!(x > 0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attacks;
pub mod codec;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod params;
pub mod rng;
pub mod scalar;
pub mod scoring;

pub use attacks::{forge, verify_marking, Forgery, Strategy};
pub use codec::{gen_codebook, read_codebook, sample_bias, write_codebook, BitVector, Codebook};
pub use error::{Error, FormatError, Result};
pub use montecarlo::{wilson_interval, CampaignRow, ErrorEstimate, TrialConfig, TrialTally};
pub use params::Variant;
pub use scoring::{accuse, coalition_score, score_all, symbol_score, AccusationReport};
pub use scalar::Real;

pub type ParamSet = params::ParamSet<f64>;
pub type SchemeContext = params::SchemeContext<f64>;
pub type SchemeParams = params::SchemeParams<f64>;
pub type ConstraintSlack = params::ConstraintSlack<f64>;
pub type Candidate = params::Candidate<f64>;
pub type SweepRow = params::SweepRow<f64>;
pub type AsymptoticParams = params::AsymptoticParams<f64>;
