//! Operator means and relative operator entropies on real symmetric
//! positive-definite matrices, with a catalog of Loewner-order
//! inequalities and a seeded harness that checks them.
//!
//! - [`spd`]: eigendecomposition, functional calculus, Loewner comparison.
//! - [`means`]: weighted means, `S`, `S_p`, `T_p` and the Kubo–Ando transfer.
//! - [`scalar`]: scalar twins, pinned spot values, chain and sign checks.
//! - [`catalog`]: declarative inequality cases and their evaluation.
//! - [`sampler`]: deterministic generation of hypothesis-admissible pairs.
//! - [`harness`]: suites, probes, integral check and report aggregation.

pub mod catalog;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod means;
pub mod quadrature;
pub mod sampler;
pub mod scalar;
pub mod spd;

pub use catalog::{InequalityCase, MarginReport};
pub use error::{Error, Result};
pub use harness::{SuiteConfig, SuiteResult};
pub use matrix::Matrix;
pub use means::OperatorPair;
pub use sampler::SamplerConfig;
pub use scalar::{FnId, Params};
pub use spd::{LoewnerVerdict, SpdMatrix, SpectralDecomposition};
