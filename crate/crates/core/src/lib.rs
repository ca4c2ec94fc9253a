//! Money-request game families, equilibrium benchmarks, prompt-defined
//! predictive agents and the likelihood-ratio machinery used to compare them
//! on human response data.
//!
//! The crate is organised around six modules:
//!
//! * [`games`] enumerates, deduplicates, renders and samples the parametric
//!   family of symmetric two-player money-request games.
//! * [`equilibria`] enumerates all Nash equilibria exactly and selects one
//!   symmetric equilibrium per game.
//! * [`agents`] elicits response distributions from personas, mechanical
//!   level-k reasoners, mixtures and recorded fixtures.
//! * [`optimize`] fits agent populations to human data.
//! * [`stats`] compares two predictive models with smoothed log-likelihood
//!   ratios and attaches sampling error.
//! * [`pipeline`] ties the above into reproducible, manifest-driven runs.

pub mod agents;
pub mod equilibria;
pub mod error;
pub mod games;
pub mod optimize;
pub mod par;
pub mod pipeline;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use par::Exec;
