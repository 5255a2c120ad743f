//! Volatility analytics for daily price series and option chains.
//!
//! Three complementary views of an asset's volatility live side by side:
//!
//! - **Historical**: rolling sample standard deviation of log returns with
//!   square-root-of-time scaling ([`stats`]).
//! - **Forecasted**: GARCH-family models (standard, integrated, GJR,
//!   exponential, asymmetric power) and a two-regime Markov-switching GARCH,
//!   fitted by constrained maximum likelihood with information-criterion
//!   selection and fixed- or mobile-window forecasting ([`garch`],
//!   [`estimator`], [`msgarch`], [`selection`], [`forecast`]).
//! - **Implied**: Black-Scholes inversion of option quotes into smiles,
//!   liquidity reports, and a bucketed temporal surface ([`options`],
//!   [`surface`]).
//!
//! Everything is deterministic: simulation and multi-start estimation draw
//! from seeded generators, and identical inputs produce byte-identical
//! outputs. See the `examples/` directory for one runnable walkthrough per
//! capability, or the `volkit` binary for the same pipelines as subcommands.

pub mod cli;
pub mod error;
pub mod estimator;
pub mod forecast;
pub mod garch;
pub mod ingest;
pub mod msgarch;
pub mod options;
pub mod report;
pub mod selection;
pub mod stats;
pub mod surface;

pub(crate) mod ols;
pub(crate) mod optimize;

pub use error::{Error, ErrorCategory, Result};
