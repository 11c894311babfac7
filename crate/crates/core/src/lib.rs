//! View-adjusted hedge ratios for a European call.
//!
//! The hedge accounts for a growth-rate view on the underlying, a stochastic
//! model for implied vol and a known holding interval. Alongside the share
//! counts the crate provides the analytic variance of the resulting hedging
//! error and a Monte Carlo harness that measures it.

pub mod error;
pub mod fd;
pub mod greeks;
pub mod hedge;
pub mod mc;
pub mod normal;
pub mod variance;
pub mod vol;

pub use error::{Error, Result};
pub use greeks::{GreeksBundle, OptionSpec};
pub use hedge::{HedgeRatio, MarketView, Strategy};
pub use mc::{SigmaMode, SimConfig, SimResult};
pub use variance::ErrorCoefficients;
pub use vol::{VolModel, VolProcessSpec};
