//! Evaluation of statistical decision functions by expected welfare and
//! maximum regret.
//!
//! - [`criteria`]: Bayes, maximin, and minimax-regret choice over finite
//!   problems, and ranking of rules by their risk profiles.
//! - [`engine`]: seeded Monte Carlo risk estimates, an exact enumeration
//!   oracle, and grid search for maximum regret.
//! - [`predict`]: prediction of a binary mean with missing outcomes.
//! - [`treat`]: treatment choice with observational data.
//! - [`trial`]: treatment choice with randomized trial data.
//! - [`reproduce`]: layouts and reference values of the published tables.

pub mod criteria;
pub mod engine;
pub mod error;
pub mod predict;
pub mod reproduce;
pub mod treat;
pub mod trial;
pub mod types;

pub use error::{Error, Result};
pub use types::{Panel, TieBreak, Treatment};
