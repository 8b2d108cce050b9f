//! Seeded Monte Carlo risk estimation, the exact enumeration oracle, and
//! grid-search maximization of regret.

mod grid;
mod model;
mod risk;
mod stream;
mod sweep;
mod table;

pub use grid::{Axis, Constraint, Spacing, StateGrid};
pub use model::{ConstantRule, DecisionRule, Model};
pub use risk::{
    estimate_risk, exact_risk_small, ReplicationPlan, RiskEstimate, DEFAULT_REPLICATES, EXACT_LIMIT,
};
pub use stream::{derive_stream, Stream};
pub use sweep::{
    exact_max_regret_over_grid, max_regret_over_grid, GridResult, StateRow, StreamScheme, SweepMode,
    SweepOptions,
};
pub use table::{RegretTable, TableCell, TableSettings, DEFAULT_SEED};
