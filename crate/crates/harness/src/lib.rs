//! Scenario generation, Monte Carlo orchestration and result persistence for robust sequential
//! sensor selection.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod grid;
pub mod monte_carlo;
pub mod results;
pub mod scenario;

pub use config::{RunConfig, ScenarioKind};
pub use error::HarnessError;
pub use monte_carlo::{run_monte_carlo, MonteCarloOutput};
pub use results::{ResultRow, CSV_HEADER};
