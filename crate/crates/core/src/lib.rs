//! Bayesian network selection for integrated cellular and Wi-Fi access.
//!
//! Users move through locations over a slotted horizon and pick one network
//! per slot, trading throughput (shared with whoever else picked the same
//! network-time point) against switching penalties. [`engine`] runs
//! best-response dynamics on the operator's congestion statistics,
//! [`baselines`] holds the comparison policies, [`oracle`] the brute-force
//! references and [`harness`] the Monte-Carlo experiment driver.

pub mod baselines;
pub mod best_response;
pub mod engine;
pub mod error;
pub mod game;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use game::{ActionProfile, StrategyProfile};
pub use model::{
    worked_example, Availability, MobilityPattern, NetworkSet, NetworkSystem, Point, Route,
    RouteViolation, TypeSpace, CELLULAR, IDLE,
};
