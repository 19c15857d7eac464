//! Scenario generation, the Monte-Carlo driver, metrics and result files.

pub mod experiment;
pub mod metrics;
pub mod mobility;
pub mod output;
pub mod sample;
pub mod scenario;

pub use experiment::{
    aggregate, run_experiment, run_single, run_sweep, AggregateRow, RunResult, SweepPoint,
};
pub use metrics::{jain_index, Summary};
pub use mobility::{generate_mobility, generate_random_types, TransitionMatrix, TwoTypeChains};
pub use sample::{sample_instance, sample_system, Instance};
pub use scenario::{Mobility, ScenarioConfig, Scheme, Topology};
