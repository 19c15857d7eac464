//! Fixtures shared by the benchmarks.

use netsel_core::harness::experiment::run_rng;
use netsel_core::harness::{sample_instance, Instance, ScenarioConfig};
use netsel_core::stats::{selection_stats, CongestionPmf, Operator};
use netsel_core::{baselines, StrategyProfile};

/// A deterministic-grid world with `users` users.
pub fn grid_instance(users: usize, seed: u64) -> Instance {
    let mut config = ScenarioConfig::deterministic_grid();
    config.users = users;
    sample_instance(&config, &mut run_rng(seed, 0)).expect("preset samples")
}

/// A random-line world with two types per user.
pub fn line_instance(users: usize, seed: u64) -> Instance {
    let mut config = ScenarioConfig::random_line();
    config.users = users;
    sample_instance(&config, &mut run_rng(seed, 0)).expect("preset samples")
}

/// Every user on their OTSO routes.
pub fn otso_profile(instance: &Instance) -> StrategyProfile {
    let sys = &instance.system;
    StrategyProfile::new(
        instance
            .type_spaces
            .iter()
            .enumerate()
            .map(|(u, space)| {
                space
                    .patterns()
                    .iter()
                    .map(|p| baselines::otso(sys, u, p).expect("otso route"))
                    .collect()
            })
            .collect(),
    )
}

/// User 0's congestion pmfs when everyone else reports their OTSO strategy.
pub fn pmfs_for_user0(instance: &Instance) -> CongestionPmf {
    let sys = &instance.system;
    let profile = otso_profile(instance);
    let mut operator = Operator::new(sys);
    for (u, space) in instance.type_spaces.iter().enumerate() {
        let stats = selection_stats(sys, profile.strategy(u), space).expect("stats");
        operator.report(u, stats).expect("report");
    }
    operator.pmf_table(0).expect("pmf table")
}
