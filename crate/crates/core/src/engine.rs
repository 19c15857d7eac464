//! Asynchronous best-response dynamics over the Bayesian network selection
//! game (planning phase) and realisation of actions once types are known.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::cellular_only;
use crate::best_response::{best_response, expected_route_value};
use crate::error::{Error, Result};
use crate::game::{ActionProfile, StrategyProfile};
use crate::model::{MobilityPattern, NetworkSystem, TypeSpace};
use crate::stats::{selection_stats, Operator};

/// Order in which users take turns within a pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum UpdateOrder {
    #[default]
    RoundRobin,
    /// A fresh seeded permutation every pass.
    Shuffled { seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    /// Maximum number of passes over all users.
    pub max_passes: usize,
    pub order: UpdateOrder,
    /// A type's route changes only if the prior-weighted gain exceeds this.
    pub epsilon: f64,
    /// Evaluate the Bayesian potential after every accepted change.
    pub record_potential: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_passes: 20,
            order: UpdateOrder::RoundRobin,
            epsilon: 1e-9,
            record_potential: false,
        }
    }
}

/// One accepted per-type strategy change.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub pass: usize,
    pub user: usize,
    pub type_index: usize,
    pub old_value: f64,
    pub new_value: f64,
    pub potential: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// Passes executed, including the final pass that changed nothing.
    pub passes: usize,
    /// Best-response computations performed by each user.
    pub updates_per_user: Vec<usize>,
    /// Turns in which each user's strategy actually changed.
    pub changes_per_user: Vec<usize>,
    /// Bayesian potential before the first change and after each accepted
    /// change; empty unless requested.
    pub potential_trace: Vec<f64>,
}

impl ConvergenceReport {
    pub fn mean_updates_per_user(&self) -> f64 {
        if self.updates_per_user.is_empty() {
            return 0.0;
        }
        self.updates_per_user.iter().sum::<usize>() as f64 / self.updates_per_user.len() as f64
    }
}

/// Cellular whenever available, idle otherwise, for every type.
pub fn default_strategies(
    system: &NetworkSystem,
    type_spaces: &[TypeSpace],
) -> Result<StrategyProfile> {
    let strategies = type_spaces
        .iter()
        .enumerate()
        .map(|(user, space)| {
            space
                .patterns()
                .iter()
                .map(|p| cellular_only(system, user, p).map(|b| b.route))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StrategyProfile::new(strategies))
}

fn reporting_operator(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
) -> Result<Operator> {
    let mut operator = Operator::new(system);
    for (user, space) in type_spaces.iter().enumerate() {
        operator.report(
            user,
            selection_stats(system, strategies.strategy(user), space)?,
        )?;
    }
    Ok(operator)
}

fn expected_switching_cost(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
) -> f64 {
    type_spaces
        .iter()
        .enumerate()
        .map(|(user, space)| {
            space
                .priors()
                .iter()
                .zip(strategies.strategy(user))
                .map(|(p, r)| p * r.switching_cost(system))
                .sum::<f64>()
        })
        .sum()
}

fn potential_from(
    system: &NetworkSystem,
    operator: &Operator,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
) -> Result<f64> {
    Ok(operator.expected_harmonic_benefit(system)?
        - expected_switching_cost(system, strategies, type_spaces))
}

/// Bayesian potential computed from per-point occupancy distributions
/// instead of joint-type enumeration. Exact under independent priors.
pub fn factored_potential(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
) -> Result<f64> {
    let operator = reporting_operator(system, strategies, type_spaces)?;
    potential_from(system, &operator, strategies, type_spaces)
}

/// Ex-ante expected utilities evaluated through the congestion pmfs.
pub fn expected_utilities_from_stats(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
) -> Result<Vec<f64>> {
    if strategies.users() != type_spaces.len() || strategies.users() != system.users() {
        return Err(Error::input(
            "strategy profile, type spaces and system disagree on user count",
        ));
    }
    let operator = reporting_operator(system, strategies, type_spaces)?;
    (0..strategies.users())
        .map(|user| {
            let table = operator.pmf_table(user)?;
            Ok(type_spaces[user]
                .priors()
                .iter()
                .zip(strategies.strategy(user))
                .map(|(p, r)| p * expected_route_value(system, r, &table))
                .sum())
        })
        .collect()
}

pub fn run_planning(
    system: &NetworkSystem,
    type_spaces: &[TypeSpace],
    config: &EngineConfig,
    initial: Option<StrategyProfile>,
) -> Result<(StrategyProfile, ConvergenceReport)> {
    run_planning_traced(system, type_spaces, config, initial, |_| {})
}

/// [`run_planning`] that also hands every accepted change to `sink`.
pub fn run_planning_traced(
    system: &NetworkSystem,
    type_spaces: &[TypeSpace],
    config: &EngineConfig,
    initial: Option<StrategyProfile>,
    mut sink: impl FnMut(&TraceRecord),
) -> Result<(StrategyProfile, ConvergenceReport)> {
    if config.max_passes == 0 {
        return Err(Error::input("max_passes must be at least 1"));
    }
    if type_spaces.len() != system.users() {
        return Err(Error::input("one type space per user is required"));
    }
    for space in type_spaces {
        for p in space.patterns() {
            system.check_pattern(p)?;
        }
    }
    let mut strategies = match initial {
        Some(s) => s,
        None => default_strategies(system, type_spaces)?,
    };
    strategies.check(system, type_spaces)?;

    let users = system.users();
    let mut operator = reporting_operator(system, &strategies, type_spaces)?;
    let mut report = ConvergenceReport {
        converged: false,
        passes: 0,
        updates_per_user: vec![0; users],
        changes_per_user: vec![0; users],
        potential_trace: Vec::new(),
    };
    if config.record_potential {
        report
            .potential_trace
            .push(potential_from(system, &operator, &strategies, type_spaces)?);
    }

    let mut order: Vec<usize> = (0..users).collect();
    let mut rng = match config.order {
        UpdateOrder::Shuffled { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        UpdateOrder::RoundRobin => None,
    };

    for pass in 1..=config.max_passes {
        report.passes = pass;
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut pass_changed = false;
        for &user in &order {
            let table = operator.pmf_table(user)?;
            report.updates_per_user[user] += 1;
            let mut user_changed = false;
            for (k, (pattern, prior)) in type_spaces[user].iter().enumerate() {
                let current = strategies.route(user, k);
                let old_value = expected_route_value(system, current, &table);
                let br = best_response(system, user, pattern, &table, Some(current))?;
                if prior * (br.value - old_value) <= config.epsilon {
                    continue;
                }
                strategies.set_route(user, k, br.route);
                user_changed = true;
                let potential = if config.record_potential {
                    operator.report(
                        user,
                        selection_stats(system, strategies.strategy(user), &type_spaces[user])?,
                    )?;
                    let psi = potential_from(system, &operator, &strategies, type_spaces)?;
                    report.potential_trace.push(psi);
                    Some(psi)
                } else {
                    None
                };
                sink(&TraceRecord {
                    pass,
                    user,
                    type_index: k,
                    old_value,
                    new_value: br.value,
                    potential,
                });
            }
            if user_changed {
                report.changes_per_user[user] += 1;
                pass_changed = true;
                operator.report(
                    user,
                    selection_stats(system, strategies.strategy(user), &type_spaces[user])?,
                )?;
            }
        }
        if !pass_changed {
            report.converged = true;
            break;
        }
    }
    Ok((strategies, report))
}

/// The routes each user plays once their actual pattern is known.
pub fn realize_actions(
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
    sampled: &[MobilityPattern],
) -> Result<ActionProfile> {
    if sampled.len() != strategies.users() || type_spaces.len() != strategies.users() {
        return Err(Error::input(
            "one sampled pattern and type space per user is required",
        ));
    }
    let types = sampled
        .iter()
        .zip(type_spaces)
        .enumerate()
        .map(|(user, (p, space))| {
            space.position(p).ok_or_else(|| {
                Error::input(format!(
                    "pattern {:?} not in user {user}'s type space",
                    p.locations()
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(strategies.realize(&types))
}
