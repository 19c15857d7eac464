//! Randomised cross-checks of the fast algorithms against the exhaustive
//! oracles and the closed-form identities, over small instances.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::best_response::best_response;
use crate::engine::{run_planning, EngineConfig, UpdateOrder};
use crate::error::{Error, Result};
use crate::game::{
    bayesian_potential, expected_utility, potential, utility, ActionProfile, StrategyProfile,
};
use crate::harness::Instance;
use crate::model::{
    count_routes, enumerate_routes, Availability, MobilityPattern, NetworkSystem, TypeSpace,
    CELLULAR,
};
use crate::oracle::{
    brute_best_response, brute_social_optimum, certify_bne, lemma1_normalize,
    subset_congestion_pmf, DEFAULT_ORACLE_CAP,
};
use crate::stats::{poisson_binomial, CongestionPmf};

pub const TOLERANCE: f64 = 1e-9;

/// Size bounds of the random instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub max_users: usize,
    /// Real networks, cellular included.
    pub max_real_networks: usize,
    pub max_slots: usize,
    pub max_locations: usize,
    pub max_types: usize,
}

impl Shape {
    pub const DETERMINISTIC: Shape = Shape {
        max_users: 4,
        max_real_networks: 3,
        max_slots: 4,
        max_locations: 3,
        max_types: 1,
    };

    pub const BAYESIAN: Shape = Shape {
        max_types: 2,
        ..Shape::DETERMINISTIC
    };
}

/// Random system whose costs and times route through idle no worse than
/// through any third network: `c[a,b] = c[a,0] + c[0,b] + extra`, and the
/// same construction for switching times.
pub fn random_system(
    rng: &mut impl Rng,
    users: usize,
    real_networks: usize,
    slots: usize,
    locations: usize,
) -> Result<NetworkSystem> {
    let k = real_networks + 1;
    let mut capacity = vec![0.0];
    capacity.extend((1..k).map(|_| rng.random_range(1.0..50.0)));
    let to_idle: Vec<f64> = (0..k)
        .map(|n| {
            if n == 0 {
                0.0
            } else {
                rng.random_range(0.0..5.0)
            }
        })
        .collect();
    let from_idle: Vec<f64> = (0..k)
        .map(|n| {
            if n == 0 {
                0.0
            } else {
                rng.random_range(0.0..5.0)
            }
        })
        .collect();
    let t_to: Vec<usize> = (0..k)
        .map(|n| if n == 0 { 0 } else { rng.random_range(0..=1) })
        .collect();
    let t_from: Vec<usize> = (0..k)
        .map(|n| if n == 0 { 0 } else { rng.random_range(0..=1) })
        .collect();
    let mut cost = vec![vec![0.0; k]; k];
    let mut time = vec![vec![0; k]; k];
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let (c, t) = match (a, b) {
                (_, 0) => (to_idle[a], t_to[a]),
                (0, _) => (from_idle[b], t_from[b]),
                _ => (
                    to_idle[a] + from_idle[b] + rng.random_range(0.0..3.0),
                    t_to[a] + t_from[b] + rng.random_range(0..=1),
                ),
            };
            cost[a][b] = c;
            time[a][b] = t;
        }
    }
    let mut availability = Availability::new(users, locations, slots);
    for l in 1..=locations {
        for t in 1..=slots {
            for n in 1..k {
                let p = if n == CELLULAR { 0.9 } else { 0.6 };
                if rng.random_bool(p) {
                    for u in 0..users {
                        availability.grant(u, l, t, n)?;
                    }
                }
            }
        }
    }
    NetworkSystem::new(capacity, cost, time, availability)
}

/// Random instance within `shape`; type spaces share their slot-1 location.
pub fn random_instance(rng: &mut impl Rng, shape: Shape) -> Result<Instance> {
    let users = rng.random_range(1..=shape.max_users);
    let networks = rng.random_range(1..=shape.max_real_networks);
    let slots = rng.random_range(1..=shape.max_slots);
    let locations = rng.random_range(1..=shape.max_locations);
    let system = random_system(rng, users, networks, slots, locations)?;
    let mut type_spaces = Vec::with_capacity(users);
    for _ in 0..users {
        let types = rng.random_range(1..=shape.max_types);
        let start = rng.random_range(1..=locations);
        let patterns: Vec<MobilityPattern> = (0..types)
            .map(|_| {
                let mut locs = vec![start];
                locs.extend((1..slots).map(|_| rng.random_range(1..=locations)));
                MobilityPattern::new(locs)
            })
            .collect::<Result<_>>()?;
        let space = if types == 1 {
            TypeSpace::single(patterns.into_iter().next().expect("one pattern"))
        } else {
            let p = rng.random_range(0.2..0.8);
            TypeSpace::new(patterns, vec![p, 1.0 - p])?
        };
        type_spaces.push(space);
    }
    let realized = type_spaces
        .iter()
        .map(|s| s.patterns()[0].clone())
        .collect();
    Ok(Instance {
        system,
        type_spaces,
        realized,
    })
}

fn random_strategies(rng: &mut impl Rng, instance: &Instance) -> Result<StrategyProfile> {
    let strategies = instance
        .type_spaces
        .iter()
        .enumerate()
        .map(|(user, space)| {
            space
                .patterns()
                .iter()
                .map(|p| {
                    enumerate_routes(&instance.system, user, p)?
                        .choose(rng)
                        .cloned()
                        .ok_or(Error::Infeasible { user })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StrategyProfile::new(strategies))
}

/// Result of one cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub max_error: f64,
    /// First failure, if any.
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            max_error: 0.0,
            detail: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn error(&mut self, err: f64, tol: f64, what: impl FnOnce() -> String) {
        self.max_error = self.max_error.max(err);
        // NaN errors count as failures
        if err.is_nan() || err > tol {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        self.detail.get_or_insert(what);
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} failures, max error {:.3e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.failures,
            self.max_error
        )?;
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

/// Every unilateral route change moves the mover's utility and the
/// potential by the same amount.
pub fn check_potential_identity(seed: u64, instances: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CheckOutcome::new("potential identity");
    for case in 0..instances {
        let inst = random_instance(&mut rng, Shape::DETERMINISTIC)?;
        let sys = &inst.system;
        let profile = random_strategies(&mut rng, &inst)?.realize(&vec![0; sys.users()]);
        let phi = potential(sys, &profile);
        for user in 0..sys.users() {
            let u = utility(sys, &profile, user);
            for r in enumerate_routes(sys, user, &inst.realized[user])? {
                let moved = profile.with_route(user, r);
                let err = ((utility(sys, &moved, user) - u) - (potential(sys, &moved) - phi)).abs();
                out.error(err, TOLERANCE, || format!("instance {case}, user {user}"));
            }
        }
        out.cases += 1;
    }
    Ok(out)
}

/// The Bayesian potential tracks ex-ante utility changes, for per-type
/// changes and for a random whole-strategy change per user.
pub fn check_bayesian_identity(seed: u64, instances: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CheckOutcome::new("bayesian potential identity");
    for case in 0..instances {
        let inst = random_instance(&mut rng, Shape::BAYESIAN)?;
        let sys = &inst.system;
        let spaces = &inst.type_spaces;
        let s = random_strategies(&mut rng, &inst)?;
        let psi = bayesian_potential(sys, &s, spaces)?;
        let fresh = random_strategies(&mut rng, &inst)?;
        for user in 0..sys.users() {
            let eu = expected_utility(sys, &s, spaces, user)?;
            let mut deviations: Vec<StrategyProfile> = Vec::new();
            for (k, pattern) in spaces[user].patterns().iter().enumerate() {
                for r in enumerate_routes(sys, user, pattern)? {
                    let mut d = s.clone();
                    d.set_route(user, k, r);
                    deviations.push(d);
                }
            }
            let mut whole = s.clone();
            whole.set_strategy(user, fresh.strategy(user).to_vec());
            deviations.push(whole);
            for d in deviations {
                let d_eu = expected_utility(sys, &d, spaces, user)? - eu;
                let d_psi = bayesian_potential(sys, &d, spaces)? - psi;
                out.error((d_eu - d_psi).abs(), TOLERANCE, || {
                    format!("instance {case}, user {user}")
                });
            }
        }
        out.cases += 1;
    }
    Ok(out)
}

/// Dynamics from random starts converge, and the oracle certifies the
/// result as an equilibrium.
pub fn check_convergence_to_bne(
    seed: u64,
    instances: usize,
    starts: usize,
) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CheckOutcome::new("convergence to certified equilibrium");
    for case in 0..instances {
        let inst = random_instance(&mut rng, Shape::BAYESIAN)?;
        for start in 0..starts {
            let initial = random_strategies(&mut rng, &inst)?;
            let config = EngineConfig {
                order: if start % 2 == 0 {
                    UpdateOrder::RoundRobin
                } else {
                    UpdateOrder::Shuffled { seed: rng.random() }
                },
                ..EngineConfig::default()
            };
            let (s, report) =
                run_planning(&inst.system, &inst.type_spaces, &config, Some(initial))?;
            out.cases += 1;
            if !report.converged {
                out.fail(format!(
                    "instance {case}, start {start}: no convergence in {} passes",
                    report.passes
                ));
                continue;
            }
            let verdict = certify_bne(
                &inst.system,
                &s,
                &inst.type_spaces,
                config.epsilon,
                DEFAULT_ORACLE_CAP,
            )?;
            if !verdict.is_equilibrium() {
                out.fail(format!("instance {case}, start {start}: {verdict:?}"));
            }
        }
    }
    Ok(out)
}

fn random_pmf_table(
    rng: &mut impl Rng,
    networks: usize,
    slots: usize,
    levels: usize,
) -> Result<CongestionPmf> {
    let pmfs = (0..networks)
        .map(|_| {
            (0..slots)
                .map(|_| {
                    let probs: Vec<f64> = (0..levels - 1).map(|_| rng.random::<f64>()).collect();
                    poisson_binomial(probs, levels)
                })
                .collect()
        })
        .collect();
    CongestionPmf::from_vectors(0, pmfs)
}

/// The graph search matches exhaustive route enumeration in value (bit
/// for bit) and in the lexicographic tie-break.
pub fn check_best_response(seed: u64, instances: usize, max_routes: u128) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CheckOutcome::new("best response vs enumeration");
    let shape = Shape {
        max_users: 4,
        max_real_networks: 4,
        max_slots: 6,
        max_locations: 3,
        max_types: 1,
    };
    while out.cases < instances {
        let inst = random_instance(&mut rng, shape)?;
        let sys = &inst.system;
        let user = rng.random_range(0..sys.users());
        let pattern = &inst.realized[user];
        if count_routes(sys, user, pattern)? > max_routes {
            continue;
        }
        let levels = sys.users().max(2);
        let pmfs = random_pmf_table(&mut rng, sys.networks(), sys.slots(), levels)?;
        let fast = best_response(sys, user, pattern, &pmfs, None)?;
        let slow = brute_best_response(sys, user, pattern, &pmfs, max_routes)?;
        out.cases += 1;
        let err = (fast.value - slow.value).abs();
        out.error(err, 0.0, || {
            format!("value {} vs {}", fast.value, slow.value)
        });
        if fast.route != slow.route {
            out.fail(format!("route {} vs {}", fast.route, slow.route));
        }
    }
    Ok(out)
}

/// Dynamic-programming congestion pmfs agree with subset enumeration and
/// have the right mean.
pub fn check_congestion_pmf(seed: u64, vectors: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CheckOutcome::new("congestion pmf vs subsets");
    for case in 0..vectors {
        let users = rng.random_range(1..=8);
        let probs: Vec<f64> = (0..users)
            .map(|_| match rng.random_range(0..8) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random(),
            })
            .collect();
        let excluded = rng.random_range(0..users);
        let others = || {
            probs
                .iter()
                .enumerate()
                .filter(move |&(j, _)| j != excluded)
                .map(|(_, &p)| p)
        };
        let dp = poisson_binomial(others(), users);
        let brute = subset_congestion_pmf(&probs, excluded)?;
        let err = dp
            .iter()
            .zip(&brute)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.error(err, 1e-12, || format!("vector {case}: {probs:?}"));
        let mean: f64 = dp.iter().enumerate().map(|(q, p)| q as f64 * p).sum();
        let expected: f64 = others().sum();
        if (mean - expected).abs() > TOLERANCE {
            out.fail(format!("vector {case}: mean {mean} vs {expected}"));
        }
        out.cases += 1;
    }
    Ok(out)
}

/// Normalising the brute-force optimum keeps its welfare and leaves every
/// real point with at most one user.
pub fn check_lemma1(seed: u64, instances: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CheckOutcome::new("congestion-free social optimum");
    let shape = Shape {
        max_users: 3,
        ..Shape::DETERMINISTIC
    };
    for case in 0..instances {
        let inst = random_instance(&mut rng, shape)?;
        let sys = &inst.system;
        let (opt, w) = brute_social_optimum(sys, &inst.realized, DEFAULT_ORACLE_CAP)?;
        out.cases += 1;
        let normal: ActionProfile = match lemma1_normalize(sys, &inst.realized, &opt) {
            Ok(p) => p,
            Err(e) => {
                out.fail(format!("instance {case}: {e}"));
                continue;
            }
        };
        let w2 = crate::game::social_welfare(sys, &normal);
        out.error((w - w2).abs(), TOLERANCE * w.abs().max(1.0), || {
            format!("instance {case}: welfare {w} -> {w2}")
        });
        if crate::game::congestion(sys, &normal).max_real() > 1 {
            out.fail(format!(
                "instance {case}: congestion left after normalising"
            ));
        }
    }
    Ok(out)
}

/// Instance counts for [`run_all`].
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub potential: usize,
    pub bayesian: usize,
    pub convergence: usize,
    pub starts: usize,
    pub best_response: usize,
    pub pmf: usize,
    pub lemma1: usize,
}

impl Budget {
    pub const FULL: Budget = Budget {
        potential: 1000,
        bayesian: 1000,
        convergence: 1000,
        starts: 3,
        best_response: 1000,
        pmf: 1000,
        lemma1: 500,
    };

    pub const QUICK: Budget = Budget {
        potential: 50,
        bayesian: 50,
        convergence: 50,
        starts: 3,
        best_response: 50,
        pmf: 200,
        lemma1: 25,
    };
}

pub fn run_all(seed: u64, budget: Budget) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_potential_identity(seed, budget.potential)?,
        check_bayesian_identity(seed.wrapping_add(1), budget.bayesian)?,
        check_convergence_to_bne(seed.wrapping_add(2), budget.convergence, budget.starts)?,
        check_best_response(seed.wrapping_add(3), budget.best_response, 10_000)?,
        check_congestion_pmf(seed.wrapping_add(4), budget.pmf)?,
        check_lemma1(seed.wrapping_add(5), budget.lemma1)?,
    ])
}
