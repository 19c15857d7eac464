//! Exponential-time reference solvers for small instances. Each one is
//! guarded by a cap and fails with a size error instead of running away.

use crate::best_response::{expected_route_value, BestResponse, PmfSource};
use crate::error::{Error, Result};
use crate::game::{
    congestion, social_welfare, utility, ActionProfile, JointTypes, StrategyProfile,
    DEFAULT_JOINT_TYPE_CAP,
};
use crate::model::{
    enumerate_routes_capped, validate_route, MobilityPattern, NetworkSystem, Point, Route,
    TypeSpace, IDLE,
};

/// Default cap on the number of profiles or strategies an oracle enumerates.
pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

fn product_size(sizes: impl IntoIterator<Item = usize>) -> u128 {
    sizes
        .into_iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s as u128))
        .unwrap_or(u128::MAX)
}

/// Advances a mixed-radix counter (last digit fastest); false once it wraps.
fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Best route by enumerating every feasible route; ties keep the
/// lexicographically smallest.
pub fn brute_best_response(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
    pmfs: &impl PmfSource,
    cap: u128,
) -> Result<BestResponse> {
    let routes = enumerate_routes_capped(system, user, pattern, cap)?;
    let mut best: Option<BestResponse> = None;
    for route in routes {
        let value = expected_route_value(system, &route, pmfs);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(BestResponse { route, value });
        }
    }
    best.ok_or(Error::Infeasible { user })
}

/// Socially optimal action profile by exhaustive search over every
/// combination of feasible routes. Ties keep the lexicographically smallest
/// profile.
pub fn brute_social_optimum(
    system: &NetworkSystem,
    patterns: &[MobilityPattern],
    cap: u128,
) -> Result<(ActionProfile, f64)> {
    if patterns.len() != system.users() {
        return Err(Error::input("one pattern per user is required"));
    }
    let routes = patterns
        .iter()
        .enumerate()
        .map(|(user, p)| enumerate_routes_capped(system, user, p, cap))
        .collect::<Result<Vec<_>>>()?;
    let radices: Vec<usize> = routes.iter().map(Vec::len).collect();
    let count = product_size(radices.iter().copied());
    if count > cap {
        return Err(Error::size(format!("{count} action profiles"), cap));
    }
    if let Some(user) = radices.iter().position(|&r| r == 0) {
        return Err(Error::Infeasible { user });
    }
    let mut digits = vec![0; radices.len()];
    let profile_at = |digits: &[usize]| {
        ActionProfile::new(
            digits
                .iter()
                .zip(&routes)
                .map(|(&d, rs)| rs[d].clone())
                .collect(),
        )
    };
    let mut best_digits = digits.clone();
    let mut best = social_welfare(system, &profile_at(&digits));
    while advance(&mut digits, &radices) {
        let w = social_welfare(system, &profile_at(&digits));
        if w > best {
            best = w;
            best_digits.copy_from_slice(&digits);
        }
    }
    Ok((profile_at(&best_digits), best))
}

/// Removes `points[a..=b]` and bridges the gap with an idle stretch.
fn idle_detour(system: &NetworkSystem, points: &[Point], a: usize, b: usize) -> Option<Route> {
    let prev = a.checked_sub(1).map(|i| points[i]);
    let next = points.get(b + 1).copied();
    let start = prev.map_or(1, |p| p.slot + system.switch_time(p.network, IDLE) + 1);
    let end = match next {
        Some(n) => n
            .slot
            .checked_sub(system.switch_time(IDLE, n.network) + 1)?,
        None => system.slots(),
    };
    if start > end {
        return None;
    }
    let mut out = points[..a].to_vec();
    out.extend((start..=end).map(|t| Point::new(IDLE, t)));
    out.extend_from_slice(&points[b + 1..]);
    Some(Route::new(out))
}

fn real_points(profile: &ActionProfile) -> usize {
    profile
        .routes()
        .iter()
        .map(|r| r.points().iter().filter(|p| p.network != IDLE).count())
        .sum()
}

/// Repeatedly moves a user off a congested point onto idle until no real
/// network-time point holds more than one user, never lowering welfare.
///
/// Each step takes, over every user on a shared point and every window of
/// that user's route around it, the idle detour with the highest welfare.
/// The number of real points strictly drops at every step.
pub fn lemma1_normalize(
    system: &NetworkSystem,
    patterns: &[MobilityPattern],
    profile: &ActionProfile,
) -> Result<ActionProfile> {
    if patterns.len() != profile.users() || profile.users() != system.users() {
        return Err(Error::input("one pattern and route per user is required"));
    }
    for (user, (p, r)) in patterns.iter().zip(profile.routes()).enumerate() {
        validate_route(system, user, p, r)
            .map_err(|v| Error::input(format!("user {user}: {v}")))?;
    }
    let mut current = profile.clone();
    let budget = real_points(profile);
    for _ in 0..=budget {
        let field = congestion(system, &current);
        if field.max_real() <= 1 {
            return Ok(current);
        }
        let welfare = social_welfare(system, &current);
        let mut best: Option<(f64, ActionProfile)> = None;
        for (user, route) in current.routes().iter().enumerate() {
            let points = route.points();
            for (q, p) in points.iter().enumerate() {
                if p.network == IDLE || field.get(p.network, p.slot) < 2 {
                    continue;
                }
                for a in 0..=q {
                    for b in q..points.len() {
                        let Some(detour) = idle_detour(system, points, a, b) else {
                            continue;
                        };
                        if validate_route(system, user, &patterns[user], &detour).is_err() {
                            continue;
                        }
                        let candidate = current.with_route(user, detour);
                        let w = social_welfare(system, &candidate);
                        if best.as_ref().is_none_or(|(bw, _)| w > *bw) {
                            best = Some((w, candidate));
                        }
                    }
                }
            }
        }
        match best {
            Some((w, next)) if w >= welfare - 1e-9 * welfare.abs().max(1.0) => current = next,
            _ => {
                return Err(Error::input(
                    "no idle detour off a congested point keeps welfare from decreasing",
                ))
            }
        }
    }
    unreachable!("each step removes a real point")
}

/// Outcome of an exhaustive equilibrium check.
#[derive(Clone, Debug, PartialEq)]
pub enum BneVerdict {
    Equilibrium,
    /// The most profitable unilateral deviation found.
    Violation {
        user: usize,
        deviation: Vec<Route>,
        gain: f64,
    },
}

impl BneVerdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, BneVerdict::Equilibrium)
    }
}

/// Checks every user's every alternative full strategy (one feasible route
/// per type) against the profile and reports the best profitable deviation.
///
/// Per-(type, route) contributions to ex-ante utility are tabulated by
/// enumerating joint types; each alternative strategy is then scored as a
/// sum of table entries.
pub fn certify_bne(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
    epsilon: f64,
    cap: u128,
) -> Result<BneVerdict> {
    strategies.check(system, type_spaces)?;
    let joint: Vec<(Vec<usize>, f64)> =
        JointTypes::new(type_spaces, DEFAULT_JOINT_TYPE_CAP)?.collect();
    let mut worst: Option<(usize, Vec<Route>, f64)> = None;
    for (user, space) in type_spaces.iter().enumerate() {
        // weight[k](r) = sum over joint types with user's type k of prob * u
        let contribution = |k: usize, route: &Route| -> f64 {
            joint
                .iter()
                .filter(|(types, _)| types[user] == k)
                .map(|(types, prob)| {
                    let profile = strategies.realize(types).with_route(user, route.clone());
                    prob * utility(system, &profile, user)
                })
                .sum()
        };
        let mut table = Vec::with_capacity(space.len());
        let mut routes = Vec::with_capacity(space.len());
        let mut current = 0.0;
        for (k, pattern) in space.patterns().iter().enumerate() {
            let rs = enumerate_routes_capped(system, user, pattern, cap)?;
            table.push(rs.iter().map(|r| contribution(k, r)).collect::<Vec<f64>>());
            routes.push(rs);
            current += contribution(k, strategies.route(user, k));
        }
        let radices: Vec<usize> = routes.iter().map(Vec::len).collect();
        let count = product_size(radices.iter().copied());
        if count > cap {
            return Err(Error::size(
                format!("{count} strategies of user {user}"),
                cap,
            ));
        }
        if radices.contains(&0) {
            continue;
        }
        let mut digits = vec![0; radices.len()];
        loop {
            let eu: f64 = digits.iter().zip(&table).map(|(&d, t)| t[d]).sum();
            let gain = eu - current;
            if gain > epsilon && worst.as_ref().is_none_or(|w| gain > w.2) {
                let deviation = digits
                    .iter()
                    .zip(&routes)
                    .map(|(&d, rs)| rs[d].clone())
                    .collect();
                worst = Some((user, deviation, gain));
            }
            if !advance(&mut digits, &radices) {
                break;
            }
        }
    }
    Ok(match worst {
        None => BneVerdict::Equilibrium,
        Some((user, deviation, gain)) => BneVerdict::Violation {
            user,
            deviation,
            gain,
        },
    })
}

/// Congestion-level pmf faced by `excluded` at one point, by summing over
/// every subset of the other users. `probs[j]` is user `j`'s probability of
/// occupying the point; the result has one entry per level `0..I`.
pub fn subset_congestion_pmf(probs: &[f64], excluded: usize) -> Result<Vec<f64>> {
    const MAX_USERS: usize = 24;
    if excluded >= probs.len() {
        return Err(Error::input(format!("unknown user {excluded}")));
    }
    if probs.len() > MAX_USERS {
        return Err(Error::size(
            format!("{} users", probs.len()),
            MAX_USERS as u128,
        ));
    }
    let others: Vec<f64> = probs
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != excluded)
        .map(|(_, &p)| p)
        .collect();
    let mut pmf = vec![0.0; probs.len()];
    for mask in 0u32..(1 << others.len()) {
        let mut weight = 1.0;
        for (j, &p) in others.iter().enumerate() {
            weight *= if mask & (1 << j) != 0 { p } else { 1.0 - p };
        }
        pmf[mask.count_ones() as usize] += weight;
    }
    Ok(pmf)
}
