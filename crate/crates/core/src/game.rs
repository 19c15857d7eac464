//! Exact congestion, utility, welfare and potential evaluation, plus their
//! expectations over independent per-user type priors.

use crate::error::{Error, Result};
use crate::model::{validate_route, NetworkSystem, Route, TypeSpace};

/// Guard on the number of joint type profiles enumerated by the exact
/// Bayesian evaluators.
pub const DEFAULT_JOINT_TYPE_CAP: u128 = 1_000_000;

/// One route per user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionProfile {
    routes: Vec<Route>,
}

impl ActionProfile {
    pub fn new(routes: Vec<Route>) -> Self {
        Self { routes }
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn route(&self, user: usize) -> &Route {
        &self.routes[user]
    }

    pub fn users(&self) -> usize {
        self.routes.len()
    }

    /// The profile with `user`'s route replaced.
    pub fn with_route(&self, user: usize, route: Route) -> Self {
        let mut routes = self.routes.clone();
        routes[user] = route;
        Self { routes }
    }

    pub fn set_route(&mut self, user: usize, route: Route) {
        self.routes[user] = route;
    }

    pub fn into_routes(self) -> Vec<Route> {
        self.routes
    }
}

/// For each user, the route chosen under each of their types (indexed like
/// the user's [`TypeSpace`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyProfile {
    strategies: Vec<Vec<Route>>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<Vec<Route>>) -> Self {
        Self { strategies }
    }

    /// Single-typed users playing the given routes.
    pub fn deterministic(routes: Vec<Route>) -> Self {
        Self::new(routes.into_iter().map(|r| vec![r]).collect())
    }

    pub fn users(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategy(&self, user: usize) -> &[Route] {
        &self.strategies[user]
    }

    pub fn route(&self, user: usize, type_index: usize) -> &Route {
        &self.strategies[user][type_index]
    }

    pub fn set_route(&mut self, user: usize, type_index: usize, route: Route) {
        self.strategies[user][type_index] = route;
    }

    pub fn set_strategy(&mut self, user: usize, strategy: Vec<Route>) {
        self.strategies[user] = strategy;
    }

    /// The action profile played when user `i` has type `types[i]`.
    pub fn realize(&self, types: &[usize]) -> ActionProfile {
        ActionProfile::new(
            self.strategies
                .iter()
                .zip(types)
                .map(|(s, &k)| s[k].clone())
                .collect(),
        )
    }

    /// Every (user, type) route must be feasible for that type.
    pub fn check(&self, system: &NetworkSystem, type_spaces: &[TypeSpace]) -> Result<()> {
        if self.users() != type_spaces.len() || self.users() != system.users() {
            return Err(Error::input(
                "strategy profile, type spaces and system disagree on user count",
            ));
        }
        for (user, (strategy, space)) in self.strategies.iter().zip(type_spaces).enumerate() {
            if strategy.len() != space.len() {
                return Err(Error::input(format!(
                    "user {user}: one route per type is required"
                )));
            }
            for (k, (route, pattern)) in strategy.iter().zip(space.patterns()).enumerate() {
                validate_route(system, user, pattern, route)
                    .map_err(|v| Error::input(format!("user {user} type {k}: {v}")))?;
            }
        }
        Ok(())
    }
}

/// Number of users on each network-time point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongestionField {
    slots: usize,
    counts: Vec<u32>,
}

impl CongestionField {
    pub fn new(networks: usize, slots: usize) -> Self {
        Self {
            slots,
            counts: vec![0; networks * slots],
        }
    }

    pub fn get(&self, network: usize, slot: usize) -> u32 {
        self.counts[network * self.slots + slot - 1]
    }

    fn add(&mut self, network: usize, slot: usize) {
        self.counts[network * self.slots + slot - 1] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// `(network, slot, count)` for every point.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i / self.slots, i % self.slots + 1, c))
    }

    /// Largest count over the real (non-idle) networks.
    pub fn max_real(&self) -> u32 {
        self.iter()
            .filter(|&(n, _, _)| n != 0)
            .map(|(_, _, c)| c)
            .max()
            .unwrap_or(0)
    }
}

pub fn congestion(system: &NetworkSystem, profile: &ActionProfile) -> CongestionField {
    let mut field = CongestionField::new(system.networks(), system.slots());
    for route in profile.routes() {
        for p in route.points() {
            field.add(p.network, p.slot);
        }
    }
    field
}

fn route_utility(system: &NetworkSystem, field: &CongestionField, route: &Route) -> f64 {
    let throughput: f64 = route
        .points()
        .iter()
        .map(|p| system.capacity(p.network) / field.get(p.network, p.slot) as f64)
        .sum();
    throughput - route.switching_cost(system)
}

pub fn utility(system: &NetworkSystem, profile: &ActionProfile, user: usize) -> f64 {
    let field = congestion(system, profile);
    route_utility(system, &field, profile.route(user))
}

pub fn utilities(system: &NetworkSystem, profile: &ActionProfile) -> Vec<f64> {
    let field = congestion(system, profile);
    profile
        .routes()
        .iter()
        .map(|r| route_utility(system, &field, r))
        .collect()
}

pub fn social_welfare(system: &NetworkSystem, profile: &ActionProfile) -> f64 {
    utilities(system, profile).iter().sum()
}

/// Exact potential: harmonic-weighted capacity over congestion levels minus
/// every user's switching cost.
pub fn potential(system: &NetworkSystem, profile: &ActionProfile) -> f64 {
    let field = congestion(system, profile);
    let benefit: f64 = field
        .iter()
        .map(|(n, _, omega)| {
            let mu = system.capacity(n);
            (1..=omega).map(|q| mu / q as f64).sum::<f64>()
        })
        .sum();
    let cost: f64 = profile
        .routes()
        .iter()
        .map(|r| r.switching_cost(system))
        .sum();
    benefit - cost
}

/// Enumerates joint type profiles with their product-prior probability.
pub struct JointTypes<'a> {
    spaces: &'a [TypeSpace],
    current: Vec<usize>,
    done: bool,
}

impl<'a> JointTypes<'a> {
    pub fn new(spaces: &'a [TypeSpace], cap: u128) -> Result<Self> {
        let count = spaces
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
            .unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::size(format!("{count} joint type profiles"), cap));
        }
        Ok(Self {
            spaces,
            current: vec![0; spaces.len()],
            done: false,
        })
    }
}

impl Iterator for JointTypes<'_> {
    type Item = (Vec<usize>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let prob = self
            .current
            .iter()
            .zip(self.spaces)
            .map(|(&k, s)| s.priors()[k])
            .product();
        let item = (self.current.clone(), prob);
        // odometer, last user fastest
        let mut i = self.current.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.spaces[i].len() {
                break;
            }
            self.current[i] = 0;
        }
        Some(item)
    }
}

/// Ex-ante expected utility of every user, by enumeration of joint types.
pub fn expected_utilities(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
) -> Result<Vec<f64>> {
    if strategies.users() != type_spaces.len() {
        return Err(Error::input("one type space per user is required"));
    }
    let mut totals = vec![0.0; strategies.users()];
    for (types, prob) in JointTypes::new(type_spaces, DEFAULT_JOINT_TYPE_CAP)? {
        let profile = strategies.realize(&types);
        for (acc, u) in totals.iter_mut().zip(utilities(system, &profile)) {
            *acc += u * prob;
        }
    }
    Ok(totals)
}

pub fn expected_utility(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
    user: usize,
) -> Result<f64> {
    if user >= strategies.users() {
        return Err(Error::input(format!("unknown user {user}")));
    }
    Ok(expected_utilities(system, strategies, type_spaces)?[user])
}

/// Expectation of [`potential`] over the joint type distribution.
pub fn bayesian_potential(
    system: &NetworkSystem,
    strategies: &StrategyProfile,
    type_spaces: &[TypeSpace],
) -> Result<f64> {
    if strategies.users() != type_spaces.len() {
        return Err(Error::input("one type space per user is required"));
    }
    let mut total = 0.0;
    for (types, prob) in JointTypes::new(type_spaces, DEFAULT_JOINT_TYPE_CAP)? {
        total += potential(system, &strategies.realize(&types)) * prob;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::worked_example;
    use crate::model::{Availability, MobilityPattern, CELLULAR};

    const TOL: f64 = 1e-9;

    fn one_network(users: usize, slots: usize, mu: f64) -> NetworkSystem {
        let mut a = Availability::new(users, 1, slots);
        a.grant_everywhere(CELLULAR).unwrap();
        NetworkSystem::new(
            vec![0.0, mu],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
            vec![vec![0, 1], vec![1, 0]],
            a,
        )
        .unwrap()
    }

    #[test]
    fn worked_example_congestion_and_utility() {
        let (system, _) = worked_example();
        let r1 = Route::from_pairs(&[(1, 1), (2, 3), (2, 4)]);
        let r2 = Route::from_pairs(&[(1, 1), (1, 2), (2, 4)]);
        let profile = ActionProfile::new(vec![r1.clone(), r2.clone()]);
        let field = congestion(&system, &profile);
        assert_eq!(field.get(2, 4), 2);
        assert_eq!(field.get(1, 1), 2);
        assert_eq!(field.total(), (r1.len() + r2.len()) as u64);
        // each earns 27 from the shared Wi-Fi point
        let u1 = utility(&system, &profile, 0);
        assert!((u1 - (150.0 + 54.0 + 27.0 - 10.0)).abs() < TOL);
    }

    #[test]
    fn single_user_no_switching() {
        let system = one_network(1, 2, 300.0);
        let profile = ActionProfile::new(vec![Route::constant(1, 2)]);
        assert_eq!(utility(&system, &profile, 0), 600.0);
        assert_eq!(social_welfare(&system, &profile), 600.0);
        assert_eq!(potential(&system, &profile), 600.0);
        let field = congestion(&system, &profile);
        assert!(field.iter().all(|(_, _, c)| c <= 1));
    }

    #[test]
    fn shared_point_potential_is_harmonic() {
        let system = one_network(2, 1, 54.0);
        let profile = ActionProfile::new(vec![Route::constant(1, 1), Route::constant(1, 1)]);
        assert!((potential(&system, &profile) - 54.0 * 1.5).abs() < TOL);
        assert!((utility(&system, &profile, 0) - 27.0).abs() < TOL);
    }

    #[test]
    fn idle_profile_is_worthless() {
        let system = one_network(3, 3, 100.0);
        let profile = ActionProfile::new(vec![Route::constant(0, 3); 3]);
        assert_eq!(social_welfare(&system, &profile), 0.0);
        assert_eq!(potential(&system, &profile), 0.0);
    }

    #[test]
    fn switching_can_make_utility_negative() {
        let system = one_network(1, 3, 1.0);
        let route = Route::from_pairs(&[(1, 1), (0, 3)]);
        let profile = ActionProfile::new(vec![route]);
        assert!((utility(&system, &profile, 0) - (1.0 - 2.0)).abs() < TOL);
    }

    #[test]
    fn prior_weighted_expected_utility() {
        // user 0 has two types; user 1 is single-typed
        let system = one_network(2, 2, 10.0);
        let p = MobilityPattern::new(vec![1, 1]).unwrap();
        let spaces = vec![
            TypeSpace::new(vec![p.clone(), p.clone()], vec![0.8, 0.2]).unwrap(),
            TypeSpace::single(p),
        ];
        let strategies = StrategyProfile::new(vec![
            vec![Route::constant(1, 2), Route::constant(0, 2)],
            vec![Route::constant(1, 2)],
        ]);
        let u_first = utility(&system, &strategies.realize(&[0, 0]), 0);
        let u_second = utility(&system, &strategies.realize(&[1, 0]), 0);
        let eu = expected_utility(&system, &strategies, &spaces, 0).unwrap();
        assert!((eu - (0.8 * u_first + 0.2 * u_second)).abs() < TOL);
        assert!((eu - 8.0).abs() < TOL);
        let eu1 = expected_utility(&system, &strategies, &spaces, 1).unwrap();
        assert!((eu1 - (0.8 * 10.0 + 0.2 * 20.0)).abs() < TOL);
        let psi = bayesian_potential(&system, &strategies, &spaces).unwrap();
        assert!((psi - (0.8 * 30.0 + 0.2 * 20.0)).abs() < TOL);
    }

    #[test]
    fn joint_type_cap() {
        let p = MobilityPattern::new(vec![1]).unwrap();
        let space = TypeSpace::new(vec![p.clone(), p], vec![0.5, 0.5]).unwrap();
        let spaces = vec![space; 4];
        assert_eq!(JointTypes::new(&spaces, 16).unwrap().count(), 16);
        assert!(JointTypes::new(&spaces, 15).is_err());
        let total: f64 = JointTypes::new(&spaces, 16).unwrap().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
