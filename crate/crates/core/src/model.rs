//! Domain types for the integrated cellular/Wi-Fi system.
//!
//! Networks are indexed `0..=N`: network [`IDLE`] is the zero-capacity idle
//! pseudo-network, network [`CELLULAR`] is the cellular network and
//! `2..=N` are Wi-Fi networks. Slots (`1..=T`) and locations (`1..=L`) are
//! one-based; users are zero-based indices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const IDLE: usize = 0;
pub const CELLULAR: usize = 1;

/// Largest number of networks (including idle) a [`NetworkSet`] can hold.
pub const MAX_NETWORKS: usize = 64;

/// Default guard on the number of routes [`enumerate_routes`] materialises.
pub const DEFAULT_ROUTE_CAP: u128 = 10_000_000;

const PRIOR_TOLERANCE: f64 = 1e-12;

/// A network-time point: occupancy of `network` during `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub network: usize,
    pub slot: usize,
}

impl Point {
    pub const fn new(network: usize, slot: usize) -> Self {
        Self { network, slot }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.network, self.slot)
    }
}

/// A set of network indices stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct NetworkSet(u64);

impl NetworkSet {
    pub const EMPTY: NetworkSet = NetworkSet(0);

    pub fn idle_only() -> Self {
        NetworkSet(1)
    }

    pub fn contains(self, network: usize) -> bool {
        network < MAX_NETWORKS && self.0 & (1 << network) != 0
    }

    pub fn insert(&mut self, network: usize) {
        assert!(
            network < MAX_NETWORKS,
            "network index {network} out of range"
        );
        self.0 |= 1 << network;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Networks in ascending index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_NETWORKS).filter(move |n| bits & (1 << n) != 0)
    }
}

impl FromIterator<usize> for NetworkSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = NetworkSet::EMPTY;
        for n in iter {
            set.insert(n);
        }
        set
    }
}

impl fmt::Debug for NetworkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Dense (user, location, slot) availability map. The idle network is always
/// present and cannot be removed.
#[derive(Clone, Debug, PartialEq)]
pub struct Availability {
    users: usize,
    locations: usize,
    slots: usize,
    masks: Vec<NetworkSet>,
}

impl Availability {
    /// Availability where only the idle network can be used.
    pub fn new(users: usize, locations: usize, slots: usize) -> Self {
        Self {
            users,
            locations,
            slots,
            masks: vec![NetworkSet::idle_only(); users * locations * slots],
        }
    }

    fn index(&self, user: usize, location: usize, slot: usize) -> usize {
        debug_assert!(user < self.users);
        debug_assert!((1..=self.locations).contains(&location));
        debug_assert!((1..=self.slots).contains(&slot));
        (user * self.locations + (location - 1)) * self.slots + (slot - 1)
    }

    fn check(&self, user: usize, location: usize, slot: usize) -> Result<()> {
        if user >= self.users {
            return Err(Error::input(format!("unknown user {user}")));
        }
        if !(1..=self.locations).contains(&location) {
            return Err(Error::input(format!("unknown location {location}")));
        }
        if !(1..=self.slots).contains(&slot) {
            return Err(Error::input(format!(
                "slot {slot} outside 1..={}",
                self.slots
            )));
        }
        Ok(())
    }

    pub fn grant(
        &mut self,
        user: usize,
        location: usize,
        slot: usize,
        network: usize,
    ) -> Result<()> {
        self.check(user, location, slot)?;
        let idx = self.index(user, location, slot);
        self.masks[idx].insert(network);
        Ok(())
    }

    /// Grant `network` to every user at `location` in every slot.
    pub fn grant_location(&mut self, location: usize, network: usize) -> Result<()> {
        for user in 0..self.users {
            for slot in 1..=self.slots {
                self.grant(user, location, slot, network)?;
            }
        }
        Ok(())
    }

    /// Grant `network` to every user everywhere.
    pub fn grant_everywhere(&mut self, network: usize) -> Result<()> {
        for location in 1..=self.locations {
            self.grant_location(location, network)?;
        }
        Ok(())
    }

    pub fn get(&self, user: usize, location: usize, slot: usize) -> NetworkSet {
        self.masks[self.index(user, location, slot)]
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn locations(&self) -> usize {
        self.locations
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    fn max_network(&self) -> Option<usize> {
        self.masks.iter().filter_map(|m| m.iter().last()).max()
    }
}

/// Networks with capacities, switching penalties and the availability map.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSystem {
    capacity: Vec<f64>,
    switch_cost: Vec<f64>,
    switch_time: Vec<usize>,
    availability: Availability,
}

impl NetworkSystem {
    /// Builds and validates a system with `capacity.len()` networks
    /// (idle included). Costs and times are square matrices over the same
    /// index set.
    ///
    /// The idle triangle inequalities are checked over every triple of real
    /// networks `n -> n' -> n''` with `n != n'` and `n' != n''`, and the cost
    /// inequality is checked non-strictly.
    pub fn new(
        capacity: Vec<f64>,
        switch_cost: Vec<Vec<f64>>,
        switch_time: Vec<Vec<usize>>,
        availability: Availability,
    ) -> Result<Self> {
        let k = capacity.len();
        if k < 2 {
            return Err(Error::system("need at least the idle and one real network"));
        }
        if k > MAX_NETWORKS {
            return Err(Error::system(format!(
                "at most {MAX_NETWORKS} networks supported"
            )));
        }
        if capacity[IDLE] != 0.0 {
            return Err(Error::system("idle network capacity must be 0"));
        }
        if let Some(n) = capacity.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::system(format!(
                "capacity of network {n} must be finite and >= 0"
            )));
        }
        if switch_cost.len() != k || switch_cost.iter().any(|row| row.len() != k) {
            return Err(Error::system(format!("switch cost matrix must be {k}x{k}")));
        }
        if switch_time.len() != k || switch_time.iter().any(|row| row.len() != k) {
            return Err(Error::system(format!("switch time matrix must be {k}x{k}")));
        }
        let users = availability.users();
        if users == 0 || availability.locations() == 0 || availability.slots() == 0 {
            return Err(Error::system("users, locations and slots must be positive"));
        }
        if let Some(max) = availability.max_network() {
            if max >= k {
                return Err(Error::system(format!(
                    "availability references network {max} but only {k} networks exist"
                )));
            }
        }
        for n in 0..k {
            if switch_cost[n][n] != 0.0 || switch_time[n][n] != 0 {
                return Err(Error::system(format!(
                    "staying on network {n} must be free"
                )));
            }
            for (m, &c) in switch_cost[n].iter().enumerate() {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::system(format!(
                        "switch cost {n}->{m} must be finite and >= 0"
                    )));
                }
            }
        }
        for a in 1..k {
            for b in 1..k {
                if a == b {
                    continue;
                }
                for c in 1..k {
                    if b == c {
                        continue;
                    }
                    let via = switch_time[a][b] + switch_time[b][c];
                    let idle = switch_time[a][IDLE] + switch_time[IDLE][c];
                    if via < idle {
                        return Err(Error::system(format!(
                            "switch time {a}->{b}->{c} ({via}) is shorter than through idle ({idle})"
                        )));
                    }
                    let via = switch_cost[a][b] + switch_cost[b][c];
                    let idle = switch_cost[a][IDLE] + switch_cost[IDLE][c];
                    if via < idle {
                        return Err(Error::system(format!(
                            "switch cost {a}->{b}->{c} ({via}) is cheaper than through idle ({idle})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            capacity,
            switch_cost: switch_cost.into_iter().flatten().collect(),
            switch_time: switch_time.into_iter().flatten().collect(),
            availability,
        })
    }

    /// Number of real networks `N` (idle excluded).
    pub fn network_count(&self) -> usize {
        self.capacity.len() - 1
    }

    /// Number of network indices, `N + 1`.
    pub fn networks(&self) -> usize {
        self.capacity.len()
    }

    pub fn is_wifi(&self, network: usize) -> bool {
        network > CELLULAR && network < self.networks()
    }

    pub fn wifi_networks(&self) -> impl Iterator<Item = usize> {
        2..self.networks()
    }

    pub fn capacity(&self, network: usize) -> f64 {
        self.capacity[network]
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacity
    }

    pub fn switch_cost(&self, from: usize, to: usize) -> f64 {
        self.switch_cost[from * self.networks() + to]
    }

    pub fn switch_time(&self, from: usize, to: usize) -> usize {
        self.switch_time[from * self.networks() + to]
    }

    pub fn users(&self) -> usize {
        self.availability.users()
    }

    pub fn locations(&self) -> usize {
        self.availability.locations()
    }

    pub fn slots(&self) -> usize {
        self.availability.slots()
    }

    pub fn availability(&self) -> &Availability {
        &self.availability
    }

    /// Checks that `pattern` spans the horizon over known locations.
    pub fn check_pattern(&self, pattern: &MobilityPattern) -> Result<()> {
        if pattern.len() != self.slots() {
            return Err(Error::input(format!(
                "mobility pattern has {} slots, system has {}",
                pattern.len(),
                self.slots()
            )));
        }
        if let Some(l) = pattern.locations().iter().find(|&&l| l > self.locations()) {
            return Err(Error::input(format!("unknown location {l}")));
        }
        Ok(())
    }

    /// `M[i, l[i,slot], slot]`: networks user `user` can use at `slot` under `pattern`.
    pub fn available_networks(
        &self,
        user: usize,
        pattern: &MobilityPattern,
        slot: usize,
    ) -> Result<NetworkSet> {
        if user >= self.users() {
            return Err(Error::input(format!("unknown user {user}")));
        }
        if !(1..=self.slots()).contains(&slot) {
            return Err(Error::input(format!(
                "slot {slot} outside 1..={}",
                self.slots()
            )));
        }
        self.check_pattern(pattern)?;
        Ok(self.eligible(user, pattern, slot))
    }

    /// Unchecked availability lookup; callers guarantee the indices are valid.
    pub(crate) fn eligible(
        &self,
        user: usize,
        pattern: &MobilityPattern,
        slot: usize,
    ) -> NetworkSet {
        self.availability.get(user, pattern.location(slot), slot)
    }
}

/// A user's location in each slot, `l[i,t]` for `t = 1..=T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MobilityPattern {
    locations: Vec<usize>,
}

impl MobilityPattern {
    pub fn new(locations: Vec<usize>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::input(
                "mobility pattern must cover at least one slot",
            ));
        }
        if locations.contains(&0) {
            return Err(Error::input("locations are numbered from 1"));
        }
        Ok(Self { locations })
    }

    /// Location at (one-based) `slot`.
    pub fn location(&self, slot: usize) -> usize {
        self.locations[slot - 1]
    }

    pub fn locations(&self) -> &[usize] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// A user's possible mobility patterns (types) with their prior probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeSpace {
    patterns: Vec<MobilityPattern>,
    priors: Vec<f64>,
}

impl TypeSpace {
    pub fn new(patterns: Vec<MobilityPattern>, priors: Vec<f64>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::input("type space must contain a pattern"));
        }
        if patterns.len() != priors.len() {
            return Err(Error::input("one prior per pattern is required"));
        }
        if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::input("priors must be nonnegative"));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_TOLERANCE {
            return Err(Error::input(format!("priors sum to {total}, not 1")));
        }
        let start = patterns[0].location(1);
        if patterns.iter().any(|p| p.location(1) != start) {
            return Err(Error::input("all patterns must share the slot-1 location"));
        }
        Ok(Self { patterns, priors })
    }

    /// Deterministic mobility: one pattern with probability 1.
    pub fn single(pattern: MobilityPattern) -> Self {
        Self {
            patterns: vec![pattern],
            priors: vec![1.0],
        }
    }

    pub fn patterns(&self) -> &[MobilityPattern] {
        &self.patterns
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MobilityPattern, f64)> {
        self.patterns.iter().zip(self.priors.iter().copied())
    }

    pub fn position(&self, pattern: &MobilityPattern) -> Option<usize> {
        self.patterns.iter().position(|p| p == pattern)
    }
}

/// A network-time route: the sequence of points a user occupies, skipping
/// slots spent mid-switch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route {
    points: Vec<Point>,
}

impl Route {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    /// Builds a route from `(network, slot)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self::new(pairs.iter().map(|&(n, t)| Point::new(n, t)).collect())
    }

    /// Staying on `network` for slots `1..=slots`.
    pub fn constant(network: usize, slots: usize) -> Self {
        Self::new((1..=slots).map(|t| Point::new(network, t)).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Consecutive point pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last_slot(&self) -> Option<usize> {
        self.points.last().map(|p| p.slot)
    }

    /// Whether the final point lands on slot `slots`.
    pub fn reaches(&self, slots: usize) -> bool {
        self.last_slot() == Some(slots)
    }

    /// Number of consecutive pairs that change network.
    pub fn switch_count(&self) -> usize {
        self.edges().filter(|(a, b)| a.network != b.network).count()
    }

    /// Total switching cost along the route.
    pub fn switching_cost(&self, system: &NetworkSystem) -> f64 {
        self.edges()
            .map(|(a, b)| system.switch_cost(a.network, b.network))
            .sum()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// The first feasibility condition a route breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteViolation {
    /// Slots must start at 1, strictly increase and stay within the horizon.
    Causality { index: usize },
    /// Each point's network must be available at its slot.
    Eligibility { index: usize },
    /// Gaps between points must equal the switching time plus one.
    SwitchingTime { index: usize },
}

impl RouteViolation {
    /// Feasibility condition number (1 causality, 2 eligibility, 3 switching time).
    pub fn condition(self) -> u8 {
        match self {
            RouteViolation::Causality { .. } => 1,
            RouteViolation::Eligibility { .. } => 2,
            RouteViolation::SwitchingTime { .. } => 3,
        }
    }
}

impl fmt::Display for RouteViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RouteViolation::Causality { index } => write!(f, "causality violated at point {index}"),
            RouteViolation::Eligibility { index } => {
                write!(f, "network unavailable at point {index}")
            }
            RouteViolation::SwitchingTime { index } => {
                write!(
                    f,
                    "switching time violated between points {index} and {}",
                    index + 1
                )
            }
        }
    }
}

impl std::error::Error for RouteViolation {}

/// Checks the three feasibility conditions. An empty route fails causality.
/// The route need not reach the final slot; see [`Route::reaches`].
pub fn validate_route(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
    route: &Route,
) -> std::result::Result<(), RouteViolation> {
    let points = route.points();
    if points.is_empty() || points[0].slot != 1 {
        return Err(RouteViolation::Causality { index: 0 });
    }
    for (q, p) in points.iter().enumerate() {
        let increasing = q == 0 || p.slot > points[q - 1].slot;
        if !increasing || p.slot > system.slots() || p.slot > pattern.len() {
            return Err(RouteViolation::Causality { index: q });
        }
    }
    for (q, p) in points.iter().enumerate() {
        let ok = user < system.users()
            && pattern.location(p.slot) <= system.locations()
            && system.eligible(user, pattern, p.slot).contains(p.network);
        if !ok {
            return Err(RouteViolation::Eligibility { index: q });
        }
    }
    for (q, w) in points.windows(2).enumerate() {
        if w[1].slot - w[0].slot != system.switch_time(w[0].network, w[1].network) + 1 {
            return Err(RouteViolation::SwitchingTime { index: q });
        }
    }
    Ok(())
}

/// Successor points reachable from `from` (ascending network order).
pub(crate) fn successors<'a>(
    system: &'a NetworkSystem,
    user: usize,
    pattern: &'a MobilityPattern,
    from: Point,
) -> impl Iterator<Item = Point> + 'a {
    (0..system.networks()).filter_map(move |m| {
        let slot = from.slot + system.switch_time(from.network, m) + 1;
        (slot <= system.slots() && system.eligible(user, pattern, slot).contains(m))
            .then_some(Point::new(m, slot))
    })
}

/// Number of feasible routes from slot 1 that end exactly on the final slot.
pub fn count_routes(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
) -> Result<u128> {
    check_user_pattern(system, user, pattern)?;
    let t_max = system.slots();
    let k = system.networks();
    // completions[t][n]: number of ways to finish from (n, t)
    let mut completions = vec![vec![0u128; k]; t_max + 1];
    for t in (1..=t_max).rev() {
        let here = system.eligible(user, pattern, t);
        for n in here.iter() {
            completions[t][n] = if t == t_max {
                1
            } else {
                successors(system, user, pattern, Point::new(n, t))
                    .map(|p| completions[p.slot][p.network])
                    .fold(0u128, |a, b| a.saturating_add(b))
            };
        }
    }
    Ok(completions[1]
        .iter()
        .fold(0u128, |a, &b| a.saturating_add(b)))
}

/// All feasible routes ending on the final slot, in lexicographic order,
/// guarded by [`DEFAULT_ROUTE_CAP`].
pub fn enumerate_routes(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
) -> Result<Vec<Route>> {
    enumerate_routes_capped(system, user, pattern, DEFAULT_ROUTE_CAP)
}

pub fn enumerate_routes_capped(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
    cap: u128,
) -> Result<Vec<Route>> {
    let count = count_routes(system, user, pattern)?;
    if count > cap {
        return Err(Error::size(format!("{count} feasible routes"), cap));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut stack = Vec::with_capacity(system.slots());
    for n in system.eligible(user, pattern, 1).iter() {
        stack.push(Point::new(n, 1));
        extend_routes(system, user, pattern, &mut stack, &mut out);
        stack.pop();
    }
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn extend_routes(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
    stack: &mut Vec<Point>,
    out: &mut Vec<Route>,
) {
    let last = *stack.last().expect("nonempty prefix");
    if last.slot == system.slots() {
        out.push(Route::new(stack.clone()));
        return;
    }
    for next in successors(system, user, pattern, last) {
        stack.push(next);
        extend_routes(system, user, pattern, stack, out);
        stack.pop();
    }
}

pub(crate) fn check_user_pattern(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
) -> Result<()> {
    if user >= system.users() {
        return Err(Error::input(format!("unknown user {user}")));
    }
    system.check_pattern(pattern)
}

/// The two-user, four-slot example: cellular everywhere, one Wi-Fi AP
/// (network 2) covering locations 15 and 16, unit switching times. User 0
/// walks 14, 15, 16, 16 and user 1 walks 4, 8, 12, 16 on the 4x4 grid.
pub fn worked_example() -> (NetworkSystem, Vec<MobilityPattern>) {
    let mut avail = Availability::new(2, 16, 4);
    avail.grant_everywhere(CELLULAR).expect("valid example");
    avail.grant_location(15, 2).expect("valid example");
    avail.grant_location(16, 2).expect("valid example");
    let cost = vec![
        vec![0.0, 5.0, 5.0],
        vec![5.0, 0.0, 10.0],
        vec![5.0, 10.0, 0.0],
    ];
    let time = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
    let system =
        NetworkSystem::new(vec![0.0, 300.0, 54.0], cost, time, avail).expect("valid example");
    let patterns = vec![
        MobilityPattern::new(vec![14, 15, 16, 16]).expect("valid example"),
        MobilityPattern::new(vec![4, 8, 12, 16]).expect("valid example"),
    ];
    (system, patterns)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) use super::worked_example;

    #[test]
    fn available_networks_follow_location() {
        let (system, patterns) = worked_example();
        let at1: Vec<_> = system
            .available_networks(0, &patterns[0], 1)
            .unwrap()
            .iter()
            .collect();
        assert_eq!(at1, vec![0, 1]);
        let at3: Vec<_> = system
            .available_networks(0, &patterns[0], 3)
            .unwrap()
            .iter()
            .collect();
        assert_eq!(at3, vec![0, 1, 2]);
        assert!(system.available_networks(2, &patterns[0], 1).is_err());
        assert!(system.available_networks(0, &patterns[0], 5).is_err());
    }

    #[test]
    fn validate_worked_route() {
        let (system, patterns) = worked_example();
        let r1 = Route::from_pairs(&[(1, 1), (2, 3), (2, 4)]);
        assert_eq!(validate_route(&system, 0, &patterns[0], &r1), Ok(()));
    }

    #[test]
    fn violations_are_identified() {
        let (system, patterns) = worked_example();
        let p = &patterns[0];
        let short_gap = Route::from_pairs(&[(1, 1), (2, 2)]);
        assert_eq!(
            validate_route(&system, 0, p, &short_gap)
                .unwrap_err()
                .condition(),
            3
        );
        let late = Route::from_pairs(&[(1, 2), (1, 3)]);
        assert_eq!(
            validate_route(&system, 0, p, &late)
                .unwrap_err()
                .condition(),
            1
        );
        let empty = Route::new(vec![]);
        assert_eq!(
            validate_route(&system, 0, p, &empty)
                .unwrap_err()
                .condition(),
            1
        );
        let wifi_at_start = Route::from_pairs(&[(2, 1), (2, 2)]);
        assert_eq!(
            validate_route(&system, 0, p, &wifi_at_start)
                .unwrap_err()
                .condition(),
            2
        );
        let past_horizon = Route::from_pairs(&[(1, 1), (1, 2), (1, 3), (1, 4), (1, 5)]);
        assert_eq!(
            validate_route(&system, 0, p, &past_horizon)
                .unwrap_err()
                .condition(),
            1
        );
    }

    #[test]
    fn enumeration_contains_worked_route() {
        let (system, patterns) = worked_example();
        let routes = enumerate_routes(&system, 0, &patterns[0]).unwrap();
        assert!(routes.contains(&Route::from_pairs(&[(1, 1), (2, 3), (2, 4)])));
        assert!(routes.windows(2).all(|w| w[0] < w[1]));
        for r in &routes {
            assert_eq!(validate_route(&system, 0, &patterns[0], r), Ok(()));
            assert!(r.reaches(4));
        }
    }

    #[test]
    fn single_slot_routes() {
        let mut avail = Availability::new(1, 1, 1);
        avail.grant_everywhere(CELLULAR).unwrap();
        avail.grant_everywhere(2).unwrap();
        let system = NetworkSystem::new(
            vec![0.0, 10.0, 5.0],
            vec![vec![0.0; 3]; 3],
            vec![vec![0; 3]; 3],
            avail,
        )
        .unwrap();
        let p = MobilityPattern::new(vec![1]).unwrap();
        let routes = enumerate_routes(&system, 0, &p).unwrap();
        assert_eq!(
            routes,
            vec![
                Route::constant(0, 1),
                Route::constant(1, 1),
                Route::constant(2, 1)
            ]
        );
    }

    #[test]
    fn route_cap_is_enforced() {
        let (system, patterns) = worked_example();
        let err = enumerate_routes_capped(&system, 0, &patterns[0], 1).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { cap: 1, .. }));
    }

    #[test]
    fn system_validation() {
        let avail = || {
            let mut a = Availability::new(1, 1, 2);
            a.grant_everywhere(CELLULAR).unwrap();
            a
        };
        let ok_cost = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let ok_time = vec![vec![0, 1], vec![1, 0]];
        assert!(
            NetworkSystem::new(vec![1.0, 5.0], ok_cost.clone(), ok_time.clone(), avail()).is_err()
        );
        assert!(NetworkSystem::new(
            vec![0.0, 5.0],
            vec![vec![0.0, 1.0], vec![1.0, 2.0]],
            ok_time.clone(),
            avail()
        )
        .is_err());
        assert!(
            NetworkSystem::new(vec![0.0, -5.0], ok_cost.clone(), ok_time.clone(), avail()).is_err()
        );
        assert!(NetworkSystem::new(vec![0.0, 5.0], ok_cost, ok_time, avail()).is_ok());

        // direct switching cheaper than the idle detour
        let cost = vec![
            vec![0.0, 10.0, 10.0],
            vec![10.0, 0.0, 1.0],
            vec![10.0, 1.0, 0.0],
        ];
        let time = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        let mut a = Availability::new(1, 1, 2);
        a.grant_everywhere(CELLULAR).unwrap();
        let err = NetworkSystem::new(vec![0.0, 5.0, 5.0], cost, time, a).unwrap_err();
        assert!(err.to_string().contains("cheaper than through idle"));

        // switching time shorter than the idle detour
        let cost = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 2.0],
            vec![1.0, 2.0, 0.0],
        ];
        let time = vec![vec![0, 2, 2], vec![2, 0, 1], vec![2, 1, 0]];
        let err = NetworkSystem::new(vec![0.0, 5.0, 5.0], cost, time, Availability::new(1, 1, 2))
            .unwrap_err();
        assert!(err.to_string().contains("shorter than through idle"));
    }

    #[test]
    fn type_space_validation() {
        let a = MobilityPattern::new(vec![14, 15, 16, 16]).unwrap();
        let b = MobilityPattern::new(vec![14, 10, 9, 13]).unwrap();
        let c = MobilityPattern::new(vec![4, 8, 12, 16]).unwrap();
        assert!(TypeSpace::new(vec![a.clone(), b.clone()], vec![0.8, 0.2]).is_ok());
        assert!(TypeSpace::new(vec![a.clone(), b.clone()], vec![0.8, 0.3]).is_err());
        assert!(TypeSpace::new(vec![a.clone(), c], vec![0.5, 0.5]).is_err());
        assert!(TypeSpace::new(vec![], vec![]).is_err());
        assert!(TypeSpace::new(vec![a, b], vec![1.2, -0.2]).is_err());
        assert!(MobilityPattern::new(vec![0, 1]).is_err());
    }
}
