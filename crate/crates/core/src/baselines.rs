//! The comparison policies: cellular-only, on-the-spot offloading and
//! Wiffler. None of them reads switching costs.
//!
//! All three share one greedy forward constructor. From the current point
//! `(n,t)` the policy ranks candidate networks; staying on `n` lands on
//! `t+1`, switching to `x` lands on `t + delta[n,x] + 1`, and the first
//! candidate that is eligible at its landing slot and can still be carried
//! on to the final slot is taken. Idle is always available, so the walk
//! never gets stuck.

use crate::error::Result;
use crate::model::{
    check_user_pattern, successors, MobilityPattern, NetworkSet, NetworkSystem, Point, Route,
    CELLULAR, IDLE,
};

/// A baseline route and whether the policy had to leave its intended network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularRoute {
    pub route: Route,
    /// Cellular was missing somewhere and idle filled in.
    pub fallback: bool,
}

/// Wi-Fi networks, highest capacity first, then lowest index.
fn ranked_wifi(system: &NetworkSystem) -> Vec<usize> {
    let mut wifi: Vec<usize> = system.wifi_networks().collect();
    wifi.sort_by(|&a, &b| {
        system
            .capacity(b)
            .total_cmp(&system.capacity(a))
            .then(a.cmp(&b))
    });
    wifi
}

/// `finishable[t-1]`: networks at slot `t` from which some route reaches
/// the final slot.
fn finishable(system: &NetworkSystem, user: usize, pattern: &MobilityPattern) -> Vec<NetworkSet> {
    let slots = system.slots();
    let mut out = vec![NetworkSet::default(); slots];
    for t in (1..=slots).rev() {
        for n in system.eligible(user, pattern, t).iter() {
            let done = t == slots
                || successors(system, user, pattern, Point::new(n, t))
                    .any(|q| out[q.slot - 1].contains(q.network));
            if done {
                out[t - 1].insert(n);
            }
        }
    }
    out
}

fn greedy_route(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
    opening: &[usize],
    mut rank: impl FnMut(Point) -> Vec<usize>,
) -> Route {
    let ok = finishable(system, user, pattern);
    let first = opening
        .iter()
        .copied()
        .chain([IDLE])
        .find(|&n| ok[0].contains(n))
        .expect("idle can always be held to the end");
    let mut points = vec![Point::new(first, 1)];
    loop {
        let here = *points.last().expect("route has a first point");
        if here.slot >= system.slots() {
            break;
        }
        let next = rank(here).into_iter().find_map(|x| {
            let slot = here.slot + system.switch_time(here.network, x) + 1;
            (slot <= system.slots() && ok[slot - 1].contains(x)).then_some(Point::new(x, slot))
        });
        points.push(next.expect("a finishable point has a finishable successor"));
    }
    Route::new(points)
}

/// Cellular in every slot; idle wherever cellular is missing.
pub fn cellular_only(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
) -> Result<CellularRoute> {
    check_user_pattern(system, user, pattern)?;
    let route = greedy_route(system, user, pattern, &[CELLULAR], |p| {
        vec![CELLULAR, p.network, IDLE]
    });
    let fallback = route.points().iter().any(|p| p.network != CELLULAR);
    Ok(CellularRoute { route, fallback })
}

/// Wi-Fi whenever some Wi-Fi network can be reached, cellular otherwise.
/// An occupied Wi-Fi network is kept while it stays available.
pub fn otso(system: &NetworkSystem, user: usize, pattern: &MobilityPattern) -> Result<Route> {
    check_user_pattern(system, user, pattern)?;
    Ok(greedy_route(
        system,
        user,
        pattern,
        &opening(system, false),
        |p| preference(system, p, false),
    ))
}

/// Wiffler's threshold rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WifflerParams {
    /// Conservativeness `theta`.
    pub theta: f64,
    /// Normalised remaining data size `k`.
    pub k: f64,
    /// The policy's estimate of the chance of meeting Wi-Fi in a slot.
    pub p_wifi: f64,
}

impl WifflerParams {
    pub fn new(p_wifi: f64) -> Self {
        Self {
            theta: 1.0,
            k: 0.5,
            p_wifi,
        }
    }

    /// Expected Wi-Fi transfer over the remaining slots as a share of what
    /// those slots could carry on Wi-Fi; zero when nothing remains.
    pub fn zeta(&self, remaining_slots: usize) -> f64 {
        if remaining_slots == 0 {
            0.0
        } else {
            self.p_wifi
        }
    }

    fn waits(&self, remaining_slots: usize) -> bool {
        self.zeta(remaining_slots) >= self.theta * self.k
    }
}

/// Like OTSO, but when no Wi-Fi is in reach and enough Wi-Fi is expected
/// later (`zeta >= theta * k`) it idles instead of using cellular.
pub fn wiffler(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
    params: WifflerParams,
) -> Result<Route> {
    check_user_pattern(system, user, pattern)?;
    let slots = system.slots();
    let first = opening(system, params.waits(slots - 1));
    Ok(greedy_route(system, user, pattern, &first, |p| {
        preference(system, p, params.waits(slots - p.slot))
    }))
}

/// Slot-1 preference: best Wi-Fi, then cellular unless waiting, then idle.
fn opening(system: &NetworkSystem, wait: bool) -> Vec<usize> {
    let mut order = ranked_wifi(system);
    if !wait {
        order.push(CELLULAR);
    }
    order
}

fn preference(system: &NetworkSystem, at: Point, wait: bool) -> Vec<usize> {
    let mut order = Vec::with_capacity(system.networks() + 3);
    if system.is_wifi(at.network) {
        order.push(at.network);
    }
    order.extend(ranked_wifi(system));
    if wait {
        order.push(IDLE);
    }
    order.extend([CELLULAR, at.network, IDLE]);
    order
}
