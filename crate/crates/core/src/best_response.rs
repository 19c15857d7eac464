//! Exact best responses by longest-path search on the network-time graph.
//!
//! Nodes are the eligible `(network, slot)` points of one user's pattern,
//! weighted by their expected throughput under the congestion pmf. An edge
//! `(n,t) -> (n',t')` exists when `t' = t + delta[n,n'] + 1` and costs
//! `c[n,n']`. Slots strictly increase along edges, so relaxing nodes in slot
//! order solves the longest-path problem in `O(V + E)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{
    check_user_pattern, successors, validate_route, MobilityPattern, NetworkSystem, Point, Route,
};
use crate::stats::CongestionPmf;

/// Anything that can answer "what is the congestion-level pmf at `(n,t)`".
pub trait PmfSource {
    fn pmf(&self, network: usize, slot: usize) -> &[f64];
}

impl PmfSource for CongestionPmf {
    fn pmf(&self, network: usize, slot: usize) -> &[f64] {
        CongestionPmf::pmf(self, network, slot)
    }
}

/// `sum_q capacity / (q + 1) * pmf[q]`.
pub fn expected_throughput(capacity: f64, pmf: &[f64]) -> f64 {
    pmf.iter()
        .enumerate()
        .map(|(q, p)| (capacity / (q + 1) as f64) * p)
        .sum()
}

fn node_gain(system: &NetworkSystem, pmfs: &impl PmfSource, p: Point) -> f64 {
    let mu = system.capacity(p.network);
    if mu == 0.0 {
        return 0.0;
    }
    expected_throughput(mu, pmfs.pmf(p.network, p.slot))
}

/// Expected value of a route given the congestion pmfs: expected throughput
/// at each point minus switching costs.
///
/// Accumulates in path order exactly as [`NetworkTimeGraph`] relaxes edges, so
/// both produce bit-identical values for the same route.
pub fn expected_route_value(system: &NetworkSystem, route: &Route, pmfs: &impl PmfSource) -> f64 {
    let mut points = route.points().iter();
    let Some(&first) = points.next() else {
        return 0.0;
    };
    let mut value = 0.0 + node_gain(system, pmfs, first);
    let mut prev = first;
    for &p in points {
        value += node_gain(system, pmfs, p) - system.switch_cost(prev.network, p.network);
        prev = p;
    }
    value
}

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cost: f64,
}

/// The time-expanded graph of one (user, pattern) pair.
#[derive(Clone, Debug)]
pub struct NetworkTimeGraph {
    slots: usize,
    networks: usize,
    /// Gain per dense node index `network * slots + slot - 1`; `None` when ineligible.
    gains: Vec<Option<f64>>,
    edges: Vec<Vec<Edge>>,
}

impl NetworkTimeGraph {
    pub fn build(
        system: &NetworkSystem,
        user: usize,
        pattern: &MobilityPattern,
        pmfs: &impl PmfSource,
    ) -> Result<Self> {
        check_user_pattern(system, user, pattern)?;
        let slots = system.slots();
        let networks = system.networks();
        let mut gains = vec![None; networks * slots];
        let mut edges = vec![Vec::new(); networks * slots];
        for t in 1..=slots {
            for n in system.eligible(user, pattern, t).iter() {
                let p = Point::new(n, t);
                let idx = n * slots + t - 1;
                gains[idx] = Some(node_gain(system, pmfs, p));
                edges[idx] = successors(system, user, pattern, p)
                    .map(|q| Edge {
                        to: q.network * slots + q.slot - 1,
                        cost: system.switch_cost(n, q.network),
                    })
                    .collect();
            }
        }
        Ok(Self {
            slots,
            networks,
            gains,
            edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.gains.iter().filter(|g| g.is_some()).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    fn point(&self, idx: usize) -> Point {
        Point::new(idx / self.slots, idx % self.slots + 1)
    }

    /// Highest-value source-to-sink path; lexicographically smallest among
    /// equal values.
    pub fn longest_path(&self) -> Option<(Route, f64)> {
        // best[v] = (value, path prefix ending at v); slot order is topological
        let mut best: Vec<Option<(f64, Vec<Point>)>> = vec![None; self.gains.len()];
        for n in 0..self.networks {
            let idx = n * self.slots;
            if let Some(g) = self.gains[idx] {
                best[idx] = Some((0.0 + g, vec![self.point(idx)]));
            }
        }
        for t in 1..=self.slots {
            for n in 0..self.networks {
                let idx = n * self.slots + t - 1;
                let Some((value, prefix)) = best[idx].clone() else {
                    continue;
                };
                for e in &self.edges[idx] {
                    let gain = self.gains[e.to].expect("edge heads are eligible");
                    let candidate = value + (gain - e.cost);
                    let replace = match &best[e.to] {
                        None => true,
                        Some((v, p)) => match candidate.total_cmp(v) {
                            Ordering::Greater => true,
                            Ordering::Less => false,
                            Ordering::Equal => prefix.as_slice() < &p[..p.len() - 1],
                        },
                    };
                    if replace {
                        let mut path = prefix.clone();
                        path.push(self.point(e.to));
                        best[e.to] = Some((candidate, path));
                    }
                }
            }
        }
        (0..self.networks)
            .filter_map(|n| best[n * self.slots + self.slots - 1].take())
            .reduce(|a, b| match b.0.total_cmp(&a.0) {
                Ordering::Greater => b,
                Ordering::Less => a,
                Ordering::Equal => {
                    if b.1 < a.1 {
                        b
                    } else {
                        a
                    }
                }
            })
            .map(|(v, path)| (Route::new(path), v))
    }
}

/// A best-response route with its expected value.
#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    pub route: Route,
    pub value: f64,
}

/// Best route for `user` under `pattern` against the congestion pmfs.
///
/// If `incumbent` is feasible, reaches the final slot and is optimal, it is
/// returned unchanged; otherwise ties resolve to the lexicographically
/// smallest optimal route.
pub fn best_response(
    system: &NetworkSystem,
    user: usize,
    pattern: &MobilityPattern,
    pmfs: &impl PmfSource,
    incumbent: Option<&Route>,
) -> Result<BestResponse> {
    let graph = NetworkTimeGraph::build(system, user, pattern, pmfs)?;
    let (route, value) = graph.longest_path().ok_or(Error::Infeasible { user })?;
    if let Some(inc) = incumbent {
        if inc.reaches(system.slots()) && validate_route(system, user, pattern, inc).is_ok() {
            let inc_value = expected_route_value(system, inc, pmfs);
            if inc_value >= value {
                return Ok(BestResponse {
                    route: inc.clone(),
                    value: inc_value,
                });
            }
        }
    }
    Ok(BestResponse { route, value })
}
