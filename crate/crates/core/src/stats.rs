//! Operator-side congestion statistics.
//!
//! Users report how likely they are to occupy each network-time point; the
//! operator turns the other users' reports into the distribution of the
//! congestion level a given user would face there.

use crate::error::{Error, Result};
use crate::model::{NetworkSystem, Route, TypeSpace};

/// `p_i[n,t]` for one user: the prior mass of types whose route visits `(n,t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionStats {
    slots: usize,
    probs: Vec<f64>,
}

impl SelectionStats {
    pub fn zeros(networks: usize, slots: usize) -> Self {
        Self {
            slots,
            probs: vec![0.0; networks * slots],
        }
    }

    pub fn get(&self, network: usize, slot: usize) -> f64 {
        self.probs[network * self.slots + slot - 1]
    }

    fn add(&mut self, network: usize, slot: usize, p: f64) {
        self.probs[network * self.slots + slot - 1] += p;
    }

    pub fn networks(&self) -> usize {
        self.probs.len() / self.slots
    }

    pub fn slots(&self) -> usize {
        self.slots
    }
}

/// Selection statistics of one user's per-type strategy.
pub fn selection_stats(
    system: &NetworkSystem,
    strategy: &[Route],
    space: &TypeSpace,
) -> Result<SelectionStats> {
    if strategy.len() != space.len() {
        return Err(Error::input(format!(
            "strategy covers {} types, type space has {}",
            strategy.len(),
            space.len()
        )));
    }
    let mut stats = SelectionStats::zeros(system.networks(), system.slots());
    for (route, (_, prior)) in strategy.iter().zip(space.iter()) {
        for p in route.points() {
            if p.network >= system.networks() || !(1..=system.slots()).contains(&p.slot) {
                return Err(Error::input(format!("route point {p} outside the system")));
            }
            stats.add(p.network, p.slot, prior);
        }
    }
    Ok(stats)
}

/// Distribution of the number of successes among independent Bernoulli
/// trials, returned as a vector of length `len` (levels `0..len`).
///
/// Trials with probability exactly 0 leave the distribution unchanged and are
/// skipped.
pub fn poisson_binomial(probs: impl IntoIterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut pmf = vec![0.0; len.max(1)];
    pmf[0] = 1.0;
    let mut support = 0usize;
    for p in probs {
        if p == 0.0 {
            continue;
        }
        support += 1;
        let top = support.min(pmf.len() - 1);
        for q in (1..=top).rev() {
            pmf[q] = pmf[q] * (1.0 - p) + pmf[q - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// Congestion-level distributions faced by one user at every network-time
/// point, levels `0..I` (the user excluded).
#[derive(Clone, Debug, PartialEq)]
pub struct CongestionPmf {
    excluded: usize,
    slots: usize,
    levels: usize,
    data: Vec<f64>,
}

impl CongestionPmf {
    pub fn excluded_user(&self) -> usize {
        self.excluded
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn pmf(&self, network: usize, slot: usize) -> &[f64] {
        let start = (network * self.slots + slot - 1) * self.levels;
        &self.data[start..start + self.levels]
    }

    /// A table with every point uncongested.
    pub fn uncongested(networks: usize, slots: usize, levels: usize) -> Self {
        let mut data = vec![0.0; networks * slots * levels];
        for chunk in data.chunks_mut(levels) {
            chunk[0] = 1.0;
        }
        Self {
            excluded: 0,
            slots,
            levels,
            data,
        }
    }

    /// Table from explicit per-point vectors, `pmfs[n][t-1]`.
    pub fn from_vectors(excluded: usize, pmfs: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let slots = pmfs.first().map_or(0, |v| v.len());
        let levels = pmfs.first().and_then(|v| v.first()).map_or(0, |v| v.len());
        if slots == 0 || levels == 0 {
            return Err(Error::input("empty pmf table"));
        }
        let mut data = Vec::new();
        for per_network in &pmfs {
            if per_network.len() != slots || per_network.iter().any(|v| v.len() != levels) {
                return Err(Error::input("ragged pmf table"));
            }
            for v in per_network {
                data.extend_from_slice(v);
            }
        }
        Ok(Self {
            excluded,
            slots,
            levels,
            data,
        })
    }
}

/// The operator's statistics database: latest report from each user.
#[derive(Clone, Debug)]
pub struct Operator {
    networks: usize,
    slots: usize,
    reports: Vec<Option<SelectionStats>>,
}

impl Operator {
    pub fn new(system: &NetworkSystem) -> Self {
        Self {
            networks: system.networks(),
            slots: system.slots(),
            reports: vec![None; system.users()],
        }
    }

    pub fn users(&self) -> usize {
        self.reports.len()
    }

    pub fn report(&mut self, user: usize, stats: SelectionStats) -> Result<()> {
        if user >= self.users() {
            return Err(Error::input(format!("unknown user {user}")));
        }
        if stats.networks() != self.networks || stats.slots() != self.slots {
            return Err(Error::input("selection stats do not match the system"));
        }
        self.reports[user] = Some(stats);
        Ok(())
    }

    pub fn stats(&self, user: usize) -> Option<&SelectionStats> {
        self.reports.get(user).and_then(Option::as_ref)
    }

    fn others(&self, excluded: usize) -> Result<Vec<&SelectionStats>> {
        if excluded >= self.users() {
            return Err(Error::input(format!("unknown user {excluded}")));
        }
        self.reports
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != excluded)
            .map(|(j, r)| {
                r.as_ref()
                    .ok_or_else(|| Error::input(format!("user {j} has not reported")))
            })
            .collect()
    }

    /// Congestion-level pmf at `(network, slot)` excluding `excluded`.
    pub fn congestion_pmf(&self, excluded: usize, network: usize, slot: usize) -> Result<Vec<f64>> {
        if network >= self.networks || !(1..=self.slots).contains(&slot) {
            return Err(Error::input(format!(
                "point ({network},{slot}) outside the system"
            )));
        }
        let others = self.others(excluded)?;
        Ok(poisson_binomial(
            others.iter().map(|s| s.get(network, slot)),
            self.users(),
        ))
    }

    /// Pmfs at every point for `excluded`.
    pub fn pmf_table(&self, excluded: usize) -> Result<CongestionPmf> {
        let others = self.others(excluded)?;
        let levels = self.users();
        let mut data = Vec::with_capacity(self.networks * self.slots * levels);
        for n in 0..self.networks {
            for t in 1..=self.slots {
                data.extend(poisson_binomial(others.iter().map(|s| s.get(n, t)), levels));
            }
        }
        Ok(CongestionPmf {
            excluded,
            slots: self.slots,
            levels,
            data,
        })
    }

    /// Expected harmonic benefit `sum_(n,t) mu[n] E[H(omega)]` under the
    /// reported statistics, with `H(k) = 1 + 1/2 + ... + 1/k`.
    pub fn expected_harmonic_benefit(&self, system: &NetworkSystem) -> Result<f64> {
        let reports: Vec<&SelectionStats> = self
            .reports
            .iter()
            .enumerate()
            .map(|(j, r)| {
                r.as_ref()
                    .ok_or_else(|| Error::input(format!("user {j} has not reported")))
            })
            .collect::<Result<_>>()?;
        let levels = self.users() + 1;
        let harmonic: Vec<f64> = std::iter::once(0.0)
            .chain((1..levels).scan(0.0, |h, k| {
                *h += 1.0 / k as f64;
                Some(*h)
            }))
            .collect();
        let mut total = 0.0;
        for n in 0..self.networks {
            let mu = system.capacity(n);
            if mu == 0.0 {
                continue;
            }
            for t in 1..=self.slots {
                let pmf = poisson_binomial(reports.iter().map(|s| s.get(n, t)), levels);
                let eh: f64 = pmf.iter().zip(&harmonic).map(|(p, h)| p * h).sum();
                total += mu * eh;
            }
        }
        Ok(total)
    }
}
