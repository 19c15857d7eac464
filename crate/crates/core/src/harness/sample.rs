//! Random network systems and user types drawn from a scenario.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::mobility::{generate_mobility, generate_random_types, TransitionMatrix, TwoTypeChains};
use super::scenario::{CapacityDist, Mobility, ScenarioConfig, Topology};
use crate::error::{Error, Result};
use crate::model::{Availability, MobilityPattern, NetworkSystem, TypeSpace, CELLULAR};

/// Lowest data rate a sampled network can get, in Mbps.
pub const MIN_CAPACITY: f64 = 0.1;

/// One sampled world: the system, every user's type space and the
/// patterns that actually occur.
#[derive(Clone, Debug)]
pub struct Instance {
    pub system: NetworkSystem,
    pub type_spaces: Vec<TypeSpace>,
    pub realized: Vec<MobilityPattern>,
}

impl Instance {
    /// True when every user has a single known pattern.
    pub fn is_deterministic(&self) -> bool {
        self.type_spaces.iter().all(|s| s.len() == 1)
    }
}

/// Data volume of one slot: a rate drawn in Mbps times the slot length.
fn capacity(dist: CapacityDist, slot_seconds: f64, rng: &mut impl Rng) -> Result<f64> {
    let normal = Normal::new(dist.mean, dist.stddev).map_err(|e| Error::Config(e.to_string()))?;
    Ok(normal.sample(rng).max(MIN_CAPACITY) * slot_seconds)
}

/// Draws Wi-Fi coverage and capacities.
///
/// Capacities are per-slot volumes (Mb), so switching costs compare
/// against `rate * slot_seconds`.
/// Each location independently gets its own access point with probability
/// `p_wifi`; network indices follow location order. Real networks switch
/// at `c_switch`, switches through idle at `idle_cost_ratio * c_switch`.
pub fn sample_system(config: &ScenarioConfig, rng: &mut impl Rng) -> Result<NetworkSystem> {
    let locations = config.locations();
    let mut capacities = vec![0.0, capacity(config.cellular, config.slot_seconds, rng)?];
    let mut availability = Availability::new(config.users, locations, config.slots);
    availability.grant_everywhere(CELLULAR)?;
    for l in 1..=locations {
        if rng.random_bool(config.p_wifi) {
            let net = capacities.len();
            capacities.push(capacity(config.wifi, config.slot_seconds, rng)?);
            availability.grant_location(l, net)?;
        }
    }
    let k = capacities.len();
    let idle_cost = config.idle_cost_ratio * config.c_switch;
    let cost = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| match (a, b) {
                    _ if a == b => 0.0,
                    (0, _) | (_, 0) => idle_cost,
                    _ => config.c_switch,
                })
                .collect()
        })
        .collect();
    let time = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| if a == b { 0 } else { config.switch_time })
                .collect()
        })
        .collect();
    NetworkSystem::new(capacities, cost, time, availability)
}

fn transition(config: &ScenarioConfig, stay: f64) -> Result<TransitionMatrix> {
    match config.topology {
        Topology::Grid { width, height } => TransitionMatrix::grid(width, height, stay),
        Topology::Line { length } => TransitionMatrix::line(length, stay),
    }
}

/// Samples a system, then each user's uniform start and types. In the
/// random case the realised pattern is drawn from the user's prior.
pub fn sample_instance(config: &ScenarioConfig, rng: &mut impl Rng) -> Result<Instance> {
    config.validate()?;
    let system = sample_system(config, rng)?;
    let locations = config.locations();
    let mut type_spaces = Vec::with_capacity(config.users);
    let mut realized = Vec::with_capacity(config.users);
    match config.mobility {
        Mobility::Deterministic { stay } => {
            let chain = transition(config, stay)?;
            for _ in 0..config.users {
                let start = rng.random_range(1..=locations);
                let p = generate_mobility(&chain, start, config.slots, rng)?;
                realized.push(p.clone());
                type_spaces.push(TypeSpace::single(p));
            }
        }
        Mobility::Random {
            p_high,
            high_stay,
            low_stay,
        } => {
            let chains = TwoTypeChains {
                high: transition(config, high_stay)?,
                low: transition(config, low_stay)?,
            };
            for _ in 0..config.users {
                let start = rng.random_range(1..=locations);
                let space = generate_random_types(&chains, p_high, start, config.slots, rng)?;
                let k = usize::from(!rng.random_bool(p_high));
                realized.push(space.patterns()[k].clone());
                type_spaces.push(space);
            }
        }
    }
    Ok(Instance {
        system,
        type_spaces,
        realized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_stddev_gives_rate_times_slot_length() {
        let mut c = ScenarioConfig::deterministic_grid();
        c.cellular.stddev = 0.0;
        c.wifi.stddev = 0.0;
        let sys = sample_system(&c, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(sys.capacity(CELLULAR), 3000.0);
        assert!(sys.wifi_networks().all(|n| sys.capacity(n) == 540.0));
        c.slot_seconds = 1.0;
        let sys = sample_system(&c, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(sys.capacity(CELLULAR), 300.0);
    }

    #[test]
    fn default_costs_validate() {
        let mut c = ScenarioConfig::deterministic_grid();
        c.p_wifi = 1.0;
        let sys = sample_system(&c, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(sys.switch_cost(0, 1), 200.0);
        assert_eq!(sys.switch_cost(3, 0), 200.0);
        assert_eq!(sys.switch_cost(1, 2), 400.0);
        assert_eq!(sys.switch_time(1, 0), 1);
        assert_eq!(sys.switch_time(2, 2), 0);
    }

    #[test]
    fn clamp_engages() {
        let mut c = ScenarioConfig::deterministic_grid();
        c.wifi = CapacityDist {
            mean: 1.0,
            stddev: 100.0,
        };
        c.p_wifi = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let sys = sample_system(&c, &mut rng).unwrap();
            assert_eq!(sys.network_count(), 17);
            assert!(sys.wifi_networks().all(|n| sys.capacity(n) >= MIN_CAPACITY));
        }
    }

    #[test]
    fn instance_shapes() {
        let c = ScenarioConfig::random_line();
        let inst = sample_instance(&c, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(inst.type_spaces.len(), 8);
        assert!(!inst.is_deterministic());
        for (space, p) in inst.type_spaces.iter().zip(&inst.realized) {
            assert!(space.position(p).is_some());
            assert_eq!(p.len(), 6);
        }
        let d = sample_instance(
            &ScenarioConfig::deterministic_grid(),
            &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        assert!(d.is_deterministic());
    }
}
