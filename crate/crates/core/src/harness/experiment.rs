//! Monte-Carlo driver: sample a world per run, play every scheme in it and
//! reduce the per-run metrics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{jain_index, Summary};
use super::sample::{sample_instance, Instance};
use super::scenario::{Mobility, ScenarioConfig, Scheme};
use crate::baselines::{cellular_only, otso, wiffler, WifflerParams};
use crate::engine::{expected_utilities_from_stats, run_planning, EngineConfig};
use crate::error::{Error, Result};
use crate::game::{utilities, StrategyProfile};
use crate::model::Route;

/// Scenario fields that identify the world a run was drawn from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunParams {
    pub scenario: String,
    pub users: usize,
    pub slots: usize,
    pub locations: usize,
    pub cellular_mean: f64,
    pub wifi_mean: f64,
    pub p_wifi: f64,
    pub c_switch: f64,
    pub mobility: &'static str,
    pub p_high: Option<f64>,
}

impl RunParams {
    fn of(config: &ScenarioConfig) -> Self {
        let (mobility, p_high) = match config.mobility {
            Mobility::Deterministic { .. } => ("deterministic", None),
            Mobility::Random { p_high, .. } => ("random", Some(p_high)),
        };
        Self {
            scenario: config.name.clone(),
            users: config.users,
            slots: config.slots,
            locations: config.locations(),
            cellular_mean: config.cellular.mean,
            wifi_mean: config.wifi.mean,
            p_wifi: config.p_wifi,
            c_switch: config.c_switch,
            mobility,
            p_high,
        }
    }
}

/// Metrics of one scheme in one run. In the random-mobility case the
/// utilities and switch counts are expectations over the type prior.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub scheme: Scheme,
    #[serde(flatten)]
    pub params: RunParams,
    pub wifi_networks: usize,
    pub utilities: Vec<f64>,
    pub switches: Vec<f64>,
    pub mean_utility: f64,
    pub mean_switches: f64,
    pub jain: Option<f64>,
    /// Best-response computations per user; empty for baselines.
    pub br_updates: Vec<usize>,
    pub passes: usize,
    pub converged: bool,
    /// Some user's cellular-only route had to fall back to idle.
    pub fallback: bool,
}

impl RunResult {
    pub fn mean_br_updates(&self) -> Option<f64> {
        (!self.br_updates.is_empty())
            .then(|| self.br_updates.iter().sum::<usize>() as f64 / self.br_updates.len() as f64)
    }
}

/// Per-run generator: the scenario seed picks the key, the run index the
/// stream, so runs are independent of scheduling.
pub fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

fn evaluate(instance: &Instance, strategies: &StrategyProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    let system = &instance.system;
    let switches = instance
        .type_spaces
        .iter()
        .enumerate()
        .map(|(user, space)| {
            space
                .priors()
                .iter()
                .zip(strategies.strategy(user))
                .map(|(p, r)| p * r.switch_count() as f64)
                .sum()
        })
        .collect();
    let utils = if instance.is_deterministic() {
        utilities(system, &strategies.realize(&vec![0; strategies.users()]))
    } else {
        expected_utilities_from_stats(system, strategies, &instance.type_spaces)?
    };
    Ok((utils, switches))
}

fn per_type(
    instance: &Instance,
    mut policy: impl FnMut(usize, &crate::model::MobilityPattern) -> Result<Route>,
) -> Result<StrategyProfile> {
    let strategies = instance
        .type_spaces
        .iter()
        .enumerate()
        .map(|(user, space)| {
            space
                .patterns()
                .iter()
                .map(|p| policy(user, p))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StrategyProfile::new(strategies))
}

/// Plays every configured scheme on run `run`'s sampled world.
pub fn run_single(config: &ScenarioConfig, run: usize) -> Result<Vec<RunResult>> {
    let mut rng = run_rng(config.seed, run);
    let instance = sample_instance(config, &mut rng)?;
    let system = &instance.system;
    let params = RunParams::of(config);
    config
        .schemes
        .iter()
        .map(|&scheme| {
            let mut br_updates = Vec::new();
            let mut passes = 0;
            let mut converged = true;
            let mut fallback = false;
            let strategies = match scheme {
                Scheme::Dns => {
                    let engine = EngineConfig {
                        max_passes: config.max_passes,
                        ..EngineConfig::default()
                    };
                    let (s, report) = run_planning(system, &instance.type_spaces, &engine, None)?;
                    br_updates = report.updates_per_user;
                    passes = report.passes;
                    converged = report.converged;
                    s
                }
                Scheme::Otso => per_type(&instance, |u, p| otso(system, u, p))?,
                Scheme::CellularOnly => per_type(&instance, |u, p| {
                    let c = cellular_only(system, u, p)?;
                    fallback |= c.fallback;
                    Ok(c.route)
                })?,
                Scheme::Wiffler => {
                    let params = WifflerParams {
                        theta: config.wiffler_theta,
                        k: config.wiffler_k,
                        p_wifi: config.p_wifi,
                    };
                    per_type(&instance, |u, p| wiffler(system, u, p, params))?
                }
            };
            let (utils, switches) = evaluate(&instance, &strategies)?;
            let n = utils.len() as f64;
            Ok(RunResult {
                run,
                seed: config.seed,
                scheme,
                params: params.clone(),
                wifi_networks: system.network_count() - 1,
                mean_utility: utils.iter().sum::<f64>() / n,
                mean_switches: switches.iter().sum::<f64>() / n,
                jain: jain_index(&utils).ok(),
                utilities: utils,
                switches,
                br_updates,
                passes,
                converged,
                fallback,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Run {
            run,
            source: Box::new(e),
        })
}

/// All runs of a scenario, in run order then scheme order. `workers`
/// bounds the thread count; `None` uses rayon's global pool.
pub fn run_experiment(config: &ScenarioConfig, workers: Option<usize>) -> Result<Vec<RunResult>> {
    config.validate()?;
    let work = || -> Result<Vec<RunResult>> {
        let per_run: Vec<Vec<RunResult>> = (0..config.runs)
            .into_par_iter()
            .map(|run| run_single(config, run))
            .collect::<Result<_>>()?;
        Ok(per_run.into_iter().flatten().collect())
    };
    match workers {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work),
    }
}

/// One plot-ready aggregate: mean and standard error of a metric for one
/// scheme at one sweep value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub x: Option<f64>,
    pub scheme: Scheme,
    pub metric: &'static str,
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

pub const METRICS: [&str; 5] = ["utility", "switches", "jain", "br_updates", "converged"];

fn metric(result: &RunResult, name: &str) -> Option<f64> {
    match name {
        "utility" => Some(result.mean_utility),
        "switches" => Some(result.mean_switches),
        "jain" => result.jain,
        "br_updates" => result.mean_br_updates(),
        "converged" => {
            (result.scheme == Scheme::Dns).then_some(f64::from(u8::from(result.converged)))
        }
        _ => None,
    }
}

/// Reduces run results to per-(scheme, metric) summaries, schemes in
/// first-seen order.
pub fn aggregate(results: &[RunResult], x: Option<f64>) -> Vec<AggregateRow> {
    let mut schemes: Vec<Scheme> = Vec::new();
    for r in results {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
    }
    let mut rows = Vec::new();
    for scheme in schemes {
        for name in METRICS {
            let values: Vec<f64> = results
                .iter()
                .filter(|r| r.scheme == scheme)
                .filter_map(|r| metric(r, name))
                .collect();
            if let Some(s) = Summary::of(&values) {
                rows.push(AggregateRow {
                    x,
                    scheme,
                    metric: name,
                    mean: s.mean,
                    se: s.se,
                    n: s.n,
                });
            }
        }
    }
    rows
}

/// Looks up one aggregate.
pub fn find_aggregate<'a>(
    rows: &'a [AggregateRow],
    scheme: Scheme,
    metric: &str,
) -> Option<&'a AggregateRow> {
    rows.iter()
        .find(|r| r.scheme == scheme && r.metric == metric)
}

/// One point of a parameter sweep.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub x: f64,
    pub config: ScenarioConfig,
    pub results: Vec<RunResult>,
}

impl SweepPoint {
    pub fn aggregates(&self) -> Vec<AggregateRow> {
        aggregate(&self.results, Some(self.x))
    }
}

/// Runs the scenario once per value of the dotted parameter `param`.
pub fn run_sweep(
    config: &ScenarioConfig,
    param: &str,
    values: &[f64],
    workers: Option<usize>,
) -> Result<Vec<SweepPoint>> {
    values
        .iter()
        .map(|&x| {
            let point = config.with_param(param, x)?;
            let results = run_experiment(&point, workers)?;
            Ok(SweepPoint {
                x,
                config: point,
                results,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mut c: ScenarioConfig) -> ScenarioConfig {
        c.runs = 4;
        c.users = 5;
        c.schemes = vec![
            Scheme::Dns,
            Scheme::Otso,
            Scheme::CellularOnly,
            Scheme::Wiffler,
        ];
        c
    }

    #[test]
    fn runs_are_reproducible_and_ordered() {
        let c = small(ScenarioConfig::deterministic_grid());
        let a = run_experiment(&c, Some(3)).unwrap();
        let b = run_experiment(&c, Some(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        assert!(a.windows(2).all(|w| w[0].run <= w[1].run));
        assert_eq!(a[0].scheme, Scheme::Dns);
    }

    #[test]
    fn cellular_only_is_perfectly_fair() {
        let c = small(ScenarioConfig::deterministic_grid());
        for r in run_experiment(&c, None).unwrap() {
            if r.scheme == Scheme::CellularOnly {
                assert_eq!(r.jain, Some(1.0));
                assert_eq!(r.mean_switches, 0.0);
                assert!(!r.fallback);
            }
            if r.scheme == Scheme::Dns {
                assert!(r.converged);
                assert_eq!(r.br_updates.len(), 5);
            }
        }
    }

    #[test]
    fn random_case_uses_expectations() {
        let c = small(ScenarioConfig::random_line());
        let results = run_experiment(&c, None).unwrap();
        let rows = aggregate(&results, None);
        let dns = find_aggregate(&rows, Scheme::Dns, "utility").unwrap();
        assert_eq!(dns.n, 4);
        assert!(find_aggregate(&rows, Scheme::Otso, "br_updates").is_none());
        assert_eq!(
            find_aggregate(&rows, Scheme::Dns, "converged")
                .unwrap()
                .mean,
            1.0
        );
    }

    #[test]
    fn sweep_changes_only_the_parameter() {
        let mut c = small(ScenarioConfig::deterministic_grid());
        c.runs = 2;
        let points = run_sweep(&c, "c_switch", &[0.0, 600.0], None).unwrap();
        let cell = |p: &SweepPoint| -> Vec<f64> {
            p.results
                .iter()
                .filter(|r| r.scheme == Scheme::CellularOnly)
                .map(|r| r.mean_utility)
                .collect()
        };
        assert_eq!(cell(&points[0]), cell(&points[1]));
        assert_eq!(points[1].config.c_switch, 600.0);
        assert!(points[0].aggregates().iter().all(|r| r.x == Some(0.0)));
    }
}
