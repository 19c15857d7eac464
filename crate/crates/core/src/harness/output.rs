//! CSV and JSON-lines writers.

use std::io::Write;

use serde::Serialize;

use super::experiment::{AggregateRow, RunResult};
use crate::error::{Error, Result};

/// Column order of the per-run CSV.
pub const RESULT_COLUMNS: [&str; 22] = [
    "scenario",
    "run",
    "seed",
    "scheme",
    "users",
    "slots",
    "locations",
    "cellular_mean",
    "wifi_mean",
    "p_wifi",
    "c_switch",
    "mobility",
    "p_high",
    "wifi_networks",
    "mean_utility",
    "min_utility",
    "max_utility",
    "mean_switches",
    "jain",
    "br_updates",
    "passes",
    "converged",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario: &'a str,
    run: usize,
    seed: u64,
    scheme: &'static str,
    users: usize,
    slots: usize,
    locations: usize,
    cellular_mean: f64,
    wifi_mean: f64,
    p_wifi: f64,
    c_switch: f64,
    mobility: &'static str,
    p_high: Option<f64>,
    wifi_networks: usize,
    mean_utility: f64,
    min_utility: f64,
    max_utility: f64,
    mean_switches: f64,
    jain: Option<f64>,
    br_updates: Option<f64>,
    passes: usize,
    converged: bool,
}

impl<'a> CsvRow<'a> {
    fn of(r: &'a RunResult) -> Self {
        let p = &r.params;
        Self {
            scenario: &p.scenario,
            run: r.run,
            seed: r.seed,
            scheme: r.scheme.as_str(),
            users: p.users,
            slots: p.slots,
            locations: p.locations,
            cellular_mean: p.cellular_mean,
            wifi_mean: p.wifi_mean,
            p_wifi: p.p_wifi,
            c_switch: p.c_switch,
            mobility: p.mobility,
            p_high: p.p_high,
            wifi_networks: r.wifi_networks,
            mean_utility: r.mean_utility,
            min_utility: r.utilities.iter().copied().fold(f64::INFINITY, f64::min),
            max_utility: r
                .utilities
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
            mean_switches: r.mean_switches,
            jain: r.jain,
            br_updates: r.mean_br_updates(),
            passes: r.passes,
            converged: r.converged,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("{other:?}")),
    }
}

/// One row per (run, scheme) with the columns of [`RESULT_COLUMNS`].
pub fn write_results_csv<W: Write>(out: W, results: &[RunResult]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(RESULT_COLUMNS).map_err(csv_error)?;
    for r in results {
        w.serialize(CsvRow::of(r)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line, per-user vectors included.
pub fn write_results_jsonl<W: Write>(mut out: W, results: &[RunResult]) -> Result<()> {
    for r in results {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Config(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Columns `x, scheme, metric, mean, se, n`.
pub fn write_aggregate_csv<W: Write>(out: W, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "scheme", "metric", "mean", "se", "n"])
        .map_err(csv_error)?;
    for r in rows {
        let x = r.x.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            x,
            r.scheme.to_string(),
            r.metric.to_string(),
            r.mean.to_string(),
            r.se.to_string(),
            r.n.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::{aggregate, run_experiment};
    use crate::harness::scenario::ScenarioConfig;

    fn results() -> Vec<RunResult> {
        let mut c = ScenarioConfig::deterministic_grid();
        c.runs = 2;
        c.users = 4;
        run_experiment(&c, Some(1)).unwrap()
    }

    #[test]
    fn csv_has_fixed_header_and_one_row_per_result() {
        let rs = results();
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &rs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULT_COLUMNS.join(","));
        assert_eq!(lines.clone().count(), rs.len());
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), RESULT_COLUMNS.len());
        assert_eq!(first[3], "dns");
    }

    #[test]
    fn jsonl_round_trips_as_values() {
        let rs = results();
        let mut buf = Vec::new();
        write_results_jsonl(&mut buf, &rs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), rs.len());
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(v["scheme"], "dns");
        assert_eq!(v["utilities"].as_array().unwrap().len(), 4);
        assert_eq!(v["c_switch"], 400.0);
    }

    #[test]
    fn aggregate_csv_columns() {
        let rows = aggregate(&results(), Some(2.5));
        let mut buf = Vec::new();
        write_aggregate_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,scheme,metric,mean,se,n\n2.5,dns,utility,"));
    }
}
