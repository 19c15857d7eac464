//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines are always printed. The process
//! exits non-zero when the set of failing criteria differs from
//! `KNOWN_FAILING`, so a regression and an unexpected pass both surface.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use netsel_core::harness::experiment::find_aggregate;
use netsel_core::harness::output::write_results_csv;
use netsel_core::harness::{
    run_experiment, run_sweep, AggregateRow, ScenarioConfig, Scheme, SweepPoint,
};
use netsel_core::verify::{
    check_bayesian_identity, check_best_response, check_congestion_pmf, check_convergence_to_bne,
    check_lemma1, check_potential_identity, CheckOutcome,
};

const SEED: u64 = 20_160_401;
const RUNS: usize = 500;

/// Criteria that do not hold under this model. Criterion 7 fails at the
/// two lowest switching costs: with I = 15 the equilibrium leaves Wi-Fi
/// points unused that OTSO fills, and the gap exceeds the sampling error.
const KNOWN_FAILING: &[u32] = &[7];

struct Line {
    id: u32,
    pass: bool,
    text: String,
}

fn from_checks(id: u32, checks: &[CheckOutcome], took: Duration, limit: Option<Duration>) -> Line {
    let mut pass = checks.iter().all(CheckOutcome::passed);
    let mut parts: Vec<String> = checks.iter().map(ToString::to_string).collect();
    if let Some(limit) = limit {
        pass &= took <= limit;
        parts.push(format!(
            "{:.1}s (limit {}s)",
            took.as_secs_f64(),
            limit.as_secs()
        ));
    }
    Line {
        id,
        pass,
        text: parts.join("; "),
    }
}

fn agg(point: &SweepPoint, scheme: Scheme, metric: &str) -> AggregateRow {
    let rows = point.aggregates();
    find_aggregate(&rows, scheme, metric)
        .unwrap_or_else(|| panic!("no {metric} for {scheme} at {}", point.x))
        .clone()
}

/// `a` exceeds `b` by more than `k` combined standard errors.
fn above(a: &AggregateRow, b: &AggregateRow, k: f64) -> bool {
    a.mean - b.mean > k * a.se.hypot(b.se)
}

/// `b` is not above `a` by more than `k` combined standard errors.
fn not_above(a: &AggregateRow, b: &AggregateRow, k: f64) -> bool {
    b.mean - a.mean <= k * a.se.hypot(b.se)
}

fn grid(users: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::deterministic_grid();
    c.users = users;
    c.runs = RUNS;
    c.seed = SEED;
    c.schemes = vec![Scheme::Dns, Scheme::Otso, Scheme::CellularOnly];
    c
}

fn sweep(config: &ScenarioConfig, param: &str, values: &[f64]) -> Vec<SweepPoint> {
    run_sweep(config, param, values, None).expect("sweep runs")
}

fn criteria_1_to_6() -> Vec<Line> {
    let timed = |f: &dyn Fn() -> CheckOutcome| {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed())
    };
    let (c1, t1) = timed(&|| check_potential_identity(SEED, 1000).unwrap());
    let (c2, t2) = timed(&|| check_bayesian_identity(SEED + 1, 1000).unwrap());
    let (c3, t3) = timed(&|| check_convergence_to_bne(SEED + 2, 1000, 3).unwrap());
    let (c4, t4) = timed(&|| check_best_response(SEED + 3, 1000, 10_000).unwrap());
    let (c5, t5) = timed(&|| check_congestion_pmf(SEED + 4, 1000).unwrap());
    let (c6, t6) = timed(&|| check_lemma1(SEED + 5, 500).unwrap());
    vec![
        from_checks(1, &[c1], t1, Some(Duration::from_secs(60))),
        from_checks(2, &[c2], t2, None),
        from_checks(3, &[c3], t3, None),
        from_checks(4, &[c4], t4, None),
        from_checks(5, &[c5], t5, None),
        from_checks(6, &[c6], t6, None),
    ]
}

fn criteria_7_and_10(points: &[SweepPoint]) -> (Line, Line) {
    let mut bad7 = Vec::new();
    let mut notes7 = Vec::new();
    for p in points {
        let dns = agg(p, Scheme::Dns, "utility");
        for scheme in [Scheme::Otso, Scheme::CellularOnly] {
            let other = agg(p, scheme, "utility");
            notes7.push(format!(
                "c={} dns {:.1} vs {scheme} {:.1}",
                p.x, dns.mean, other.mean
            ));
            if !above(&dns, &other, 2.0) {
                bad7.push(format!("c={}: dns not 2 SE above {scheme}", p.x));
            }
        }
    }
    for w in points.windows(2) {
        let (a, b) = (
            agg(&w[0], Scheme::Dns, "switches"),
            agg(&w[1], Scheme::Dns, "switches"),
        );
        if !not_above(&a, &b, 1.0) {
            bad7.push(format!(
                "dns switches rise from c={} to c={}",
                w[0].x, w[1].x
            ));
        }
        let (a, b) = (
            agg(&w[0], Scheme::CellularOnly, "utility"),
            agg(&w[1], Scheme::CellularOnly, "utility"),
        );
        if a.mean != b.mean {
            bad7.push(format!(
                "cellular-only utility moves between c={} and c={}",
                w[0].x, w[1].x
            ));
        }
    }
    let line7 = Line {
        id: 7,
        pass: bad7.is_empty(),
        text: if bad7.is_empty() {
            notes7.join(", ")
        } else {
            format!("{} | {}", bad7.join("; "), notes7.join(", "))
        },
    };

    let mut bad10 = Vec::new();
    let mut notes10 = Vec::new();
    for p in points.iter().filter(|p| p.x > 0.0) {
        let (dns, otso) = (agg(p, Scheme::Dns, "jain"), agg(p, Scheme::Otso, "jain"));
        notes10.push(format!(
            "c={} dns {:.3} vs otso {:.3}",
            p.x, dns.mean, otso.mean
        ));
        if !above(&dns, &otso, 1.0) {
            bad10.push(format!("c={}: dns Jain not 1 SE above otso", p.x));
        }
    }
    let mut equal = grid(15);
    equal.cellular.stddev = 0.0;
    equal.wifi.stddev = 0.0;
    equal.schemes = vec![Scheme::CellularOnly];
    let results = run_experiment(&equal, None).expect("equal-capacity runs");
    let unfair = results.iter().filter(|r| r.jain != Some(1.0)).count();
    notes10.push(format!(
        "cellular-only Jain = 1 in {}/{} equal-capacity runs",
        results.len() - unfair,
        results.len()
    ));
    if unfair > 0 {
        bad10.push(format!("{unfair} cellular-only runs with Jain != 1"));
    }
    let line10 = Line {
        id: 10,
        pass: bad10.is_empty(),
        text: [bad10, notes10].concat().join("; "),
    };
    (line7, line10)
}

fn criterion_8() -> Line {
    let start = Instant::now();
    let points = sweep(&grid(20), "users", &[20.0, 50.0]);
    let took = start.elapsed();
    let u: Vec<f64> = points
        .iter()
        .map(|p| agg(p, Scheme::Dns, "br_updates").mean)
        .collect();
    let growth = u[1] / u[0] - 1.0;
    let pass = u.iter().all(|&x| (2.0..=8.0).contains(&x))
        && growth < 0.5
        && took <= Duration::from_secs(600);
    Line {
        id: 8,
        pass,
        text: format!(
            "updates per user {:.3} (I=20), {:.3} (I=50), growth {:.1}%, {:.1}s",
            u[0],
            u[1],
            100.0 * growth,
            took.as_secs_f64()
        ),
    }
}

fn criterion_9() -> Line {
    let points = sweep(&grid(30), "p_wifi", &[0.1, 0.5, 0.9, 1.0]);
    let mut bad = Vec::new();
    let (o9, o10) = (
        agg(&points[2], Scheme::Otso, "utility"),
        agg(&points[3], Scheme::Otso, "utility"),
    );
    if !above(&o9, &o10, 1.0) {
        bad.push("otso does not dip from p=0.9 to p=1.0".to_string());
    }
    for w in points.windows(2) {
        let (a, b) = (
            agg(&w[0], Scheme::Dns, "utility"),
            agg(&w[1], Scheme::Dns, "utility"),
        );
        if !not_above(&b, &a, 1.0) {
            bad.push(format!(
                "dns utility falls from p={} to p={}",
                w[0].x, w[1].x
            ));
        }
    }
    let dns: Vec<String> = points
        .iter()
        .map(|p| format!("{:.1}", agg(p, Scheme::Dns, "utility").mean))
        .collect();
    Line {
        id: 9,
        pass: bad.is_empty(),
        text: format!(
            "{}otso {:.1} -> {:.1} at p=0.9 -> 1.0; dns {}",
            bad.iter().map(|b| format!("{b}; ")).collect::<String>(),
            o9.mean,
            o10.mean,
            dns.join(", ")
        ),
    }
}

fn criterion_11() -> Line {
    let mut c = grid(15);
    c.runs = 20;
    let csv = |workers| {
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &run_experiment(&c, Some(workers)).unwrap()).unwrap();
        buf
    };
    let (a, b, d) = (csv(1), csv(1), csv(4));
    Line {
        id: 11,
        pass: a == b && a == d && !a.is_empty(),
        text: format!(
            "{} bytes, repeat identical: {}, 4 workers identical: {}",
            a.len(),
            a == b,
            a == d
        ),
    }
}

fn main() -> ExitCode {
    let mut lines = criteria_1_to_6();
    let c_points = sweep(&grid(15), "c_switch", &[0.0, 200.0, 400.0, 600.0]);
    let (l7, l10) = criteria_7_and_10(&c_points);
    lines.push(l7);
    lines.push(criterion_8());
    lines.push(criterion_9());
    lines.push(l10);
    lines.push(criterion_11());

    for l in &lines {
        let tag = match (l.pass, KNOWN_FAILING.contains(&l.id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} criterion {}: {}", l.id, l.text);
    }
    let failing: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    let passed = lines.len() - failing.len();
    println!("{passed}/{} criteria pass", lines.len());
    if failing != KNOWN_FAILING {
        println!("failing set {failing:?} differs from the known set {KNOWN_FAILING:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
