use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use netsel_core::engine::{run_planning, EngineConfig};
use netsel_core::game::{congestion, utilities};
use netsel_core::harness::output::{write_aggregate_csv, write_results_csv, write_results_jsonl};
use netsel_core::harness::{aggregate, run_experiment, run_sweep, RunResult, ScenarioConfig};
use netsel_core::verify::{run_all, Budget};
use netsel_core::{worked_example, ActionProfile, Route, TypeSpace};

#[derive(Parser)]
#[command(
    name = "netsel",
    version,
    about = "Network selection simulator for integrated cellular and Wi-Fi access"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write one row per (run, scheme).
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also write the per-scheme mean/SE summary as CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Dotted scenario field, e.g. `c_switch` or `mobility.p_high`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Aggregate CSV (`x,scheme,metric,mean,se,n`); stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-run results of every sweep point.
        #[arg(long)]
        results: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Cross-check the algorithms against the exhaustive oracles.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Smaller instance counts.
        #[arg(long)]
        quick: bool,
    },
    /// Print the two-user worked example.
    Demo,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario TOML file; may start from a `preset`.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, default_value = "deterministic-grid")]
    preset: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Worker threads; all cores if absent.
    #[arg(long)]
    workers: Option<usize>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ScenarioConfig::from_toml_with_base(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => ScenarioConfig::preset(&self.preset)?,
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(runs) = self.runs {
            config.runs = runs;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Results file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_results(path: Option<&Path>, format: Format, results: &[RunResult]) -> Result<()> {
    let out = sink(path)?;
    match format {
        Format::Csv => write_results_csv(out, results)?,
        Format::Jsonl => write_results_jsonl(out, results)?,
    }
    Ok(())
}

fn demo() -> Result<()> {
    let (system, patterns) = worked_example();
    println!(
        "Two users, four slots, cellular (300) everywhere, Wi-Fi (54) at locations 15 and 16."
    );
    for (i, p) in patterns.iter().enumerate() {
        println!("user {i} pattern {:?}", p.locations());
    }
    let profile = ActionProfile::new(vec![
        Route::from_pairs(&[(1, 1), (2, 3), (2, 4)]),
        Route::from_pairs(&[(1, 1), (1, 2), (2, 4)]),
    ]);
    let show = |title: &str, profile: &ActionProfile| {
        println!("\n{title}");
        let field = congestion(&system, profile);
        for (i, (route, u)) in profile
            .routes()
            .iter()
            .zip(utilities(&system, profile))
            .enumerate()
        {
            println!("  user {i}: {route}  utility {u}");
        }
        let shared: Vec<String> = field
            .iter()
            .filter(|&(n, _, c)| n != 0 && c > 1)
            .map(|(n, t, c)| format!("({n},{t})x{c}"))
            .collect();
        println!(
            "  shared points: {}",
            if shared.is_empty() {
                "none".into()
            } else {
                shared.join(" ")
            }
        );
    };
    show("Hand-picked routes:", &profile);
    let spaces: Vec<TypeSpace> = patterns.iter().cloned().map(TypeSpace::single).collect();
    let (strategies, report) = run_planning(&system, &spaces, &EngineConfig::default(), None)?;
    show(
        &format!(
            "Best-response dynamics (converged: {}, passes: {}):",
            report.converged, report.passes
        ),
        &strategies.realize(&[0, 0]),
    );
    Ok(())
}

/// A closed stdout (as with `| head`) ends the program quietly.
fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io = cause.downcast_ref::<io::Error>().or_else(|| {
            match cause.downcast_ref::<netsel_core::Error>() {
                Some(netsel_core::Error::Io(io)) => Some(io),
                _ => None,
            }
        });
        io.is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> Result<ExitCode> {
    match run(Cli::parse()) {
        Err(e) if broken_pipe(&e) => Ok(ExitCode::SUCCESS),
        other => other,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            scenario,
            output,
            summary,
        } => {
            let config = scenario.load()?;
            let results = run_experiment(&config, scenario.workers)?;
            write_results(output.out.as_deref(), output.format, &results)?;
            if let Some(path) = summary {
                write_aggregate_csv(sink(Some(&path))?, &aggregate(&results, None))?;
            }
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out,
            results,
            format,
        } => {
            let config = scenario.load()?;
            if values.is_empty() {
                bail!("--values needs at least one value");
            }
            let points = run_sweep(&config, &param, &values, scenario.workers)?;
            let rows: Vec<_> = points.iter().flat_map(|p| p.aggregates()).collect();
            write_aggregate_csv(sink(out.as_deref())?, &rows)?;
            if let Some(path) = results {
                let all: Vec<RunResult> = points.into_iter().flat_map(|p| p.results).collect();
                write_results(Some(&path), format, &all)?;
            }
        }
        Command::Verify { seed, quick } => {
            let outcomes = run_all(seed, if quick { Budget::QUICK } else { Budget::FULL })?;
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().any(|o| !o.passed()) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Demo => demo()?,
    }
    Ok(ExitCode::SUCCESS)
}
