//! Command-line front end for the subset-sum network simulator.
//!
//! Exit codes: 0 success, 1 invalid input, 2 planner non-convergence (or an
//! infeasible regime under `--strict`), 3 ambiguous classification, 4 a
//! solve whose verdicts do not match the subset-sum oracle.

mod config;
mod figures;

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use netcomp::analytics::{evaluate_chain, noise_distribution, path_counts, plan_agents};
use netcomp::classifier::{classify, compute_bands, verify};
use netcomp::export;
use netcomp::simulator::simulate_with;
use netcomp::{AgentPlan, Error, GridLayout, Noise, PlanWarning, SimOptions};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{InstanceArgs, ModelArgs, RunArgs, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_INVALID: u8 = 1;
const EXIT_PLANNER: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "netcomp",
    version,
    about = "Network-based subset sum simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the grid encoding of an instance as JSON
    Encode {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Run the Monte Carlo simulation and write the exit histogram
    Simulate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Find the self-consistent agent plan
    Plan {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Agent count for the bands; defaults to the planned count
        #[arg(long)]
        agents: Option<u64>,
        /// Exit 2 when the error rate leaves the approximation regime
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Evaluate the sizing chain, optionally at a pinned per-exit floor
    Analyze {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Evaluate the chain once at this per-exit floor
        #[arg(long)]
        ni: Option<u64>,
        #[arg(long)]
        agents: Option<u64>,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Plan, simulate, classify every exit and check against the oracle
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the datasets behind a figure panel
    Reproduce {
        /// Panel id: 2, 3a, 3b, 4a-4d, 5a-5d, split-a..split-d, or all
        #[arg(long)]
        figure: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Agent count for the simulated overlay
        #[arg(long)]
        agents: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Encode { instance } => {
            let config = RunConfig::resolve(&instance, &ModelArgs::default(), &RunArgs::default())?;
            cmd_encode(&config)
        }
        Command::Simulate {
            instance,
            model,
            run,
        } => cmd_simulate(RunConfig::resolve(&instance, &model, &run)?),
        Command::Plan {
            instance,
            model,
            agents,
            strict,
            out,
        } => {
            let run = RunArgs {
                agents,
                out,
                ..RunArgs::default()
            };
            cmd_analysis(
                &RunConfig::resolve(&instance, &model, &run)?,
                "plan",
                None,
                strict,
            )
        }
        Command::Analyze {
            instance,
            model,
            ni,
            agents,
            strict,
            out,
        } => {
            let run = RunArgs {
                agents,
                out,
                ..RunArgs::default()
            };
            let config = RunConfig::resolve(&instance, &model, &run)?;
            cmd_analysis(&config, "analyze", ni, strict)
        }
        Command::Solve {
            instance,
            model,
            run,
        } => cmd_solve(RunConfig::resolve(&instance, &model, &run)?),
        Command::Reproduce {
            figure,
            seed,
            agents,
            threads,
            out,
        } => figures::reproduce(&figure, seed, agents, threads.unwrap_or(1), out.as_deref()),
    }
}

pub fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(io::stdout().lock(), "{text}")?;
    Ok(())
}

/// A closed stdout (`netcomp ... | head`) is not an error.
fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("writing {}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn sidecar(command: &str, config: &RunConfig) -> serde_json::Map<String, Value> {
    let mut map = serde_json::Map::new();
    map.insert("version".into(), json!(VERSION));
    map.insert("command".into(), json!(command));
    map.insert("config".into(), json!(config));
    map
}

fn report_warnings(plan: &AgentPlan) {
    for w in &plan.warnings {
        eprintln!("warning: {w}");
    }
}

/// Runs the planner. On divergence the last iterate is printed as JSON and
/// `Err(code)` is returned.
fn plan_or_exit(config: &RunConfig, command: &str) -> anyhow::Result<Result<AgentPlan, u8>> {
    match plan_agents(&config.instance(), &config.model()?, config.params()?) {
        Ok(plan) => Ok(Ok(plan)),
        Err(e @ Error::NotConverged { .. }) => {
            let message = e.to_string();
            let Error::NotConverged { last, .. } = e else {
                unreachable!()
            };
            report_warnings(&last);
            eprintln!("error: {message}");
            let mut out = sidecar(command, config);
            out.insert("error".into(), json!(message));
            out.insert("plan".into(), json!(last));
            print_json(&out)?;
            Ok(Err(EXIT_PLANNER))
        }
        Err(e) => Err(e.into()),
    }
}

/// Noise distribution of the faulty agents, or `None` when there are none.
pub fn noise_for(plan: &AgentPlan, z: usize) -> netcomp::Result<Option<Noise>> {
    if plan.p_c < 1.0 {
        noise_distribution(z, plan.p_eff, 0.5).map(Some)
    } else {
        Ok(None)
    }
}

fn cmd_encode(config: &RunConfig) -> anyhow::Result<u8> {
    let instance = config.instance();
    let grid = GridLayout::build(&instance);
    print_json(&json!({
        "elements": instance.elements(),
        "z": grid.depth(),
        "s": grid.split_count(),
        "n_pj": grid.pass_count(),
        "split_rows": grid.split_rows(),
        "rows": grid.rows(),
    }))?;
    Ok(0)
}

fn cmd_simulate(mut config: RunConfig) -> anyhow::Result<u8> {
    let seed = config.require_seed()?;
    let n = match config.n_agents {
        Some(n) => n,
        None => match plan_or_exit(&config, "simulate")? {
            Ok(plan) => plan.n_min_non,
            Err(code) => return Ok(code),
        },
    };
    config.n_agents = Some(n);
    let instance = config.instance();
    let opts = SimOptions {
        threads: config.threads,
        traced: config.traced,
    };
    let hist = simulate_with(
        &GridLayout::build(&instance),
        &config.model()?,
        n,
        seed,
        opts,
    )?;
    match &config.out {
        None => export::write_histogram(io::stdout().lock(), &hist)?,
        Some(dir) => {
            ensure_dir(dir)?;
            export::write_histogram(create(&dir.join("histogram.csv"))?, &hist)?;
            let mut meta = sidecar("simulate", &config);
            meta.insert("total".into(), json!(hist.total));
            meta.insert("faulty_total".into(), json!(hist.faulty_total()));
            write_json(&dir.join("histogram.json"), &meta)?;
            print_json(&meta)?;
        }
    }
    Ok(0)
}

fn cmd_analysis(
    config: &RunConfig,
    command: &str,
    pinned: Option<u64>,
    strict: bool,
) -> anyhow::Result<u8> {
    let instance = config.instance();
    let model = config.model()?;
    let plan = match pinned {
        Some(n_i) => evaluate_chain(&instance, &model, config.params()?, n_i)?,
        None => match plan_or_exit(config, command)? {
            Ok(plan) => plan,
            Err(code) => return Ok(code),
        },
    };
    report_warnings(&plan);
    let z = instance.total() as usize;
    let n = config.n_agents.unwrap_or(plan.n_min_non);
    let dist = noise_for(&plan, z)?;
    let bands = compute_bands(&instance, &model, &plan, dist.as_ref(), n, config.ell)?;

    let mut out = sidecar(command, config);
    out.insert("plan".into(), json!(plan));
    out.insert("n_agents".into(), json!(n));
    out.insert("noise".into(), json!(dist));
    out.insert("bands".into(), json!(bands));
    print_json(&out)?;

    if let Some(dir) = &config.out {
        ensure_dir(dir)?;
        write_json(&dir.join(format!("{command}.json")), &out)?;
        if let Some(d) = &dist {
            export::write_noise(create(&dir.join("noise.csv"))?, d)?;
        }
        if command == "analyze" {
            if let Ok(table) = path_counts::<u64>(z) {
                export::write_path_table(create(&dir.join("paths.csv"))?, &table)?;
            }
        }
    }

    let low = plan
        .warnings
        .iter()
        .any(|w| matches!(w, PlanWarning::LowCorrectTraversal { .. }));
    Ok(if strict && low { EXIT_PLANNER } else { 0 })
}

fn cmd_solve(mut config: RunConfig) -> anyhow::Result<u8> {
    let seed = config.require_seed()?;
    let instance = config.instance();
    let model = config.model()?;
    let plan = match config.n_agents {
        Some(_) => evaluate_chain(&instance, &model, config.params()?, config.n_floor)?,
        None => match plan_or_exit(&config, "solve")? {
            Ok(plan) => plan,
            Err(code) => return Ok(code),
        },
    };
    report_warnings(&plan);
    let n = *config.n_agents.get_or_insert(plan.n_min_non);
    let opts = SimOptions {
        threads: config.threads,
        traced: config.traced,
    };
    let hist = simulate_with(&GridLayout::build(&instance), &model, n, seed, opts)?;
    let dist = noise_for(&plan, instance.total() as usize)?;
    let bands = compute_bands(&instance, &model, &plan, dist.as_ref(), n, config.ell)?;
    let report = classify(&hist, &bands)?;
    let accuracy = match verify(&instance, &report) {
        Ok(a) => Some(a),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    let mut out = sidecar("solve", &config);
    out.insert("plan".into(), json!(plan));
    out.insert("n_agents".into(), json!(n));
    out.insert("solutions".into(), json!(report.solutions()));
    out.insert("ambiguous".into(), json!(report.ambiguous()));
    out.insert("oracle_fallback".into(), json!(bands.oracle_fallback));
    out.insert("accuracy".into(), json!(accuracy));
    print_json(&out)?;

    if let Some(dir) = &config.out {
        ensure_dir(dir)?;
        export::write_verdicts(create(&dir.join("verdicts.csv"))?, &report)?;
        export::write_histogram(create(&dir.join("histogram.csv"))?, &hist)?;
        write_json(&dir.join("summary.json"), &out)?;
    }

    if !report.ambiguous().is_empty() {
        eprintln!("ambiguous exits: {:?}", report.ambiguous());
        return Ok(EXIT_AMBIGUOUS);
    }
    match accuracy {
        Some(a) if a.verified => Ok(0),
        Some(a) => {
            eprintln!(
                "verdicts differ from the oracle: expected {:?}, found {:?}",
                a.expected, a.found
            );
            Ok(EXIT_MISMATCH)
        }
        None => {
            eprintln!("instance too large for the subset oracle; result unverified");
            Ok(EXIT_MISMATCH)
        }
    }
}
