use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use vaa_core::experiment::{run_experiment, Algorithm};
use vaa_core::moea::AlgoConfig;
use vaa_core::scenario::{build_default_scenario, bundled_scenario, Scenario};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algo {
    Cnsga2,
    Nsga2,
    Baseline,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Cnsga2 => Algorithm::Cnsga2,
            Algo::Nsga2 => Algorithm::Nsga2,
            Algo::Baseline => Algorithm::Baseline,
        }
    }
}

/// Plans UAV virtual-antenna-array hover positions, excitation weights and
/// BS visiting order.
#[derive(Debug, Parser)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Scenario JSON file, or `default-8uav` / `default-16uav`.
    #[arg(long, default_value = "default-8uav")]
    scenario: String,
    /// Optimizer config JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cnsga2")]
    algo: Algo,
    /// Master seed of the optimizer.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Number of generations.
    #[arg(long)]
    iters: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generates a scenario with random initial UAV positions.
    Scenario {
        #[arg(long, default_value_t = 8)]
        uavs: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const DEFAULT_POP: usize = 50;
const DEFAULT_ITERS: usize = 200;
const DEFAULT_SEED: u64 = 7;

fn load_scenario(arg: &str) -> Result<Scenario> {
    let bundled = match arg {
        "default-8uav" => Some(8),
        "default-16uav" => Some(16),
        _ => None,
    };
    if let Some(n) = bundled {
        return Ok(bundled_scenario(n).expect("bundled scenarios exist"));
    }
    Scenario::load(arg).with_context(|| format!("loading scenario {arg}"))
}

fn load_config(args: &RunArgs) -> Result<AlgoConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => AlgoConfig::cnsga2(DEFAULT_POP, DEFAULT_ITERS, DEFAULT_SEED),
    };
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(p) = args.pop {
        config.pop_size = p;
    }
    if let Some(t) = args.iters {
        config.max_iters = t;
    }
    config.validate().context("invalid optimizer config")?;
    Ok(config)
}

fn run(args: RunArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    let config = load_config(&args)?;
    let report = run_experiment(&scenario, &config, args.algo.into(), &args.out)?;
    let best = &report.archive[report.best_f2_genome_id].objectives;
    // a closed stdout (e.g. piped into `head`) is not an error
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(
        stdout,
        "{}: {} archive members, best f2 {:.6e} ({:.3}x before-CB), f1 {:.6e} s, f3 {:.6e} J, {:.1} s",
        report.algorithm.as_str(),
        report.archive.len(),
        best.f2_sinr,
        report.sinr_improvement_factor,
        best.f1_s,
        best.f3_j,
        report.wall_time_s
    );
    let _ = writeln!(stdout, "artifacts written to {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Scenario { uavs, seed, out }) => (|| {
            if uavs == 0 {
                bail!("--uavs must be positive");
            }
            let s = build_default_scenario(uavs, seed)?;
            match out {
                Some(path) => s.save(&path).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{}", s.to_json_string()),
            }
            Ok(())
        })(),
        None => run(cli.run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
