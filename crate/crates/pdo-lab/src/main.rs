//! Command-line driver for the experiment scenarios.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed, 2 the
//! configuration was rejected, 3 a runtime failure inside a scenario.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pdo_lab::config::ExperimentConfig;
use pdo_lab::registry::{self, RunContext};
use pdo_lab::report::{summarize, write_reports};

#[derive(Parser)]
#[command(
    name = "pdo-lab",
    version,
    about = "Numerical experiments for a rough-symbol operator calculus"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario, from a config file or by registry name.
    Run {
        /// JSON experiment description (mutually exclusive with --scenario).
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Registered scenario name, run with its defaults.
        #[arg(long, value_name = "NAME", conflicts_with = "config")]
        scenario: Option<String>,
        /// Report directory (overrides the config's out_dir).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Worker thread count (overrides the config).
        #[arg(long, value_name = "K")]
        workers: Option<usize>,
    },
    /// List registered scenarios.
    List,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::List => {
            for sc in registry::SCENARIOS {
                println!("{}", sc.name);
                println!("    {}", sc.what);
                for a in sc.anchors {
                    println!("    anchor: {a}");
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { config, scenario, out, workers } => run(config, scenario, out, workers),
    }
}

fn run(
    config: Option<PathBuf>,
    scenario: Option<String>,
    out: Option<PathBuf>,
    workers_flag: Option<usize>,
) -> ExitCode {
    let cfg = match (config, scenario) {
        (Some(path), None) => match ExperimentConfig::load(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
        },
        (None, Some(name)) => ExperimentConfig::for_scenario(&name),
        _ => {
            eprintln!("config error: pass exactly one of --config or --scenario");
            return ExitCode::from(2);
        }
    };

    let known = registry::names();
    if let Err(e) = cfg.validate(&known) {
        eprintln!("config error: {e}");
        return ExitCode::from(2);
    }
    let env_seed = std::env::var("PDO_LAB_SEED").ok();
    let seed = match cfg.effective_seed(env_seed.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let workers = workers_flag
        .or(cfg.workers)
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1);
    if workers == 0 {
        eprintln!("config error: worker count must be positive");
        return ExitCode::from(2);
    }

    let sc = registry::find(&cfg.scenario).expect("validated scenario name");
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("runtime error: building the worker pool: {e}");
            return ExitCode::from(3);
        }
    };

    let out_dir = out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("reports"));
    let ctx = RunContext { config: cfg.clone(), seed, workers };
    let records = match pool.install(|| (sc.run)(&ctx)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("runtime error: {e}");
            return ExitCode::from(3);
        }
    };

    for r in &records {
        println!("{}/{}: {:?}", r.scenario, r.case, r.verdict);
    }
    let summary = summarize(&records);
    match write_reports(&out_dir, &cfg, seed, workers, &records) {
        Ok((csv_path, json_path)) => {
            println!(
                "{}: {} pass, {} fail, {} flagged (seed {seed}); wrote {} and {}",
                cfg.scenario,
                summary.pass,
                summary.fail,
                summary.flagged,
                csv_path.display(),
                json_path.display()
            );
        }
        Err(e) => {
            eprintln!("runtime error: writing reports to {}: {e}", out_dir.display());
            return ExitCode::from(3);
        }
    }

    if summary.fail > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
