use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use ampc_bench::config::ExperimentConfig;
use ampc_bench::experiment::run_experiment;
use ampc_bench::verify::{pilot, verify_lemma_suite};
use ampc_core::graph::{gen_graph, write_edge_list, GraphFamily};
use anyhow::Context;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ampc", about = "AMPC connected-components simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment: one metrics.csv and summary.json per seed.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the verification suite and write verification.json.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a generated graph as an edge list.
    Gen {
        /// Family such as `path(1000)` or `gnm(10000,20000)`.
        #[arg(long)]
        family: GraphFamily,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the measurements behind the frozen constants.
    Pilot {
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 50)]
        shrink_seeds: u64,
        #[arg(long, default_value_t = 5)]
        space_seeds: u64,
        #[arg(long, default_value = "gnm(100000,200000)")]
        recursion: GraphFamily,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summaries = run_experiment(&cfg)?;
            for s in &summaries {
                println!(
                    "seed {}: {} rounds, {} components, oracle_match={}",
                    s.seed, s.rounds, s.components, s.oracle_match
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = verify_lemma_suite(cfg.profile, cfg.delta);
            fs::create_dir_all(&cfg.output).with_context(|| format!("creating {}", cfg.output.display()))?;
            let path = cfg.output.join("verification.json");
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
            for c in &report.checks {
                println!(
                    "{} {}: {} <= {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.check_name,
                    c.observed,
                    c.threshold
                );
            }
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("failed checks:");
                for c in report.failures() {
                    eprintln!("  {} ({})", c.check_name, c.bound_expression);
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Gen { family, seed, out } => {
            let g = gen_graph(&family, seed)?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_edge_list(&g, BufWriter::new(file))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pilot {
            seeds,
            shrink_seeds,
            space_seeds,
            recursion,
        } => {
            let report = pilot(seeds, shrink_seeds, space_seeds, &recursion);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
