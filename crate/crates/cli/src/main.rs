//! Command-line front end: `simulate` runs a JSON-configured scenario and
//! writes one report per seed; `aggregate` folds a directory of reports
//! into a cross-seed summary. Failures exit nonzero with a JSON diagnostic
//! on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use election_sim::config::parse_config;
use election_sim::group::RistrettoBackend;
use election_sim::report::{aggregate, emit_chain_activity, RunReport};
use election_sim::runner::run_single;

#[derive(Parser)]
#[command(name = "election-sim", version, about = "Proposer-election security and cost simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config, one report file per seed
    Simulate {
        /// Path to the JSON configuration
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seed list overriding the config's seeds
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Output directory (overrides the config's output.report_dir)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a directory of report files into CSV and JSON
    Aggregate {
        /// Directory holding report-*.json files
        #[arg(long = "in")]
        input: PathBuf,
        /// Summary file; written as given plus with the twin extension
        /// (.json and .csv)
        #[arg(long)]
        out: PathBuf,
    },
}

fn simulate(config_path: &Path, seeds: Option<Vec<u64>>, out: Option<PathBuf>) -> Result<()> {
    let text = fs::read_to_string(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seeds) = seeds {
        cfg.seeds = seeds;
        cfg.validate()?;
    }
    let out_dir = out
        .or_else(|| cfg.output.report_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    for &seed in &cfg.seeds {
        let report = run_single::<RistrettoBackend>(&cfg, seed)?;
        let path = out_dir.join(format!("report-{seed}.json"));
        fs::write(&path, report.to_json_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
        if cfg.output.chain_activity {
            let csv_path = out_dir.join(format!("chain-activity-{seed}.csv"));
            fs::write(&csv_path, emit_chain_activity(&report))
                .with_context(|| format!("writing {}", csv_path.display()))?;
        }
        println!(
            "seed {seed}: missed_fraction {:.6}, attack_actions {}, report {}",
            report.steady.missed_fraction,
            report.steady.attack_actions,
            path.display()
        );
    }
    Ok(())
}

fn load_reports(dir: &Path) -> Result<Vec<RunReport>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading report directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("report-") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no report-*.json files in {}", dir.display());
    }
    paths
        .iter()
        .map(|p| {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunReport::from_json(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

fn aggregate_dir(input: &Path, out: &Path) -> Result<()> {
    let reports = load_reports(input)?;
    let summary = aggregate(&reports)?;
    let json_path = out.with_extension("json");
    let csv_path = out.with_extension("csv");
    fs::write(&json_path, summary.to_json_bytes())
        .with_context(|| format!("writing {}", json_path.display()))?;
    fs::write(&csv_path, summary.to_csv())
        .with_context(|| format!("writing {}", csv_path.display()))?;
    println!(
        "aggregated {} reports into {} and {}",
        reports.len(),
        json_path.display(),
        csv_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, seeds, out } => simulate(&config, seeds, out),
        Command::Aggregate { input, out } => aggregate_dir(&input, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let diagnostic = serde_json::json!({
                "error": err.to_string(),
                "chain": err.chain().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            eprintln!("{diagnostic}");
            ExitCode::FAILURE
        }
    }
}
