use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use selfsim_cli::{parse_rational, run, run_params_paper, CliError, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(
    name = "selfsim",
    version,
    about = "Exact verification of digit-expansion self-similar set constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks from a JSON config and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Enable intra-check parallelism (checks still run in order).
        #[arg(long)]
        parallel: bool,
        /// Also emit constant-vs-depth CSVs for n = 1..=N.
        #[arg(long, value_name = "N")]
        trend: Option<u32>,
        /// Output directory (overrides the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Inclusion budget in multiples of delta (default 4).
        #[arg(long, value_name = "MULT")]
        inclusion_budget: Option<u32>,
    },
    /// Symbolic parameter cascade for delta = 2^{-n_seed^K}.
    Params {
        #[arg(long)]
        t: String,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        n_seed: u64,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch() -> Result<bool, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            parallel,
            trend,
            out,
            inclusion_budget,
        } => {
            if !parallel {
                // sequential by default; reports stay in catalogue order
                rayon::ThreadPoolBuilder::new()
                    .num_threads(1)
                    .build_global()
                    .ok();
            }
            let text = std::fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let outcome = run(
                &cfg,
                &RunOptions {
                    out_dir: out,
                    trend,
                    inclusion_budget,
                },
            )?;
            for o in &outcome.outcomes {
                println!(
                    "{:<16} {}  constant={}  ({} ms)",
                    o.check,
                    if o.pass { "pass" } else { "FAIL" },
                    o.constant.as_deref().unwrap_or("-"),
                    o.runtime_ms
                );
            }
            println!(
                "reports written to {} ({} checks, {})",
                outcome.out_dir.display(),
                outcome.outcomes.len(),
                if outcome.all_pass { "all pass" } else { "FAILURES" }
            );
            Ok(outcome.all_pass)
        }
        Command::Params { t, tau, n_seed } => {
            let t = parse_rational(&t)?;
            let tau = parse_rational(&tau)?;
            let (_, _, report) = run_params_paper(t, tau, n_seed).map_err(|e| CliError::Check {
                check: "params".into(),
                source: e,
            })?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            Ok(true)
        }
    }
}
