use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fbs_cli::scenario::{run_scenario, ScenarioKind};
use fbs_cli::suite;

/// Frequency-beam-splitter toolkit: detuning scans, pulse propagation, gate
/// fidelity, two-photon interference, and counting-experiment simulation.
#[derive(Parser)]
#[command(name = "fbs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (flat `key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Cap the worker thread count.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the two-photon detuning at fixed one-photon detuning.
    #[command(name = "scan-delta")]
    ScanDelta(RunArgs),
    /// Sweep the one-photon detuning at fixed two-photon detuning.
    #[command(name = "scan-Delta")]
    ScanDeltaOne(RunArgs),
    /// Propagate a Gaussian pulse through the medium.
    Propagate(RunArgs),
    /// Fidelity and g2 of explicitly given gate coefficients.
    Fidelity(RunArgs),
    /// Interference dip scan against input delay, solver-derived gate.
    #[command(name = "hom-scan")]
    HomScan(RunArgs),
    /// Simulate a photon-counting run and recover the output/input ratio.
    #[command(name = "count-sim")]
    CountSim(RunArgs),
    /// Run the bundled verification suite and print a pass/fail table.
    Suite {
        /// Also write the table to this directory as suite_report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap the worker thread count.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn run(kind: ScenarioKind, args: RunArgs) -> anyhow::Result<()> {
    configure_jobs(args.jobs);
    let written = run_scenario(kind, &args.config, &args.out, args.seed)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: anyhow::Result<bool> = match cli.command {
        Command::ScanDelta(args) => run(ScenarioKind::ScanDelta, args).map(|_| true),
        Command::ScanDeltaOne(args) => run(ScenarioKind::ScanDeltaOne, args).map(|_| true),
        Command::Propagate(args) => run(ScenarioKind::Propagate, args).map(|_| true),
        Command::Fidelity(args) => run(ScenarioKind::Fidelity, args).map(|_| true),
        Command::HomScan(args) => run(ScenarioKind::HomScan, args).map(|_| true),
        Command::CountSim(args) => run(ScenarioKind::CountSim, args).map(|_| true),
        Command::Suite { out, jobs } => {
            configure_jobs(jobs);
            let results = suite::run_all();
            let mut table = String::new();
            for r in &results {
                table.push_str(&r.pass_line());
                table.push('\n');
            }
            let failed = results.iter().filter(|r| !r.pass).count();
            table.push_str(&format!(
                "{} of {} criteria passed\n",
                results.len() - failed,
                results.len()
            ));
            print!("{table}");
            if let Some(dir) = out {
                if let Err(e) = std::fs::create_dir_all(&dir)
                    .and_then(|_| std::fs::write(dir.join("suite_report.txt"), &table))
                {
                    eprintln!("error: cannot write suite report: {e}");
                    return ExitCode::from(2);
                }
            }
            Ok(failed == 0)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            // Single-line, machine-parsable failure report.
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
