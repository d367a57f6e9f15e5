use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ntnsim::mission::{
    read_results, snr_vs_ground_distance, write_results, write_snr_distance, Simulation,
};
use ntnsim::scenario::load_scenario_file;
use ntnsim::Error;

#[derive(Parser)]
#[command(name = "ntnsim", version, about = "GEO-to-HAP downlink simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides the scenario seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the whole mission
    Run(Common),
    /// SNR over carrier frequency at the best point of interest
    SweepFreq {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20.0)]
        fstart: f64,
        #[arg(long, default_value_t = 100.0)]
        fstop: f64,
        #[arg(long, default_value_t = 1.0)]
        fstep: f64,
    },
    /// SNR against ground distance to the sub-satellite point
    SnrDistance {
        #[command(flatten)]
        common: Common,
        /// Reuse a results CSV from `run` instead of simulating
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Parse and validate a scenario without running it
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn simulation(common: &Common) -> Result<Simulation, Error> {
    let scenario = load_scenario_file(&common.scenario, common.seed)?;
    Simulation::new(scenario)
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(common) => {
            let rows = simulation(&common)?.run()?;
            log::info!("simulated {} samples", rows.len());
            write_results(&rows, output(common.output.as_deref())?, "time_s")
        }
        Command::SweepFreq {
            common,
            fstart,
            fstop,
            fstep,
        } => {
            let rows = simulation(&common)?.sweep_frequency(fstart, fstop, fstep)?;
            write_results(&rows, output(common.output.as_deref())?, "freq_ghz")
        }
        Command::SnrDistance { common, input } => {
            let rows = match input {
                Some(path) => {
                    load_scenario_file(&common.scenario, common.seed)?;
                    read_results(File::open(path)?)?
                }
                None => simulation(&common)?.run()?,
            };
            let pairs = snr_vs_ground_distance(&rows)?;
            write_snr_distance(&pairs, output(common.output.as_deref())?)
        }
        Command::Validate { scenario } => {
            let s = load_scenario_file(&scenario, None)?;
            s.load_tables()?;
            eprintln!("{}: ok", scenario.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
