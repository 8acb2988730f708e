use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};
use fklab::harness::{exit_code, run_experiment, Experiment, ExperimentConfig, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(name = "fklab", version, about = "Eigenvalue experiments for -Δ + (-Δ)^s on grid domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Principal eigenpairs of the configured domains.
    Eig(Common),
    /// Compare each domain with the ball of equal measure.
    FkSweep(Common),
    /// Eigenvalue gap against ball defects on perturbed disks.
    Stability(Common),
    /// Superlevel measure bound and convexity of superlevel sets.
    Superlevel(Common),
    /// Level-set profile of the eigenfunction.
    LevelProfile(Common),
    /// Eigenvalue bounds under dilation.
    Scaling(Common),
    /// Geometric counterexample families and ball certificates.
    Counterexample(Common),
    /// Sign of the boundary normal derivative.
    Hopf(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; overrides the config value.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write two-column CSVs for plotting.
    #[arg(long)]
    plot_data: bool,
    /// More log output (repeat for debug).
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::Eig(c) => (Experiment::Eig, c),
            Command::FkSweep(c) => (Experiment::FkSweep, c),
            Command::Stability(c) => (Experiment::Stability, c),
            Command::Superlevel(c) => (Experiment::Superlevel, c),
            Command::LevelProfile(c) => (Experiment::LevelProfile, c),
            Command::Scaling(c) => (Experiment::Scaling, c),
            Command::Counterexample(c) => (Experiment::Counterexample, c),
            Command::Hopf(c) => (Experiment::Hopf, c),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (experiment, common) = cli.command.split();
    let level = match common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = ExperimentConfig::from_path(&common.config).and_then(|mut cfg| {
        if let Some(t) = common.threads {
            cfg.threads = t;
        }
        run_experiment(experiment, &cfg, &common.out, common.plot_data)
    });
    match &outcome {
        Ok(s) => {
            let files: Vec<String> = s.files.iter().map(|f| f.display().to_string()).collect();
            println!("{experiment}: {} ({} rows) -> {}", s.status.as_str(), s.rows, files.join(", "));
        }
        Err(e) => eprintln!("fklab {experiment}: {e}"),
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
