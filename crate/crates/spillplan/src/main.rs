//! `spillplan` binary: validate, solve, explain, trace.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use spillplan::cli::{self, CommandKind, OutputFormat, RunConfig, SolverChoice};

#[derive(Parser)]
#[command(name = "spillplan", version, about = "Oil spill response planning under uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Check a scenario file against the format invariants.
    Validate { scenario: PathBuf },
    /// Find the optimal equipment-employment policy.
    Solve {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Staged)]
        solver: SolverArg,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Print the decision backbone with pruned actions and reasons.
    Explain {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Export per-period trajectory CSVs for one policy.
    Trace {
        scenario: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        observe_at: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Staged,
    Brute,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

fn to_config(cli: Cli) -> RunConfig {
    match cli.command {
        Commands::Validate { scenario } => RunConfig::new(CommandKind::Validate, scenario),
        Commands::Solve { scenario, solver, out, format } => {
            let mut cfg = RunConfig::new(CommandKind::Solve, scenario);
            cfg.solver = match solver {
                SolverArg::Staged => SolverChoice::Staged,
                SolverArg::Brute => SolverChoice::Brute,
                SolverArg::Both => SolverChoice::Both,
            };
            cfg.format = match format {
                FormatArg::Text => OutputFormat::Text,
                FormatArg::Machine => OutputFormat::Machine,
            };
            cfg.output_dir = out;
            cfg
        }
        Commands::Explain { scenario, out } => {
            let mut cfg = RunConfig::new(CommandKind::Explain, scenario);
            cfg.output_dir = out;
            cfg
        }
        Commands::Trace { scenario, policy, observe_at, out } => {
            let mut cfg = RunConfig::new(CommandKind::Trace, scenario);
            cfg.policy = Some(policy);
            cfg.observe_at = observe_at;
            cfg.output_dir = out;
            cfg
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match cli::run(&to_config(cli)) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
