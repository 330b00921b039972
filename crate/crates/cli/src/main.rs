use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shadowgm_cli::{
    bounds_report, check_records, convert_time, load_config, output_root, run_config, run_preset, CliError,
    RunRecord, TimeInput, OUT_ENV,
};
use shadowgm_core::presets::{Overrides, PresetId};
use shadowgm_core::{EvolutionLaw, LawKind};

#[derive(Parser)]
#[command(name = "shadowgm", version, about = "Non-local activator dynamics on evolving domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (exp1, exp1q, exp2a, exp2b, exp3, exp4) or a configuration file.
    Run {
        target: String,
        /// Output root; overrides the environment variable.
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
        /// Nodes per axis (square) or radial node count.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        quench: Option<f64>,
        #[arg(long)]
        end_time: Option<f64>,
    },
    /// Print the closed-form blow-up bounds for a configuration.
    Bounds { config: PathBuf },
    /// Convert between t and sigma for an evolution law.
    ConvertTime {
        #[arg(value_enum)]
        law: LawArg,
        #[arg(long, default_value_t = 0.1)]
        beta: f64,
        #[arg(long, default_value_t = 1.5)]
        m: f64,
        #[arg(long, default_value_t = 2)]
        dimension: u32,
        #[arg(value_enum)]
        clock: ClockArg,
        value: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Static,
    ExpGrowth,
    ExpDecay,
    Logistic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    T,
    Sigma,
}

fn print_records(records: &[RunRecord]) {
    for rec in records {
        match &rec.outcome {
            Ok(out) => println!("{}: {} -> {}", rec.name, out.report.verdict, rec.dir.display()),
            Err(e) => println!("{}: error: {e}", rec.name),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            target,
            out,
            grid,
            dt,
            threshold,
            quench,
            end_time,
        } => {
            let root = out.unwrap_or_else(output_root);
            let overrides = Overrides {
                grid_points: grid,
                dt,
                blowup_threshold: threshold,
                quench_threshold: quench,
                end_time,
            };
            let records = match target.parse::<PresetId>() {
                Ok(id) => run_preset(id, &overrides, &root)?,
                Err(_) => vec![run_config(target.as_ref(), &overrides, &root)?],
            };
            print_records(&records);
            check_records(&records)
        }
        Command::Bounds { config } => {
            print!("{}", bounds_report(&load_config(&config)?)?);
            Ok(())
        }
        Command::ConvertTime {
            law,
            beta,
            m,
            dimension,
            clock,
            value,
        } => {
            let kind = match law {
                LawArg::Static => LawKind::Static,
                LawArg::ExpGrowth => LawKind::ExpGrowth,
                LawArg::ExpDecay => LawKind::ExpDecay,
                LawArg::Logistic => LawKind::Logistic,
            };
            let law = EvolutionLaw { kind, beta, m, dimension };
            let input = match clock {
                ClockArg::T => TimeInput::T(value),
                ClockArg::Sigma => TimeInput::Sigma(value),
            };
            print!("{}", convert_time(&law, input)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
