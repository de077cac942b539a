//! dwsnn: domain-wall-synapse SNN simulator.
//!
//! Subcommands cover the full pipeline: `micromag sweep` and
//! `calibrate` run the LLG solver, `train`/`eval` run the network,
//! `report` reconciles energy accounting, `emit-maps` renders weights.
//! Outputs are only written once a command has fully succeeded.

mod commands;
mod common;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dwsnn", version, about = "Domain-wall synapse SNN simulator")]
struct Cli {
    /// Run configuration file (defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// PRNG seed; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Log per-step membrane/adaptation traces (first images only).
    #[arg(long, global = true)]
    trace: bool,
    /// Stream every programming event to events.csv.
    #[arg(long, global = true)]
    log_events: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Micromagnetic solver utilities.
    Micromag {
        #[command(subcommand)]
        command: MicromagCommand,
    },
    /// Run the J-sweep and write the wall-mobility calibration record.
    Calibrate(SweepArgs),
    /// Train the network and write summary, checkpoint and logs.
    Train(TrainArgs),
    /// Assign classes and evaluate accuracy from a checkpoint.
    Eval(EvalArgs),
    /// Reconcile energy totals against the event log.
    Report,
    /// Render per-neuron weight maps and a montage as PGM.
    EmitMaps(EvalArgs),
    /// Print the fully-commented reference configuration.
    PrintConfig,
}

#[derive(Subcommand)]
enum MicromagCommand {
    /// Wall velocity vs current density; emits sweep.csv and
    /// per-run trajectory CSVs.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Comma-separated current densities (A/m²).
    #[arg(long, default_value = "5e10,1e11,2e11,4e11,1e12,2e12,3e12")]
    j_values: String,
    /// Per-run horizon (s).
    #[arg(long, default_value_t = 5e-9)]
    t_max: f64,
    /// Integration timestep (s); default picks from the stability bound.
    #[arg(long)]
    dt: Option<f64>,
    /// Strip length (m).
    #[arg(long, default_value_t = 480e-9)]
    length: f64,
    /// Strip width (m).
    #[arg(long, default_value_t = 20e-9)]
    width: f64,
    /// Cell size along x (m).
    #[arg(long, default_value_t = 4e-9)]
    cell_x: f64,
    /// Cell size along y (m).
    #[arg(long, default_value_t = 4e-9)]
    cell_y: f64,
    /// Saturation magnetization override (A/m).
    #[arg(long)]
    ms: Option<f64>,
    /// Exchange constant override (J/m).
    #[arg(long)]
    a_ex: Option<f64>,
    /// PMA constant override (J/m³).
    #[arg(long)]
    ku: Option<f64>,
    /// DMI constant override (J/m²).
    #[arg(long)]
    d_dmi: Option<f64>,
    /// Gilbert damping override.
    #[arg(long)]
    alpha: Option<f64>,
    /// Spin-Hall angle override.
    #[arg(long)]
    theta_sh: Option<f64>,
}

#[derive(Args)]
struct TrainArgs {
    /// Directory holding the IDX dataset files.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    /// Calibration record from `calibrate` (anchored defaults if omitted).
    #[arg(long)]
    calibration: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Checkpoint produced by `train`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Directory holding the IDX dataset files.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = common::Global {
        config: cli.config,
        seed: cli.seed,
        out_dir: cli.out_dir,
        trace: cli.trace,
        log_events: cli.log_events,
    };
    let result = match cli.command {
        Command::Micromag {
            command: MicromagCommand::Sweep(args),
        } => commands::micromag_sweep(&global, &args),
        Command::Calibrate(args) => commands::calibrate(&global, &args),
        Command::Train(args) => commands::train(&global, &args),
        Command::Eval(args) => commands::eval(&global, &args),
        Command::Report => commands::report(&global),
        Command::EmitMaps(args) => commands::emit_maps(&global, &args),
        Command::PrintConfig => {
            print!("{}", dwsnn::io::config::reference_text());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
