//! `tailsim` command-line front end: configuration loading, trace
//! ingestion, and CSV/JSON/SVG output for every model operation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod error;
pub mod output;
pub mod schema;
pub mod svg;
pub mod traces;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "tailsim", version, about = "Tail-terrain sinkage, drag and co-design model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit substrate parameters and statistics from experimental traces.
    Calibrate {
        #[command(subcommand)]
        kind: CalibrateKind,
    },
    /// Predict sinkage, drag or drag ratio for each configured tail.
    Predict {
        #[arg(value_enum)]
        kind: PredictKind,
        #[arg(long)]
        config: PathBuf,
        /// Skip SVG output.
        #[arg(long)]
        no_svg: bool,
    },
    /// Sweep tail areas and map the idle/oscillate recommendation.
    Codesign(CodesignArgs),
    /// Quasi-static gait trajectory for each configured tail.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = ModeSelect::Both)]
        mode: ModeSelect,
    },
}

#[derive(Debug, Subcommand)]
pub enum CalibrateKind {
    /// Penetration stiffness k_z, and Δk when an oscillating trace is given.
    Penetration {
        /// Idle-tail trace (`time_s,depth_cm,force_N`).
        #[arg(long)]
        input: PathBuf,
        /// Oscillating-tail trace.
        #[arg(long)]
        osc: Option<PathBuf>,
        /// Depth window `LO:HI` in cm; either end may be empty.
        #[arg(long)]
        window_cm: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Windowed mean shear force and drag reduction.
    Shear {
        /// Idle-tail trace (`time_s,disp_cm,force_N`).
        #[arg(long)]
        idle: PathBuf,
        #[arg(long)]
        osc: Option<PathBuf>,
        /// Displacement window `LO:HI` in cm.
        #[arg(long)]
        window_cm: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward speed from motion capture, and η when both modes are given.
    Speed {
        /// Trace (`time_s,x_cm,y_cm,z_cm,pitch_deg[,tail_z_cm]`), idle tail
        /// when `--osc` is also given.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        osc: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble a substrate file from a calibration manifest.
    Substrate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictKind {
    Sinkage,
    Drag,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeSelect {
    Idle,
    Oscillate,
    Both,
}

#[derive(Debug, Args)]
pub struct CodesignArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Area range `START:STOP:STEP` in cm²; overrides `area_range_cm2` in
    /// the config, which in turn defaults to the configured tails.
    #[arg(long)]
    pub areas_cm2: Option<String>,
    /// Overrides the configured dead band around R = 1.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Evaluate rows on one thread.
    #[arg(long)]
    pub serial: bool,
    /// Skip SVG output.
    #[arg(long)]
    pub no_svg: bool,
}

/// What a command produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    /// Text for standard output.
    pub stdout: String,
    pub files: Vec<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<Report> {
    match cli.command {
        Command::Calibrate { kind } => commands::calibrate::run(kind),
        Command::Predict { kind, config, no_svg } => commands::predict::run(kind, &config, !no_svg),
        Command::Codesign(args) => commands::codesign::run(&args),
        Command::Simulate { config, steps, mode } => commands::simulate::run(&config, steps, mode),
    }
}
