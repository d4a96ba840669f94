use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sideband_mixer::cli::{execute, Format, Kind};

/// Resonance-fluorescence spectra of an RF-modulated two-level emitter.
#[derive(Parser)]
#[command(name = "sideband-mixer", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emission spectrum for one parameter point.
    Spectrum(RunArgs),
    /// Spectra versus the relative phase of the higher tone.
    PhaseSweep(RunArgs),
    /// Recover the phase offset that maximizes the first sideband.
    Calibrate(RunArgs),
    /// Sideband intensity versus time under a small tone detuning.
    DetuningMap(RunArgs),
    /// Spectra versus the carrier frequency at fixed tone amplitudes.
    FrequencyFan(RunArgs),
    /// Tabulate scattering processes and phase periodicities.
    Pathways(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output data file; stdout when omitted. A `<out>.manifest.json`
    /// is written beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores, or SIDEBAND_MIXER_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    format: CliFormat,
}

#[derive(ValueEnum, Clone, Copy, Default)]
enum CliFormat {
    #[default]
    Csv,
    Json,
}

impl From<CliFormat> for Format {
    fn from(f: CliFormat) -> Format {
        match f {
            CliFormat::Csv => Format::Csv,
            CliFormat::Json => Format::Json,
        }
    }
}

fn threads_from_env() -> Option<usize> {
    std::env::var("SIDEBAND_MIXER_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
}

fn main() {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Spectrum(a) => (Kind::Spectrum, a),
        Command::PhaseSweep(a) => (Kind::PhaseSweep, a),
        Command::Calibrate(a) => (Kind::Calibrate, a),
        Command::DetuningMap(a) => (Kind::DetuningMap, a),
        Command::FrequencyFan(a) => (Kind::FrequencyFan, a),
        Command::Pathways(a) => (Kind::Pathways, a),
    };
    if let Some(n) = args.threads.or_else(threads_from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured before any parallel work");
    }
    if let Err(err) = execute(kind, &args.config, args.out.as_deref(), args.format.into()) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
