use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use epr_sim::config::{
    parse_assignment, parse_sweep_flag, validate, AngleValue, ConfigDoc, ExperimentKind, Format, McDoc, McPreset,
    NormalizeArg, OutputDoc, SkewArg, SpreadDoc, SweepDoc, Switch,
};
use epr_sim::{run, CliError};

/// Classical coincidence-rate sweeps for EPR-B style experiments.
#[derive(Parser, Debug)]
#[command(name = "epr-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Twofold polarization correlation of the cascade source.
    Clauser(RunArgs),
    /// Fourfold GHZ rate for given analyzer angles.
    Ghz(RunArgs),
    /// The 16 regimes with analyzers at 0 or π/2.
    GhzTable(RunArgs),
    /// GHZ rate versus analyzer skew from {π/2, 0, 0, π/2}.
    GhzSkew(RunArgs),
    /// Twin unbalanced interferometers.
    Franson(RunArgs),
    /// Path-length variant of the Franson setup.
    GhoshMandel(RunArgs),
    /// Franson fringe averaged over the down-conversion frequency spread.
    Brendel(RunArgs),
    /// Monte Carlo estimate of a preset's coincidence rate.
    Mc(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum)]
    normalize: Option<NormalizeArg>,
    #[arg(long, value_enum)]
    crosstalk: Option<Switch>,
    #[arg(long = "skew-mode", value_enum)]
    skew_mode: Option<SkewArg>,
    /// Half-width of the fractional frequency spread.
    #[arg(long)]
    smax: Option<f64>,
    /// Simpson nodes over the spread (odd).
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Coincidence window for the event-stream columns of `mc`.
    #[arg(long)]
    window: Option<f64>,
    /// Event-stream duration for `mc --window`.
    #[arg(long)]
    duration: Option<f64>,
    /// Source rate scaling detector intensities into event rates for `mc --window`.
    #[arg(long)]
    rate: Option<f64>,
    /// Experiment sampled by `mc`.
    #[arg(long, value_enum)]
    preset: Option<McPreset>,
    /// Add π-unit columns next to every radian column.
    #[arg(long = "pi-units")]
    pi_units: bool,
    /// Fixed parameter, e.g. `--set theta1=0.25pi` (repeatable).
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, AngleValue)>,
    /// Swept parameter, e.g. `--sweep theta2=0:pi:0.01`.
    #[arg(long, value_parser = parse_sweep_flag)]
    sweep: Option<SweepDoc>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> ConfigDoc {
        let spread =
            (self.smax.is_some() || self.nodes.is_some()).then_some(SpreadDoc { smax: self.smax, nodes: self.nodes });
        let mc = McDoc {
            preset: self.preset,
            trials: self.trials,
            seed: self.seed,
            window: self.window,
            duration: self.duration,
            rate: self.rate,
        };
        ConfigDoc {
            experiment: None,
            settings: self.set.iter().cloned().collect(),
            sweep: self.sweep.clone(),
            normalization: self.normalize,
            crosstalk: self.crosstalk,
            skew_mode: self.skew_mode,
            spread,
            mc: Some(mc),
            output: Some(OutputDoc {
                path: self.out.clone(),
                format: self.format,
                pi_units: self.pi_units.then_some(true),
            }),
        }
    }
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> Result<(), CliError> {
    let source = match &args.config {
        Some(path) => Some(
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let doc = match &source {
        Some(src) => ConfigDoc::from_json(src)?,
        None => ConfigDoc::default(),
    };
    let cfg = validate(doc.overlay(args.overrides()), kind, source.as_deref())?;
    let table = run(&cfg, args.threads)?;
    let mut bytes = Vec::new();
    table.write(cfg.output.format, &mut bytes)?;
    match &cfg.output.path {
        Some(path) => fs::write(path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Clauser(a) => (ExperimentKind::Clauser, a),
        Command::Ghz(a) => (ExperimentKind::Ghz, a),
        Command::GhzTable(a) => (ExperimentKind::GhzTable, a),
        Command::GhzSkew(a) => (ExperimentKind::GhzSkew, a),
        Command::Franson(a) => (ExperimentKind::Franson, a),
        Command::GhoshMandel(a) => (ExperimentKind::GhoshMandel, a),
        Command::Brendel(a) => (ExperimentKind::Brendel, a),
        Command::Mc(a) => (ExperimentKind::Mc, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("epr-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
