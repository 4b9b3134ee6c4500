//! Run configuration: a JSON document, overlaid by command-line flags,
//! validated into a [`RunConfig`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use epr_core::experiments::{Crosstalk, SkewMode};
use epr_core::{Normalization, SpreadSpec};
use serde::Deserialize;

use crate::angle::parse_angle;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[serde(alias = "clauser-aspect")]
    Clauser,
    Ghz,
    GhzTable,
    GhzSkew,
    Franson,
    GhoshMandel,
    Brendel,
    Mc,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Clauser => "clauser",
            ExperimentKind::Ghz => "ghz",
            ExperimentKind::GhzTable => "ghz-table",
            ExperimentKind::GhzSkew => "ghz-skew",
            ExperimentKind::Franson => "franson",
            ExperimentKind::GhoshMandel => "ghosh-mandel",
            ExperimentKind::Brendel => "brendel",
            ExperimentKind::Mc => "mc",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Experiments the Monte Carlo estimator can sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum McPreset {
    #[default]
    #[serde(alias = "clauser-aspect")]
    Clauser,
    Ghz,
    Franson,
    GhoshMandel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizeArg {
    Raw,
    #[serde(alias = "max-of-sweep")]
    Max,
    Denominator,
}

impl From<NormalizeArg> for Normalization {
    fn from(n: NormalizeArg) -> Self {
        match n {
            NormalizeArg::Raw => Normalization::Raw,
            NormalizeArg::Max => Normalization::MaxOfSweep,
            NormalizeArg::Denominator => Normalization::Denominator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SkewArg {
    Same,
    Opposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A number in radians or a string literal such as `"0.25pi"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Literal(String),
}

impl AngleValue {
    fn radians(&self) -> Result<f64, String> {
        match self {
            AngleValue::Radians(x) => Ok(*x),
            AngleValue::Literal(s) => parse_angle(s),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub param: String,
    pub start: Option<AngleValue>,
    pub stop: Option<AngleValue>,
    pub step: Option<AngleValue>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadDoc {
    pub smax: Option<f64>,
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McDoc {
    pub preset: Option<McPreset>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub window: Option<f64>,
    pub duration: Option<f64>,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    pub pi_units: Option<bool>,
}

/// Raw configuration document; every field optional so that flags can fill in.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub experiment: Option<ExperimentKind>,
    #[serde(default)]
    pub settings: BTreeMap<String, AngleValue>,
    pub sweep: Option<SweepDoc>,
    pub normalization: Option<NormalizeArg>,
    pub crosstalk: Option<Switch>,
    pub skew_mode: Option<SkewArg>,
    pub spread: Option<SpreadDoc>,
    pub mc: Option<McDoc>,
    pub output: Option<OutputDoc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub preset: McPreset,
    pub trials: u64,
    pub seed: u64,
    pub window: Option<f64>,
    pub duration: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
    pub pi_units: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    /// Every parameter of the experiment, in radians, defaults filled in.
    pub settings: BTreeMap<String, f64>,
    /// `None` only for the fixed GHZ regime table.
    pub sweep: Option<Sweep>,
    pub normalization: Normalization,
    pub crosstalk: Crosstalk,
    pub skew_mode: SkewMode,
    pub spread: SpreadSpec,
    pub mc: McConfig,
    pub output: OutputConfig,
}

pub const DEFAULT_SMAX: f64 = 0.05;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_DURATION: f64 = 100.0;
pub const DEFAULT_RATE: f64 = 100.0;

/// Parameter names and defaults, in column order.
pub fn parameters(kind: ExperimentKind, preset: McPreset) -> Vec<(&'static str, f64)> {
    const H: f64 = PI / 2.0;
    match kind {
        ExperimentKind::Clauser => vec![("theta1", 0.0), ("theta2", 0.0)],
        ExperimentKind::Ghz | ExperimentKind::GhzTable => {
            vec![("theta1", 0.0), ("theta2", H), ("theta3", H), ("theta4", 0.0)]
        }
        ExperimentKind::GhzSkew => vec![("epsilon", 0.0)],
        ExperimentKind::Franson | ExperimentKind::Brendel => vec![("phi", 0.0), ("psi", 0.0)],
        ExperimentKind::GhoshMandel => vec![("delta1", 0.0), ("delta2", 0.0)],
        ExperimentKind::Mc => match preset {
            McPreset::Clauser => parameters(ExperimentKind::Clauser, preset),
            McPreset::Ghz => parameters(ExperimentKind::Ghz, preset),
            McPreset::Franson => parameters(ExperimentKind::Franson, preset),
            McPreset::GhoshMandel => parameters(ExperimentKind::GhoshMandel, preset),
        },
    }
}

/// Sweep used when a run does not name one.
fn default_sweep(kind: ExperimentKind, settings: &BTreeMap<String, f64>, preset: McPreset) -> Option<Sweep> {
    let sweep = |param: &str, stop: f64, step: f64| Some(Sweep { param: param.into(), start: 0.0, stop, step });
    match kind {
        ExperimentKind::Clauser => sweep("theta2", PI, 0.01),
        ExperimentKind::Ghz => sweep("theta4", PI, PI / 100.0),
        ExperimentKind::GhzTable => None,
        ExperimentKind::GhzSkew => sweep("epsilon", PI / 2.0, PI / 200.0),
        ExperimentKind::Franson => sweep("phi", 2.0 * PI, PI / 50.0),
        ExperimentKind::GhoshMandel => sweep("delta1", 2.0 * PI, PI / 50.0),
        ExperimentKind::Brendel => sweep("phi", 40.0 * PI, PI / 20.0),
        ExperimentKind::Mc => {
            // a single point at the fixed settings
            let (name, _) = parameters(kind, preset)[0];
            let at = settings[name];
            Some(Sweep { param: name.into(), start: at, stop: at, step: 1.0 })
        }
    }
}

impl ConfigDoc {
    pub fn from_json(source: &str) -> Result<ConfigDoc, CliError> {
        serde_json::from_str(source).map_err(|e| {
            CliError::Config(format!("config line {}, column {}: {}", e.line(), e.column(), strip_position(&e)))
        })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(mut self, over: ConfigDoc) -> ConfigDoc {
        if over.experiment.is_some() {
            self.experiment = over.experiment;
        }
        self.settings.extend(over.settings);
        if let Some(s) = over.sweep {
            self.sweep = Some(s);
        }
        self.normalization = over.normalization.or(self.normalization);
        self.crosstalk = over.crosstalk.or(self.crosstalk);
        self.skew_mode = over.skew_mode.or(self.skew_mode);
        if let Some(o) = over.spread {
            let base = self.spread.get_or_insert_with(Default::default);
            base.smax = o.smax.or(base.smax);
            base.nodes = o.nodes.or(base.nodes);
        }
        if let Some(o) = over.mc {
            let base = self.mc.get_or_insert_with(Default::default);
            base.preset = o.preset.or(base.preset);
            base.trials = o.trials.or(base.trials);
            base.seed = o.seed.or(base.seed);
            base.window = o.window.or(base.window);
            base.duration = o.duration.or(base.duration);
            base.rate = o.rate.or(base.rate);
        }
        if let Some(o) = over.output {
            let base = self.output.get_or_insert_with(Default::default);
            if o.path.is_some() {
                base.path = o.path;
            }
            base.format = o.format.or(base.format);
            base.pi_units = o.pi_units.or(base.pi_units);
        }
        self
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_owned(),
        None => msg,
    }
}

/// Locates validation errors: the 1-based line of a key in the config
/// source, when the key came from there, else the flag that set it.
struct Locator<'a> {
    source: Option<&'a str>,
}

impl Locator<'_> {
    fn error(&self, key: &str, flag: &str, msg: impl fmt::Display) -> CliError {
        let quoted = format!("\"{key}\"");
        let line = self.source.and_then(|src| src.lines().position(|l| l.contains(&quoted)).map(|i| i + 1));
        match line {
            Some(line) => CliError::Config(format!("config line {line}: {msg}")),
            None => CliError::Config(format!("{flag}: {msg}")),
        }
    }
}

/// Validates a document (as loaded from `source`, if any, and overlaid by
/// flags) for the experiment named by the subcommand.
pub fn validate(doc: ConfigDoc, command: ExperimentKind, source: Option<&str>) -> Result<RunConfig, CliError> {
    let loc = Locator { source };
    if let Some(kind) = doc.experiment {
        if kind != command {
            return Err(loc.error(
                "experiment",
                "--config",
                format!("config is for experiment `{kind}` but the subcommand is `{command}`"),
            ));
        }
    }
    let kind = command;
    let mc_doc = doc.mc.clone().unwrap_or_default();
    let preset = mc_doc.preset.unwrap_or_default();
    let params = parameters(kind, preset);

    let mut settings: BTreeMap<String, f64> = params.iter().map(|&(n, d)| (n.to_owned(), d)).collect();
    for (name, value) in &doc.settings {
        if !settings.contains_key(name) {
            return Err(loc.error(name, "--set", format!("unknown parameter `{name}` for experiment `{kind}`")));
        }
        let v = value.radians().map_err(|m| loc.error(name, "--set", m))?;
        settings.insert(name.clone(), v);
    }

    let sweep = match (&doc.sweep, kind) {
        (Some(_), ExperimentKind::GhzTable) => {
            return Err(loc.error("sweep", "--sweep", "the GHZ regime table takes no sweep"));
        }
        (Some(s), _) => Some(parse_sweep(s, &settings, kind, &loc)?),
        (None, _) => default_sweep(kind, &settings, preset),
    };

    let spread_doc = doc.spread.clone().unwrap_or_default();
    let nodes = spread_doc.nodes.unwrap_or(SpreadSpec::DEFAULT_NODES);
    let smax = spread_doc.smax.unwrap_or(DEFAULT_SMAX);
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(loc.error("nodes", "--nodes", format!("quadrature node count must be odd and >= 3, got {nodes}")));
    }
    let spread = SpreadSpec::new(smax, nodes).map_err(|e| loc.error("smax", "--smax", e))?;

    let mc = McConfig {
        preset,
        trials: mc_doc.trials.unwrap_or(DEFAULT_TRIALS),
        seed: mc_doc.seed.unwrap_or(0),
        window: mc_doc.window,
        duration: mc_doc.duration.unwrap_or(DEFAULT_DURATION),
        rate: mc_doc.rate.unwrap_or(DEFAULT_RATE),
    };
    if mc.trials == 0 {
        return Err(loc.error("trials", "--trials", "trial count must be at least 1"));
    }
    if let Some(w) = mc.window {
        if !(w > 0.0 && w.is_finite()) {
            return Err(loc.error("window", "--window", "coincidence window must be positive"));
        }
    }
    if !(mc.duration > 0.0 && mc.duration.is_finite()) {
        return Err(loc.error("duration", "--duration", "stream duration must be positive"));
    }
    if !(mc.rate >= 0.0 && mc.rate.is_finite()) {
        return Err(loc.error("rate", "--rate", "source rate must be nonnegative"));
    }

    let out = doc.output.unwrap_or_default();
    Ok(RunConfig {
        experiment: kind,
        settings,
        sweep,
        normalization: doc.normalization.map(Normalization::from).unwrap_or_default(),
        crosstalk: match doc.crosstalk {
            Some(Switch::Off) => Crosstalk::Off,
            _ => Crosstalk::On,
        },
        skew_mode: match doc.skew_mode {
            Some(SkewArg::Opposite) => SkewMode::Opposite,
            _ => SkewMode::Same,
        },
        spread,
        mc,
        output: OutputConfig {
            path: out.path,
            format: out.format.unwrap_or_default(),
            pi_units: out.pi_units.unwrap_or(false),
        },
    })
}

fn parse_sweep(
    s: &SweepDoc,
    settings: &BTreeMap<String, f64>,
    kind: ExperimentKind,
    loc: &Locator,
) -> Result<Sweep, CliError> {
    if !settings.contains_key(&s.param) {
        return Err(loc.error("param", "--sweep", format!("cannot sweep `{}`: not a parameter of `{kind}`", s.param)));
    }
    let get = |v: &Option<AngleValue>, key: &str| -> Result<f64, CliError> {
        v.as_ref()
            .ok_or_else(|| loc.error("sweep", "--sweep", format!("sweep is missing `{key}`")))?
            .radians()
            .map_err(|m| loc.error(key, "--sweep", m))
    };
    let (start, stop, step) = (get(&s.start, "start")?, get(&s.stop, "stop")?, get(&s.step, "step")?);
    if !(step > 0.0) {
        return Err(loc.error("step", "--sweep", "sweep step must be positive"));
    }
    if !(stop >= start) {
        return Err(loc.error("stop", "--sweep", "sweep stop must not precede start"));
    }
    Ok(Sweep { param: s.param.clone(), start, stop, step })
}

/// Parses `name=value` for `--set`.
pub fn parse_assignment(text: &str) -> Result<(String, AngleValue), String> {
    let (name, value) = text.split_once('=').ok_or_else(|| format!("expected name=value, got `{text}`"))?;
    Ok((name.trim().to_owned(), AngleValue::Literal(value.trim().to_owned())))
}

/// Parses `name=start:stop:step` for `--sweep`.
pub fn parse_sweep_flag(text: &str) -> Result<SweepDoc, String> {
    let (name, range) = text.split_once('=').ok_or_else(|| format!("expected name=start:stop:step, got `{text}`"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("expected name=start:stop:step, got `{text}`"));
    };
    let lit = |s: &str| Some(AngleValue::Literal(s.trim().to_owned()));
    Ok(SweepDoc { param: name.trim().to_owned(), start: lit(start), stop: lit(stop), step: lit(step) })
}
