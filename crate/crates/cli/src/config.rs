//! Run configuration and its validation.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use scrap_fwm::propagation::StepControl;
use scrap_fwm::scenarios::{preset, preset_names, HgRun, Scenario};
use scrap_fwm::twolevel::TimeGrid;
use scrap_fwm::{MixingMode, UnitConvention};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Dynamics,
    Scan,
    Propagate,
    Oracle,
    ListPresets,
}

impl Command {
    const NAMES: [&'static str; 5] = ["dynamics", "scan", "propagate", "oracle", "list-presets"];

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "dynamics" => Command::Dynamics,
            "scan" => Command::Scan,
            "propagate" => Command::Propagate,
            "oracle" => Command::Oracle,
            "list-presets" => Command::ListPresets,
            _ => return None,
        })
    }

    fn needs_scenario(self) -> bool {
        self != Command::ListPresets
    }
}

/// One scan axis: `n` evenly spaced values from `lo` to `hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|k| if k + 1 == self.n { self.hi } else { self.lo + k as f64 * step }).collect()
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, lo, hi, n] = parts[..] else {
            return Err(format!("axis `{s}` is not of the form name:lo:hi:n"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("axis `{s}`: `{x}` is not a number"));
        Ok(Axis {
            name: name.to_string(),
            lo: num(lo)?,
            hi: num(hi)?,
            n: n.parse().map_err(|_| format!("axis `{s}`: `{n}` is not a count"))?,
        })
    }
}

pub const DYNAMICS_AXES: [&str; 6] = ["delta", "S", "R", "beta", "dtau", "tau_st"];
pub const HG_AXES: [&str; 10] = ["G01", "G0st", "G20", "delta", "dtau_st", "dtau_2", "K1", "K2", "Kminus", "a"];

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: u32,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub axes: Vec<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<MixingMode>,
    /// Convention of inline amplitudes and scan values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitConvention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<StepControl>,
}

pub fn default_tol() -> f64 {
    1e-8
}

/// A validation failure at a JSON path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

const KEYS: [&str; 12] =
    ["schema", "command", "preset", "inline", "out", "tol", "grid", "axes", "snapshots", "mode", "units", "control"];

fn nearest<'a>(word: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .into_iter()
        .map(|c| (strsim::jaro_winkler(word, c), c))
        .filter(|(score, _)| *score > 0.8)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

fn suggest(word: &str, candidates: &[String]) -> String {
    match nearest(word, candidates.iter().map(String::as_str)) {
        Some(c) => format!(" (did you mean `{c}`?)"),
        None => String::new(),
    }
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(ConfigIssue { path: path.into(), message: message.into() });
    }

    fn typed<T: serde::de::DeserializeOwned>(&mut self, obj: &Map<String, Value>, key: &str) -> Option<T> {
        let v = obj.get(key)?;
        match serde_json::from_value(v.clone()) {
            Ok(x) => Some(x),
            Err(e) => {
                self.push(key, e.to_string());
                None
            }
        }
    }
}

/// Parses and validates a run configuration, collecting every problem.
pub fn validate_config(raw: &str) -> Result<RunConfig, Vec<ConfigIssue>> {
    let value: Value = serde_json::from_str(raw)
        .map_err(|e| vec![ConfigIssue { path: "$".into(), message: format!("not valid JSON: {e}") }])?;
    validate_value(&value)
}

pub fn validate_value(value: &Value) -> Result<RunConfig, Vec<ConfigIssue>> {
    let Some(obj) = value.as_object() else {
        return Err(vec![ConfigIssue { path: "$".into(), message: "expected a JSON object".into() }]);
    };
    let mut is = Issues(Vec::new());

    for key in obj.keys() {
        if !KEYS.contains(&key.as_str()) {
            let hint = nearest(key, KEYS).map(|c| format!(" (did you mean `{c}`?)")).unwrap_or_default();
            is.push(key.as_str(), format!("unknown field{hint}"));
        }
    }

    match obj.get("schema") {
        None => is.push("schema", "missing required field"),
        Some(v) if v.as_u64() != Some(SCHEMA_VERSION as u64) => {
            is.push("schema", format!("unsupported schema version {v}, expected {SCHEMA_VERSION}"))
        }
        _ => {}
    }

    let command = match obj.get("command") {
        None => {
            is.push("command", "missing required field");
            None
        }
        Some(Value::String(s)) => match Command::parse(s) {
            Some(c) => Some(c),
            None => {
                let names: Vec<String> = Command::NAMES.iter().map(|s| s.to_string()).collect();
                is.push("command", format!("unknown command `{s}`{}", suggest(s, &names)));
                None
            }
        },
        Some(_) => {
            is.push("command", "expected a string");
            None
        }
    };

    let preset_name: Option<String> = is.typed(obj, "preset");
    let inline: Option<Scenario> = is.typed(obj, "inline");
    let has_preset = obj.contains_key("preset");
    let has_inline = obj.contains_key("inline");
    if has_preset && has_inline {
        is.push("preset", "give either `preset` or `inline`, not both");
    } else if !has_preset && !has_inline && command.is_none_or(Command::needs_scenario) {
        is.push("preset", "missing required field (or `inline`)");
    }
    let mut scenario = inline.clone();
    if let Some(name) = &preset_name {
        match preset(name) {
            Ok(p) => scenario = Some(p.scenario),
            Err(_) => is.push("preset", format!("unknown preset `{name}`{}", suggest(name, &preset_names()))),
        }
    }

    let out: Option<PathBuf> = is.typed(obj, "out");
    let tol: f64 = is.typed(obj, "tol").unwrap_or_else(default_tol);
    if !(tol > 0.0 && tol <= 1e-3) {
        is.push("tol", format!("must lie in (0, 1e-3], got {tol}"));
    }
    let grid: Option<TimeGrid> = is.typed(obj, "grid");
    if let Some(g) = &grid {
        if let Err(e) = g.validate() {
            is.push("grid", e.to_string());
        }
    }
    let axes: Vec<Axis> = is.typed(obj, "axes").unwrap_or_default();
    let snapshots: Option<Vec<f64>> = is.typed(obj, "snapshots");
    let mode: Option<MixingMode> = is.typed(obj, "mode");
    let units: Option<UnitConvention> = is.typed(obj, "units");
    let control: Option<StepControl> = is.typed(obj, "control");

    let allowed: &[&str] = match &scenario {
        Some(Scenario::Dynamics { .. }) => &DYNAMICS_AXES,
        Some(Scenario::Hg(_)) => &HG_AXES,
        _ => &[],
    };
    for (k, ax) in axes.iter().enumerate() {
        let path = format!("axes[{k}]");
        if scenario.is_some() && !allowed.contains(&ax.name.as_str()) {
            let names: Vec<String> = allowed.iter().map(|s| s.to_string()).collect();
            is.push(
                format!("{path}.name"),
                format!("`{}` is not a scannable parameter{}", ax.name, suggest(&ax.name, &names)),
            );
        }
        if !(ax.lo.is_finite() && ax.hi.is_finite()) {
            is.push(format!("{path}.lo"), "axis bounds must be finite");
        }
        if ax.n == 0 {
            is.push(format!("{path}.n"), "axis needs at least one point");
        }
    }
    if let Some(z) = &snapshots {
        if z.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            is.push("snapshots", "depths must be finite and nonnegative");
        }
    }

    match (command, &scenario) {
        (Some(Command::Scan), _) if axes.is_empty() => is.push("axes", "scan needs at least one axis"),
        (Some(Command::Scan), Some(Scenario::Oracle(_))) => is.push("preset", "oracle scenarios cannot be scanned"),
        (Some(Command::Propagate), Some(s)) if !matches!(s, Scenario::Hg(_)) => {
            is.push("preset", "propagate needs an Hg medium scenario")
        }
        (Some(Command::Oracle), Some(s)) if !matches!(s, Scenario::Oracle(_)) => {
            is.push("preset", "oracle needs an oracle scenario")
        }
        _ => {}
    }
    if mode.is_some() && scenario.as_ref().is_some_and(|s| !matches!(s, Scenario::Hg(_))) {
        is.push("mode", "mixing mode applies to Hg medium scenarios only");
    }

    if !is.0.is_empty() {
        return Err(is.0);
    }
    Ok(RunConfig {
        schema: SCHEMA_VERSION,
        command: command.expect("checked above"),
        preset: preset_name,
        inline,
        out,
        tol,
        grid,
        axes,
        snapshots,
        mode,
        units,
        control,
    })
}

fn scale_hg(run: &mut HgRun, f: f64) {
    run.g01 *= f;
    run.g0st *= f;
    run.g20 *= f;
    run.delta *= f;
}

impl RunConfig {
    /// The scenario after unit conversion and overrides, in its native
    /// convention (angular for reduced drives, cyclic for Hg runs).
    pub fn scenario(&self) -> Option<Scenario> {
        let mut s = match (&self.preset, &self.inline) {
            (Some(name), _) => preset(name).ok()?.scenario,
            (None, Some(inline)) => {
                let mut s = inline.clone();
                match (&mut s, self.units) {
                    (Scenario::Dynamics { drive, .. }, Some(UnitConvention::Cyclic)) => {
                        drive.delta *= 2.0 * PI;
                        drive.pump.amplitude *= 2.0 * PI;
                        drive.stark.amplitude *= 2.0 * PI;
                        if let Some(p) = &mut drive.probe {
                            p.pulse.amplitude *= 2.0 * PI;
                            p.s2 *= 2.0 * PI;
                            p.s_mix *= 2.0 * PI;
                        }
                    }
                    (Scenario::Hg(run), Some(UnitConvention::Angular)) => scale_hg(run, 1.0 / (2.0 * PI)),
                    _ => {}
                }
                s
            }
            (None, None) => return None,
        };
        match &mut s {
            Scenario::Dynamics { grid, .. } => {
                if let Some(g) = self.grid {
                    *grid = g;
                }
            }
            Scenario::Hg(run) => {
                if let Some(m) = self.mode {
                    run.medium.mixing_mode = m;
                }
                if let Some(g) = self.grid {
                    run.samples = g.n_samples;
                    run.window = [g.t_start, g.t_end];
                }
                if let Some(z) = &self.snapshots {
                    run.z_end = z.iter().copied().fold(0.0, f64::max);
                    run.snapshots = z.clone();
                }
            }
            Scenario::Oracle(cfg) => {
                if let Some(g) = self.grid {
                    cfg.grid = g;
                }
            }
        }
        Some(s)
    }

    /// Applies one scan value to a scenario, converting from the run's units.
    pub fn apply_axis(&self, s: &mut Scenario, name: &str, value: f64) {
        match s {
            Scenario::Dynamics { drive, .. } => {
                let x = if self.units == Some(UnitConvention::Cyclic) && matches!(name, "delta" | "S" | "R") {
                    value * 2.0 * PI
                } else {
                    value
                };
                match name {
                    "delta" => drive.delta = x,
                    "S" => drive.stark.amplitude = x,
                    "R" => drive.pump.amplitude = x,
                    "beta" => drive.beta = x,
                    "dtau" => drive.stark.delay = x,
                    "tau_st" => drive.stark.width_ratio = x,
                    _ => {}
                }
            }
            Scenario::Hg(run) => {
                let x = if self.units == Some(UnitConvention::Angular)
                    && matches!(name, "G01" | "G0st" | "G20" | "delta")
                {
                    value / (2.0 * PI)
                } else {
                    value
                };
                match name {
                    "G01" => run.g01 = x,
                    "G0st" => run.g0st = x,
                    "G20" => run.g20 = x,
                    "delta" => run.delta = x,
                    "dtau_st" => run.delay_st = x,
                    "dtau_2" => run.delay_2 = x,
                    "K1" => run.medium.k1 = x,
                    "K2" => run.medium.k2 = x,
                    "Kminus" => run.medium.k_mix = x,
                    "a" => run.medium.a = x,
                    _ => {}
                }
            }
            Scenario::Oracle(_) => {}
        }
    }
}
