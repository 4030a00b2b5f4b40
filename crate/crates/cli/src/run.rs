//! Command execution and artifact writing.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use scrap_fwm::metrics::write_metrics_csv;
use scrap_fwm::multilevel::compare_reduced_vs_full;
use scrap_fwm::propagation::{propagate, write_snapshot_csv, PropagationManifest};
use scrap_fwm::scenarios::{presets, Scenario};
use scrap_fwm::twolevel::{coherence_stats, evolve, fmt, CoherenceStats, TimeGrid, Trajectory, DEFAULT_SAMPLES};

use crate::config::{validate_value, Command, ConfigIssue, RunConfig, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigIssue>),
    #[error(transparent)]
    Model(#[from] scrap_fwm::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Model(scrap_fwm::Error::Config(_) | scrap_fwm::Error::UnknownPreset { .. }) => 2,
            CliError::Model(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub command: Command,
    pub config_hash: String,
    pub versions: Versions,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    #[serde(rename = "scrap-fwm")]
    pub core: &'static str,
    #[serde(rename = "scrap-fwm-cli")]
    pub cli: &'static str,
}

const VERSIONS: Versions = Versions { core: scrap_fwm::VERSION, cli: env!("CARGO_PKG_VERSION") };

/// SHA-256 of the canonical JSON form of the config, output directory excluded.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.out = None;
    let text = serde_json::to_string(&c).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn new(dir: PathBuf) -> CliResult<Self> {
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Output { dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CliResult<()> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }
}

#[derive(Debug, Serialize)]
struct DynamicsSummary {
    #[serde(flatten)]
    stats: CoherenceStats,
    max_purity_defect: f64,
    accepted_steps: usize,
    rejected_steps: usize,
}

fn trajectory(s: &Scenario, cfg: &RunConfig) -> CliResult<Trajectory> {
    match s {
        Scenario::Dynamics { drive, grid } => Ok(evolve(drive, grid, cfg.tol)?),
        Scenario::Hg(run) => {
            let grid = TimeGrid::new(run.window[0], run.window[1], cfg.grid.map_or(DEFAULT_SAMPLES, |g| g.n_samples))?;
            Ok(run.entrance_trajectory(&grid, cfg.tol)?)
        }
        Scenario::Oracle(_) => {
            Err(scrap_fwm::Error::Config("oracle scenarios have no reduced trajectory".into()).into())
        }
    }
}

/// One scan point: axis values, then final r_n, final |r_gn| and max |r_gn|.
pub type ScanRow = (Vec<f64>, [f64; 3]);

pub fn scan_rows(cfg: &RunConfig) -> CliResult<Vec<ScanRow>> {
    let base = cfg.scenario().ok_or_else(|| scrap_fwm::Error::Config("no scenario".into()))?;
    let values: Vec<Vec<f64>> = cfg.axes.iter().map(|a| a.values()).collect();
    let total: usize = values.iter().map(Vec::len).product();
    // row-major over the axes, so the first axis varies slowest and rows come out sorted
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; values.len()];
            for (k, v) in values.iter().enumerate().rev() {
                p[k] = v[idx % v.len()];
                idx /= v.len();
            }
            p
        })
        .collect();
    points
        .into_par_iter()
        .map(|p| {
            let mut s = base.clone();
            for (ax, x) in cfg.axes.iter().zip(&p) {
                cfg.apply_axis(&mut s, &ax.name, *x);
            }
            let tr = trajectory(&s, cfg)?;
            let max = tr.states.iter().map(|st| st.rgn.norm()).fold(0.0, f64::max);
            Ok((p, [tr.final_rn(), tr.final_coherence(), max]))
        })
        .collect()
}

pub fn write_scan_csv<W: Write>(mut w: W, axes: &[String], rows: &[ScanRow]) -> std::io::Result<()> {
    writeln!(w, "{},final_r_n,final_|r_gn|,max_|r_gn|", axes.join(","))?;
    for (p, v) in rows {
        let cols: Vec<String> = p.iter().chain(v).map(|x| fmt(*x)).collect();
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}

/// File name of the snapshot at depth `z`.
pub fn snapshot_name(z: f64) -> String {
    format!("snapshot_Z{z:.4e}.csv")
}

/// Runs a validated config, writing artifacts under its output directory
/// (`out` by default). `list-presets` prints to `stdout` and writes nothing.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<Option<Manifest>> {
    if cfg.command == Command::ListPresets {
        for p in presets() {
            let kind = match p.scenario {
                Scenario::Dynamics { .. } => "dynamics",
                Scenario::Hg(_) => "hg",
                Scenario::Oracle(_) => "oracle",
            };
            writeln!(stdout, "{}\t{}\t{}", p.name, kind, p.note).map_err(io_err(Path::new("<stdout>")))?;
        }
        return Ok(None);
    }

    let scenario = cfg.scenario().ok_or_else(|| scrap_fwm::Error::Config("no scenario".into()))?;
    let mut out = Output::new(cfg.out.clone().unwrap_or_else(|| PathBuf::from("out")))?;

    match cfg.command {
        Command::Dynamics => {
            let tr = trajectory(&scenario, cfg)?;
            out.write("trajectory.csv", |w| tr.write_csv(w))?;
            let summary = DynamicsSummary {
                stats: coherence_stats(&tr),
                max_purity_defect: tr.max_purity_defect(),
                accepted_steps: tr.stats.accepted,
                rejected_steps: tr.stats.rejected,
            };
            out.json("stats.json", &summary)?;
        }
        Command::Scan => {
            let rows = scan_rows(cfg)?;
            let names: Vec<String> = cfg.axes.iter().map(|a| a.name.clone()).collect();
            out.write("scan.csv", |w| write_scan_csv(w, &names, &rows))?;
        }
        Command::Propagate => {
            let Scenario::Hg(run) = &scenario else { unreachable!("validated") };
            let rec = propagate(&run.entry_slice()?, &run.setup(cfg.control.unwrap_or_default()))?;
            let rows: Vec<_> =
                rec.xi_samples.iter().zip(&rec.metrics).filter_map(|(z, m)| m.map(|m| (*z, m))).collect();
            out.write("metrics.csv", |w| write_metrics_csv(w, &rows))?;
            for ((z, slice), atom) in rec.xi_samples.iter().zip(&rec.slices).zip(&rec.atoms) {
                out.write(&snapshot_name(*z), |w| write_snapshot_csv(w, slice, atom))?;
            }
            out.json("propagation.json", &PropagationManifest::new(cfg.preset.clone(), run.medium.mixing_mode, &rec))?;
        }
        Command::Oracle => {
            let Scenario::Oracle(oc) = &scenario else { unreachable!("validated") };
            let mut oc = *oc;
            oc.tol = cfg.tol;
            out.json("oracle.json", &compare_reduced_vs_full(&oc)?)?;
        }
        Command::ListPresets => unreachable!(),
    }

    let manifest = Manifest {
        schema: SCHEMA_VERSION,
        command: cfg.command,
        config_hash: config_hash(cfg),
        versions: VERSIONS,
        files: out.files.clone(),
    };
    out.json("manifest.json", &manifest)?;
    Ok(Some(manifest))
}

/// Validates a JSON config value and runs it.
pub fn run_value(value: &serde_json::Value, stdout: &mut dyn Write) -> CliResult<Option<Manifest>> {
    let cfg = validate_value(value).map_err(CliError::Invalid)?;
    run(&cfg, stdout)
}
