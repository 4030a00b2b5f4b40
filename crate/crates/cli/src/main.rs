use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use scrap_fwm_cli::{run_value, Axis, CliError};

#[derive(Parser)]
#[command(name = "scrap-fwm", version, about = "Stark-chirped coherence and four-wave mixing runs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the reduced two-level dynamics of one scenario.
    Dynamics(Common),
    /// Sweep one or more parameters and tabulate final values.
    Scan(Common),
    /// March the Hg fields through the medium.
    Propagate(Common),
    /// Compare the reduced model with the full five-level one.
    Oracle(Common),
    /// Print every preset.
    ListPresets,
}

#[derive(Args)]
struct Common {
    /// Named preset.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file holding an inline scenario.
    #[arg(long, value_name = "PATH")]
    inline: Option<PathBuf>,
    /// JSON run config; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    /// Time grid as `t_start:t_end:n`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Scan axis as `name:lo:hi:n`; repeatable.
    #[arg(long = "axis", allow_hyphen_values = true)]
    axes: Vec<Axis>,
    /// Comma-separated depths; the largest is the propagation length.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    /// `sum` or `difference`.
    #[arg(long)]
    mode: Option<String>,
    /// `angular` or `cyclic`, for inline amplitudes and scan values.
    #[arg(long)]
    units: Option<String>,
}

fn read_json(path: &PathBuf) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_grid(s: &str) -> Result<Value, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("grid `{s}` is not of the form t_start:t_end:n"));
    };
    let num = |x: &str| x.parse::<f64>().map_err(|_| format!("grid `{s}`: `{x}` is not a number"));
    let n: usize = n.parse().map_err(|_| format!("grid `{s}`: `{n}` is not a count"))?;
    Ok(json!({"t_start": num(a)?, "t_end": num(b)?, "n_samples": n}))
}

fn build(command: &str, c: Option<Common>) -> Result<Value, String> {
    let mut obj = Map::new();
    if let Some(c) = c {
        if let Some(path) = &c.config {
            match read_json(path)? {
                Value::Object(m) => obj = m,
                _ => return Err(format!("{}: expected a JSON object", path.display())),
            }
        }
        if let Some(p) = c.preset {
            obj.remove("inline");
            obj.insert("preset".into(), p.into());
        }
        if let Some(path) = &c.inline {
            obj.remove("preset");
            obj.insert("inline".into(), read_json(path)?);
        }
        if let Some(o) = c.out {
            obj.insert("out".into(), json!(o));
        }
        if let Some(t) = c.tol {
            obj.insert("tol".into(), json!(t));
        }
        if let Some(g) = c.grid {
            obj.insert("grid".into(), parse_grid(&g)?);
        }
        if !c.axes.is_empty() {
            obj.insert("axes".into(), json!(c.axes));
        }
        if let Some(z) = c.snapshots {
            obj.insert("snapshots".into(), json!(z));
        }
        if let Some(m) = c.mode {
            obj.insert("mode".into(), m.into());
        }
        if let Some(u) = c.units {
            obj.insert("units".into(), u.into());
        }
    }
    obj.entry("schema").or_insert(json!(scrap_fwm_cli::SCHEMA_VERSION));
    obj.insert("command".into(), command.into());
    Ok(Value::Object(obj))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match cli.command {
        Cmd::Dynamics(c) => ("dynamics", Some(c)),
        Cmd::Scan(c) => ("scan", Some(c)),
        Cmd::Propagate(c) => ("propagate", Some(c)),
        Cmd::Oracle(c) => ("oracle", Some(c)),
        Cmd::ListPresets => ("list-presets", None),
    };
    let value = match build(name, common) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_value(&value, &mut std::io::stdout().lock()) {
        Ok(Some(m)) => {
            for f in &m.files {
                println!("wrote {f}");
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Model(scrap_fwm::Error::UnknownPreset { .. }) = e {
                eprintln!("run `scrap-fwm list-presets` to see every name");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
