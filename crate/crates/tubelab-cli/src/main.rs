//! Batch front-end for the tubelab library: tube volumes, concentration
//! scans, sphere sampling, and metric-measure distances, each emitting one
//! JSON or CSV document. Identical arguments and seed produce byte-identical
//! output; validation problems exit 2 and numerical non-convergence exits 3.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{CliError, CommandKind, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "tubelab",
    version,
    about = "Tube volumes, concentration scans, sphere sampling, and metric-measure distances"
)]
struct Cli {
    /// RNG seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the document to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output document format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Tube volume around a closed submanifold.
    Tube {
        /// Ambient geometry: flat or sphere.
        #[arg(long)]
        ambient: String,
        /// Ambient sphere radius.
        #[arg(long, alias = "R")]
        radius: Option<f64>,
        /// Submanifold dimension.
        #[arg(long)]
        n: u32,
        /// Codimension.
        #[arg(long)]
        q: u32,
        /// Tube radius.
        #[arg(long)]
        eps: f64,
        /// Submanifold volume.
        #[arg(long)]
        vol_m: f64,
        /// Comma-separated curvature means; defaults to all zeros.
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Concentration scan of a family over a dimension range.
    Scan {
        /// Family to scan; currently "equator".
        #[arg(long)]
        family: String,
        /// Radius schedule: "c*n^-k", "n^-k", or "const:eps0".
        #[arg(long)]
        schedule: String,
        /// Dimension range "start:stop:step".
        #[arg(long)]
        n: String,
        /// Tail tolerance for the verdict (default 1e-3).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Uniform samples on a sphere with colatitudes.
    Sample {
        /// Sphere dimension.
        #[arg(long)]
        n: u32,
        /// Number of points.
        #[arg(long)]
        count: usize,
        /// Locus radius for an empirical complement estimate.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Distances between finite metric measure spaces.
    Mmdist {
        /// Computation: w1, box, or bound.
        #[arg(long)]
        kind: String,
        /// Path to a space JSON document.
        #[arg(long)]
        space: Option<String>,
        /// Comma-separated target weights (kind w1).
        #[arg(long)]
        nu: Option<String>,
        /// Path to the second space JSON document (kind box).
        #[arg(long)]
        other: Option<String>,
        /// Mass outside the tube (kind bound).
        #[arg(long)]
        mass: Option<f64>,
        /// Tube radius (kind bound).
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Transport and box-distance audit over a file of instances.
    Audit {
        /// Path to a JSON array of {label, space, locus, eps} entries.
        #[arg(long)]
        instances: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    let config = cli.into_config();
    let mut document = commands::run(&config)?;
    if !document.ends_with('\n') {
        document.push('\n');
    }
    match &config.output_path {
        Some(path) => std::fs::write(path, document)
            .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{document}"),
    }
    Ok(())
}

/// TUBELAB_THREADS caps the global worker pool before any parallel work.
fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TUBELAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.parse().map_err(|_| {
        CliError::invalid(format!("TUBELAB_THREADS must be a positive integer, got {raw:?}"))
    })?;
    if threads == 0 {
        return Err(CliError::invalid("TUBELAB_THREADS must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::invalid(format!("cannot configure the thread pool: {e}")))
}

impl Cli {
    fn into_config(self) -> RunConfig {
        let format = match self.format {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        };
        let (command, params) = self.command.into_parts();
        RunConfig { command, params, seed: self.seed, output_path: self.out, format }
    }
}

fn set(map: &mut BTreeMap<String, String>, key: &str, value: impl ToString) {
    map.insert(key.to_string(), value.to_string());
}

fn set_opt(map: &mut BTreeMap<String, String>, key: &str, value: Option<impl ToString>) {
    if let Some(value) = value {
        set(map, key, value);
    }
}

impl Command {
    fn into_parts(self) -> (CommandKind, BTreeMap<String, String>) {
        let mut map = BTreeMap::new();
        let kind = match self {
            Command::Tube { ambient, radius, n, q, eps, vol_m, kappa } => {
                set(&mut map, "ambient", ambient);
                set_opt(&mut map, "radius", radius);
                set(&mut map, "n", n);
                set(&mut map, "q", q);
                set(&mut map, "eps", eps);
                set(&mut map, "vol_m", vol_m);
                set_opt(&mut map, "kappa", kappa);
                CommandKind::Tube
            }
            Command::Scan { family, schedule, n, tol } => {
                set(&mut map, "family", family);
                set(&mut map, "schedule", schedule);
                set(&mut map, "n", n);
                set_opt(&mut map, "tol", tol);
                CommandKind::Scan
            }
            Command::Sample { n, count, eps } => {
                set(&mut map, "n", n);
                set(&mut map, "count", count);
                set_opt(&mut map, "eps", eps);
                CommandKind::Sample
            }
            Command::Mmdist { kind, space, nu, other, mass, eps } => {
                set(&mut map, "kind", kind);
                set_opt(&mut map, "space", space);
                set_opt(&mut map, "nu", nu);
                set_opt(&mut map, "other", other);
                set_opt(&mut map, "mass", mass);
                set_opt(&mut map, "eps", eps);
                CommandKind::Mmdist
            }
            Command::Audit { instances } => {
                set(&mut map, "instances", instances);
                CommandKind::Audit
            }
        };
        (kind, map)
    }
}
