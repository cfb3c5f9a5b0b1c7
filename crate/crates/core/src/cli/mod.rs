//! Batch runner: resolves a configuration, executes one pipeline, and writes
//! CSV/JSON artifacts plus a manifest into the output directory.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;

pub use artifacts::{emit_plot_data, histogram_csv, moment_vs_t_csv, write_atomic, Check, PlotInput, PlotKind};
pub use commands::Outcome;
pub use config::{
    resolve_params, CharacteristicParams, Command, ConfigFile, CumulantParams, ExpansionParams,
    ExperimentSpec, FullVerifyParams, MgfParams, MomentsParams, Params, SimulateParams,
    StationaryParams,
};

use crate::{Error, Result};

/// Exit status for a successful run whose checks all passed.
pub const EXIT_OK: i32 = 0;
/// Exit status when a check failed or a computation broke down.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for unusable configuration or arguments.
pub const EXIT_CONFIG: i32 = 2;

/// Exit status for an error raised while resolving or running a spec.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::RankMismatch { .. }
        | Error::SizeGuard { .. }
        | Error::InvalidGrid(_)
        | Error::OrderMismatch { .. } => EXIT_CONFIG,
        _ => EXIT_FAILED,
    }
}

/// Record of a run, written as `manifest.json` next to the artifacts.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub threads: usize,
    pub spec: ExperimentSpec,
    /// The resolved configuration as a file that `--config` accepts.
    pub config: String,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
}

/// Execute `spec` and write its artifacts, `config.toml` and `manifest.json`.
pub fn run(spec: &ExperimentSpec) -> Result<Manifest> {
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let config = spec.to_config_toml()?;
    let mut outcome = commands::execute(spec)?;
    write_atomic(&spec.output_dir, "config.toml", config.as_bytes())?;
    outcome.outputs.push("config.toml".into());
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: spec.command().name(),
        seed: spec.seed,
        threads: rayon::current_num_threads(),
        spec: spec.clone(),
        config,
        started_unix,
        wall_time_s: started.elapsed().as_secs_f64(),
        passed: outcome.passed(),
        checks: outcome.checks,
        outputs: outcome.outputs,
    };
    write_atomic(&spec.output_dir, "manifest.json", serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

const AFTER_HELP: &str = "\
CONFIG FILE (TOML)
  Top-level keys: command, seed, out, tolerance, threads.
  One optional section per command: [moments], [stationary], [expansion_verify],
  [cumulants], [mgf_check], [characteristics], [simulate], [full_verify].
  Only the section of the selected command is used; unknown keys anywhere are
  rejected. Flags override the file. Every key with its default is listed in
  config.schema.toml next to this crate's manifest.

  --tolerance replaces the main tolerance of the command: the ODE gap for
  moments/full-verify, the generating-function gap for mgf-check, the
  conserved-quantity drift for characteristics, and the number of standard
  errors for simulate.

OUTPUT
  CSV/JSON artifacts, config.toml (resolved configuration) and manifest.json
  (inputs, version, seed, wall time, checks) in --out.

EXIT STATUS
  0 all checks passed, 1 a check failed or a computation broke down,
  2 configuration error.";

/// Verification and simulation runner for the free Jacobi process.
#[derive(Debug, Parser)]
#[command(name = "freejacobi", version, after_long_help = AFTER_HELP)]
pub struct Cli {
    /// Pipeline to run (may also come from the config file).
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed of the Monte Carlo streams [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: runs/<command>].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Main tolerance of the command (see below)
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Number of averaged unitaries.
    #[arg(long)]
    pub k: Option<u32>,
    /// Highest moment order
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Final time
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Time step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Matrix size (simulate).
    #[arg(long)]
    pub n: Option<usize>,
    /// Monte Carlo trajectories (simulate).
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Projection trace `p/q` (cumulants).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Extra `key=value` parameter of the command section (TOML value syntax).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Cli {
    fn overrides(&self) -> Result<toml::Table> {
        let mut t = toml::Table::new();
        let int = |v: u64| toml::Value::Integer(v as i64);
        if let Some(v) = self.k {
            t.insert("k".into(), int(v.into()));
        }
        if let Some(v) = self.n_max {
            t.insert("n_max".into(), int(v as u64));
        }
        if let Some(v) = self.t_end {
            t.insert("t_end".into(), v.into());
        }
        if let Some(v) = self.dt {
            t.insert("dt".into(), v.into());
        }
        if let Some(v) = self.n {
            t.insert("n".into(), int(v as u64));
        }
        if let Some(v) = self.trajectories {
            t.insert("trajectories".into(), int(v as u64));
        }
        if let Some(v) = &self.alpha {
            t.insert("alpha".into(), v.clone().into());
        }
        for kv in &self.set {
            let parsed: toml::Table = toml::from_str(kv)
                .map_err(|e| Error::Config(format!("--set {kv}: {e}")))?;
            t.extend(parsed);
        }
        Ok(t)
    }

    /// Merge file and flags into a spec; also returns the requested thread count.
    pub fn resolve(&self) -> Result<(ExperimentSpec, Option<usize>)> {
        let file = self.config.as_deref().map(ConfigFile::load).transpose()?;
        let command = self
            .command
            .or_else(|| file.as_ref().and_then(|f| f.command))
            .ok_or_else(|| Error::Config("no command given".into()))?;
        if let (Some(a), Some(b)) = (self.command, file.as_ref().and_then(|f| f.command)) {
            if a != b {
                return Err(Error::Config(format!(
                    "command {} conflicts with {} in the config file",
                    a.name(),
                    b.name()
                )));
            }
        }
        let params = resolve_params(command, file.as_ref(), &self.overrides()?)?;
        fn pick<T>(flag: Option<T>, file: Option<&ConfigFile>, get: fn(&ConfigFile) -> Option<T>) -> Option<T> {
            flag.or_else(|| file.and_then(get))
        }
        let file = file.as_ref();
        let output_dir = pick(self.out.clone(), file, |f| f.out.clone())
            .unwrap_or_else(|| PathBuf::from("runs").join(command.name()));
        let tolerance = pick(self.tolerance, file, |f| f.tolerance);
        if let Some(t) = tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tolerance {t} must be positive")));
            }
        }
        let spec = ExperimentSpec {
            params,
            output_dir,
            seed: pick(self.seed, file, |f| f.seed).unwrap_or(0),
            tolerance,
        };
        Ok((spec, pick(self.threads, file, |f| f.threads)))
    }
}

/// Parse arguments, run, print a summary and return the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (spec, threads) = match cli.resolve() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_CONFIG;
        }
        // fails only if the pool was already built, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&spec) {
        Ok(m) => {
            for c in &m.checks {
                let tag = if c.passed { "ok  " } else { "FAIL" };
                println!("[{tag}] {}: {:e} (limit {:e}) {}", c.name, c.value, c.limit, c.detail);
            }
            println!("wrote {} files to {}", m.outputs.len() + 1, spec.output_dir.display());
            if m.passed { EXIT_OK } else { EXIT_FAILED }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
