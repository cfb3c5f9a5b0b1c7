use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::matrix_sim::{ExpMethod, Observables, RankFraction, SimConfig};
use crate::{Error, Result};

/// The pipelines the runner knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Moments,
    Stationary,
    ExpansionVerify,
    Cumulants,
    MgfCheck,
    Characteristics,
    Simulate,
    FullVerify,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Self::Moments,
        Self::Stationary,
        Self::ExpansionVerify,
        Self::Cumulants,
        Self::MgfCheck,
        Self::Characteristics,
        Self::Simulate,
        Self::FullVerify,
    ];

    /// Name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Self::Moments => "moments",
            Self::Stationary => "stationary",
            Self::ExpansionVerify => "expansion-verify",
            Self::Cumulants => "cumulants",
            Self::MgfCheck => "mgf-check",
            Self::Characteristics => "characteristics",
            Self::Simulate => "simulate",
            Self::FullVerify => "full-verify",
        }
    }

    /// Section of the config file holding this command's parameters.
    pub fn section(self) -> &'static str {
        match self {
            Self::Moments => "moments",
            Self::Stationary => "stationary",
            Self::ExpansionVerify => "expansion_verify",
            Self::Cumulants => "cumulants",
            Self::MgfCheck => "mgf_check",
            Self::Characteristics => "characteristics",
            Self::Simulate => "simulate",
            Self::FullVerify => "full_verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsParams {
    pub k: u32,
    pub n_max: usize,
    pub t_end: f64,
    pub dt: f64,
    /// Ratio `τ(P)/τ(Q)`; defaults to 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// `τ(Q)`; defaults to `1/k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for MomentsParams {
    fn default() -> Self {
        Self { k: 3, n_max: 8, t_end: 5.0, dt: 0.01, lambda: None, theta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryParams {
    pub k: u32,
    pub n_max: usize,
    /// Bins of the density table.
    pub bins: usize,
}

impl Default for StationaryParams {
    fn default() -> Self {
        Self { k: 3, n_max: 12, bins: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpansionParams {
    pub n_max: usize,
}

impl Default for ExpansionParams {
    fn default() -> Self {
        Self { n_max: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CumulantParams {
    /// Trace of the projection, written `"p/q"`.
    pub alpha: String,
    pub n_max: usize,
}

impl Default for CumulantParams {
    fn default() -> Self {
        Self { alpha: "1/3".into(), n_max: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MgfParams {
    pub k: u32,
    pub n_max: usize,
    pub t_end: f64,
    pub dt: f64,
    /// Sample points `[re, im]` inside the unit disc.
    pub z: Vec<[f64; 2]>,
    /// Times at which the coefficient residual of the `ρ_t` equation is formed.
    pub residual_times: Vec<f64>,
}

impl Default for MgfParams {
    fn default() -> Self {
        Self {
            k: 3,
            n_max: 10,
            t_end: 2.1,
            dt: 1e-3,
            z: vec![[0.05, 0.0], [0.0, 0.05], [-0.1, 0.02]],
            residual_times: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharacteristicParams {
    pub k: u32,
    /// Starting point `[re, im]`.
    pub z0: [f64; 2],
    pub t_end: f64,
    pub dt: f64,
    pub n_max: usize,
}

impl Default for CharacteristicParams {
    fn default() -> Self {
        Self { k: 3, z0: [0.05, 0.0], t_end: 0.5, dt: 1e-3, n_max: 14 }
    }
}

/// Monte Carlo parameters; mirrors [`SimConfig`] without the seed, which is global.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateParams {
    pub n: usize,
    pub k: u32,
    pub t_end: f64,
    pub dt: f64,
    pub trajectories: usize,
    pub n_max: usize,
    pub snapshots: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<RankFraction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<RankFraction>,
    pub method: ExpMethod,
    pub keep_spectra: bool,
    pub bins: usize,
    /// Standard errors allowed between Monte Carlo means and the ODE values.
    pub sigmas: f64,
    pub observables: Observables,
}

impl Default for SimulateParams {
    fn default() -> Self {
        Self {
            n: 60,
            k: 3,
            t_end: 1.0,
            dt: 1e-2,
            trajectories: 20,
            n_max: 4,
            snapshots: 5,
            p: None,
            q: None,
            method: ExpMethod::Taylor,
            keep_spectra: true,
            bins: 60,
            sigmas: 4.0,
            observables: Observables::default(),
        }
    }
}

impl SimulateParams {
    pub fn to_sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            n: self.n,
            k: self.k,
            t_end: self.t_end,
            dt: self.dt,
            trajectories: self.trajectories,
            seed,
            observables: self.observables.clone(),
            n_max: self.n_max,
            snapshots: self.snapshots,
            p: self.p.clone(),
            q: self.q.clone(),
            method: self.method,
            keep_spectra: self.keep_spectra,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FullVerifyParams {
    pub k: u32,
    pub n_max: usize,
    pub t_end: f64,
    pub dt: f64,
    /// Matrix size of the Monte Carlo comparison; 0 skips it.
    pub mc_n: usize,
    pub mc_trajectories: usize,
    pub mc_dt: f64,
    pub mc_sigmas: f64,
}

impl Default for FullVerifyParams {
    fn default() -> Self {
        Self {
            k: 3,
            n_max: 8,
            t_end: 5.0,
            dt: 1e-3,
            mc_n: 60,
            mc_trajectories: 24,
            mc_dt: 1e-2,
            mc_sigmas: 4.0,
        }
    }
}

/// Parameters of one pipeline after merging the config file and flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Params {
    Moments(MomentsParams),
    Stationary(StationaryParams),
    ExpansionVerify(ExpansionParams),
    Cumulants(CumulantParams),
    MgfCheck(MgfParams),
    Characteristics(CharacteristicParams),
    Simulate(SimulateParams),
    FullVerify(FullVerifyParams),
}

impl Params {
    pub fn command(&self) -> Command {
        match self {
            Self::Moments(_) => Command::Moments,
            Self::Stationary(_) => Command::Stationary,
            Self::ExpansionVerify(_) => Command::ExpansionVerify,
            Self::Cumulants(_) => Command::Cumulants,
            Self::MgfCheck(_) => Command::MgfCheck,
            Self::Characteristics(_) => Command::Characteristics,
            Self::Simulate(_) => Command::Simulate,
            Self::FullVerify(_) => Command::FullVerify,
        }
    }

    /// Deserialize the parameters of `command` from a key-value table.
    pub fn from_table(command: Command, table: toml::Table) -> Result<Self> {
        fn parse<T: DeserializeOwned>(c: Command, t: toml::Table) -> Result<T> {
            t.try_into()
                .map_err(|e| Error::Config(format!("[{}]: {e}", c.section())))
        }
        Ok(match command {
            Command::Moments => Self::Moments(parse(command, table)?),
            Command::Stationary => Self::Stationary(parse(command, table)?),
            Command::ExpansionVerify => Self::ExpansionVerify(parse(command, table)?),
            Command::Cumulants => Self::Cumulants(parse(command, table)?),
            Command::MgfCheck => Self::MgfCheck(parse(command, table)?),
            Command::Characteristics => Self::Characteristics(parse(command, table)?),
            Command::Simulate => Self::Simulate(parse(command, table)?),
            Command::FullVerify => Self::FullVerify(parse(command, table)?),
        })
    }

    /// The parameters as a config-file section.
    pub fn to_table(&self) -> Result<toml::Table> {
        let v = match self {
            Self::Moments(p) => toml::Table::try_from(p),
            Self::Stationary(p) => toml::Table::try_from(p),
            Self::ExpansionVerify(p) => toml::Table::try_from(p),
            Self::Cumulants(p) => toml::Table::try_from(p),
            Self::MgfCheck(p) => toml::Table::try_from(p),
            Self::Characteristics(p) => toml::Table::try_from(p),
            Self::Simulate(p) => toml::Table::try_from(p),
            Self::FullVerify(p) => toml::Table::try_from(p),
        };
        v.map_err(|e| Error::Config(e.to_string()))
    }
}

/// Top-level keys of a config file. Every command section is optional; only
/// the one matching the selected command is used.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub threads: Option<usize>,
    pub moments: Option<toml::Table>,
    pub stationary: Option<toml::Table>,
    pub expansion_verify: Option<toml::Table>,
    pub cumulants: Option<toml::Table>,
    pub mgf_check: Option<toml::Table>,
    pub characteristics: Option<toml::Table>,
    pub simulate: Option<toml::Table>,
    pub full_verify: Option<toml::Table>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // validate every section present, not just the one about to run
        for c in Command::ALL {
            if let Some(t) = cfg.section(c) {
                Params::from_table(c, t.clone())?;
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn section(&self, c: Command) -> Option<&toml::Table> {
        match c {
            Command::Moments => self.moments.as_ref(),
            Command::Stationary => self.stationary.as_ref(),
            Command::ExpansionVerify => self.expansion_verify.as_ref(),
            Command::Cumulants => self.cumulants.as_ref(),
            Command::MgfCheck => self.mgf_check.as_ref(),
            Command::Characteristics => self.characteristics.as_ref(),
            Command::Simulate => self.simulate.as_ref(),
            Command::FullVerify => self.full_verify.as_ref(),
        }
    }
}

/// A fully resolved run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(flatten)]
    pub params: Params,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Overrides the default verification tolerance of the pipeline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl ExperimentSpec {
    /// Defaults for `command`, writing to `output_dir`.
    pub fn new(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            params: Params::from_table(command, toml::Table::new()).expect("defaults deserialize"),
            output_dir: output_dir.into(),
            seed: 0,
            tolerance: None,
        }
    }

    pub fn command(&self) -> Command {
        self.params.command()
    }

    /// The run as a config file that reproduces it.
    pub fn to_config_toml(&self) -> Result<String> {
        let mut root = toml::Table::new();
        root.insert("command".into(), self.command().name().into());
        root.insert("seed".into(), toml::Value::Integer(self.seed as i64));
        root.insert("out".into(), self.output_dir.display().to_string().into());
        if let Some(t) = self.tolerance {
            root.insert("tolerance".into(), t.into());
        }
        root.insert(self.command().section().into(), self.params.to_table()?.into());
        toml::to_string(&root).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Layer flag overrides (`key -> value`) on top of the file section for `command`.
pub fn resolve_params(
    command: Command,
    file: Option<&ConfigFile>,
    overrides: &toml::Table,
) -> Result<Params> {
    let mut table = file.and_then(|f| f.section(command)).cloned().unwrap_or_default();
    for (key, value) in overrides {
        table.insert(key.clone(), value.clone());
    }
    Params::from_table(command, table)
}
