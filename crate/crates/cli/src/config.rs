//! Scenario configuration: a flat TOML file plus command-line overrides.
//!
//! The file schema is versioned (`schema = 1`) and strict: unknown keys are
//! rejected. Every key is optional; defaults are filled per subcommand.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{HarnessError, Result};

pub const CONFIG_SCHEMA: u32 = 1;

/// Which noise model acts after each propagator application.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    None,
    Diffusive,
    Pdc,
    Dpc,
}

impl ChannelKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "diffusive" => Ok(Self::Diffusive),
            "pdc" => Ok(Self::Pdc),
            "dpc" => Ok(Self::Dpc),
            other => Err(HarnessError::Config(format!(
                "channel must be one of none|diffusive|pdc|dpc, got `{other}`"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Diffusive => "diffusive",
            Self::Pdc => "pdc",
            Self::Dpc => "dpc",
        }
    }
}

/// How the initial state is prepared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Coherent { q0: f64, p0: f64 },
    Ghz,
    Basis { index: usize },
}

impl InitialState {
    pub fn describe(&self) -> String {
        match self {
            Self::Coherent { q0, p0 } => format!("coherent({q0}, {p0})"),
            Self::Ghz => "ghz".to_string(),
            Self::Basis { index } => format!("basis({index})"),
        }
    }
}

/// Raw, fully optional key set of the config file.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema: Option<u32>,
    pub k: Option<u32>,
    pub chi: Option<f64>,
    pub chi1: Option<f64>,
    pub chi2: Option<f64>,
    pub channel: Option<String>,
    pub epsilon: Option<f64>,
    pub steps: Option<usize>,
    pub initial: Option<String>,
    pub q0: Option<f64>,
    pub p0: Option<f64>,
    pub basis_index: Option<usize>,
    pub trajectories: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub portrait_grid: Option<usize>,
    pub portrait_iterations: Option<usize>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let raw: RawConfig = toml::from_str(&text).map_err(|e| HarnessError::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        match raw.schema {
            Some(CONFIG_SCHEMA) => Ok(raw),
            Some(v) => Err(HarnessError::ConfigFile {
                path: path.to_path_buf(),
                message: format!("unsupported schema = {v}, expected {CONFIG_SCHEMA}"),
            }),
            None => Err(HarnessError::ConfigFile {
                path: path.to_path_buf(),
                message: format!("missing required `schema = {CONFIG_SCHEMA}` field"),
            }),
        }
    }

    /// Overlay: values present in `over` win.
    pub fn merged_with(mut self, over: &RawConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if over.$field.is_some() { self.$field = over.$field.clone(); })*
            };
        }
        take!(
            schema,
            k,
            chi,
            chi1,
            chi2,
            channel,
            epsilon,
            steps,
            initial,
            q0,
            p0,
            basis_index,
            trajectories,
            seed,
            out,
            portrait_grid,
            portrait_iterations
        );
        self
    }
}

/// Validated scenario description.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub k: u32,
    pub chi1: f64,
    pub chi2: f64,
    pub channel: ChannelKind,
    pub epsilon: f64,
    steps: Option<usize>,
    pub initial: InitialState,
    pub trajectories: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub portrait_grid: usize,
    pub portrait_iterations: usize,
}

impl ScenarioConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self> {
        let k = raw.k.unwrap_or(8);
        if !(2..=14).contains(&k) {
            return Err(HarnessError::Config(format!(
                "k = {k} outside the supported range 2..=14"
            )));
        }

        let chi_default = raw.chi.unwrap_or(qharper_core::DEFAULT_KICK);
        let chi1 = raw.chi1.unwrap_or(chi_default);
        let chi2 = raw.chi2.unwrap_or(chi_default);
        for (name, v) in [("chi1", chi1), ("chi2", chi2)] {
            if !v.is_finite() {
                return Err(HarnessError::Config(format!("{name} = {v} is not finite")));
            }
        }

        let channel = match &raw.channel {
            Some(s) => ChannelKind::parse(s)?,
            None => ChannelKind::None,
        };

        let epsilon = raw.epsilon.unwrap_or(match channel {
            ChannelKind::None => 0.0,
            ChannelKind::Diffusive => 0.005,
            ChannelKind::Pdc | ChannelKind::Dpc => 0.04,
        });
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(HarnessError::Config(format!(
                "epsilon = {epsilon} must be finite and >= 0"
            )));
        }
        if matches!(channel, ChannelKind::Pdc | ChannelKind::Dpc) && epsilon > 1.0 {
            return Err(HarnessError::Config(format!(
                "epsilon = {epsilon} must lie in [0, 1] for channel = {}",
                channel.as_str()
            )));
        }

        let initial = match raw.initial.as_deref() {
            None | Some("coherent") => {
                let q0 = raw.q0.unwrap_or(0.25);
                let p0 = raw.p0.unwrap_or(0.25);
                for (name, v) in [("q0", q0), ("p0", p0)] {
                    if !v.is_finite() {
                        return Err(HarnessError::Config(format!(
                            "{name} = {v} is not finite"
                        )));
                    }
                }
                InitialState::Coherent { q0, p0 }
            }
            Some("ghz") => InitialState::Ghz,
            Some("basis") => {
                let index = raw.basis_index.unwrap_or(0);
                if index >= 1usize << k {
                    return Err(HarnessError::Config(format!(
                        "basis_index = {index} out of range for k = {k} (N = {})",
                        1usize << k
                    )));
                }
                InitialState::Basis { index }
            }
            Some(other) => {
                return Err(HarnessError::Config(format!(
                    "initial must be one of coherent|ghz|basis, got `{other}`"
                )))
            }
        };

        let trajectories = raw.trajectories.unwrap_or(64);
        if channel != ChannelKind::None && trajectories < 2 {
            return Err(HarnessError::Config(format!(
                "trajectories = {trajectories} must be >= 2 for noisy runs"
            )));
        }

        let portrait_grid = raw.portrait_grid.unwrap_or(12);
        if portrait_grid == 0 {
            return Err(HarnessError::Config(
                "portrait_grid must be >= 1".to_string(),
            ));
        }
        let portrait_iterations = raw.portrait_iterations.unwrap_or(200);
        if portrait_iterations == 0 {
            return Err(HarnessError::Config(
                "portrait_iterations must be >= 1".to_string(),
            ));
        }

        Ok(Self {
            k,
            chi1,
            chi2,
            channel,
            epsilon,
            steps: raw.steps,
            initial,
            trajectories,
            seed: raw.seed.unwrap_or(42),
            out: raw.out.clone().unwrap_or_else(|| PathBuf::from("qharper_out")),
            portrait_grid,
            portrait_iterations,
        })
    }

    /// Step count with the subcommand's default.
    pub fn steps_or(&self, default: usize) -> usize {
        self.steps.unwrap_or(default)
    }

    /// Flat key/value dump for the manifest.
    pub fn manifest_entries(&self) -> Vec<(String, String)> {
        let mut e = vec![
            ("k".into(), self.k.to_string()),
            ("chi1".into(), format!("{}", self.chi1)),
            ("chi2".into(), format!("{}", self.chi2)),
            ("channel".into(), self.channel.as_str().into()),
            ("epsilon".into(), format!("{}", self.epsilon)),
            ("initial".into(), self.initial.describe()),
            ("trajectories".into(), self.trajectories.to_string()),
            ("seed".into(), self.seed.to_string()),
        ];
        if let Some(steps) = self.steps {
            e.push(("steps".into(), steps.to_string()));
        }
        e
    }
}
