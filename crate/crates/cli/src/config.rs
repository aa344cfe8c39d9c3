//! Run configuration: a TOML document plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fracopt::model::random::InstanceParams;
use fracopt::solvers::{SolverId, SolverOptions};
use fracopt::wireless::{IsacParams, MimoParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Synthetic,
    Isac,
    Mimo,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Synthetic => "synthetic",
            Self::Isac => "isac",
            Self::Mimo => "mimo",
        }
    }

    pub fn default_solvers(self) -> Vec<SolverId> {
        match self {
            Self::Synthetic | Self::Isac => {
                vec![SolverId::Conventional, SolverId::Nonhomogeneous, SolverId::Extrapolated]
            }
            Self::Mimo => vec![
                SolverId::WmmseClassic,
                SolverId::GeneralizedNonhomogeneous,
                SolverId::GeneralizedExtrapolated,
            ],
        }
    }

    fn accepts(self, id: SolverId) -> bool {
        id.is_log_solver() == (self == Self::Mimo)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "synthetic" => Ok(Self::Synthetic),
            "isac" => Ok(Self::Isac),
            "mimo" => Ok(Self::Mimo),
            _ => Err(BenchError::Usage(format!("unknown experiment `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub solvers: Vec<SolverId>,
    #[serde(default = "one")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: SolverOptions,
    #[serde(default)]
    pub synthetic: InstanceParams,
    #[serde(default)]
    pub isac: IsacParams,
    #[serde(default)]
    pub mimo: MimoParams,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

impl RunConfig {
    /// Defaults for an experiment: its standard solvers, one instance, seed 0.
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            solvers: experiment.default_solvers(),
            instances: 1,
            seed: 0,
            options: SolverOptions::default(),
            synthetic: InstanceParams::default(),
            isac: IsacParams::default(),
            mimo: MimoParams::default(),
            out: default_out(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| BenchError::Usage(format!("config: {e}")))?;
        if cfg.solvers.is_empty() {
            cfg.solvers = cfg.experiment.default_solvers();
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.instances == 0 {
            return Err(BenchError::Usage("instances must be at least 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(BenchError::Usage("no solvers selected".into()));
        }
        if let Some(bad) = self.solvers.iter().find(|&&id| !self.experiment.accepts(id)) {
            return Err(BenchError::Usage(format!("solver `{bad}` does not apply to the {} experiment", self.experiment)));
        }
        self.options.validate().map_err(|e| BenchError::Usage(e.to_string()))?;
        let params = match self.experiment {
            Experiment::Synthetic => self.synthetic.validate(),
            Experiment::Isac => self.isac.validate(),
            Experiment::Mimo => self.mimo.validate(),
        };
        params.map_err(|e| BenchError::Usage(e.to_string()))
    }

    /// Applies `name=value,...` overrides to the active experiment's parameters.
    pub fn apply_scale(&mut self, spec: &str) -> Result<(), BenchError> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| BenchError::Usage(format!("scale override `{item}` is not name=value")))?;
            let key = canonical_key(self.experiment, key.trim());
            match self.experiment {
                Experiment::Synthetic => set_field(&mut self.synthetic, key, value.trim())?,
                Experiment::Isac => set_field(&mut self.isac, key, value.trim())?,
                Experiment::Mimo => set_field(&mut self.mimo, key, value.trim())?,
            }
        }
        Ok(())
    }
}

/// Short names for the common dimensions.
fn canonical_key(exp: Experiment, key: &str) -> &str {
    match (exp, key) {
        (Experiment::Isac, "M") => "tx_antennas",
        (Experiment::Isac, "N") => "user_antennas",
        (Experiment::Isac, "Nr" | "N_r") => "radar_antennas",
        (Experiment::Mimo, "L") => "cells",
        (Experiment::Mimo, "Q") => "users_per_cell",
        (Experiment::Mimo, "M") => "tx_antennas",
        (Experiment::Mimo, "N") => "rx_antennas",
        (Experiment::Synthetic, "radius") => "radius_sq",
        _ => key,
    }
}

fn set_field<P: Serialize + serde::de::DeserializeOwned>(params: &mut P, key: &str, raw: &str) -> Result<(), BenchError> {
    let mut value = serde_json::to_value(&*params).expect("parameters serialize");
    let map = value.as_object_mut().expect("parameters are a struct");
    if !map.contains_key(key) {
        return Err(BenchError::Usage(format!("unknown scale parameter `{key}`")));
    }
    let parsed: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    map.insert(key.to_string(), parsed);
    *params = serde_json::from_value(value).map_err(|e| BenchError::Usage(format!("scale `{key}={raw}`: {e}")))?;
    Ok(())
}

/// Parses a comma-separated solver list.
pub fn parse_solvers(list: &str) -> Result<Vec<SolverId>, BenchError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<SolverId>().map_err(|e| BenchError::Usage(e.to_string())))
        .collect()
}
