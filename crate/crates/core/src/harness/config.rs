use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use super::HarnessError;
use crate::codes::{CodeParams, LogicalInput};
use crate::qsim::NoiseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Encode,
    Recover,
    ClusterFidelity,
    Oneway,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Encode => "encode",
            Experiment::Recover => "recover",
            Experiment::ClusterFidelity => "cluster-fidelity",
            Experiment::Oneway => "oneway",
        })
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "encode" => Ok(Experiment::Encode),
            "recover" => Ok(Experiment::Recover),
            "cluster-fidelity" => Ok(Experiment::ClusterFidelity),
            "oneway" => Ok(Experiment::Oneway),
            _ => Err(HarnessError::config("experiment", format!("unknown experiment {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::config("format", format!("expected csv or json, got {s:?}"))),
        }
    }
}

/// Where ZZ dephasing and visibility loss act.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Product-of-pairs inputs dephase inside each block only; every other
    /// input also dephases across neighbouring blocks. Cluster runs dephase
    /// along the graph edges.
    #[default]
    Interference,
    None,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    })
}

fn default_inputs() -> Vec<String> {
    vec!["V".into(), "PLUS".into(), "R".into()]
}

fn two() -> usize {
    2
}

fn one() -> f64 {
    1.0
}

/// Flat key/value experiment description (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default = "default_inputs", alias = "input", deserialize_with = "one_or_many")]
    pub inputs: Vec<String>,
    #[serde(default = "two")]
    pub code_n: usize,
    #[serde(default = "two")]
    pub code_m: usize,
    #[serde(default = "one")]
    pub white_noise_v: f64,
    #[serde(default)]
    pub pair_dephasing_d: f64,
    #[serde(default = "one")]
    pub epr_visibility: f64,
    #[serde(default)]
    pub noise_placement: Placement,
    /// Explicit dephasing pairs; replaces the placement rule when non-empty.
    #[serde(default)]
    pub interfering_pairs: Vec<[usize; 2]>,
    /// Single-loss positions for `recover`; empty means every qubit.
    #[serde(default)]
    pub lost: Vec<usize>,
    #[serde(default)]
    pub loss_cases: Vec<String>,
    /// Rotation angles in radians for `oneway`.
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing)]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_branch: Option<String>,
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub noise_v: Option<f64>,
    pub out: Option<String>,
    pub format: Option<Format>,
    pub force_branch: Option<String>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies the command and overrides, then validates.
    pub fn resolve(mut self, command: Experiment, o: Overrides) -> Result<Self, HarnessError> {
        if let Some(e) = self.experiment {
            if e != command {
                return Err(HarnessError::config(
                    "experiment",
                    format!("config says {e} but the command is {command}"),
                ));
            }
        }
        self.experiment = Some(command);
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.shots {
            self.shots = v;
        }
        if let Some(v) = o.noise_v {
            self.white_noise_v = v;
        }
        if o.out.is_some() {
            self.out = o.out;
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if o.force_branch.is_some() {
            self.force_branch = o.force_branch;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment.expect("resolved config")
    }

    pub fn noise(&self) -> NoiseSpec {
        NoiseSpec {
            white_noise_v: self.white_noise_v,
            pair_dephasing_d: self.pair_dephasing_d,
            epr_visibility: self.epr_visibility,
        }
    }

    pub fn params(&self) -> Result<CodeParams, HarnessError> {
        CodeParams::new(self.code_n, self.code_m)
            .map_err(|_| HarnessError::config("code_n", format!("need code_n >= 2 and code_m >= 1, got ({}, {})", self.code_n, self.code_m)))
    }

    pub fn logical_inputs(&self) -> Result<Vec<(String, LogicalInput)>, HarnessError> {
        self.inputs
            .iter()
            .map(|name| {
                LogicalInput::preset(name)
                    .map(|x| (name.to_ascii_uppercase(), x))
                    .ok_or_else(|| HarnessError::config("inputs", format!("unknown input {name:?}")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let experiment = self.experiment.ok_or_else(|| HarnessError::config("experiment", "missing".into()))?;
        for (field, value) in [
            ("white_noise_v", self.white_noise_v),
            ("pair_dephasing_d", self.pair_dephasing_d),
            ("epr_visibility", self.epr_visibility),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(HarnessError::config(field, format!("{value} is outside [0, 1]")));
            }
        }
        if self.alphas.iter().any(|a| !a.is_finite()) {
            return Err(HarnessError::config("alphas", "angles must be finite".into()));
        }
        if let Some(b) = &self.force_branch {
            super::experiments::BranchFilter::parse(b)?;
        }
        match experiment {
            Experiment::Encode | Experiment::Recover => {
                let params = self.params()?;
                if params.total() > crate::qsim::MAX_QUBITS {
                    return Err(HarnessError::config("code_n", format!("{} qubits exceed the simulator limit", params.total())));
                }
                if experiment == Experiment::Encode && params.total() > crate::tomography::MAX_DECOMPOSE_QUBITS {
                    return Err(HarnessError::config("code_n", format!("tomography supports at most {} qubits", crate::tomography::MAX_DECOMPOSE_QUBITS)));
                }
                if experiment == Experiment::Recover {
                    if params.m() < 2 {
                        return Err(HarnessError::config("code_m", "single losses need at least two blocks".into()));
                    }
                    if let Some(&q) = self.lost.iter().find(|&&q| q >= params.total()) {
                        return Err(HarnessError::config("lost", format!("qubit {q} is outside the code")));
                    }
                }
                self.logical_inputs()?;
                self.check_pairs(params.total())?;
            }
            Experiment::ClusterFidelity => self.check_pairs(5)?,
            Experiment::Oneway => {
                for c in &self.loss_cases {
                    c.parse::<crate::cluster::LossCase>()
                        .map_err(|_| HarnessError::config("loss_cases", format!("unsupported loss case {c:?}")))?;
                }
                self.check_pairs(5)?;
            }
        }
        Ok(())
    }

    fn check_pairs(&self, n: usize) -> Result<(), HarnessError> {
        for [a, b] in &self.interfering_pairs {
            if a == b || *a >= n || *b >= n {
                return Err(HarnessError::config("interfering_pairs", format!("bad pair [{a}, {b}] for {n} qubits")));
            }
        }
        Ok(())
    }

    /// JSON echo of the resolved config (the output path is left out so that
    /// runs differing only in destination produce identical bytes).
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is serialisable")
    }
}
