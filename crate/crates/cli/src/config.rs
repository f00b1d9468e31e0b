//! Optional JSON defaults loaded with `--config`.
//!
//! Every key is optional. A flag given on the command line always wins over
//! the file, and the file wins over the built-in default.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use clap::ValueEnum;
use serde::Deserialize;

use cae_youden::bench::{Method, Tuning};
use cae_youden::cae::Init;
use cae_youden::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelName {
    /// Gaussian with the median-distance bandwidth
    Auto,
    /// Gaussian with `--sigma`
    Gaussian,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitName {
    Hinge,
    Pooled,
}

impl From<InitName> for Init {
    fn from(v: InitName) -> Init {
        match v {
            InitName::Hinge => Init::Hinge,
            InitName::Pooled => Init::Pooled,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Cae,
    Nrm,
}

impl From<MethodName> for Method {
    fn from(v: MethodName) -> Method {
        match v {
            MethodName::Cae => Method::Cae,
            MethodName::Nrm => Method::Nrm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TuningName {
    PerReplication,
    Shared,
}

impl From<TuningName> for Tuning {
    fn from(v: TuningName) -> Tuning {
        match v {
            TuningName::PerReplication => Tuning::PerReplication,
            TuningName::Shared => Tuning::Shared,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub marker: Option<String>,
    pub label: Option<String>,
    pub covariates: Option<Vec<String>>,
    pub positive: Option<f64>,
    pub negative: Option<f64>,

    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub cv: Option<usize>,
    pub lambda_points: Option<usize>,
    pub kernel: Option<KernelName>,
    pub sigma: Option<f64>,
    pub init: Option<InitName>,
    pub dca_max_iter: Option<usize>,
    pub dca_rel_tol: Option<f64>,
    pub inner_max_iter: Option<usize>,
    pub inner_rel_tol: Option<f64>,
    pub seed: Option<u64>,

    pub h: Option<f64>,
    pub h_pos: Option<f64>,
    pub h_neg: Option<f64>,

    pub example: Option<u8>,
    pub n: Option<Vec<usize>>,
    pub reps: Option<usize>,
    pub methods: Option<Vec<MethodName>>,
    pub tuning: Option<TuningName>,
    pub h_points: Option<usize>,
    pub sequential: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }
}
