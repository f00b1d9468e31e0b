use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FitConfig, KernelChoice};
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, RkhsFunction, Standardizer};

/// A fitted cut-point function `ĉ(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CaeModel {
    /// Expansion over the standardized training profiles.
    pub c_fn: RkhsFunction,
    pub standardizer: Standardizer,
    pub config: FitConfig,
    pub train_objective_trace: Vec<f64>,
    pub dca_iterations: usize,
}

impl CaeModel {
    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    pub fn lambda(&self) -> f64 {
        self.config.lambda
    }

    pub fn delta(&self) -> f64 {
        self.config.delta
    }

    pub fn final_objective(&self) -> f64 {
        *self
            .train_objective_trace
            .last()
            .expect("trace holds at least the starting objective")
    }

    /// `ĉ(z)` at a raw (unstandardized) profile.
    pub fn predict(&self, z: &[f64]) -> Result<f64> {
        self.c_fn.eval(&self.standardizer.apply(z)?)
    }

    pub fn predict_all(&self, zs: &[Vec<f64>]) -> Result<Vec<f64>> {
        zs.iter().map(|z| self.predict(z)).collect()
    }

    pub fn to_file(&self) -> ModelFile {
        let (kernel, sigma) = match self.c_fn.kernel {
            KernelSpec::Gaussian { sigma } => ("gaussian".to_string(), Some(sigma)),
            KernelSpec::Linear => ("linear".to_string(), None),
        };
        ModelFile {
            kernel,
            sigma,
            means: self.standardizer.means.clone(),
            scales: self.standardizer.scales.clone(),
            b: self.c_fn.b,
            a: self.c_fn.a.clone(),
            profiles: self.c_fn.profiles.clone(),
            delta: self.config.delta,
            lambda: self.config.lambda,
            objective_trace: self.train_objective_trace.clone(),
        }
    }

    pub fn from_file(m: ModelFile) -> Result<Self> {
        let kernel = match (m.kernel.as_str(), m.sigma) {
            ("gaussian", Some(sigma)) => KernelSpec::gaussian(sigma)?,
            ("linear", _) => KernelSpec::Linear,
            (k, s) => {
                return Err(Error::InvalidInput(format!("unsupported kernel `{k}` (sigma {s:?})")));
            }
        };
        if m.means.len() != m.scales.len() {
            return Err(Error::DimensionMismatch {
                expected: m.means.len(),
                got: m.scales.len(),
            });
        }
        let c_fn = RkhsFunction::new(m.a, m.b, m.profiles, kernel)?;
        if !c_fn.profiles.is_empty() && c_fn.dim() != m.means.len() {
            return Err(Error::DimensionMismatch {
                expected: m.means.len(),
                got: c_fn.dim(),
            });
        }
        let config = FitConfig {
            delta: m.delta,
            lambda: m.lambda,
            kernel: KernelChoice::Fixed(kernel),
            ..FitConfig::default()
        };
        Ok(CaeModel {
            c_fn,
            standardizer: Standardizer {
                means: m.means,
                scales: m.scales,
            },
            config,
            dca_iterations: m.objective_trace.len().saturating_sub(1),
            train_objective_trace: m.objective_trace,
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &self.to_file())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let m: ModelFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        Self::from_file(m)
    }
}

/// JSON model layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub kernel: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<f64>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub b: f64,
    pub a: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
    pub delta: f64,
    pub lambda: f64,
    pub objective_trace: Vec<f64>,
}
