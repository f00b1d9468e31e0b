//! Labeled marker data, CSV ingestion and the Pima preprocessing rules.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disease status. `Pos` is a diseased subject (case), `Neg` a control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    pub fn from_sign(s: i8) -> Option<Label> {
        match s {
            1 => Some(Label::Pos),
            -1 => Some(Label::Neg),
            _ => None,
        }
    }

    /// `+1.0` for cases, `-1.0` for controls.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub x: f64,
    pub y: Label,
    pub z: Vec<f64>,
}

impl LabeledSample {
    pub fn new(x: f64, y: Label, z: Vec<f64>) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!("marker value {x} is not finite")));
        }
        if let Some(v) = z.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("covariate value {v} is not finite")));
        }
        Ok(LabeledSample { x, y, z })
    }
}

/// Samples in input order. Index sets for cases and controls are derived on
/// demand and never reorder the data.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    covariate_names: Vec<String>,
}

impl Dataset {
    pub fn new(samples: Vec<LabeledSample>) -> Result<Self> {
        let p = samples.first().map_or(0, |s| s.z.len());
        let names = (1..=p).map(|j| format!("z{j}")).collect();
        Self::with_names(samples, names)
    }

    pub fn with_names(samples: Vec<LabeledSample>, covariate_names: Vec<String>) -> Result<Self> {
        let p = covariate_names.len();
        for s in &samples {
            if s.z.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: s.z.len(),
                });
            }
        }
        Ok(Dataset {
            samples,
            covariate_names,
        })
    }

    pub fn from_parts(x: &[f64], y: &[Label], z: &[Vec<f64>]) -> Result<Self> {
        if x.len() != y.len() || x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len().min(z.len()),
            });
        }
        let samples = x
            .iter()
            .zip(y)
            .zip(z)
            .map(|((&x, &y), z)| LabeledSample::new(x, y, z.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of covariates.
    pub fn dim(&self) -> usize {
        self.covariate_names.len()
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn n_pos(&self) -> usize {
        self.samples.iter().filter(|s| s.y == Label::Pos).count()
    }

    pub fn n_neg(&self) -> usize {
        self.len() - self.n_pos()
    }

    pub fn markers(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    pub fn signs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.y.sign()).collect()
    }

    pub fn profiles(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.z.clone()).collect()
    }

    pub fn require_both_classes(&self) -> Result<()> {
        if self.n_pos() == 0 {
            return Err(Error::EmptyClass { label: 1 });
        }
        if self.n_neg() == 0 {
            return Err(Error::EmptyClass { label: -1 });
        }
        Ok(())
    }

    /// Order-preserving subset.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
            covariate_names: self.covariate_names.clone(),
        }
    }

    pub fn filter<F: Fn(&LabeledSample) -> bool>(&self, keep: F) -> Dataset {
        Dataset {
            samples: self.samples.iter().filter(|s| keep(s)).cloned().collect(),
            covariate_names: self.covariate_names.clone(),
        }
    }

    pub fn covariate_index(&self, name: &str) -> Option<usize> {
        self.covariate_names.iter().position(|n| n == name)
    }

    /// Writes `x,y,<covariates>` with labels as `-1`/`1`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["x".to_string(), "y".to_string()];
        header.extend(self.covariate_names.iter().cloned());
        out.write_record(&header).map_err(csv_io)?;
        for s in &self.samples {
            let mut rec = vec![s.x.to_string(), format!("{}", s.y.sign() as i8)];
            rec.extend(s.z.iter().map(|v| v.to_string()));
            out.write_record(&rec).map_err(csv_io)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelEncoding {
    pub negative: f64,
    pub positive: f64,
}

impl Default for LabelEncoding {
    fn default() -> Self {
        LabelEncoding {
            negative: 0.0,
            positive: 1.0,
        }
    }
}

impl LabelEncoding {
    pub const SIGNED: LabelEncoding = LabelEncoding {
        negative: -1.0,
        positive: 1.0,
    };

    fn decode(&self, v: f64) -> Option<Label> {
        if v == self.positive {
            Some(Label::Pos)
        } else if v == self.negative {
            Some(Label::Neg)
        } else {
            None
        }
    }
}

/// Column mapping for [`load_csv`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub marker: String,
    pub label: String,
    #[serde(default)]
    pub covariates: Vec<String>,
    #[serde(default)]
    pub encoding: LabelEncoding,
}

impl CsvSchema {
    pub fn new(marker: &str, label: &str, covariates: &[&str]) -> Self {
        CsvSchema {
            marker: marker.into(),
            label: label.into(),
            covariates: covariates.iter().map(|s| s.to_string()).collect(),
            encoding: LabelEncoding::default(),
        }
    }

    /// Schema of files written by [`Dataset::write_csv`].
    pub fn signed(covariates: &[String]) -> Self {
        CsvSchema {
            marker: "x".into(),
            label: "y".into(),
            covariates: covariates.to_vec(),
            encoding: LabelEncoding::SIGNED,
        }
    }

    /// UCI Pima layout with glucose as the marker and age as the covariate.
    pub fn pima() -> Self {
        CsvSchema::new("glucose", "outcome", &["age"])
    }
}

pub const PIMA_COLUMNS: [&str; 9] = [
    "pregnancies",
    "glucose",
    "blood_pressure",
    "skinfold",
    "insulin",
    "bmi",
    "pedigree",
    "age",
    "outcome",
];

pub fn load_csv<P: AsRef<Path>>(path: P, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_csv(file, schema, path)
}

/// Reads a dataset from any reader; `origin` only labels error messages.
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema, origin: &Path) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Csv {
                path: origin.to_path_buf(),
                message: format!("missing column `{name}`"),
            })
    };
    let marker_col = column(&schema.marker)?;
    let label_col = column(&schema.label)?;
    let cov_cols = schema
        .covariates
        .iter()
        .map(|c| column(c))
        .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            row,
            message,
        };
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let cell = |col: usize, name: &str| -> Result<f64> {
            let raw = rec.get(col).unwrap_or("");
            let v: f64 = raw
                .parse()
                .map_err(|_| parse_err(format!("column `{name}`: `{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("column `{name}`: non-finite value `{raw}`")));
            }
            Ok(v)
        };
        let x = cell(marker_col, &schema.marker)?;
        let lv = cell(label_col, &schema.label)?;
        let y = schema
            .encoding
            .decode(lv)
            .ok_or_else(|| parse_err(format!("unmapped label value {lv}")))?;
        let z = cov_cols
            .iter()
            .zip(&schema.covariates)
            .map(|(&c, name)| cell(c, name))
            .collect::<Result<Vec<_>>>()?;
        samples.push(LabeledSample { x, y, z });
    }
    Dataset::with_names(samples, schema.covariates.clone())
}

/// Reads covariate profiles (no marker or label) from the named columns.
pub fn load_profiles<P: AsRef<Path>>(path: P, covariates: &[String]) -> Result<Vec<Vec<f64>>> {
    let origin = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(File::open(origin)?);
    let csv_err = |message: String| Error::Csv {
        path: origin.to_path_buf(),
        message,
    };
    let headers = rdr.headers().map_err(|e| csv_err(e.to_string()))?.clone();
    let cols = covariates
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| csv_err(format!("missing column `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            row: i + 1,
            message,
        };
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let z = cols
            .iter()
            .zip(covariates)
            .map(|(&c, name)| {
                let raw = rec.get(c).unwrap_or("");
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(parse_err(format!("column `{name}`: `{raw}` is not a finite number"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(z);
    }
    Ok(out)
}

/// Drops rows with a zero glucose reading and subjects aged 60 or over.
pub fn pima_filter(d: &Dataset) -> Result<Dataset> {
    let age = d
        .covariate_index("age")
        .ok_or_else(|| Error::InvalidInput("pima_filter needs an `age` covariate".into()))?;
    let out = d.filter(|s| s.x != 0.0 && s.z[age] < 60.0);
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

/// Inverse class proportions `n / n_class`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassWeights {
    pub pos: f64,
    pub neg: f64,
}

impl ClassWeights {
    #[inline]
    pub fn of(&self, y: Label) -> f64 {
        match y {
            Label::Pos => self.pos,
            Label::Neg => self.neg,
        }
    }
}

pub fn class_weights(d: &Dataset) -> Result<ClassWeights> {
    d.require_both_classes()?;
    let n = d.len() as f64;
    Ok(ClassWeights {
        pos: n / d.n_pos() as f64,
        neg: n / d.n_neg() as f64,
    })
}
