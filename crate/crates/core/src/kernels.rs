//! Kernels, Gram matrices, covariate standardization and kernel expansions
//! `c(z) = b + sum_i a_i K(z_i, z)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-|z1 - z2|^2 / (2 sigma^2))`
    Gaussian { sigma: f64 },
    Linear,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let k = KernelSpec::Gaussian { sigma };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Gaussian { sigma } if !(sigma.is_finite() && sigma > 0.0) => Err(
                Error::InvalidInput(format!("gaussian bandwidth must be finite and > 0, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Gaussian { sigma } => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
            KernelSpec::Linear => u.iter().zip(v).map(|(a, b)| a * b).sum(),
        }
    }
}

fn check_dims(profiles: &[Vec<f64>]) -> Result<usize> {
    let p = profiles.first().map_or(0, Vec::len);
    for z in profiles {
        if z.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: z.len(),
            });
        }
    }
    Ok(p)
}

pub fn gram(profiles: &[Vec<f64>], kernel: &KernelSpec) -> Result<DMatrix<f64>> {
    gram_with(profiles, kernel, Exec::Sequential)
}

/// Gram matrix, rows optionally computed in parallel. Only the upper
/// triangle is evaluated, so the result is exactly symmetric.
pub fn gram_with(profiles: &[Vec<f64>], kernel: &KernelSpec, exec: Exec) -> Result<DMatrix<f64>> {
    check_dims(profiles)?;
    kernel.validate()?;
    let n = profiles.len();
    let rows = exec.map_range(n, |i| {
        (i..n)
            .map(|j| kernel.eval(&profiles[i], &profiles[j]))
            .collect::<Vec<_>>()
    });
    let mut k = DMatrix::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Cross-kernel matrix with `K[(i, j)] = K(left_i, right_j)`.
pub fn cross_gram(left: &[Vec<f64>], right: &[Vec<f64>], kernel: &KernelSpec) -> DMatrix<f64> {
    DMatrix::from_fn(left.len(), right.len(), |i, j| kernel.eval(&left[i], &right[j]))
}

/// Median of the nonzero pairwise Euclidean distances.
pub fn median_heuristic(profiles: &[Vec<f64>]) -> Result<f64> {
    check_dims(profiles)?;
    let mut d = Vec::with_capacity(profiles.len() * profiles.len().saturating_sub(1) / 2);
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            let dist = profiles[i]
                .iter()
                .zip(&profiles[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist > 0.0 {
                d.push(dist);
            }
        }
    }
    if d.is_empty() {
        return Err(Error::Degenerate("all covariate profiles are identical".into()));
    }
    d.sort_by(f64::total_cmp);
    let m = d.len();
    Ok(if m % 2 == 1 {
        d[m / 2]
    } else {
        0.5 * (d[m / 2 - 1] + d[m / 2])
    })
}

const SCALE_FLOOR: f64 = 1e-12;

/// Per-coordinate centering and scaling by the sample standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    pub fn identity(p: usize) -> Self {
        Standardizer {
            means: vec![0.0; p],
            scales: vec![1.0; p],
        }
    }

    pub fn fit(profiles: &[Vec<f64>]) -> Result<Self> {
        let p = check_dims(profiles)?;
        if p == 0 {
            return Ok(Self::identity(0));
        }
        let n = profiles.len();
        if n < 2 {
            return Err(Error::Degenerate("standardization needs at least two profiles".into()));
        }
        let mut means = vec![0.0; p];
        for z in profiles {
            for (m, v) in means.iter_mut().zip(z) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n as f64);
        let mut scales = vec![0.0; p];
        for z in profiles {
            for j in 0..p {
                scales[j] += (z[j] - means[j]).powi(2);
            }
        }
        for (j, s) in scales.iter_mut().enumerate() {
            *s = (*s / (n - 1) as f64).sqrt();
            if !(*s >= SCALE_FLOOR) {
                return Err(Error::Degenerate(format!("covariate {} has zero spread", j + 1)));
            }
        }
        Ok(Standardizer { means, scales })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(z
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect())
    }

    pub fn apply_all(&self, zs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        zs.iter().map(|z| self.apply(z)).collect()
    }

    pub fn invert(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        Ok(u
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| v * s + m)
            .collect())
    }
}

/// Kernel expansion over stored (standardized) profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RkhsFunction {
    pub a: Vec<f64>,
    pub b: f64,
    pub profiles: Vec<Vec<f64>>,
    pub kernel: KernelSpec,
}

impl RkhsFunction {
    pub fn new(a: Vec<f64>, b: f64, profiles: Vec<Vec<f64>>, kernel: KernelSpec) -> Result<Self> {
        if a.len() != profiles.len() {
            return Err(Error::DimensionMismatch {
                expected: profiles.len(),
                got: a.len(),
            });
        }
        check_dims(&profiles)?;
        kernel.validate()?;
        Ok(RkhsFunction { a, b, profiles, kernel })
    }

    pub fn constant(b: f64, profiles: Vec<Vec<f64>>, kernel: KernelSpec) -> Self {
        RkhsFunction {
            a: vec![0.0; profiles.len()],
            b,
            profiles,
            kernel,
        }
    }

    pub fn dim(&self) -> usize {
        self.profiles.first().map_or(0, Vec::len)
    }

    /// Evaluates at a standardized profile.
    pub fn eval(&self, z: &[f64]) -> Result<f64> {
        if !self.profiles.is_empty() && z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(self.b
            + self
                .a
                .iter()
                .zip(&self.profiles)
                .map(|(ai, zi)| if *ai == 0.0 { 0.0 } else { ai * self.kernel.eval(zi, z) })
                .sum::<f64>())
    }

    /// Values at the stored profiles, `b + K a`.
    pub fn eval_train(&self, gram: &DMatrix<f64>) -> Result<Vec<f64>> {
        let n = self.a.len();
        if gram.nrows() != n || gram.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.nrows(),
            });
        }
        let ka = gram * DVector::from_column_slice(&self.a);
        Ok(ka.iter().map(|v| v + self.b).collect())
    }
}

/// `a' K a`, clamped at zero when round-off makes it slightly negative.
pub fn rkhs_norm_sq(f: &RkhsFunction, gram: &DMatrix<f64>) -> Result<f64> {
    let n = f.a.len();
    if gram.nrows() != n || gram.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: gram.nrows(),
        });
    }
    let a = DVector::from_column_slice(&f.a);
    Ok(quad_form(gram, &a).max(0.0))
}

pub(crate) fn quad_form(k: &DMatrix<f64>, a: &DVector<f64>) -> f64 {
    a.dot(&(k * a))
}
