//! Normal regression baseline: per class, `X | Z = z ~ N(β'(1, z), σ²)`
//! fitted by least squares; the cut-point is where the two class densities
//! cross.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::special::normal_cdf;

#[derive(Clone, Debug, PartialEq)]
pub struct NrmModel {
    pub beta_pos: Vec<f64>,
    pub beta_neg: Vec<f64>,
    pub sigma_pos: f64,
    pub sigma_neg: f64,
}

fn fit_class(d: &Dataset, label: Label) -> Result<(Vec<f64>, f64)> {
    let p = d.dim();
    let rows: Vec<_> = d.samples().iter().filter(|s| s.y == label).collect();
    let n = rows.len();
    if n < p + 2 {
        return Err(Error::InvalidInput(format!(
            "normal regression needs at least {} samples per class, class {:+} has {n}",
            p + 2,
            label.sign()
        )));
    }
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { rows[i].z[j - 1] });
    let target = DVector::from_iterator(n, rows.iter().map(|s| s.x));
    let svd = design.clone().svd(true, true);
    let sv_max = svd.singular_values.max();
    let sv_min = svd.singular_values.min();
    if !(sv_min > 1e-10 * sv_max) {
        return Err(Error::Degenerate("rank-deficient normal regression design".into()));
    }
    let beta = svd
        .solve(&target, 0.0)
        .map_err(|e| Error::Degenerate(format!("least squares failed: {e}")))?;
    let resid = &target - &design * &beta;
    let sigma = (resid.norm_squared() / (n - p - 1) as f64).sqrt();
    let x_scale = target.amax().max(1.0);
    if !(sigma > 1e-10 * x_scale) {
        return Err(Error::Degenerate(format!(
            "zero residual spread in class {:+}",
            label.sign()
        )));
    }
    Ok((beta.iter().copied().collect(), sigma))
}

pub fn nrm_fit(d: &Dataset) -> Result<NrmModel> {
    d.require_both_classes()?;
    let (beta_pos, sigma_pos) = fit_class(d, Label::Pos)?;
    let (beta_neg, sigma_neg) = fit_class(d, Label::Neg)?;
    Ok(NrmModel {
        beta_pos,
        beta_neg,
        sigma_pos,
        sigma_neg,
    })
}

fn linear(beta: &[f64], z: &[f64]) -> f64 {
    beta[0] + beta[1..].iter().zip(z).map(|(b, v)| b * v).sum::<f64>()
}

impl NrmModel {
    pub fn dim(&self) -> usize {
        self.beta_pos.len() - 1
    }

    /// Class means `(μ_pos(z), μ_neg(z))`.
    pub fn means(&self, z: &[f64]) -> Result<(f64, f64)> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok((linear(&self.beta_pos, z), linear(&self.beta_neg, z)))
    }

    pub fn cut(&self, z: &[f64]) -> Result<f64> {
        let (mp, mn) = self.means(z)?;
        Ok(normal_crossing(mp, self.sigma_pos, mn, self.sigma_neg))
    }

    /// `Φ((c - μ_neg)/σ_neg) - Φ((c - μ_pos)/σ_pos)` at the model cut.
    pub fn youden(&self, z: &[f64]) -> Result<f64> {
        let (mp, mn) = self.means(z)?;
        let c = normal_crossing(mp, self.sigma_pos, mn, self.sigma_neg);
        Ok(normal_cdf((c - mn) / self.sigma_neg) - normal_cdf((c - mp) / self.sigma_pos))
    }
}

pub fn nrm_cut(m: &NrmModel, z: &[f64]) -> Result<f64> {
    m.cut(z)
}

/// Point where the `N(mu_pos, sd_pos²)` and `N(mu_neg, sd_neg²)` densities
/// are equal. Equal spreads give the midpoint; otherwise the root of the
/// log-density difference lying between the means, or failing that the root
/// closest to the midpoint.
pub fn normal_crossing(mu_pos: f64, sd_pos: f64, mu_neg: f64, sd_neg: f64) -> f64 {
    let mid = 0.5 * (mu_pos + mu_neg);
    if sd_pos == sd_neg {
        return mid;
    }
    let (vp, vn) = (sd_pos * sd_pos, sd_neg * sd_neg);
    let qa = 0.5 / vn - 0.5 / vp;
    let qb = mu_pos / vp - mu_neg / vn;
    let qc = 0.5 * mu_neg * mu_neg / vn - 0.5 * mu_pos * mu_pos / vp + (sd_neg / sd_pos).ln();
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let mut roots = Vec::with_capacity(2);
    if q != 0.0 {
        roots.push(qc / q);
    }
    if qa != 0.0 {
        roots.push(q / qa);
    }
    if roots.is_empty() {
        return mid;
    }
    let (lo, hi) = (mu_pos.min(mu_neg), mu_pos.max(mu_neg));
    let between: Vec<f64> = roots.iter().copied().filter(|r| (lo..=hi).contains(r)).collect();
    let pool = if between.len() == 1 { between } else { roots };
    let r = pool
        .into_iter()
        .min_by(|a, b| (a - mid).abs().total_cmp(&(b - mid).abs()))
        .expect("nonempty");
    // one Newton step on the log-density difference
    let h = qa * r * r + qb * r + qc;
    let dh = 2.0 * qa * r + qb;
    if dh != 0.0 && (h / dh).is_finite() {
        r - h / dh
    } else {
        r
    }
}
