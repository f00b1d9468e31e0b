//! Kernel-smoothed covariate-adjusted Youden index
//!
//! ```text
//! Ĵ(z) = F̂_{-1}(ĉ(z) | z) - F̂_{1}(ĉ(z) | z),
//! F̂_y(c | z) = sum_{i: y_i = y} 1{x_i <= c} K_h(z_i - z) / sum_{i: y_i = y} K_h(z_i - z)
//! ```
//!
//! The first term is the local specificity and the second is one minus the
//! local sensitivity, so `Ĵ(z)` estimates `sen + spe - 1` at `z`.

use serde::{Deserialize, Serialize};

use crate::cae::CaeModel;
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

const MIN_WEIGHT_SUM: f64 = 1e-300;

/// Gaussian smoothing bandwidths in raw covariate units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmootherConfig {
    pub h_pos: f64,
    pub h_neg: f64,
}

impl SmootherConfig {
    pub fn tied(h: f64) -> Result<Self> {
        let c = SmootherConfig { h_pos: h, h_neg: h };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for h in [self.h_pos, self.h_neg] {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidInput(format!("bandwidth must be finite and > 0, got {h}")));
            }
        }
        Ok(())
    }
}

/// Kernel-weighted empirical CDF of one class at `c`, localized at `z`.
fn local_cdf(d: &Dataset, label: Label, c: f64, z: &[f64], h: f64) -> Result<f64> {
    let scale = 1.0 / (2.0 * h * h);
    let (mut num, mut den) = (0.0, 0.0);
    for s in d.samples().iter().filter(|s| s.y == label) {
        let d2: f64 = s.z.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        let w = (-d2 * scale).exp();
        den += w;
        if s.x <= c {
            num += w;
        }
    }
    if !(den >= MIN_WEIGHT_SUM) {
        return Err(Error::OutsideSupport { weight_sum: den });
    }
    Ok(num / den)
}

pub fn youden_at(d: &Dataset, c_hat: f64, z: &[f64], cfg: &SmootherConfig) -> Result<f64> {
    cfg.validate()?;
    d.require_both_classes()?;
    if z.len() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: z.len(),
        });
    }
    let spe = local_cdf(d, Label::Neg, c_hat, z, cfg.h_neg)?;
    let one_minus_sen = local_cdf(d, Label::Pos, c_hat, z, cfg.h_pos)?;
    Ok(spe - one_minus_sen)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub z: Vec<f64>,
    pub c_hat: f64,
    pub j_hat: f64,
}

/// `(z, ĉ(z), Ĵ(z))` for each query, ordered by the first covariate.
pub fn youden_curve(
    d: &Dataset,
    model: &CaeModel,
    query_zs: &[Vec<f64>],
    cfg: &SmootherConfig,
) -> Result<Vec<CurvePoint>> {
    if model.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: model.dim(),
        });
    }
    let mut out = query_zs
        .iter()
        .map(|z| {
            let c_hat = model.predict(z)?;
            let j_hat = youden_at(d, c_hat, z, cfg)?;
            Ok(CurvePoint {
                z: z.clone(),
                c_hat,
                j_hat,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| {
        let ka = a.z.first().copied().unwrap_or(0.0);
        let kb = b.z.first().copied().unwrap_or(0.0);
        ka.total_cmp(&kb)
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_data(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut z = Vec::new();
        for i in 0..n {
            // both classes guaranteed
            let pos = i % 2 == 0 || rng.random_bool(0.5);
            y.push(if pos { Label::Pos } else { Label::Neg });
            x.push(rng.random_range(-3.0..3.0) + if pos { 1.0 } else { 0.0 });
            z.push((0..p).map(|_| rng.random_range(0.0..4.0)).collect());
        }
        y[1] = Label::Neg;
        Dataset::from_parts(&x, &y, &z).unwrap()
    }

    fn ecdf(d: &Dataset, label: Label, c: f64) -> f64 {
        let xs: Vec<f64> = d.samples().iter().filter(|s| s.y == label).map(|s| s.x).collect();
        xs.iter().filter(|&&x| x <= c).count() as f64 / xs.len() as f64
    }

    #[test]
    fn extreme_thresholds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = random_data(&mut rng, 30, 1);
        let cfg = SmootherConfig::tied(0.7).unwrap();
        assert_eq!(youden_at(&d, -100.0, &[2.0], &cfg).unwrap(), 0.0);
        assert_eq!(youden_at(&d, 100.0, &[2.0], &cfg).unwrap(), 0.0);
    }

    #[test]
    fn perfect_local_separation() {
        let x = [0.0, 0.5, 3.0, 3.5, 1.0, 9.0];
        let y = [Label::Neg, Label::Neg, Label::Pos, Label::Pos, Label::Pos, Label::Neg];
        let z = vec![vec![0.0], vec![0.1], vec![0.0], vec![0.2], vec![50.0], vec![50.0]];
        let d = Dataset::from_parts(&x, &y, &z).unwrap();
        let j = youden_at(&d, 2.0, &[0.05], &SmootherConfig::tied(0.5).unwrap()).unwrap();
        assert!((j - 1.0).abs() < 1e-12, "{j}");
    }

    #[test]
    fn outside_support_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = random_data(&mut rng, 20, 1);
        let err = youden_at(&d, 0.0, &[500.0], &SmootherConfig::tied(1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::OutsideSupport { .. }));
        assert!(youden_at(&d, 0.0, &[1.0, 2.0], &SmootherConfig::tied(1.0).unwrap()).is_err());
        assert!(SmootherConfig::tied(0.0).is_err());
    }

    #[test]
    fn bounded_and_monotone_pieces() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = rng.random_range(0..3);
            let n = rng.random_range(2..25);
            let d = random_data(&mut rng, n, p);
            let z: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..4.0)).collect();
            let cfg = SmootherConfig {
                h_pos: 10f64.powf(rng.random_range(-0.5..1.5)),
                h_neg: 10f64.powf(rng.random_range(-0.5..1.5)),
            };
            let mut prev = (0.0, 0.0);
            for k in 0..40 {
                let c = -5.0 + k as f64 * 0.25;
                let j = youden_at(&d, c, &z, &cfg).unwrap();
                assert!((-1.0..=1.0).contains(&j));
                let spe = local_cdf(&d, Label::Neg, c, &z, cfg.h_neg).unwrap();
                let fn_ = local_cdf(&d, Label::Pos, c, &z, cfg.h_pos).unwrap();
                assert!(spe >= prev.0 && fn_ >= prev.1);
                prev = (spe, fn_);
            }
        }
    }

    #[test]
    fn wide_bandwidth_gives_pooled_cdfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = random_data(&mut rng, 40, 2);
        let cfg = SmootherConfig::tied(1e6).unwrap();
        for c in [-1.0, 0.0, 0.7, 2.5] {
            let j = youden_at(&d, c, &[1.0, 3.0], &cfg).unwrap();
            let pooled = ecdf(&d, Label::Neg, c) - ecdf(&d, Label::Pos, c);
            assert!((j - pooled).abs() < 1e-6);
        }
    }
}
