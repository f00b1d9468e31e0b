//! Covariate-free cut-point by exhaustive threshold search, plus ROC points.

use crate::dataset::{Dataset, Label};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PooledEstimate {
    pub cut: f64,
    pub youden: f64,
    /// `(1/n1) sum_cases (1 + sign(x - c)) + (1/n-1) sum_controls (1 - sign(x - c))`
    pub objective: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// Candidate thresholds: one below the smallest marker, the midpoints of
/// adjacent distinct sorted markers, and one above the largest.
pub fn candidate_thresholds(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut c = Vec::with_capacity(v.len() + 1);
    if let (Some(&lo), Some(&hi)) = (v.first(), v.last()) {
        c.push(lo - 1.0);
        c.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        c.push(hi + 1.0);
    }
    c
}

struct SweepPoint {
    threshold: f64,
    /// cases with `x >= threshold`
    pos_above: usize,
    /// controls with `x < threshold`
    neg_below: usize,
}

/// Class counts on either side of every candidate threshold, via one sorted
/// sweep.
fn sweep(d: &Dataset) -> Result<Vec<SweepPoint>> {
    d.require_both_classes()?;
    let mut pts: Vec<(f64, Label)> = d.samples().iter().map(|s| (s.x, s.y)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let thresholds = candidate_thresholds(&d.markers());
    let mut out = Vec::with_capacity(thresholds.len());
    let (mut pos_below, mut neg_below) = (0usize, 0usize);
    let mut k = 0;
    for c in thresholds {
        while k < pts.len() && pts[k].0 < c {
            match pts[k].1 {
                Label::Pos => pos_below += 1,
                Label::Neg => neg_below += 1,
            }
            k += 1;
        }
        out.push(SweepPoint {
            threshold: c,
            pos_above: d.n_pos() - pos_below,
            neg_below,
        });
    }
    Ok(out)
}

pub fn pooled_fit(d: &Dataset) -> Result<PooledEstimate> {
    let (n_pos, n_neg) = (d.n_pos(), d.n_neg());
    // sen + spe scaled by n_pos * n_neg, so ties are detected exactly
    let score = |p: &SweepPoint| p.pos_above as u128 * n_neg as u128 + p.neg_below as u128 * n_pos as u128;
    let mut best: Option<SweepPoint> = None;
    for p in sweep(d)? {
        if best.as_ref().is_none_or(|b| score(&p) > score(b)) {
            best = Some(p);
        }
    }
    let b = best.expect("at least two candidates when both classes are present");
    // one rounding of an exact rational, so equal objectives compare equal
    let denom = (n_pos as u128 * n_neg as u128) as f64;
    let s = score(&b) as f64;
    Ok(PooledEstimate {
        cut: b.threshold,
        youden: s / denom - 1.0,
        objective: 2.0 * s / denom,
    })
}

/// ROC points `(1 - specificity, sensitivity)` ordered by threshold.
pub fn roc_points(d: &Dataset) -> Result<Vec<RocPoint>> {
    Ok(sweep(d)?
        .into_iter()
        .map(|p| RocPoint {
            threshold: p.threshold,
            fpr: 1.0 - p.neg_below as f64 / d.n_neg() as f64,
            tpr: p.pos_above as f64 / d.n_pos() as f64,
        })
        .collect())
}
