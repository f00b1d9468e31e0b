//! λ selection by K-fold cross-validation on the held-out empirical Youden
//! objective `(1/n_v) sum_v w_v(y_i) (1 + y_i sign(x_i - ĉ(z_i)))`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{fit_problem, CaeModel, FitConfig, Problem};
use crate::dataset::{class_weights, Dataset, Label};
use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub lambda: f64,
    /// `(λ, mean validation objective)` in grid order.
    pub scores: Vec<(f64, f64)>,
    pub folds_used: usize,
    pub folds_skipped: usize,
}

/// Fold index per sample. Cases and controls are shuffled separately and
/// dealt round-robin, so each fold gets a share of both classes when the
/// class sizes allow it.
pub fn cv_folds(d: &Dataset, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = vec![0; d.len()];
    let mut next = 0;
    for label in [Label::Pos, Label::Neg] {
        let mut idx: Vec<usize> = (0..d.len()).filter(|&i| d.samples()[i].y == label).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            assign[i] = next % folds;
            next += 1;
        }
    }
    assign
}

/// Held-out empirical Youden objective, `2 (sensitivity + specificity)`.
pub fn validation_score(model: &CaeModel, valid: &Dataset) -> Result<f64> {
    let w = class_weights(valid)?;
    let n = valid.len() as f64;
    let mut s = 0.0;
    for smp in valid.samples() {
        let c = model.predict(&smp.z)?;
        let sign = if smp.x - c >= 0.0 { 1.0 } else { -1.0 };
        s += w.of(smp.y) * (1.0 + smp.y.sign() * sign);
    }
    Ok(s / n)
}

/// λ with the largest score; exact ties go to the smaller λ.
pub fn select_best(scores: &[(f64, f64)]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for &(lambda, score) in scores {
        if score.is_nan() {
            continue;
        }
        best = match best {
            Some((bl, bs)) if bs > score || (bs == score && bl <= lambda) => Some((bl, bs)),
            _ => Some((lambda, score)),
        };
    }
    best.map(|b| b.0)
}

pub fn cv_select_lambda(
    d: &Dataset,
    cfg: &FitConfig,
    grid: &[f64],
    folds: usize,
    exec: Exec,
) -> Result<CvResult> {
    if folds < 2 {
        return Err(Error::InvalidInput("cross-validation needs at least 2 folds".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty λ grid".into()));
    }
    cfg.validate()?;
    let assign = cv_folds(d, folds, cfg.seed);
    let mut prepared = Vec::new();
    let mut skipped = 0;
    for f in 0..folds {
        let train_idx: Vec<usize> = (0..d.len()).filter(|&i| assign[i] != f).collect();
        let valid_idx: Vec<usize> = (0..d.len()).filter(|&i| assign[i] == f).collect();
        let (train, valid) = (d.subset(&train_idx), d.subset(&valid_idx));
        if valid.require_both_classes().is_err() || train.require_both_classes().is_err() {
            log::warn!("fold {f} lacks one class and is skipped");
            skipped += 1;
            continue;
        }
        prepared.push((train, valid));
    }
    if prepared.is_empty() {
        return Err(Error::AllFoldsSkipped);
    }
    let problems = exec.map(&prepared, |(train, _)| Problem::new(train, cfg.delta, cfg.kernel, Exec::Sequential));
    let problems = problems.into_iter().collect::<Result<Vec<_>>>()?;

    let tasks: Vec<(usize, f64)> = (0..prepared.len())
        .flat_map(|f| grid.iter().map(move |&l| (f, l)))
        .collect();
    let fold_scores = exec.map(&tasks, |&(f, lambda)| {
        let model = fit_problem(&problems[f], lambda, cfg)?;
        validation_score(&model, &prepared[f].1)
    });
    let fold_scores = fold_scores.into_iter().collect::<Result<Vec<_>>>()?;

    let used = prepared.len();
    let scores: Vec<(f64, f64)> = grid
        .iter()
        .enumerate()
        .map(|(g, &lambda)| {
            let mean = (0..used).map(|f| fold_scores[f * grid.len() + g]).sum::<f64>() / used as f64;
            (lambda, mean)
        })
        .collect();
    let lambda = select_best(&scores).ok_or_else(|| Error::InvalidInput("no finite CV score".into()))?;
    Ok(CvResult {
        lambda,
        scores,
        folds_used: used,
        folds_skipped: skipped,
    })
}
