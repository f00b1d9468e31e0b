//! Covariate-adjusted cut-point estimation.
//!
//! The cut-point function `c(z) = b + sum_i a_i K(z_i, z)` minimizes the
//! class-weighted ψ_δ risk of the margins `u_i = y_i (x_i - c(z_i))` plus
//! `(λ/2) a'Ka`. The non-convex objective is split as `s1 - s2` (two hinge
//! sums) and minimized by the DC algorithm: each step linearizes `s2` at the
//! current iterate and solves the remaining convex problem with
//! [`inner_solve`].

mod cv;
mod inner;
mod model;

pub use cv::{cv_folds, cv_select_lambda, select_best, CvResult};
pub use inner::{inner_solve, InnerOptions, InnerSolution};
pub use model::{CaeModel, ModelFile};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::{class_weights, Dataset};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernels::{gram_with, median_heuristic, quad_form, KernelSpec, RkhsFunction, Standardizer};
use crate::losses::{PsiDelta, DEFAULT_DELTA};
use crate::pooled::pooled_fit;

/// Kernel used by the cut-point model. `Auto` is a Gaussian kernel whose
/// bandwidth is the median pairwise distance of the standardized profiles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelChoice {
    #[default]
    Auto,
    Fixed(KernelSpec),
}

/// Starting point of the DC iterations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    /// Constant function at the pooled cut-point.
    Pooled,
    /// Minimizer of the convex hinge part alone (`s1`), warm-started at the
    /// pooled cut-point.
    #[default]
    Hinge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub delta: f64,
    pub lambda: f64,
    pub kernel: KernelChoice,
    pub init: Init,
    pub dca_max_iter: usize,
    pub dca_rel_tol: f64,
    pub inner_max_iter: usize,
    pub inner_rel_tol: f64,
    /// Seeds fold assignment in cross-validation.
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        let inner = InnerOptions::default();
        FitConfig {
            delta: DEFAULT_DELTA,
            lambda: 0.1,
            kernel: KernelChoice::Auto,
            init: Init::default(),
            dca_max_iter: 100,
            dca_rel_tol: 1e-6,
            inner_max_iter: inner.max_iter,
            inner_rel_tol: inner.rel_tol,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        PsiDelta::new(self.delta)?;
        check_lambda(self.lambda)?;
        if let KernelChoice::Fixed(k) = self.kernel {
            k.validate()?;
        }
        if self.dca_max_iter < 1 || self.inner_max_iter < 1 {
            return Err(Error::InvalidInput("iteration caps must be >= 1".into()));
        }
        if !(self.dca_rel_tol > 0.0 && self.inner_rel_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be > 0".into()));
        }
        Ok(())
    }

    pub fn inner_options(&self) -> InnerOptions {
        InnerOptions {
            max_iter: self.inner_max_iter,
            rel_tol: self.inner_rel_tol,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be finite and > 0, got {lambda}")));
    }
    Ok(())
}

/// Everything about a training set that does not depend on λ: standardized
/// profiles, the Gram matrix, per-sample weights `w(y_i)/n` and the pooled
/// starting cut. One `Problem` serves a whole λ grid.
#[derive(Clone, Debug)]
pub struct Problem {
    pub(crate) x: Vec<f64>,
    pub(crate) y: Vec<f64>,
    pub(crate) c: Vec<f64>,
    pub(crate) gram: DMatrix<f64>,
    pub(crate) psi: PsiDelta,
    pub(crate) profiles: Vec<Vec<f64>>,
    pub(crate) kernel: KernelSpec,
    pub(crate) standardizer: Standardizer,
    pub(crate) pooled_cut: f64,
    pub(crate) marker_scale: f64,
}

impl Problem {
    pub fn new(d: &Dataset, delta: f64, kernel: KernelChoice, exec: Exec) -> Result<Self> {
        let psi = PsiDelta::new(delta)?;
        let w = class_weights(d)?;
        let n = d.len() as f64;
        let standardizer = Standardizer::fit(&d.profiles())?;
        let profiles = standardizer.apply_all(&d.profiles())?;
        let kernel = match kernel {
            KernelChoice::Fixed(k) => k,
            KernelChoice::Auto if d.dim() == 0 => KernelSpec::Gaussian { sigma: 1.0 },
            KernelChoice::Auto => KernelSpec::gaussian(median_heuristic(&profiles)?)?,
        };
        let gram = gram_with(&profiles, &kernel, exec)?;
        let x = d.markers();
        let marker_scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Problem {
            y: d.signs(),
            c: d.samples().iter().map(|s| w.of(s.y) / n).collect(),
            x,
            gram,
            psi,
            profiles,
            kernel,
            standardizer,
            pooled_cut: pooled_fit(d)?.cut,
            marker_scale,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn pooled_cut(&self) -> f64 {
        self.pooled_cut
    }

    /// `K a + b` at the training profiles.
    pub fn fitted(&self, a: &[f64], b: f64) -> Vec<f64> {
        let ka = &self.gram * DVector::from_column_slice(a);
        ka.iter().map(|v| v + b).collect()
    }

    pub(crate) fn norm_sq(&self, a: &[f64]) -> f64 {
        quad_form(&self.gram, &DVector::from_column_slice(a)).max(0.0)
    }

    fn margins(&self, fitted: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|i| self.y[i] * (self.x[i] - fitted[i])).collect()
    }

    /// Regularized weighted ψ_δ risk at `(a, b)`.
    pub fn objective(&self, a: &[f64], b: f64, lambda: f64) -> f64 {
        let fitted = self.fitted(a, b);
        let risk: f64 = self
            .margins(&fitted)
            .iter()
            .zip(&self.c)
            .map(|(&u, &c)| c * self.psi.loss(u))
            .sum();
        risk + 0.5 * lambda * self.norm_sq(a)
    }

    /// Derivative of `s2` with respect to the fitted values at `(a, b)`.
    fn concave_slope(&self, fitted: &[f64]) -> Vec<f64> {
        self.margins(fitted)
            .iter()
            .enumerate()
            .map(|(i, &u)| -self.c[i] * self.psi.subgrad_g2(u) * self.y[i])
            .collect()
    }

    fn function(&self, a: Vec<f64>, b: f64) -> RkhsFunction {
        RkhsFunction {
            a,
            b,
            profiles: self.profiles.clone(),
            kernel: self.kernel,
        }
    }
}

/// Regularized weighted ψ_δ risk of `f` on `d`; `gram` must be the Gram
/// matrix of `f.profiles`, which are paired with the samples of `d` in order.
pub fn objective(d: &Dataset, f: &RkhsFunction, delta: f64, lambda: f64, gram: &DMatrix<f64>) -> Result<f64> {
    let psi = PsiDelta::new(delta)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be >= 0, got {lambda}")));
    }
    let w = class_weights(d)?;
    if f.a.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            got: f.a.len(),
        });
    }
    let fitted = f.eval_train(gram)?;
    let n = d.len() as f64;
    let risk: f64 = d
        .samples()
        .iter()
        .zip(&fitted)
        .map(|(s, &c)| w.of(s.y) * psi.loss(s.y.sign() * (s.x - c)))
        .sum::<f64>()
        / n;
    Ok(risk + 0.5 * lambda * crate::kernels::rkhs_norm_sq(f, gram)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DcaSolution {
    pub a: Vec<f64>,
    pub b: f64,
    /// Objective at the starting point and after every DC step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// Number of subproblems that stopped at the iteration cap.
    pub unconverged_inner: usize,
}

/// Runs the DC iterations on a prepared problem.
pub fn dca_solve(p: &Problem, lambda: f64, cfg: &FitConfig) -> Result<DcaSolution> {
    check_lambda(lambda)?;
    let opts = cfg.inner_options();
    let zero = vec![0.0; p.len()];
    match cfg.init {
        Init::Pooled => dca_solve_from(p, lambda, cfg, (&zero, p.pooled_cut)),
        Init::Hinge => {
            let s = inner_solve(p, lambda, &zero, (&zero, p.pooled_cut), &opts)?;
            let mut sol = dca_solve_from(p, lambda, cfg, (&s.a, s.b))?;
            sol.unconverged_inner += usize::from(!s.converged);
            Ok(sol)
        }
    }
}

/// Runs the DC iterations from an explicit starting point `(a, b)`.
pub fn dca_solve_from(p: &Problem, lambda: f64, cfg: &FitConfig, start: (&[f64], f64)) -> Result<DcaSolution> {
    check_lambda(lambda)?;
    if start.0.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: start.0.len(),
        });
    }
    let opts = cfg.inner_options();
    let mut unconverged_inner = 0;
    let (mut a, mut b) = (start.0.to_vec(), start.1);
    let mut current = p.objective(&a, b, lambda);
    let mut trace = vec![current];
    let mut iterations = 0;
    let mut prev_pattern: Option<Vec<bool>> = None;

    while iterations < cfg.dca_max_iter {
        let fitted = p.fitted(&a, b);
        let beta = p.concave_slope(&fitted);
        let pattern: Vec<bool> = beta.iter().map(|v| *v != 0.0).collect();
        if prev_pattern.as_ref() == Some(&pattern) {
            // same linearization as the previous step
            break;
        }
        let step = inner_solve(p, lambda, &beta, (&a, b), &opts)?;
        unconverged_inner += usize::from(!step.converged);
        iterations += 1;
        let next = p.objective(&step.a, step.b, lambda);
        let slack = 2.0 * cfg.inner_rel_tol * current.abs().max(1.0);
        if next > current + slack {
            trace.push(next);
            return Err(Error::Divergence {
                iteration: iterations,
                previous: current,
                current: next,
                trace,
            });
        }
        trace.push(next);
        let change = current - next;
        a = step.a;
        b = step.b;
        let done = step.kept_warm_start || change.abs() <= cfg.dca_rel_tol * current.abs();
        current = next;
        prev_pattern = Some(pattern);
        if done {
            break;
        }
    }
    Ok(DcaSolution {
        a,
        b,
        trace,
        iterations,
        unconverged_inner,
    })
}

/// Fits the cut-point model with `cfg.lambda`.
pub fn dca_fit(d: &Dataset, cfg: &FitConfig) -> Result<CaeModel> {
    dca_fit_with(d, cfg, Exec::Sequential)
}

pub fn dca_fit_with(d: &Dataset, cfg: &FitConfig, exec: Exec) -> Result<CaeModel> {
    cfg.validate()?;
    if d.len() < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let p = Problem::new(d, cfg.delta, cfg.kernel, exec)?;
    fit_problem(&p, cfg.lambda, cfg)
}

/// Fits on a prepared problem with an explicit λ.
pub fn fit_problem(p: &Problem, lambda: f64, cfg: &FitConfig) -> Result<CaeModel> {
    let sol = dca_solve(p, lambda, cfg)?;
    let mut config = cfg.clone();
    config.lambda = lambda;
    config.kernel = KernelChoice::Fixed(p.kernel);
    Ok(CaeModel {
        c_fn: p.function(sol.a, sol.b),
        standardizer: p.standardizer.clone(),
        config,
        train_objective_trace: sol.trace,
        dca_iterations: sol.iterations,
    })
}
