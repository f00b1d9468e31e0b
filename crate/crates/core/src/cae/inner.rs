//! Convex DCA subproblem solver.
//!
//! With `C_i = w(y_i) / n`, `c = K a + b` and a fixed vector `beta` (the
//! derivative of the concave part with respect to the fitted values), the
//! subproblem
//!
//! ```text
//! min_{a,b}  sum_i C_i (δ - y_i (x_i - c_i))_+ / δ + (λ/2) a'Ka - beta'c
//! ```
//!
//! has the dual
//!
//! ```text
//! min_γ  ½ γ'(K/λ)γ + sum_i γ_i (x_i - δ y_i)   s.t.  sum_i γ_i = 0,  l_i <= γ_i <= u_i
//! ```
//!
//! with `a = -γ/λ` and box `y_i(γ_i + beta_i) ∈ [0, C_i/δ]`. It is solved by
//! sequential minimal optimization with second-order working-set selection.
//! The offset `b` is the multiplier of the equality constraint.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::Problem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerOptions {
    pub max_iter: usize,
    /// KKT gap tolerance relative to the marker scale.
    pub rel_tol: f64,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            max_iter: 100_000,
            rel_tol: 1e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerSolution {
    pub a: Vec<f64>,
    pub b: f64,
    /// Subproblem objective `s1(w) - beta'c` at the returned point.
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit before the KKT gap closed.
    pub converged: bool,
    /// True when the solver's point did not improve on the warm start and
    /// the warm start was returned.
    pub kept_warm_start: bool,
}

const TAU: f64 = 1e-12;

/// Subproblem value at `(a, b)`; `fitted` is `K a + b`.
pub(crate) fn subproblem_objective(
    p: &Problem,
    lambda: f64,
    beta: &[f64],
    a: &[f64],
    fitted: &[f64],
) -> f64 {
    let delta = p.psi.delta();
    let mut s = 0.0;
    for i in 0..p.len() {
        let u = p.y[i] * (p.x[i] - fitted[i]);
        s += p.c[i] * (delta - u).max(0.0) / delta - beta[i] * fitted[i];
    }
    s + 0.5 * lambda * p.norm_sq(a)
}

fn check_beta(p: &Problem, beta: &[f64]) -> Result<()> {
    if beta.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: beta.len(),
        });
    }
    let delta = p.psi.delta();
    for i in 0..p.len() {
        let t = p.y[i] * beta[i] * delta / p.c[i];
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            return Err(Error::InvalidInput(format!(
                "linear term {} at sample {i} is not a subgradient of the concave part",
                beta[i]
            )));
        }
    }
    Ok(())
}

/// Minimizes the convex subproblem for the given linear term, starting from
/// the feasible dual point `γ = 0`. The warm start fixes `b` when the
/// optimal offset is not unique and is returned unchanged if the solver does
/// not improve on it.
pub fn inner_solve(
    p: &Problem,
    lambda: f64,
    beta: &[f64],
    warm_start: (&[f64], f64),
    opts: &InnerOptions,
) -> Result<InnerSolution> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be finite and > 0, got {lambda}")));
    }
    check_beta(p, beta)?;
    let n = p.len();
    if warm_start.0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: warm_start.0.len(),
        });
    }
    let delta = p.psi.delta();
    let k: &DMatrix<f64> = &p.gram;

    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    for i in 0..n {
        let cap = p.c[i] / delta;
        if p.y[i] > 0.0 {
            lo[i] = -beta[i];
            hi[i] = cap - beta[i];
        } else {
            lo[i] = -cap - beta[i];
            hi[i] = -beta[i];
        }
        // γ = 0 must be feasible; snap round-off
        lo[i] = lo[i].min(0.0);
        hi[i] = hi[i].max(0.0);
    }

    let mut gamma = vec![0.0; n];
    let mut grad: Vec<f64> = (0..n).map(|i| p.x[i] - delta * p.y[i]).collect();
    let inv_lambda = 1.0 / lambda;
    let eps = opts.rel_tol * (1.0 + p.marker_scale);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        // i: steepest index that can increase
        let mut i_sel = usize::MAX;
        let mut g_min = f64::INFINITY;
        let mut g_max = f64::NEG_INFINITY;
        for t in 0..n {
            if gamma[t] < hi[t] && grad[t] < g_min {
                g_min = grad[t];
                i_sel = t;
            }
            if gamma[t] > lo[t] && grad[t] > g_max {
                g_max = grad[t];
            }
        }
        if i_sel == usize::MAX || g_max - g_min < eps {
            converged = true;
            break;
        }
        let i = i_sel;
        let k_ii = k[(i, i)];
        let col_i = k.column(i);
        let mut j_sel = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for t in 0..n {
            if gamma[t] > lo[t] && grad[t] > g_min {
                let diff = grad[t] - g_min;
                let curv = ((k_ii + k[(t, t)] - 2.0 * col_i[t]) * inv_lambda).max(TAU);
                let gain = diff * diff / curv;
                if gain > best_gain {
                    best_gain = gain;
                    j_sel = t;
                }
            }
        }
        let j = j_sel;
        let curv = ((k_ii + k[(j, j)] - 2.0 * col_i[j]) * inv_lambda).max(TAU);
        let room_i = hi[i] - gamma[i];
        let room_j = gamma[j] - lo[j];
        let mut step = (grad[j] - grad[i]) / curv;
        if step >= room_i {
            step = room_i;
        }
        if step >= room_j {
            step = room_j;
        }
        gamma[i] = if step == room_i { hi[i] } else { gamma[i] + step };
        gamma[j] = if step == room_j { lo[j] } else { gamma[j] - step };
        let col_j = k.column(j);
        let s = step * inv_lambda;
        for t in 0..n {
            grad[t] += s * (col_i[t] - col_j[t]);
        }
        iterations += 1;
    }
    if !converged {
        log::debug!("inner solver hit the iteration cap ({})", opts.max_iter);
    }

    let a: Vec<f64> = gamma.iter().map(|g| -g * inv_lambda).collect();
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    let (mut b_lo, mut b_hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for t in 0..n {
        let at_lo = gamma[t] <= lo[t];
        let at_hi = gamma[t] >= hi[t];
        if !at_lo && !at_hi {
            sum_free += grad[t];
            n_free += 1;
        } else {
            if at_hi {
                b_lo = b_lo.max(grad[t]);
            }
            if at_lo {
                b_hi = b_hi.min(grad[t]);
            }
        }
    }
    let b = if n_free > 0 {
        sum_free / n_free as f64
    } else if b_lo <= b_hi {
        warm_start.1.clamp(b_lo, b_hi)
    } else {
        0.5 * (b_lo + b_hi)
    };

    let fitted = p.fitted(&a, b);
    let objective = subproblem_objective(p, lambda, beta, &a, &fitted);
    let warm_fitted = p.fitted(warm_start.0, warm_start.1);
    let warm_objective = subproblem_objective(p, lambda, beta, warm_start.0, &warm_fitted);
    if objective >= warm_objective {
        return Ok(InnerSolution {
            a: warm_start.0.to_vec(),
            b: warm_start.1,
            objective: warm_objective,
            iterations,
            converged,
            kept_warm_start: true,
        });
    }
    Ok(InnerSolution {
        a,
        b,
        objective,
        iterations,
        converged,
        kept_warm_start: false,
    })
}
