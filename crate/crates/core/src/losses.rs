//! The 0-1 loss and the ramp-shaped ψ_δ surrogate, split into two convex
//! hinge parts for the DC algorithm.

use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.1;

/// 0 for a nonnegative margin, 1 otherwise (`sign(0) = +1`).
#[inline]
pub fn loss_01(u: f64) -> f64 {
    if u >= 0.0 {
        0.0
    } else {
        1.0
    }
}

/// ψ_δ loss: 1 for `u <= 0`, 0 for `u >= δ`, linear in between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiDelta {
    delta: f64,
}

impl PsiDelta {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidInput(format!("delta must be finite and > 0, got {delta}")));
        }
        Ok(PsiDelta { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn loss(&self, u: f64) -> f64 {
        if u <= 0.0 {
            1.0
        } else if u >= self.delta {
            0.0
        } else {
            (self.delta - u) / self.delta
        }
    }

    /// `((δ - u)_+ / δ, (-u)_+ / δ)`.
    ///
    /// For `u < 0` the second part is evaluated as `g1 - 1`, which equals
    /// `-u / δ` and makes `g1 - g2` exactly 1 in floating point.
    #[inline]
    pub fn dc_parts(&self, u: f64) -> (f64, f64) {
        let g1 = (self.delta - u).max(0.0) / self.delta;
        let g2 = if u < 0.0 { g1 - 1.0 } else { 0.0 };
        (g1, g2)
    }

    /// Subgradient of `(-u)_+ / δ`; the element 0 is used at the kink.
    #[inline]
    pub fn subgrad_g2(&self, u: f64) -> f64 {
        if u < 0.0 {
            -1.0 / self.delta
        } else {
            0.0
        }
    }
}

impl Default for PsiDelta {
    fn default() -> Self {
        PsiDelta {
            delta: DEFAULT_DELTA,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_one() {
        assert_eq!(loss_01(0.0), 0.0);
        assert_eq!(loss_01(-0.3), 1.0);
        assert_eq!(loss_01(2.0), 0.0);
    }

    #[test]
    fn psi_values() {
        let l = PsiDelta::new(0.1).unwrap();
        assert_abs_diff_eq!(l.loss(0.05), 0.5, epsilon = 1e-12);
        assert_eq!(l.loss(-0.5), 1.0);
        assert_eq!(l.loss(0.1), 0.0);
        assert!(PsiDelta::new(0.0).is_err());
        assert!(PsiDelta::new(f64::NAN).is_err());
    }

    #[test]
    fn parts_and_subgradients() {
        let l = PsiDelta::new(0.1).unwrap();
        let (g1, g2) = l.dc_parts(-0.5);
        assert_abs_diff_eq!(g1, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g2, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g1 - g2, 1.0, epsilon = 1e-12);
        let (g1, g2) = l.dc_parts(0.05);
        assert_abs_diff_eq!(g1, 0.5, epsilon = 1e-12);
        assert_eq!(g2, 0.0);
        assert_eq!(l.dc_parts(1.0), (0.0, 0.0));
        assert_eq!(l.subgrad_g2(-1.0), -10.0);
        assert_eq!(l.subgrad_g2(0.5), 0.0);
        assert_eq!(l.subgrad_g2(0.0), 0.0);
        // the surrogate counts a zero margin as an error, the 0-1 loss does not
        assert_eq!((l.loss(0.0), loss_01(0.0)), (1.0, 0.0));
    }

    #[test]
    fn grid_identities() {
        for delta in [0.5, 0.1, 0.01] {
            let l = PsiDelta::new(delta).unwrap();
            for k in 0..=6000 {
                let u = -3.0 + k as f64 * 1e-3;
                let v = l.loss(u);
                let (g1, g2) = l.dc_parts(u);
                assert_eq!(v, g1 - g2, "u = {u}, delta = {delta}");
                assert!((g2 - (-u).max(0.0) / delta).abs() <= 4.0 * f64::EPSILON * g1);
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= loss_01(u) - 1.0);
                if !(u >= 0.0 && u < delta) {
                    assert_eq!(v, loss_01(u), "u = {u}, delta = {delta}");
                }
            }
        }
    }

    #[test]
    fn pointwise_limit() {
        for u in [-1.0, -1e-3, 1e-3, 0.7] {
            let errs: Vec<f64> = [1.0, 0.1, 1e-2, 1e-4]
                .iter()
                .map(|&d| (PsiDelta::new(d).unwrap().loss(u) - loss_01(u)).abs())
                .collect();
            assert_eq!(*errs.last().unwrap(), 0.0, "u = {u}");
            assert!(errs.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    proptest! {
        #[test]
        fn parts_are_convex(
            delta in 1e-3f64..2.0, u in -3.0f64..3.0, v in -3.0f64..3.0, t in 0.0f64..1.0,
        ) {
            let l = PsiDelta::new(delta).unwrap();
            let w = t * u + (1.0 - t) * v;
            let (a1, a2) = l.dc_parts(u);
            let (b1, b2) = l.dc_parts(v);
            let (c1, c2) = l.dc_parts(w);
            let slack = 1e-9 * (1.0 + a1 + b1);
            prop_assert!(c1 <= t * a1 + (1.0 - t) * b1 + slack);
            prop_assert!(c2 <= t * a2 + (1.0 - t) * b2 + slack);
        }

        #[test]
        fn subgradient_is_a_minorant(delta in 1e-3f64..2.0, u0 in -3.0f64..3.0, u in -3.0f64..3.0) {
            let l = PsiDelta::new(delta).unwrap();
            let g = l.subgrad_g2(u0);
            let lin = l.dc_parts(u0).1 + g * (u - u0);
            prop_assert!(l.dc_parts(u).1 >= lin - 1e-9);
        }
    }
}
