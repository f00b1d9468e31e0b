//! Simulation designs with exact ground truth.
//!
//! | example | covariates            | marker family |
//! |---------|-----------------------|---------------|
//! | 1       | `Z ~ U(1, 5)`         | normal        |
//! | 2       | `Z ~ U(1, 5)`         | gamma         |
//! | 3       | `Z ~ N_3((1,1,1), I)` | normal        |
//! | 4       | `Z ~ N_3((1,1,1), I)` | gamma         |
//!
//! With `s = w'Z` and `q = w'Z²` (`w = (1,1,1)`; for the one-dimensional
//! designs `s = q = Z`), controls have location `6 + 1.5 q + 1.5 sin(s)` and
//! spread term `0.4 + Φ(2s - 6)`; cases add `1.2 + sqrt(|s - 0.5|)` (one
//! dimension) or `1.2 + sqrt(|s|)` (three dimensions) to the location and use
//! `1.2 + Φ(2s - 6)`. Normal designs read the spread term as the variance;
//! gamma designs use the location as shape and the square root of the spread
//! term as scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label, LabeledSample};
use crate::error::{Error, Result};
use crate::special::{gamma_cdf, ln_gamma_pdf, normal_cdf, normal_cdf_mv};

pub const RESAMPLE_CAP: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Example {
    One,
    Two,
    Three,
    Four,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::One, Example::Two, Example::Three, Example::Four];

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Example::One),
            2 => Ok(Example::Two),
            3 => Ok(Example::Three),
            4 => Ok(Example::Four),
            _ => Err(Error::InvalidInput(format!("unknown example {id}, expected 1-4"))),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Example::One => 1,
            Example::Two => 2,
            Example::Three => 3,
            Example::Four => 4,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Example::One | Example::Two => 1,
            Example::Three | Example::Four => 3,
        }
    }

    fn is_gamma(self) -> bool {
        matches!(self, Example::Two | Example::Four)
    }
}

/// Class-conditional marker distribution at a fixed covariate profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassLaw {
    Normal { mean: f64, var: f64 },
    Gamma { shape: f64, scale: f64 },
}

impl ClassLaw {
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            ClassLaw::Normal { mean, var } => {
                -0.5 * (x - mean) * (x - mean) / var - 0.5 * (2.0 * std::f64::consts::PI * var).ln()
            }
            ClassLaw::Gamma { shape, scale } => {
                ln_gamma_pdf(x, shape, scale).unwrap_or(f64::NEG_INFINITY)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ClassLaw::Normal { mean, var } => normal_cdf_mv(x, mean, var),
            ClassLaw::Gamma { shape, scale } => gamma_cdf(x, shape, scale).unwrap_or(f64::NAN),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ClassLaw::Normal { mean, .. } => mean,
            ClassLaw::Gamma { shape, scale } => shape * scale,
        }
    }

    pub fn sd(&self) -> f64 {
        match *self {
            ClassLaw::Normal { var, .. } => var.sqrt(),
            ClassLaw::Gamma { shape, scale } => shape.sqrt() * scale,
        }
    }

    fn valid(&self) -> bool {
        match *self {
            ClassLaw::Normal { var, .. } => var > 0.0,
            ClassLaw::Gamma { shape, scale } => shape > 0.0 && scale > 0.0,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            ClassLaw::Normal { mean, var } => Normal::new(mean, var.sqrt())
                .expect("validated variance")
                .sample(rng),
            ClassLaw::Gamma { shape, scale } => Gamma::new(shape, scale)
                .expect("validated gamma parameters")
                .sample(rng),
        }
    }
}

/// Exact class laws, cut-point and Youden index for one design.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthOracle {
    pub example: Example,
}

impl TruthOracle {
    pub fn new(example: Example) -> Self {
        TruthOracle { example }
    }

    /// `(case law, control law)` at `z`.
    pub fn laws(&self, z: &[f64]) -> Result<(ClassLaw, ClassLaw)> {
        let ex = self.example;
        if z.len() != ex.dim() {
            return Err(Error::DimensionMismatch {
                expected: ex.dim(),
                got: z.len(),
            });
        }
        let (s, q, shift) = if ex.dim() == 1 {
            (z[0], z[0], (z[0] - 0.5).abs().sqrt())
        } else {
            let s: f64 = z.iter().sum();
            (s, z.iter().map(|v| v * v).sum(), s.abs().sqrt())
        };
        let phi = normal_cdf(2.0 * s - 6.0);
        let loc_neg = 6.0 + 1.5 * q + 1.5 * s.sin();
        let loc_pos = loc_neg + 1.2 + shift;
        let (spread_neg, spread_pos) = (0.4 + phi, 1.2 + phi);
        Ok(if ex.is_gamma() {
            (
                ClassLaw::Gamma {
                    shape: loc_pos,
                    scale: spread_pos.sqrt(),
                },
                ClassLaw::Gamma {
                    shape: loc_neg,
                    scale: spread_neg.sqrt(),
                },
            )
        } else {
            (
                ClassLaw::Normal {
                    mean: loc_pos,
                    var: spread_pos,
                },
                ClassLaw::Normal {
                    mean: loc_neg,
                    var: spread_neg,
                },
            )
        })
    }

    /// `c*(z)`: the crossing of the two class densities between the class
    /// means.
    pub fn true_cut(&self, z: &[f64]) -> Result<f64> {
        let (pos, neg) = self.laws(z)?;
        density_crossing(&pos, &neg).ok_or_else(|| Error::NoSignChange { z: z.to_vec() })
    }

    /// `J(z) = F_{-1}(c*) - F_1(c*)`.
    pub fn true_youden(&self, z: &[f64]) -> Result<f64> {
        let (pos, neg) = self.laws(z)?;
        let c = density_crossing(&pos, &neg).ok_or_else(|| Error::NoSignChange { z: z.to_vec() })?;
        Ok(neg.cdf(c) - pos.cdf(c))
    }
}

/// Bisection on `ln f_pos - ln f_neg` over the interval between the means,
/// widened once by three pooled standard deviations on each side if the
/// sign does not change.
pub fn density_crossing(pos: &ClassLaw, neg: &ClassLaw) -> Option<f64> {
    let h = |c: f64| pos.ln_pdf(c) - neg.ln_pdf(c);
    let (m_neg, m_pos) = (neg.mean(), pos.mean());
    let (mut lo, mut hi) = (m_neg.min(m_pos), m_neg.max(m_pos));
    let sign_change = |lo: f64, hi: f64| {
        let (a, b) = (h(lo), h(hi));
        a.is_finite() && b.is_finite() && a * b <= 0.0
    };
    if !sign_change(lo, hi) {
        let pad = 3.0 * (0.5 * (pos.sd().powi(2) + neg.sd().powi(2))).sqrt();
        lo -= pad;
        hi += pad;
        if let (ClassLaw::Gamma { .. }, _) | (_, ClassLaw::Gamma { .. }) = (pos, neg) {
            lo = lo.max(f64::MIN_POSITIVE);
        }
        if !sign_change(lo, hi) {
            return None;
        }
    }
    let mut h_lo = h(lo);
    if h_lo == 0.0 {
        return Some(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * (1.0 + mid.abs()) {
            break;
        }
        let h_mid = h(mid);
        if h_mid == 0.0 {
            return Some(mid);
        }
        if (h_mid < 0.0) == (h_lo < 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub example: Example,
    pub n: usize,
    pub seed: u64,
}

fn draw_profile<R: Rng>(ex: Example, rng: &mut R) -> Vec<f64> {
    if ex.dim() == 1 {
        vec![Uniform::new(1.0, 5.0).expect("valid range").sample(rng)]
    } else {
        (0..3)
            .map(|_| {
                let e: f64 = StandardNormal.sample(rng);
                1.0 + e
            })
            .collect()
    }
}

/// Draws `spec.n` samples: profile, then label with probability 1/2 each,
/// then the marker from the class law at that profile. Deterministic in
/// `spec.seed`.
pub fn generate(spec: &SimSpec) -> Result<Dataset> {
    if spec.n < 2 {
        return Err(Error::InvalidInput("simulation needs n >= 2".into()));
    }
    let oracle = TruthOracle::new(spec.example);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let mut attempts = 0;
        let (z, laws) = loop {
            let z = draw_profile(spec.example, &mut rng);
            let laws = oracle.laws(&z)?;
            if laws.0.valid() && laws.1.valid() {
                break (z, laws);
            }
            attempts += 1;
            if attempts >= RESAMPLE_CAP {
                return Err(Error::ResampleCap { attempts });
            }
        };
        let y = if rng.random_bool(0.5) { Label::Pos } else { Label::Neg };
        let law = match y {
            Label::Pos => laws.0,
            Label::Neg => laws.1,
        };
        let x = law.sample(&mut rng);
        samples.push(LabeledSample::new(x, y, z)?);
    }
    Dataset::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_pdf_mv;

    #[test]
    fn example_one_laws() {
        let o = TruthOracle::new(Example::One);
        let (pos, neg) = o.laws(&[2.0]).unwrap();
        let base = 6.0 + 3.0 + 1.5 * 2f64.sin();
        assert!((base - 10.363_946_140_238_52).abs() < 1e-9);
        match neg {
            ClassLaw::Normal { mean, var } => {
                assert!((mean - base).abs() < 1e-12);
                assert!((var - (0.4 + normal_cdf(-2.0))).abs() < 1e-15);
            }
            _ => panic!("normal design"),
        }
        match pos {
            ClassLaw::Normal { mean, var } => {
                assert!((mean - (base + 1.2 + 1.5f64.sqrt())).abs() < 1e-12);
                assert!((var - (1.2 + normal_cdf(-2.0))).abs() < 1e-15);
            }
            _ => panic!("normal design"),
        }
    }

    #[test]
    fn gamma_and_three_dimensional_laws() {
        let (pos, neg) = TruthOracle::new(Example::Two).laws(&[3.0]).unwrap();
        let phi = normal_cdf(0.0);
        assert_eq!(neg, ClassLaw::Gamma { shape: 6.0 + 4.5 + 1.5 * 3f64.sin(), scale: (0.4 + phi).sqrt() });
        assert!(matches!(pos, ClassLaw::Gamma { .. }));
        let (pos, neg) = TruthOracle::new(Example::Three).laws(&[1.0, -2.0, 0.5]).unwrap();
        let (s, q) = (-0.5f64, 5.25);
        let loc = 6.0 + 1.5 * q + 1.5 * s.sin();
        assert_eq!(neg.mean(), loc);
        assert!((pos.mean() - (loc + 1.2 + s.abs().sqrt())).abs() < 1e-12);
        assert!(TruthOracle::new(Example::Three).laws(&[1.0]).is_err());
    }

    #[test]
    fn symmetric_crossing_and_youden() {
        let pos = ClassLaw::Normal { mean: 2.0, var: 1.0 };
        let neg = ClassLaw::Normal { mean: 0.0, var: 1.0 };
        let c = density_crossing(&pos, &neg).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let j = neg.cdf(c) - pos.cdf(c);
        assert!((j - 0.682_689_492_137_086).abs() < 1e-10);
        let same = ClassLaw::Normal { mean: 0.0, var: 1.0 };
        let c = density_crossing(&same, &neg).unwrap();
        assert_eq!(neg.cdf(c) - same.cdf(c), 0.0);
    }

    #[test]
    fn crossing_matches_closed_form_quadratic() {
        let pos = ClassLaw::Normal { mean: 2.0, var: 4.0 };
        let neg = ClassLaw::Normal { mean: 0.0, var: 1.0 };
        let c = density_crossing(&pos, &neg).unwrap();
        // -(c-2)^2/8 - ln 2 = -c^2/2  =>  3c^2 + 4c - 4 - 8 ln 2 = 0
        let closed = (-4.0 + (16.0 + 12.0 * (4.0 + 8.0 * 2f64.ln())).sqrt()) / 6.0;
        assert!((c - closed).abs() < 1e-10, "{c} vs {closed}");
        assert!(c > 0.0 && c < 2.0);
        assert!((normal_pdf_mv(c, 2.0, 4.0) - normal_pdf_mv(c, 0.0, 1.0)).abs() < 1e-10);
    }

    #[test]
    fn truth_is_reproducible_and_in_range() {
        let o = TruthOracle::new(Example::One);
        let c1 = o.true_cut(&[3.0]).unwrap();
        let c2 = o.true_cut(&[3.0]).unwrap();
        assert!((c1 - c2).abs() < 1e-8);
        for k in 0..=40 {
            let z = 1.0 + 0.1 * k as f64;
            let j = o.true_youden(&[z]).unwrap();
            assert!(j > 0.0 && j < 1.0);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SimSpec { example: Example::Four, n: 50, seed: 17 };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&SimSpec { seed: 18, ..spec }).unwrap();
        assert_ne!(generate(&spec).unwrap(), other);
        let d = generate(&SimSpec { example: Example::One, n: 100, seed: 7 }).unwrap();
        assert_eq!(d.len(), 100);
        assert!(d.samples().iter().all(|s| (1.0..5.0).contains(&s.z[0])));
        assert!(generate(&SimSpec { n: 1, ..spec }).is_err());
    }
}
