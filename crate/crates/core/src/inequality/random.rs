use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::junta::Target;
use crate::quad::QuadratureSpec;
use crate::torus::TrigPoly;

/// Parameters of a random sparse trigonometric polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPolySpec {
    /// Dimension `N`.
    pub n: usize,
    /// Largest `|k_n|` in any coordinate.
    pub degree: u32,
    /// Standard deviation of the real and imaginary parts.
    pub scale: f64,
    pub seed: u64,
    /// Rescale so that `||grad f||_{L1} <= 1` and `||f - integral f||_2 <= 1`.
    pub normalize: bool,
    /// Number of distinct nonzero frequencies (up to sign); capped by the
    /// size of the frequency box.
    pub terms: usize,
}

impl RandomPolySpec {
    pub fn new(n: usize, degree: u32, seed: u64) -> Self {
        Self { n, degree, scale: 1.0, seed, normalize: true, terms: 6 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.degree == 0 {
            return Err(Error::param("random polynomial needs N >= 1 and degree >= 1"));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::param("coefficient scale must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Draws `terms` distinct frequencies uniformly from the box
/// `[-degree, degree]^N` (identifying `k` with `-k`), Gaussian coefficients
/// and a Gaussian mean. Bit-identical for equal specs.
pub fn random_trigpoly(spec: &RandomPolySpec) -> Result<TrigPoly> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.degree as i32;
    let side = 2 * spec.degree as u128 + 1;
    let half_box = side.checked_pow(spec.n as u32).map_or(u128::MAX, |b| (b - 1) / 2);
    let terms = (spec.terms as u128).min(half_box) as usize;
    let mean: f64 = rng.sample(StandardNormal);
    let mut seen = BTreeSet::new();
    let mut coeffs = vec![(vec![0; spec.n], Complex64::new(spec.scale * mean, 0.0))];
    while seen.len() < terms {
        let mut k: Vec<i32> = (0..spec.n).map(|_| rng.random_range(-d..=d)).collect();
        if k.iter().all(|&v| v == 0) {
            continue;
        }
        if k.iter().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
            k.iter_mut().for_each(|v| *v = -*v);
        }
        if seen.insert(k.clone()) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            coeffs.push((k, Complex64::new(spec.scale * re, spec.scale * im) / 2.0));
        }
    }
    let f = TrigPoly::from_coeffs(spec.n, coeffs)?;
    if !spec.normalize {
        return Ok(f);
    }
    // ||d_n f||_1 <= ||d_n f||_2, so this bounds the gradient L1 norm exactly.
    let grad: f64 = f.partial_l2_norms().iter().sum();
    let c = grad.max(f.centered_l2_norm());
    Ok(if c > 1.0 { f.scale(1.0 / c) } else { f })
}

/// Both preconditions of extraction, measured on `f`: the upper end of the
/// gradient estimate and the centred L2 norm.
pub fn normalized_bounds(f: &TrigPoly, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let prof = Target::Poly(f.clone()).influences(quad)?;
    Ok((prof.total_l1().upper(), f.centered_l2_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_scale_gives_zero() {
        let spec = RandomPolySpec { scale: 0.0, ..RandomPolySpec::new(3, 2, 1) };
        assert!(random_trigpoly(&spec).unwrap().is_zero());
    }

    #[test]
    fn deterministic() {
        let spec = RandomPolySpec::new(4, 3, 99);
        let a = random_trigpoly(&spec).unwrap();
        let b = random_trigpoly(&spec).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_ne!(a, random_trigpoly(&RandomPolySpec::new(4, 3, 100)).unwrap());
    }

    #[test]
    fn normalized_output_meets_preconditions() {
        for seed in 0..10 {
            let f = random_trigpoly(&RandomPolySpec::new(1 + seed as usize % 5, 3, seed)).unwrap();
            let (g, l2) = normalized_bounds(&f, &QuadratureSpec::auto(seed)).unwrap();
            assert!(g <= 1.0 + 1e-3 && l2 <= 1.0 + 1e-12, "seed {seed}: {g} {l2}");
            assert!(f.is_canonical());
        }
    }

    #[test]
    fn small_box_caps_terms() {
        let spec = RandomPolySpec { terms: 100, normalize: false, ..RandomPolySpec::new(1, 1, 5) };
        let f = random_trigpoly(&spec).unwrap();
        assert!(f.len() <= 3);
    }
}
