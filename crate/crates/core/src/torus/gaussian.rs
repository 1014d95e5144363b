//! Gaussian-representation smoothing: `f(x) -> E f(x + y)` with `y` a centred
//! Gaussian of per-coordinate variance `s`, estimated by averaging over a
//! fixed set of sampled offsets.
//!
//! On a single mode `k` the expected multiplier is `exp(-2 pi^2 |k|^2 s)`, so
//! variance `2t` matches `TrigPoly::heat(t)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::TrigPoly;
use crate::error::{Error, Result};
use crate::quad::{Domain, Estimate, FnHandle, Z99};

/// A fixed sample of Gaussian offsets. Reusing it across functions gives
/// common random numbers, so the smoothed results of different inputs are
/// comparable sample by sample.
#[derive(Clone, Debug)]
pub struct GaussianHeat {
    dim: usize,
    variance: f64,
    samples: usize,
    offsets: Arc<Vec<f64>>,
}

impl GaussianHeat {
    pub fn new(dim: usize, variance: f64, samples: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::param(format!("variance must be finite and >= 0, got {variance}")));
        }
        if samples == 0 {
            return Err(Error::param("sample count must be at least 1"));
        }
        let sd = variance.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = (0..samples * dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * z
            })
            .collect();
        Ok(Self { dim, variance, samples, offsets: Arc::new(offsets) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn offset(&self, j: usize) -> &[f64] {
        &self.offsets[j * self.dim..(j + 1) * self.dim]
    }

    /// The sample multiplier `(1/M) sum_j e^{2 pi i k.y_j}` acting on mode `k`.
    pub fn multiplier(&self, k: &[i32]) -> Complex64 {
        let sum: Complex64 = (0..self.samples)
            .map(|j| {
                let y = self.offset(j);
                let theta: f64 = k.iter().zip(y).map(|(&kn, &yn)| kn as f64 * yn).sum();
                Complex64::from_polar(1.0, 2.0 * PI * theta)
            })
            .sum();
        sum / self.samples as f64
    }

    /// Real part of the sample multiplier on mode `k` with a 99% half-width.
    pub fn multiplier_estimate(&self, k: &[i32]) -> Estimate {
        let m = self.samples as f64;
        let vals: Vec<f64> = (0..self.samples)
            .map(|j| {
                let theta: f64 = k.iter().zip(self.offset(j)).map(|(&kn, &yn)| kn as f64 * yn).sum();
                (2.0 * PI * theta).cos()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / m;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
        Estimate { value: mean, half_width: Z99 * (var / m).sqrt() }
    }

    /// The Fourier coefficients of the smoothed polynomial, exactly as the
    /// handle returned by [`GaussianHeat::smooth`] would evaluate it.
    pub fn apply(&self, f: &TrigPoly) -> Result<TrigPoly> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: f.dim() });
        }
        Ok(f.map_coeffs(|k, c| c * self.multiplier(k.as_slice())))
    }

    /// Wraps `h` as `x -> (1/M) sum_j h(x + y_j)` (coordinates reduced mod 1).
    pub fn smooth(&self, h: &FnHandle) -> Result<FnHandle> {
        if h.domain() != Domain::Torus {
            return Err(Error::WrongDomain { expected: "torus" });
        }
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: h.dim() });
        }
        let (base, me) = (h.clone(), self.clone());
        let mut out = FnHandle::new(self.dim, Domain::Torus, move |x| {
            let mut z = vec![0.0; me.dim];
            let mut acc = 0.0;
            for j in 0..me.samples {
                for ((zn, &xn), &yn) in z.iter_mut().zip(x).zip(me.offset(j)) {
                    *zn = (xn + yn).rem_euclid(1.0);
                }
                acc += base.eval(&z);
            }
            acc / me.samples as f64
        });
        if h.has_gradient() {
            let (base, me) = (h.clone(), self.clone());
            out = out.with_gradient(move |x, g| {
                let mut z = vec![0.0; me.dim];
                let mut gj = vec![0.0; me.dim];
                g.fill(0.0);
                for j in 0..me.samples {
                    for ((zn, &xn), &yn) in z.iter_mut().zip(x).zip(me.offset(j)) {
                        *zn = (xn + yn).rem_euclid(1.0);
                    }
                    base.gradient(&z, &mut gj);
                    g.iter_mut().zip(&gj).for_each(|(a, b)| *a += b);
                }
                g.iter_mut().for_each(|v| *v /= me.samples as f64);
            });
        }
        if let Some(s) = h.support() {
            out = out.with_support(s.clone());
        }
        Ok(out)
    }
}

/// Monte-Carlo Gaussian smoothing of a torus handle with per-coordinate
/// variance `s`.
pub fn heat_gaussian(h: &FnHandle, s: f64, samples: usize, seed: u64) -> Result<FnHandle> {
    GaussianHeat::new(h.dim(), s, samples, seed)?.smooth(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_fixed() {
        let h = FnHandle::constant(3, Domain::Torus, 2.5);
        let g = heat_gaussian(&h, 0.3, 17, 4).unwrap();
        assert_eq!(g.eval(&[0.1, 0.5, 0.9]), 2.5);
    }

    #[test]
    fn cosine_multiplier_matches_spectral_value() {
        let gh = GaussianHeat::new(1, 0.2, 20_000, 11).unwrap();
        let est = gh.multiplier_estimate(&[1]);
        let exact = (-2.0 * PI * PI * 0.2f64).exp();
        assert!((est.value - exact).abs() <= est.half_width, "{est:?} vs {exact}");
    }

    #[test]
    fn handle_agrees_with_coefficient_form() {
        let f = TrigPoly::cosine(&[1, 2], 0.6).unwrap().add(&TrigPoly::sine(&[0, 1], 0.3).unwrap()).unwrap();
        let gh = GaussianHeat::new(2, 0.05, 64, 3).unwrap();
        let h = gh.smooth(&f.to_handle()).unwrap();
        let p = gh.apply(&f).unwrap();
        for x in [[0.1, 0.2], [0.7, 0.35], [0.99, 0.01]] {
            assert!((h.eval(&x) - p.eval(&x)).abs() < 1e-12);
        }
        assert!(p.is_canonical());
    }

    #[test]
    fn rejects_bad_input() {
        let h = FnHandle::constant(1, Domain::Torus, 0.0);
        assert!(heat_gaussian(&h, -0.1, 4, 0).is_err());
        assert!(heat_gaussian(&h, 0.1, 0, 0).is_err());
        let c = FnHandle::constant(1, Domain::Cube, 0.0);
        assert!(heat_gaussian(&c, 0.1, 4, 0).is_err());
    }

    #[test]
    fn zero_variance_is_identity() {
        let f = TrigPoly::cosine(&[3], 1.0).unwrap();
        let gh = GaussianHeat::new(1, 0.0, 5, 0).unwrap();
        assert_eq!(gh.apply(&f).unwrap(), f);
    }
}
