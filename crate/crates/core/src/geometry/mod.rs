//! Hamming-metric vector maps and their junta approximation, separated box
//! sets and their junta level sets, and the coordinate-maximum example.

mod boxes;
mod vector_map;

pub use boxes::{
    clipped_distance_is_contraction, linf_distance, random_box_pair, separated_junta_sets, BoxSet, Interval, IsoReport,
    IsoSets,
};
pub use vector_map::{
    hamming_junta_map, random_smooth_map, sine_family, ComponentJunta, ComponentReport, JuntaMap, JuntaMapReport,
    MapSpec, VectorMap,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{probability_est, Estimate, FnHandle, QuadratureSpec};

/// Metric on a single factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMetric {
    /// `|a - b|` on `[0, 1]`.
    #[default]
    Interval,
    /// Distance on `R/Z`.
    Circle,
}

impl BaseMetric {
    pub fn dist(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self {
            BaseMetric::Interval => d,
            BaseMetric::Circle => {
                let r = d.rem_euclid(1.0);
                r.min(1.0 - r)
            }
        }
    }
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.is_empty() {
        return Err(Error::param("points need dimension >= 1"));
    }
    Ok(())
}

/// Normalized Hamming distance `(1/N) sum_n d(x_n, y_n)`.
pub fn hamming_distance(x: &[f64], y: &[f64], metric: BaseMetric) -> Result<f64> {
    check_dims(x, y)?;
    Ok(x.iter().zip(y).map(|(&a, &b)| metric.dist(a, b)).sum::<f64>() / x.len() as f64)
}

/// `max_n d(x_n, y_n)`.
pub fn linf_product_distance(x: &[f64], y: &[f64], metric: BaseMetric) -> Result<f64> {
    check_dims(x, y)?;
    Ok(x.iter().zip(y).map(|(&a, &b)| metric.dist(a, b)).fold(0.0, f64::max))
}

/// `x -> max_n x_n` on the cube.
pub fn max_function(n: usize) -> FnHandle {
    FnHandle::cube(n, |x| x.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Estimates `P(max_n x_n > 1 - eps)` for uniform `x` in `[0,1]^N`.
pub fn max_tail_probability(n: usize, eps: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    if n == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("need N >= 1 and eps in (0, 1)"));
    }
    let f = max_function(n);
    probability_est(n, quad, move |x| f.eval(x) > 1.0 - eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&[0.2, 0.5], &[0.2, 0.5], BaseMetric::Interval).unwrap(), 0.0);
        assert_eq!(hamming_distance(&[0.0; 3], &[1.0; 3], BaseMetric::Interval).unwrap(), 1.0);
        assert!(hamming_distance(&[0.0; 3], &[1.0; 2], BaseMetric::Interval).is_err());
        assert!((BaseMetric::Circle.dist(0.95, 0.05) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn hamming_below_linf() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..8);
            let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            for m in [BaseMetric::Interval, BaseMetric::Circle] {
                assert!(hamming_distance(&x, &y, m).unwrap() <= linf_product_distance(&x, &y, m).unwrap());
            }
        }
    }

    #[test]
    fn max_tail() {
        let est = max_tail_probability(10, 0.1, &QuadratureSpec::monte_carlo(1 << 14, 2)).unwrap();
        let exact = 1.0 - 0.9f64.powi(10);
        assert!((est.value - exact).abs() < est.half_width);
    }
}
