//! Lipschitz regularisation of functions on finite metric spaces.
//!
//! Given `f` with non-decreasing modulus of continuity `omega` and `eps > 0`,
//! `h(x) = min_n (eps n + K d(x, X_n))` with `X_n = {f <= eps n}` is
//! `K`-Lipschitz and within `K eps` of `f`, where
//! `K = max(sup_{r >= eps} omega(r) / r, 1)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when re-checking the posted bounds in floating point.
const CHECK_RTOL: f64 = 1e-12;

/// A finite metric space given by its distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    pub points: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates zero diagonal, symmetry, non-negativity and the triangle
    /// inequality.
    pub fn new(points: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let s = Self { points, matrix };
        s.validate()?;
        Ok(s)
    }

    /// Points labelled `0..n` with distances `dist(i, j)`.
    pub fn from_fn(n: usize, dist: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { dist(i, j) }).collect()).collect();
        Self::new((0..n).map(|i| i.to_string()).collect(), matrix)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if self.matrix.len() != n || self.matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!("distance matrix must be {n} x {n}")));
        }
        let scale = self.matrix.iter().flatten().fold(0.0f64, |m, &d| m.max(d.abs()));
        let tol = 1e-12 * (1.0 + scale);
        for i in 0..n {
            if self.matrix[i][i] != 0.0 {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = self.matrix[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {d}")));
                }
                if d != self.matrix[j][i] {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i},{j})")));
                }
                for k in 0..n {
                    if d > self.matrix[i][k] + self.matrix[k][j] + tol {
                        return Err(Error::InvalidMetric(format!("triangle inequality fails for ({i},{k},{j})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: FiniteMetricSpace = serde_json::from_str(s)?;
        raw.validate()?;
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A non-decreasing modulus of continuity given by knots `(r, omega(r))`,
/// interpolated linearly and extended past the last knot with the last slope.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusSpec {
    knots: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct Knot {
    r: f64,
    /// `null` stands for an infinite value.
    omega: Option<f64>,
}

impl ModulusSpec {
    /// Requires at least two knots, the first being `(0, 0)`, strictly
    /// increasing radii and non-decreasing values.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidModulus("need at least two knots".into()));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::InvalidModulus("first knot must be (0, 0)".into()));
        }
        for w in knots.windows(2) {
            let ((r0, w0), (r1, w1)) = (w[0], w[1]);
            if !(r1.is_finite() && r1 > r0) {
                return Err(Error::InvalidModulus(format!("radii must increase: {r0} then {r1}")));
            }
            if w1.is_nan() || w1 < w0 {
                return Err(Error::InvalidModulus(format!("values must not decrease: {w0} then {w1}")));
            }
        }
        Ok(Self { knots })
    }

    /// `omega(r) = slope * r`.
    pub fn linear(slope: f64) -> Self {
        Self { knots: vec![(0.0, 0.0), (1.0, slope)] }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, r: f64) -> f64 {
        let k = &self.knots;
        let last = k.len() - 1;
        let seg = match k.iter().position(|&(kr, _)| kr >= r) {
            Some(0) => return k[0].1,
            Some(i) => i - 1,
            None => last - 1,
        };
        let ((r0, w0), (r1, w1)) = (k[seg], k[seg + 1]);
        if w0.is_infinite() || w1.is_infinite() {
            return if r <= r0 { w0 } else { f64::INFINITY };
        }
        w0 + (w1 - w0) * (r - r0) / (r1 - r0)
    }

    /// `K = max(sup_{r >= eps} omega(r) / r, 1)`.
    ///
    /// On each linear piece `omega(r) / r` is monotone, so the supremum is
    /// attained at `eps`, at a knot beyond `eps`, or approached at infinity
    /// where it tends to the last slope.
    pub fn lipschitz_constant(&self, eps: f64) -> f64 {
        let k = &self.knots;
        let last = k.len() - 1;
        let tail_slope = (k[last].1 - k[last - 1].1) / (k[last].0 - k[last - 1].0);
        let mut sup = self.eval(eps) / eps;
        for &(r, w) in k.iter().filter(|&&(r, _)| r > eps) {
            sup = sup.max(w / r);
        }
        if tail_slope.is_nan() {
            return f64::INFINITY;
        }
        sup.max(tail_slope).max(1.0)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let knots: Vec<Knot> = serde_json::from_str(s)?;
        Self::new(knots.into_iter().map(|k| (k.r, k.omega.unwrap_or(f64::INFINITY))).collect())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let knots: Vec<Knot> = self.knots.iter().map(|&(r, w)| Knot { r, omega: w.is_finite().then_some(w) }).collect();
        Ok(serde_json::to_string_pretty(&knots)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Regularized {
    pub values: Vec<f64>,
    pub lipschitz: f64,
    /// Largest `|h(x) - h(y)| / d(x, y)` over distinct pairs at positive distance.
    pub measured_lipschitz: f64,
    pub max_deviation: f64,
}

/// Builds the `K`-Lipschitz approximation of `f` and re-checks both bounds
/// over all points and pairs.
pub fn lipschitz_regularize(
    space: &FiniteMetricSpace,
    f: &[f64],
    omega: &ModulusSpec,
    eps: f64,
) -> Result<Regularized> {
    if space.is_empty() {
        return Err(Error::InvalidMetric("empty space".into()));
    }
    if f.len() != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), got: f.len() });
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps must be positive"));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("f must be finite"));
    }
    let n_pts = space.len();
    for i in 0..n_pts {
        for j in 0..n_pts {
            let bound = omega.eval(space.dist(i, j));
            if f[i] - f[j] > bound * (1.0 + CHECK_RTOL) + CHECK_RTOL {
                return Err(Error::Precondition(format!("|f({i}) - f({j})| exceeds omega(d) = {bound}")));
            }
        }
    }
    let k = omega.lipschitz_constant(eps);
    if !k.is_finite() {
        return Err(Error::InfiniteLipschitz);
    }

    let fmin = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = (fmin / eps).floor() as i64 - 1;
    let hi = (fmax / eps).ceil() as i64 + 1;

    let values: Vec<f64> = (0..n_pts)
        .map(|x| {
            (lo..=hi)
                .filter_map(|n| {
                    let level = eps * n as f64;
                    (0..n_pts)
                        .filter(|&y| f[y] <= level)
                        .map(|y| space.dist(x, y))
                        .reduce(f64::min)
                        .map(|d| level + k * d)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut measured = 0.0f64;
    let mut max_dev = 0.0f64;
    let scale = fmax.abs().max(fmin.abs()).max(k * eps) + 1.0;
    for x in 0..n_pts {
        max_dev = max_dev.max((f[x] - values[x]).abs());
        for y in 0..n_pts {
            let d = space.dist(x, y);
            let diff = values[x] - values[y];
            if diff > k * d + CHECK_RTOL * scale {
                return Err(Error::Postcondition(format!("h is not {k}-Lipschitz at ({x},{y})")));
            }
            if d > 0.0 {
                measured = measured.max(diff / d);
            }
        }
    }
    if max_dev > k * eps + CHECK_RTOL * scale {
        return Err(Error::Postcondition(format!("max |f - h| = {max_dev} exceeds K eps = {}", k * eps)));
    }
    Ok(Regularized { values, lipschitz: k, measured_lipschitz: measured, max_deviation: max_dev })
}
