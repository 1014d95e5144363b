//! Numerical integration and sampling for black-box functions on the torus
//! and the unit cube.
//!
//! Every estimator returns an [`Estimate`]: a value plus a half-width. For
//! Monte-Carlo schemes the half-width is a 99% normal confidence half-width
//! derived from the sample variance. For tensor grids it is the absolute
//! difference between the estimate on the requested grid and on the grid
//! with half as many points per axis.

mod grid;
mod handle;
mod regularize;
mod tent;

pub use grid::{grid_cond_exp, read_grid_dump, write_grid_dump, GridTable};
pub use handle::{Domain, FnHandle};
pub use regularize::{lipschitz_regularize, FiniteMetricSpace, ModulusSpec, Regularized};
pub use tent::{tent_map, tent_transfer};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::junta::InfluenceProfile;
use crate::par;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.5758293035489004;

pub const DEFAULT_GRID_POINTS: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 1 << 16;
/// Largest dimension for which `Scheme::Auto` resolves to a tensor grid.
pub const GRID_DIM_LIMIT: usize = 3;
/// Node budget used when a tensor grid is mandatory in higher dimension.
pub const GRID_NODE_BUDGET: usize = 1 << 22;
/// Hard cap on the size of a materialised grid table.
pub const GRID_NODE_CAP: usize = 1 << 26;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Scheme {
    /// Midpoint grid with 64 points per axis up to dimension 3, Monte-Carlo
    /// with 2^16 samples above.
    Auto,
    Grid {
        points_per_axis: usize,
    },
    MonteCarlo {
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub seed: u64,
    /// Multiplies the node count at resolution time.
    #[serde(default = "one")]
    pub node_factor: f64,
}

fn one() -> f64 {
    1.0
}

/// A quadrature rule bound to a dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolved {
    Grid { points_per_axis: usize },
    MonteCarlo { samples: usize },
}

impl QuadratureSpec {
    pub fn auto(seed: u64) -> Self {
        Self { scheme: Scheme::Auto, seed, node_factor: 1.0 }
    }

    pub fn grid(points_per_axis: usize, seed: u64) -> Self {
        Self { scheme: Scheme::Grid { points_per_axis }, seed, node_factor: 1.0 }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self { scheme: Scheme::MonteCarlo { samples }, seed, node_factor: 1.0 }
    }

    pub fn with_node_factor(mut self, factor: f64) -> Self {
        self.node_factor = factor;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.scheme {
            Scheme::Grid { points_per_axis: 0 } => return Err(Error::param("points_per_axis must be at least 1")),
            Scheme::MonteCarlo { samples: 0 } => return Err(Error::param("sample count must be at least 1")),
            _ => {}
        }
        if !(self.node_factor.is_finite() && self.node_factor > 0.0) {
            return Err(Error::param("node_factor must be positive"));
        }
        Ok(())
    }

    /// Binds the rule to a dimension, applying `node_factor`.
    pub fn resolve(&self, dim: usize) -> Result<Resolved> {
        self.validate()?;
        let base = match self.scheme {
            Scheme::Auto if dim <= GRID_DIM_LIMIT => Resolved::Grid { points_per_axis: DEFAULT_GRID_POINTS },
            Scheme::Auto => Resolved::MonteCarlo { samples: DEFAULT_MC_SAMPLES },
            Scheme::Grid { points_per_axis } => Resolved::Grid { points_per_axis },
            Scheme::MonteCarlo { samples } => Resolved::MonteCarlo { samples },
        };
        Ok(self.scale(base, dim))
    }

    /// Resolves to a tensor grid, as required by grid conditional expectations.
    /// `Auto` picks the largest per-axis count within [`GRID_NODE_BUDGET`]
    /// (capped at the default of 64).
    pub fn resolve_grid(&self, dim: usize) -> Result<usize> {
        self.validate()?;
        let base = match self.scheme {
            Scheme::Grid { points_per_axis } => points_per_axis,
            Scheme::Auto => budget_points(dim, GRID_NODE_BUDGET).min(DEFAULT_GRID_POINTS),
            Scheme::MonteCarlo { .. } => {
                return Err(Error::UnsupportedScheme("grid conditional expectation needs a tensor grid"))
            }
        };
        match self.scale(Resolved::Grid { points_per_axis: base }, dim) {
            Resolved::Grid { points_per_axis } => Ok(points_per_axis),
            Resolved::MonteCarlo { .. } => unreachable!(),
        }
    }

    fn scale(&self, r: Resolved, dim: usize) -> Resolved {
        if self.node_factor == 1.0 {
            return r;
        }
        match r {
            Resolved::Grid { points_per_axis } => {
                let per_axis = self.node_factor.powf(1.0 / dim.max(1) as f64);
                Resolved::Grid { points_per_axis: ((points_per_axis as f64 * per_axis).ceil() as usize).max(1) }
            }
            Resolved::MonteCarlo { samples } => {
                Resolved::MonteCarlo { samples: ((samples as f64 * self.node_factor).ceil() as usize).max(1) }
            }
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::auto(0)
    }
}

fn budget_points(dim: usize, budget: usize) -> usize {
    let mut n = (budget as f64).powf(1.0 / dim.max(1) as f64).floor() as usize;
    while n > 1 && n.checked_pow(dim as u32).is_none_or(|v| v > budget) {
        n -= 1;
    }
    n.max(2)
}

impl Resolved {
    pub fn node_count(&self, dim: usize) -> Result<usize> {
        match *self {
            Resolved::Grid { points_per_axis } => {
                points_per_axis.checked_pow(dim as u32).filter(|&c| c <= GRID_NODE_CAP).ok_or_else(|| {
                    Error::param(format!("grid with {points_per_axis} points per axis in dimension {dim} is too large"))
                })
            }
            Resolved::MonteCarlo { samples } => Ok(samples),
        }
    }

    /// Rule used for the half-width of grid estimates.
    pub fn coarse(&self) -> Option<Resolved> {
        match *self {
            Resolved::Grid { points_per_axis } if points_per_axis >= 2 => {
                Some(Resolved::Grid { points_per_axis: points_per_axis / 2 })
            }
            _ => None,
        }
    }
}

/// A point estimate together with its half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, half_width: 0.0 };

    pub fn exact(value: f64) -> Self {
        Self { value, half_width: 0.0 }
    }

    pub fn upper(&self) -> f64 {
        self.value + self.half_width
    }

    pub fn lower(&self) -> f64 {
        self.value - self.half_width
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { value: self.value * c, half_width: self.half_width * c.abs() }
    }

    /// Pushes the interval through a non-decreasing map on `[0, inf)`.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Self {
        let v = f(self.value.max(0.0));
        let hi = f(self.upper().max(0.0));
        let lo = f(self.lower().max(0.0));
        Self { value: v, half_width: (hi - v).max(v - lo).max(0.0) }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, half_width: self.half_width + o.half_width }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::ZERO, |a, b| a + b)
    }
}

/// Raw first and second moments of `k` integrands over the nodes of a rule.
#[derive(Clone, Debug)]
pub(crate) struct Moments {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub count: usize,
}

/// Writes the coordinates of node `i` of a tensor grid into `x`.
pub(crate) fn grid_node(mut i: usize, n: usize, x: &mut [f64]) {
    let h = 1.0 / n as f64;
    for xi in x.iter_mut().rev() {
        *xi = ((i % n) as f64 + 0.5) * h;
        i /= n;
    }
}

/// Iterates the nodes `range` of a rule, calling `visit` with each point.
pub(crate) fn for_nodes(
    dim: usize,
    rule: Resolved,
    seed: u64,
    range: std::ops::Range<usize>,
    mut visit: impl FnMut(usize, &[f64]),
) {
    let mut x = vec![0.0; dim];
    match rule {
        Resolved::Grid { points_per_axis } => {
            for i in range {
                grid_node(i, points_per_axis, &mut x);
                visit(i, &x);
            }
        }
        Resolved::MonteCarlo { .. } => {
            // Counter-based: each sample owns a fixed window of the stream.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(range.start as u128 * dim as u128 * 2);
            for i in range {
                for xi in x.iter_mut() {
                    *xi = rng.random::<f64>();
                }
                visit(i, &x);
            }
        }
    }
}

/// Computes the means and variances of the `k` outputs of `f` over the nodes
/// of `rule`. Chunk sums are reduced in a fixed order.
pub(crate) fn moments<F>(dim: usize, rule: Resolved, seed: u64, k: usize, f: F) -> Result<Moments>
where
    F: Fn(&[f64], &mut [f64]) + Sync + Send,
{
    let count = rule.node_count(dim)?;
    // Accumulate deviations from the first node's values so that constant
    // integrands give exact means and zero variance.
    let mut shift = vec![0.0; k];
    for_nodes(dim, rule, seed, 0..1, |_, x| f(x, &mut shift));
    if shift.iter().any(|v| !v.is_finite()) {
        let mut x = vec![0.0; dim];
        for_nodes(dim, rule, seed, 0..1, |_, p| x.copy_from_slice(p));
        return Err(Error::NonFinite(x));
    }
    let shift_ref = &shift;
    let parts = par::map_chunks(count, par::CHUNK, |range| {
        let mut s = vec![0.0; k];
        let mut ss = vec![0.0; k];
        let mut out = vec![0.0; k];
        let mut bad: Option<Vec<f64>> = None;
        for_nodes(dim, rule, seed, range, |_, x| {
            f(x, &mut out);
            for j in 0..k {
                let d = out[j] - shift_ref[j];
                if !d.is_finite() && bad.is_none() {
                    bad = Some(x.to_vec());
                }
                s[j] += d;
                ss[j] += d * d;
            }
        });
        (s, ss, bad)
    });
    let mut s = vec![0.0; k];
    let mut ss = vec![0.0; k];
    for (ps, pss, bad) in parts {
        if let Some(x) = bad {
            return Err(Error::NonFinite(x));
        }
        for j in 0..k {
            s[j] += ps[j];
            ss[j] += pss[j];
        }
    }
    let nf = count as f64;
    let mean = (0..k).map(|j| shift[j] + s[j] / nf).collect();
    let var = (0..k)
        .map(|j| {
            let m = s[j] / nf;
            (ss[j] / nf - m * m).max(0.0)
        })
        .collect();
    Ok(Moments { mean, var, count })
}

/// Estimates the integrals of the `k` outputs of `f` against the uniform
/// measure on the unit cube (equivalently, Haar measure on the torus).
pub fn integrate_many<F>(dim: usize, quad: &QuadratureSpec, k: usize, f: F) -> Result<Vec<Estimate>>
where
    F: Fn(&[f64], &mut [f64]) + Sync + Send,
{
    let rule = quad.resolve(dim)?;
    integrate_rule(dim, rule, quad.seed, k, f)
}

pub(crate) fn integrate_rule<F>(dim: usize, rule: Resolved, seed: u64, k: usize, f: F) -> Result<Vec<Estimate>>
where
    F: Fn(&[f64], &mut [f64]) + Sync + Send,
{
    let fine = moments(dim, rule, seed, k, &f)?;
    match rule {
        Resolved::MonteCarlo { .. } => {
            let n = fine.count as f64;
            Ok((0..k).map(|j| Estimate { value: fine.mean[j], half_width: Z99 * (fine.var[j] / n).sqrt() }).collect())
        }
        Resolved::Grid { .. } => {
            let coarse = match rule.coarse() {
                Some(c) => Some(moments(dim, c, seed, k, &f)?),
                None => None,
            };
            Ok((0..k)
                .map(|j| Estimate {
                    value: fine.mean[j],
                    half_width: match &coarse {
                        Some(c) => (fine.mean[j] - c.mean[j]).abs(),
                        None => fine.mean[j].abs(),
                    },
                })
                .collect())
        }
    }
}

/// Estimates the integral of `f` over the unit cube.
pub fn mean_est<F>(dim: usize, quad: &QuadratureSpec, f: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    Ok(integrate_many(dim, quad, 1, |x, out| out[0] = f(x))?[0])
}

/// Estimates `mu{x : pred(x)}` for the uniform measure.
pub fn probability_est<P>(dim: usize, quad: &QuadratureSpec, pred: P) -> Result<Estimate>
where
    P: Fn(&[f64]) -> bool + Sync + Send,
{
    mean_est(dim, quad, |x| if pred(x) { 1.0 } else { 0.0 })
}

/// `(integral |h|^p)^(1/p)` with a half-width.
pub fn lp_norm_est(h: &FnHandle, p: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param(format!("p must be a finite number >= 1, got {p}")));
    }
    let moment = integrate_many(h.dim(), quad, 1, |x, out| out[0] = h.eval(x).abs().powf(p))?[0];
    if p == 1.0 {
        return Ok(Estimate { value: moment.value.max(0.0), half_width: moment.half_width });
    }
    Ok(moment.map_monotone(|m| m.powf(1.0 / p)))
}

/// Per-coordinate estimates of `integral |d_n h|` and `(integral |d_n h|^2)^(1/2)`.
///
/// Uses the handle's analytic gradient when present, central differences with
/// the given step otherwise. On the cube, nodes closer than one step to the
/// boundary use one-sided differences.
pub fn finite_diff_influences(h: &FnHandle, step: f64, quad: &QuadratureSpec) -> Result<InfluenceProfile> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("finite-difference step must be positive"));
    }
    let dim = h.dim();
    let ests = integrate_many(dim, quad, 2 * dim, |x, out| {
        let (abs1, sq) = out.split_at_mut(dim);
        gradient_at(h, x, step, abs1);
        for n in 0..dim {
            sq[n] = abs1[n] * abs1[n];
            abs1[n] = abs1[n].abs();
        }
    })?;
    let l1 = ests[..dim].iter().map(|e| Estimate { value: e.value.max(0.0), ..*e }).collect();
    let l2 = ests[dim..].iter().map(|e| e.map_monotone(f64::sqrt)).collect();
    Ok(InfluenceProfile::new(l1, Some(l2)))
}

/// Gradient of `h` at `x`: analytic when available, finite differences otherwise.
pub(crate) fn gradient_at(h: &FnHandle, x: &[f64], step: f64, out: &mut [f64]) {
    if h.gradient(x, out) {
        return;
    }
    let mut y = x.to_vec();
    for n in 0..x.len() {
        let xn = x[n];
        let (lo, hi) = match h.domain() {
            Domain::Torus => (xn - step, xn + step),
            Domain::Cube => {
                if xn - step < 0.0 {
                    (xn, xn + step)
                } else if xn + step > 1.0 {
                    (xn - step, xn)
                } else {
                    (xn - step, xn + step)
                }
            }
        };
        y[n] = hi;
        let f_hi = h.eval(&y);
        y[n] = lo;
        let f_lo = h.eval(&y);
        y[n] = xn;
        out[n] = (f_hi - f_lo) / (hi - lo);
    }
}
