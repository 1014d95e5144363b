//! Trigonometric polynomials on the torus `T^N = (R/Z)^N` and the exact
//! Fourier-side operators acting on them.
//!
//! A [`TrigPoly`] stores `f(x) = sum_k c_k e^{2 pi i k.x}` with both `k` and
//! `-k` present and `c_{-k} = conj(c_k)`, so `f` is real-valued. Every
//! operation returns a polynomial in canonical form: Hermitian symmetric,
//! real mean, and no coefficients of magnitude below [`PRUNE_BELOW`].

mod coords;
mod gaussian;
mod io;

pub use coords::{CoordSet, FreqVector};
pub use gaussian::{heat_gaussian, GaussianHeat};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::quad::{self, lp_norm_est, Estimate, FnHandle, QuadratureSpec, Resolved};

/// Coefficients smaller than this in magnitude are dropped.
pub const PRUNE_BELOW: f64 = 1e-15;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<FreqVector, Complex64>,
}

/// Sup of `sum_n |d_n f|` over the nodes of a quadrature rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzEstimate {
    /// A lower bound on the true Lipschitz constant for the l-infinity metric.
    pub value: f64,
    pub nodes: usize,
    pub rule: Resolved,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "TrigPoly needs dimension >= 1");
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.coeffs.insert(FreqVector::zero(dim), Complex64::new(c, 0.0));
        p.canonicalize()
    }

    /// `amp * cos(2 pi k.x)`.
    pub fn cosine(k: &[i32], amp: f64) -> Result<Self> {
        let k = FreqVector::new(k.to_vec())?;
        let dim = k.dim();
        if k.is_zero() {
            return Ok(Self::constant(dim, amp));
        }
        let mut p = Self::zero(dim);
        p.coeffs.insert(k.neg(), Complex64::new(amp / 2.0, 0.0));
        p.coeffs.insert(k, Complex64::new(amp / 2.0, 0.0));
        Ok(p.canonicalize())
    }

    /// `amp * sin(2 pi k.x)`.
    pub fn sine(k: &[i32], amp: f64) -> Result<Self> {
        let k = FreqVector::new(k.to_vec())?;
        let dim = k.dim();
        let mut p = Self::zero(dim);
        if k.is_zero() {
            return Ok(p);
        }
        p.coeffs.insert(k.neg(), Complex64::new(0.0, amp / 2.0));
        p.coeffs.insert(k, Complex64::new(0.0, -amp / 2.0));
        Ok(p.canonicalize())
    }

    /// Builds a polynomial from `(k, c_k)` pairs. A missing partner `-k` is
    /// filled with `conj(c_k)`; a present partner must be its conjugate.
    /// Repeated frequencies are rejected.
    pub fn from_coeffs(dim: usize, coeffs: impl IntoIterator<Item = (Vec<i32>, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("TrigPoly needs dimension >= 1"));
        }
        let mut given: BTreeMap<FreqVector, Complex64> = BTreeMap::new();
        for (k, c) in coeffs {
            if k.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: k.len() });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Parse(format!("non-finite coefficient at {k:?}")));
            }
            let k = FreqVector::new(k)?;
            if given.insert(k.clone(), c).is_some() {
                return Err(Error::Parse(format!("duplicate frequency {:?}", k.as_slice())));
            }
        }
        let mut coeffs = BTreeMap::new();
        for (k, &c) in &given {
            let partner = given.get(&k.neg()).copied();
            if let Some(p) = partner {
                let tol = 1e-12 * (1.0 + c.norm());
                if (p.conj() - c).norm() > tol {
                    return Err(Error::Parse(format!(
                        "coefficients at {:?} and its negative are not conjugate",
                        k.as_slice()
                    )));
                }
            } else {
                coeffs.insert(k.neg(), c.conj());
            }
            coeffs.insert(k.clone(), c);
        }
        Ok(Self { dim, coeffs }.canonicalize())
    }

    /// Restores Hermitian symmetry exactly and prunes tiny coefficients.
    fn canonicalize(self) -> Self {
        let dim = self.dim;
        let mut out = BTreeMap::new();
        for (k, &c) in &self.coeffs {
            if k.is_zero() {
                if c.re.abs() >= PRUNE_BELOW {
                    out.insert(k.clone(), Complex64::new(c.re, 0.0));
                }
                continue;
            }
            if !k.is_positive() {
                continue;
            }
            let partner = self.coeffs.get(&k.neg()).copied().unwrap_or(c.conj());
            let sym = (c + partner.conj()) * 0.5;
            if sym.norm() >= PRUNE_BELOW {
                out.insert(k.neg(), sym.conj());
                out.insert(k.clone(), sym);
            }
        }
        for (k, &c) in &self.coeffs {
            // Negative frequencies whose positive partner was never stored.
            if !k.is_zero() && !k.is_positive() && !self.coeffs.contains_key(&k.neg()) {
                let sym = c;
                if sym.norm() >= PRUNE_BELOW {
                    out.insert(k.neg(), sym.conj());
                    out.insert(k.clone(), sym);
                }
            }
        }
        Self { dim, coeffs: out }
    }

    /// Checks the canonical-form invariants.
    pub fn is_canonical(&self) -> bool {
        self.coeffs.iter().all(|(k, c)| {
            k.dim() == self.dim
                && c.norm() >= PRUNE_BELOW
                && if k.is_zero() { c.im == 0.0 } else { self.coeffs.get(&k.neg()) == Some(&c.conj()) }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored coefficients (both `k` and `-k` counted).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&FreqVector, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, k: &[i32]) -> Complex64 {
        self.coeffs.get(&FreqVector(k.to_vec())).copied().unwrap_or_default()
    }

    /// The mean `integral f`, i.e. the zero-frequency coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs.get(&FreqVector::zero(self.dim)).map_or(0.0, |c| c.re)
    }

    fn map_coeffs(&self, f: impl Fn(&FreqVector, Complex64) -> Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, &c)| (k.clone(), f(k, c))).collect();
        Self { dim: self.dim, coeffs }.canonicalize()
    }

    fn filter(&self, keep: impl Fn(&FreqVector) -> bool) -> Self {
        let coeffs = self.coeffs.iter().filter(|(k, _)| keep(k)).map(|(k, &c)| (k.clone(), c)).collect();
        Self { dim: self.dim, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn add(&self, other: &TrigPoly) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut coeffs = self.coeffs.clone();
        for (k, &c) in &other.coeffs {
            *coeffs.entry(k.clone()).or_default() += c;
        }
        Ok(Self { dim: self.dim, coeffs }.canonicalize())
    }

    pub fn sub(&self, other: &TrigPoly) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// `d_n f`: multiplies `c_k` by `2 pi i k_n`. `n` is zero-based.
    pub fn partial_derivative(&self, n: usize) -> Result<Self> {
        if n >= self.dim {
            return Err(Error::IndexOutOfRange { index: n, dim: self.dim });
        }
        Ok(self.map_coeffs(|k, c| c * Complex64::new(0.0, TWO_PI * k.as_slice()[n] as f64)))
    }

    /// `P_t f = exp(t Laplacian) f`: multiplies `c_k` by `exp(-4 pi^2 |k|^2 t)`.
    pub fn heat(&self, t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 || t.is_infinite() {
            return Err(Error::param(format!("heat time must be finite and >= 0, got {t}")));
        }
        Ok(self.map_coeffs(|k, c| c * (-4.0 * PI * PI * k.norm_sq() * t).exp()))
    }

    /// `E_S f`: keeps the frequencies with `k_n = 0` for every `n` outside `s`.
    pub fn cond_exp(&self, s: &CoordSet) -> Result<Self> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: s.dim() });
        }
        let outside: Vec<usize> = s.complement().iter().collect();
        Ok(self.filter(|k| outside.iter().all(|&n| k.as_slice()[n] == 0)))
    }

    /// `||f||_2` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||f - integral f||_2`.
    pub fn centered_l2_norm(&self) -> f64 {
        self.coeffs.iter().filter(|(k, _)| !k.is_zero()).map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(||d_n f||_2)_n`, exact.
    pub fn partial_l2_norms(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|n| {
                self.coeffs
                    .iter()
                    .map(|(k, c)| {
                        let m = TWO_PI * k.as_slice()[n] as f64;
                        m * m * c.norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// `(||d_n f||_1)_n` by quadrature on each partial derivative.
    pub fn partial_l1_norms(&self, quad: &QuadratureSpec) -> Result<Vec<Estimate>> {
        (0..self.dim).map(|n| self.partial_derivative(n)?.lp_norm(1.0, quad)).collect()
    }

    /// `(sum_n integral |d_n f|^p)^(1/p)` for `p` in `{1, 2}`. The `p = 2` case
    /// is exact; `p = 1` integrates each partial derivative numerically.
    pub fn grad_norm(&self, p: u32, quad: &QuadratureSpec) -> Result<Estimate> {
        match p {
            1 => Ok(self.partial_l1_norms(quad)?.into_iter().sum()),
            2 => Ok(Estimate::exact(self.grad_l2_norm())),
            _ => Err(Error::param(format!("grad_norm supports p = 1 or 2, got {p}"))),
        }
    }

    pub fn grad_l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|(k, c)| TWO_PI * TWO_PI * k.norm_sq() * c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(integral |f|^p)^(1/p)` by quadrature over the coordinates `f`
    /// actually depends on.
    pub fn lp_norm(&self, p: f64, quad: &QuadratureSpec) -> Result<Estimate> {
        let (small, _) = self.compress();
        lp_norm_est(&small.to_handle(), p, quad)
    }

    /// Estimates `sup_x sum_n |d_n f(x)|` over quadrature nodes.
    pub fn lipschitz_constant(&self, quad: &QuadratureSpec) -> Result<LipschitzEstimate> {
        let (small, _) = self.compress();
        let dim = small.dim;
        let rule = quad.resolve(dim)?;
        let nodes = rule.node_count(dim)?;
        let ev = small.evaluator();
        let parts = par::map_chunks(nodes, par::CHUNK, |range| {
            let mut g = vec![0.0; dim];
            let mut best = 0.0f64;
            quad::for_nodes(dim, rule, quad.seed, range, |_, x| {
                ev.grad(x, &mut g);
                best = best.max(g.iter().map(|v| v.abs()).sum());
            });
            best
        });
        let value = parts.into_iter().fold(0.0, f64::max);
        Ok(LipschitzEstimate { value, nodes, rule })
    }

    /// Coordinates carrying a nonzero frequency in some stored coefficient.
    pub fn active_coords(&self) -> CoordSet {
        CoordSet::new(self.dim, (0..self.dim).filter(|&n| self.coeffs.keys().any(|k| k.as_slice()[n] != 0)))
            .expect("in range")
    }

    /// True if `f` depends only on coordinates in `s` (frequency support check).
    pub fn depends_only_on(&self, s: &CoordSet) -> bool {
        self.active_coords().is_subset(s)
    }

    /// The same function written over its active coordinates only (dimension
    /// at least 1), together with those coordinates.
    pub fn compress(&self) -> (TrigPoly, CoordSet) {
        let active = self.active_coords();
        if active.len() == self.dim {
            return (self.clone(), active);
        }
        let idx: Vec<usize> = active.iter().collect();
        let dim = idx.len().max(1);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, &c)| {
                let mut kk: Vec<i32> = idx.iter().map(|&n| k.as_slice()[n]).collect();
                if kk.is_empty() {
                    kk.push(0);
                }
                (FreqVector(kk), c)
            })
            .collect();
        (TrigPoly { dim, coeffs }, active)
    }

    fn evaluator(&self) -> PolyEval {
        PolyEval::new(self)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.evaluator().eval(x)
    }

    /// Wraps the polynomial as a torus handle with its analytic gradient.
    pub fn to_handle(&self) -> FnHandle {
        let ev = Arc::new(self.evaluator());
        let g = ev.clone();
        FnHandle::new(self.dim, quad::Domain::Torus, move |x| ev.eval(x))
            .with_gradient(move |x, out| g.grad(x, out))
            .with_support(self.active_coords())
    }
}

/// Evaluation over the half-spectrum: `f(x) = c_0 + 2 sum_{k > 0} Re(c_k e(k.x))`.
struct PolyEval {
    mean: f64,
    terms: Vec<Term>,
}

struct Term {
    /// `(n, 2 pi k_n)` for the nonzero entries of `k`.
    freqs: Vec<(usize, f64)>,
    re: f64,
    im: f64,
}

impl PolyEval {
    fn new(p: &TrigPoly) -> Self {
        let terms = p
            .coeffs
            .iter()
            .filter(|(k, _)| k.is_positive())
            .map(|(k, c)| Term {
                freqs: k
                    .as_slice()
                    .iter()
                    .enumerate()
                    .filter(|(_, &kn)| kn != 0)
                    .map(|(n, &kn)| (n, TWO_PI * kn as f64))
                    .collect(),
                re: c.re,
                im: c.im,
            })
            .collect();
        Self { mean: p.mean(), terms }
    }

    #[inline]
    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let theta: f64 = t.freqs.iter().map(|&(n, w)| w * x[n]).sum();
            let (s, c) = theta.sin_cos();
            acc += t.re * c - t.im * s;
        }
        self.mean + 2.0 * acc
    }

    #[inline]
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for t in &self.terms {
            let theta: f64 = t.freqs.iter().map(|&(n, w)| w * x[n]).sum();
            let (s, c) = theta.sin_cos();
            let d = -2.0 * (t.re * s + t.im * c);
            for &(n, w) in &t.freqs {
                out[n] += w * d;
            }
        }
    }
}
