use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::CoordSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `T^N = (R/Z)^N`; evaluators are 1-periodic in every coordinate.
    Torus,
    /// `[0, 1]^N` with Lebesgue measure.
    Cube,
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::Torus => "torus",
            Domain::Cube => "cube",
        }
    }
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Gradient = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A black-box real function on the torus or the cube.
#[derive(Clone)]
pub struct FnHandle {
    dim: usize,
    domain: Domain,
    eval: Evaluator,
    grad: Option<Gradient>,
    support: Option<CoordSet>,
}

impl fmt::Debug for FnHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnHandle")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("gradient", &self.grad.is_some())
            .field("support", &self.support)
            .finish()
    }
}

impl FnHandle {
    /// Wraps an evaluator without any periodicity check.
    pub fn new<F>(dim: usize, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert!(dim >= 1, "FnHandle needs dimension >= 1");
        Self { dim, domain, eval: Arc::new(f), grad: None, support: None }
    }

    pub fn cube<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(dim, Domain::Cube, f)
    }

    /// Wraps a torus evaluator, spot-checking 1-periodicity at a few points.
    pub fn torus<F>(dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let h = Self::new(dim, Domain::Torus, f);
        h.check_periodic()?;
        Ok(h)
    }

    pub fn constant(dim: usize, domain: Domain, c: f64) -> Self {
        let mut h = Self::new(dim, domain, move |_| c);
        h.grad = Some(Arc::new(|_, g: &mut [f64]| g.fill(0.0)));
        h.support = Some(CoordSet::empty(dim));
        h
    }

    pub fn with_gradient<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(g));
        self
    }

    /// Records a set of coordinates the function is known to depend on only.
    pub fn with_support(mut self, support: CoordSet) -> Self {
        self.support = Some(support);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn support(&self) -> Option<&CoordSet> {
        self.support.as_ref()
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Writes the analytic gradient into `out`; returns `false` if there is none.
    #[inline]
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) -> bool {
        match &self.grad {
            Some(g) => {
                g(x, out);
                true
            }
            None => false,
        }
    }

    pub fn scaled(&self, c: f64) -> FnHandle {
        let f = self.eval.clone();
        let mut h = FnHandle::new(self.dim, self.domain, move |x| c * f(x));
        if let Some(g) = self.grad.clone() {
            h.grad = Some(Arc::new(move |x, out: &mut [f64]| {
                g(x, out);
                out.iter_mut().for_each(|v| *v *= c);
            }));
        }
        h.support = self.support.clone();
        h
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &FnHandle) -> Result<FnHandle> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.domain != other.domain {
            return Err(Error::WrongDomain { expected: self.domain.name() });
        }
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut h = FnHandle::new(self.dim, self.domain, move |x| f(x) - g(x));
        h.support = match (&self.support, &other.support) {
            (Some(a), Some(b)) => Some(a.union(b)),
            _ => None,
        };
        Ok(h)
    }

    fn check_periodic(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
        let mut x = vec![0.0; self.dim];
        for _ in 0..4 {
            x.iter_mut().for_each(|v| *v = rng.random::<f64>());
            let base = self.eval(&x);
            for n in 0..self.dim {
                let keep = x[n];
                x[n] = keep + 1.0;
                let up = self.eval(&x);
                x[n] = keep - 1.0;
                let down = self.eval(&x);
                x[n] = keep;
                let tol = 1e-9 * (1.0 + base.abs());
                if (up - base).abs() > tol || (down - base).abs() > tol {
                    return Err(Error::NotPeriodic(n));
                }
            }
        }
        Ok(())
    }

    /// Numerically checks that the function does not depend on coordinates
    /// outside `s`, by resampling those coordinates at random points.
    pub fn depends_only_on(&self, s: &CoordSet, trials: usize, seed: u64, tol: f64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; self.dim];
        for _ in 0..trials {
            x.iter_mut().for_each(|v| *v = rng.random::<f64>());
            let base = self.eval(&x);
            for n in (0..self.dim).filter(|n| !s.contains(*n)) {
                x[n] = rng.random::<f64>();
            }
            if (self.eval(&x) - base).abs() > tol {
                return false;
            }
        }
        true
    }
}
