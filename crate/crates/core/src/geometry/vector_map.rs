use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::junta::{junta_error, minimal_junta, Target};
use crate::par;
use crate::quad::{
    finite_diff_influences, grid_cond_exp, read_grid_dump, Domain, Estimate, FnHandle, QuadratureSpec, DEFAULT_FD_STEP,
};
use crate::torus::CoordSet;

/// A map `F: [0,1]^N -> [0,1]^M` given by its components, with a declared
/// Lipschitz constant `L` in the sense `sum_m |F_m(x) - F_m(y)| <= L sum_n
/// |x_n - y_n|`. For `M = N` this is the Lipschitz constant between the
/// normalized Hamming metrics.
#[derive(Clone, Debug)]
pub struct VectorMap {
    pub name: String,
    n: usize,
    components: Vec<FnHandle>,
    pub lipschitz: f64,
    /// Free-form remarks, e.g. a rescaling applied to a published formula.
    pub note: Option<String>,
}

/// Named map families for spec files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapSpec {
    Identity {
        n: usize,
    },
    Sine {
        n: usize,
    },
    /// Components read from box-grid dumps, one file per component.
    Grid {
        paths: Vec<String>,
        lipschitz: f64,
    },
    Random {
        n: usize,
        m: usize,
        seed: u64,
    },
}

impl VectorMap {
    pub fn new(name: impl Into<String>, components: Vec<FnHandle>, lipschitz: f64) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::param("a map needs at least one component"))?;
        let n = first.dim();
        for c in &components {
            if c.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.dim() });
            }
            if c.domain() != Domain::Cube {
                return Err(Error::WrongDomain { expected: "cube" });
            }
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::param("declared Lipschitz constant must be positive"));
        }
        Ok(Self { name: name.into(), n, components, lipschitz, note: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// `alpha = M / N`.
    pub fn alpha(&self) -> f64 {
        self.m() as f64 / self.n as f64
    }

    pub fn components(&self) -> &[FnHandle] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    /// The coordinate projections, `L = 1`.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("N must be at least 1"));
        }
        let comps = (0..n)
            .map(|i| {
                FnHandle::cube(n, move |x| x[i])
                    .with_gradient(move |_, g| {
                        g.fill(0.0);
                        g[i] = 1.0;
                    })
                    .with_support(CoordSet::new(n, [i]).expect("in range"))
            })
            .collect();
        Self::new("identity", comps, 1.0)
    }

    /// `(x_1, ..., x_{N-1}, (1 + sin(2 pi (x_1 + ... + x_N))) / 2)`.
    ///
    /// Each partial derivative of the last component is at most `pi`, so the
    /// column sums give `L = 1 + pi`.
    pub fn sine(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("the sine family needs N >= 2"));
        }
        let mut comps: Vec<FnHandle> = Self::identity(n)?.components.into_iter().take(n - 1).collect();
        comps.push(
            FnHandle::cube(n, |x| 0.5 * (1.0 + (2.0 * PI * x.iter().sum::<f64>()).sin()))
                .with_gradient(|x, g| g.fill(PI * (2.0 * PI * x.iter().sum::<f64>()).cos())),
        );
        let mut map = Self::new("sine", comps, 1.0 + PI)?;
        map.note = Some("last component rescaled from [-1,1] to [0,1] as (1 + sin)/2".into());
        Ok(map)
    }

    pub fn from_spec(spec: &MapSpec, base: &Path) -> Result<Self> {
        match spec {
            MapSpec::Identity { n } => Self::identity(*n),
            MapSpec::Sine { n } => Self::sine(*n),
            MapSpec::Random { n, m, seed } => random_smooth_map(*n, *m, *seed),
            MapSpec::Grid { paths, lipschitz } => {
                let comps =
                    paths.iter().map(|p| read_grid_dump(&base.join(p), Domain::Cube)).collect::<Result<Vec<_>>>()?;
                Self::new("grid", comps, *lipschitz)
            }
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let spec: MapSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_spec(&spec, path.parent().unwrap_or(Path::new(".")))
    }

    /// Largest ratio `sum_m |F_m(x) - F_m(y)| / sum_n |x_n - y_n|` over
    /// random pairs, half of them at distance at most `1e-3`.
    pub fn sampled_lipschitz_ratio(&self, pairs: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for i in 0..pairs {
            let x: Vec<f64> = (0..self.n).map(|_| rng.random()).collect();
            let y: Vec<f64> = if i % 2 == 0 {
                (0..self.n).map(|_| rng.random()).collect()
            } else {
                x.iter().map(|&v| (v + 1e-3 * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0)).collect()
            };
            let dx: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
            if dx == 0.0 {
                continue;
            }
            let df: f64 = self.eval(&x).iter().zip(self.eval(&y)).map(|(a, b)| (a - b).abs()).sum();
            worst = worst.max(df / dx);
        }
        worst
    }

    /// Checks that every component stays in `[0,1]` at random points and at
    /// the corners (corners only for `N <= 12`).
    pub fn values_in_unit_interval(&self, samples: usize, seed: u64) -> bool {
        let ok = |x: &[f64]| self.eval(x).iter().all(|v| (0.0..=1.0).contains(v));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random_ok = (0..samples).all(|_| {
            let x: Vec<f64> = (0..self.n).map(|_| rng.random()).collect();
            ok(&x)
        });
        let corners_ok = self.n > 12
            || (0..1usize << self.n).all(|mask| {
                let x: Vec<f64> = (0..self.n).map(|i| ((mask >> i) & 1) as f64).collect();
                ok(&x)
            });
        random_ok && corners_ok
    }
}

/// The map `(x_1, ..., x_{N-1}, (1 + sin(2 pi (x_1 + ... + x_N))) / 2)`.
pub fn sine_family(n: usize) -> Result<VectorMap> {
    VectorMap::sine(n)
}

/// A random smooth map: each component is `1/2 + 1/2 sum_j w_j cos(2 pi k_j.x
/// + phi_j)` with two terms, `sum |w_j| <= 1` and `k_j` in `{-1,0,1}^N` with
/// at most two nonzero entries. `L` is the column bound
/// `max_n sum_m sup |d_n F_m|`, which also keeps the average gradient mass
/// within `L / alpha`.
pub fn random_smooth_map(n: usize, m: usize, seed: u64) -> Result<VectorMap> {
    if n == 0 || m == 0 {
        return Err(Error::param("N and M must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut column = vec![0.0f64; n];
    let mut comps = Vec::with_capacity(m);
    for _ in 0..m {
        let total: f64 = rng.random_range(0.2..1.0);
        let split: f64 = rng.random();
        let mut terms = Vec::new();
        for w in [total * split, total * (1.0 - split)] {
            let mut k = vec![0i32; n];
            for _ in 0..2 {
                k[rng.random_range(0..n)] = if rng.random::<bool>() { 1 } else { -1 };
            }
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            for (c, &kn) in column.iter_mut().zip(&k) {
                *c += PI * w * kn.abs() as f64;
            }
            terms.push((w, k, phi));
        }
        let t2 = terms.clone();
        let h = FnHandle::cube(n, move |x| {
            let s: f64 = terms.iter().map(|(w, k, phi)| w * (2.0 * PI * dot(k, x) + phi).cos()).sum();
            0.5 + 0.5 * s
        })
        .with_gradient(move |x, g| {
            g.fill(0.0);
            for (w, k, phi) in &t2 {
                let d = -PI * w * (2.0 * PI * dot(k, x) + phi).sin();
                for (gn, &kn) in g.iter_mut().zip(k) {
                    *gn += d * kn as f64;
                }
            }
        });
        comps.push(h);
    }
    let l = column.into_iter().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    VectorMap::new("random", comps, l)
}

fn dot(k: &[i32], x: &[f64]) -> f64 {
    k.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()
}

/// A junta approximation of one component.
#[derive(Clone, Debug)]
pub struct ComponentJunta {
    pub selected: bool,
    pub s: CoordSet,
    pub projection: FnHandle,
    pub l1_error: Estimate,
    /// `||grad F_m||_{L1}`.
    pub grad_mass: Estimate,
}

#[derive(Clone, Debug)]
pub struct JuntaMap {
    pub epsilon: f64,
    pub alpha: f64,
    pub lipschitz: f64,
    /// Selection threshold `2L / (alpha epsilon)` on the gradient mass.
    pub threshold: f64,
    /// Average gradient mass and its allowed bound `L / alpha`.
    pub mean_mass: Estimate,
    pub budget: f64,
    pub components: Vec<ComponentJunta>,
    /// `(1/M) sum_m ||F_m - G_m||_1`.
    pub total_error: Estimate,
}

impl JuntaMap {
    pub fn selected(&self) -> Vec<usize> {
        (0..self.components.len()).filter(|&m| self.components[m].selected).collect()
    }

    /// Largest `|S_m|`.
    pub fn q(&self) -> usize {
        self.components.iter().map(|c| c.s.len()).max().unwrap_or(0)
    }

    /// `|I| >= (1 - epsilon/2) M`.
    pub fn selection_bound_holds(&self) -> bool {
        let m = self.components.len() as f64;
        self.selected().len() as f64 >= (1.0 - self.epsilon / 2.0) * m
    }

    /// Every `G_m` is supported in `S_m`.
    pub fn supports_hold(&self) -> bool {
        self.components.iter().all(|c| c.projection.support().is_some_and(|sup| sup.is_subset(&c.s)))
    }

    pub fn report(&self) -> JuntaMapReport {
        JuntaMapReport {
            m: self.components.len(),
            alpha: self.alpha,
            lipschitz: self.lipschitz,
            epsilon: self.epsilon,
            threshold: self.threshold,
            mean_mass: self.mean_mass.value,
            budget: self.budget,
            selected: self.selected().iter().map(|m| m + 1).collect(),
            q: self.q(),
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| ComponentReport {
                    m: i + 1,
                    selected: c.selected,
                    s: c.s.one_based(),
                    grad_mass: c.grad_mass.value,
                    l1_error: c.l1_error.value,
                    half_width: c.l1_error.half_width,
                })
                .collect(),
            total_error: self.total_error.value,
            total_half_width: self.total_error.half_width,
            pass: self.total_error.upper() < self.epsilon && self.selection_bound_holds() && self.supports_hold(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentReport {
    pub m: usize,
    pub selected: bool,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub grad_mass: f64,
    pub l1_error: f64,
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JuntaMapReport {
    pub m: usize,
    pub alpha: f64,
    pub lipschitz: f64,
    pub epsilon: f64,
    pub threshold: f64,
    pub mean_mass: f64,
    pub budget: f64,
    pub selected: Vec<usize>,
    pub q: usize,
    pub components: Vec<ComponentReport>,
    pub total_error: f64,
    pub total_half_width: f64,
    pub pass: bool,
}

/// Approximates every component of `f` by a junta.
///
/// Components with gradient mass at most `2L/(alpha epsilon)` form the
/// selection `I` and are approximated to `epsilon/2` in L1; the others are
/// replaced by their means. Fails if the average gradient mass exceeds
/// `L/alpha` beyond its half-width, since then `f` is not `L`-Lipschitz.
pub fn hamming_junta_map(f: &VectorMap, epsilon: f64, quad: &QuadratureSpec) -> Result<JuntaMap> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::param(format!("epsilon must lie in (0, 2], got {epsilon}")));
    }
    let m = f.m();
    let masses =
        par::map_slice(&f.components, |h| finite_diff_influences(h, DEFAULT_FD_STEP, quad).map(|p| p.total_l1()))
            .into_iter()
            .collect::<Result<Vec<Estimate>>>()?;
    let mean_mass = masses.iter().copied().sum::<Estimate>().scale(1.0 / m as f64);
    let budget = f.lipschitz / f.alpha();
    if mean_mass.lower() > budget {
        return Err(Error::Precondition(format!(
            "average gradient mass {} exceeds L/alpha = {budget}; the map is not {}-Lipschitz",
            mean_mass.value, f.lipschitz
        )));
    }
    let threshold = 2.0 * f.lipschitz / (f.alpha() * epsilon);
    let n = f.n();
    let comps = (0..m)
        .map(|i| {
            let h = &f.components[i];
            let target = Target::Handle(h.clone());
            if masses[i].value <= threshold {
                let j = minimal_junta(&target, epsilon / 2.0, quad)?;
                Ok(ComponentJunta {
                    selected: true,
                    s: j.s,
                    projection: j.projection.to_handle(),
                    l1_error: j.l1_error,
                    grad_mass: masses[i],
                })
            } else {
                let empty = CoordSet::empty(n);
                Ok(ComponentJunta {
                    selected: false,
                    projection: grid_cond_exp(h, &empty, quad)?,
                    l1_error: junta_error(&target, &empty, quad)?,
                    s: empty,
                    grad_mass: masses[i],
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let total_error = comps.iter().map(|c| c.l1_error).sum::<Estimate>().scale(1.0 / m as f64);
    let map = JuntaMap {
        epsilon,
        alpha: f.alpha(),
        lipschitz: f.lipschitz,
        threshold,
        mean_mass,
        budget,
        components: comps,
        total_error,
    };
    if !map.selection_bound_holds() {
        return Err(Error::Postcondition(format!(
            "selected {} of {m} components, fewer than (1 - epsilon/2) M",
            map.selected().len()
        )));
    }
    Ok(map)
}
