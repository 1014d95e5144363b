//! Suite files: a JSON list of checks, each run on a batch of seeded random
//! polynomials over a parameter grid.
//!
//! ```json
//! {"checks": [{"check": "heat_l1", "polys": 200, "t": [0.01, 0.1]}]}
//! ```

use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::*;
use crate::par;
use crate::quad::Scheme;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    HeatL1,
    ReversePoincare,
    Hypercontractivity,
    PoincareJunta,
    SmoothedJunta,
    TriangleBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub check: CheckKind,
    pub polys: usize,
    #[serde(default = "default_dim")]
    pub max_dim: usize,
    #[serde(default = "default_degree")]
    pub max_degree: u32,
    #[serde(default = "default_terms")]
    pub terms: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "yes")]
    pub normalize: bool,
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default)]
    pub eta: Vec<f64>,
}

fn default_dim() -> usize {
    5
}
fn default_degree() -> u32 {
    3
}
fn default_terms() -> usize {
    6
}
fn default_scale() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: Option<Scheme>,
    pub checks: Vec<SuiteCheck>,
}

impl Suite {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let suite: Suite = serde_json::from_str(s)?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.checks {
            if c.max_dim == 0 || c.max_degree == 0 {
                return Err(Error::param("max_dim and max_degree must be at least 1"));
            }
            let needs_t = !matches!(c.check, CheckKind::PoincareJunta);
            if needs_t && c.t.is_empty() {
                return Err(Error::param(format!("check {:?} needs a non-empty t grid", c.check)));
            }
            let needs_eta = matches!(c.check, CheckKind::SmoothedJunta | CheckKind::TriangleBound);
            if needs_eta && c.eta.is_empty() {
                return Err(Error::param(format!("check {:?} needs a non-empty eta grid", c.check)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Task {
    check: usize,
    spec: RandomPolySpec,
    t: f64,
    eta: f64,
}

/// Runs every check of `suite`. Instances are generated from `seed`
/// (replacing the suite's own seed when given) and evaluated in parallel;
/// reports come back in suite order.
pub fn run_suite(suite: &Suite, seed: Option<u64>) -> Result<Vec<InequalityReport>> {
    suite.validate()?;
    let base = seed.unwrap_or(suite.seed);
    let mut tasks = Vec::new();
    for (ci, c) in suite.checks.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(base);
        rng.set_stream(ci as u64);
        for _ in 0..c.polys {
            let poly_seed = rng.next_u64();
            let n = rng.random_range(1..=c.max_dim);
            let degree = rng.random_range(1..=c.max_degree);
            let spec =
                RandomPolySpec { n, degree, scale: c.scale, seed: poly_seed, normalize: c.normalize, terms: c.terms };
            let ts = if c.t.is_empty() { vec![f64::NAN] } else { c.t.clone() };
            let etas = if c.eta.is_empty() { vec![f64::NAN] } else { c.eta.clone() };
            for &t in &ts {
                for &eta in &etas {
                    tasks.push(Task { check: ci, spec, t, eta });
                }
            }
        }
    }
    let scheme = suite.quadrature.unwrap_or(Scheme::Auto);
    par::map_slice(&tasks, |task| run_task(suite, task, scheme)).into_iter().collect()
}

fn run_task(suite: &Suite, task: &Task, scheme: Scheme) -> Result<InequalityReport> {
    let f = random_trigpoly(&task.spec)?;
    let quad = QuadratureSpec { scheme, seed: task.spec.seed, node_factor: 1.0 };
    let report = match suite.checks[task.check].check {
        CheckKind::HeatL1 => verify_heat_l1(&f, task.t, &quad)?,
        CheckKind::ReversePoincare => verify_reverse_poincare(&f, task.t)?,
        CheckKind::Hypercontractivity => verify_hypercontractivity(&f, task.t, &quad)?,
        CheckKind::PoincareJunta => {
            let mut rng = ChaCha8Rng::seed_from_u64(task.spec.seed);
            rng.set_stream(2);
            let s = CoordSet::new(f.dim(), (0..f.dim()).filter(|_| rng.random::<bool>()))?;
            verify_poincare_junta(&f, &s)?
        }
        CheckKind::SmoothedJunta => verify_smoothed_junta(&f, task.t, task.eta, &quad)?,
        CheckKind::TriangleBound => verify_triangle_bound(&f, task.t, task.eta, &quad)?,
    };
    Ok(report.with_instance(task.spec.degree, task.spec.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "checks": [
            {"check": "reverse_poincare", "polys": 5, "t": [0.01, 1.0]},
            {"check": "poincare_junta", "polys": 5},
            {"check": "heat_l1", "polys": 3, "max_dim": 3, "t": [0.05]}
        ]
    }"#;

    #[test]
    fn runs_in_order_and_deterministically() {
        let suite = Suite::from_json_str(SMALL).unwrap();
        let a = run_suite(&suite, Some(7)).unwrap();
        assert_eq!(a.len(), 10 + 5 + 3);
        assert!(a.iter().all(|r| r.pass), "{a:?}");
        assert_eq!(a[0].name, "reverse_poincare");
        assert_eq!(a[15].name, "heat_l1");
        let b = run_suite(&suite, Some(7)).unwrap();
        assert_eq!(a, b);
        let c = run_suite(&suite, Some(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn missing_grid_is_rejected() {
        assert!(Suite::from_json_str(r#"{"checks": [{"check": "heat_l1", "polys": 1}]}"#).is_err());
        assert!(Suite::from_json_str(r#"{"checks": [{"check": "smoothed_junta", "polys": 1, "t": [0.1]}]}"#).is_err());
        assert!(Suite::from_json_str(r#"{"checks": [{"check": "nope", "polys": 1}]}"#).is_err());
    }
}
