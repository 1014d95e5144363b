//! Junta extraction: influence profiles, the `(t, eta)` schedule, projection
//! onto the coordinates of large influence, and an exhaustive best-junta
//! oracle for small dimensions.
//!
//! Trigonometric polynomials go through the exact Fourier-side operators.
//! Black-box handles use finite-difference influences and grid conditional
//! expectations; [`Target`] hides the difference.

mod oracle;
mod schedule;

pub use oracle::{best_junta_oracle, OracleResult, ORACLE_SUBSET_LIMIT};
pub use schedule::{select_parameters, Mode, ParamSchedule};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{
    self, finite_diff_influences, grid_cond_exp, Estimate, FnHandle, GridTable, QuadratureSpec, Resolved,
    DEFAULT_FD_STEP,
};
use crate::torus::{CoordSet, TrigPoly};

/// Per-coordinate influences `||d_n f||_1` and optionally `||d_n f||_2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfluenceProfile {
    pub l1: Vec<Estimate>,
    pub l2: Option<Vec<Estimate>>,
}

impl InfluenceProfile {
    pub fn new(l1: Vec<Estimate>, l2: Option<Vec<Estimate>>) -> Self {
        Self { l1, l2 }
    }

    pub fn dim(&self) -> usize {
        self.l1.len()
    }

    /// `sum_n ||d_n f||_1`, i.e. the L1 gradient norm.
    pub fn total_l1(&self) -> Estimate {
        self.l1.iter().copied().sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            l1: self.l1.iter().map(|e| e.scale(c)).collect(),
            l2: self.l2.as_ref().map(|v| v.iter().map(|e| e.scale(c)).collect()),
        }
    }

    /// `{n : I_1(n) >= eta}`, counting a coordinate as at the threshold when
    /// its half-width reaches it. Coordinates of zero influence are never
    /// included, so `eta = 0` selects every coordinate `f` depends on.
    pub fn threshold(&self, eta: f64) -> CoordSet {
        self.threshold_ln(eta.ln())
    }

    /// [`InfluenceProfile::threshold`] with the threshold given as `ln eta`,
    /// for thresholds below the smallest positive `f64`.
    pub fn threshold_ln(&self, ln_eta: f64) -> CoordSet {
        let keep = |n: &usize| {
            let u = self.l1[*n].upper();
            u > 0.0 && u.ln() >= ln_eta
        };
        CoordSet::new(self.dim(), (0..self.dim()).filter(keep)).expect("in range")
    }
}

/// A function to be approximated.
#[derive(Clone, Debug)]
pub enum Target {
    Poly(TrigPoly),
    Handle(FnHandle),
}

impl From<TrigPoly> for Target {
    fn from(p: TrigPoly) -> Self {
        Target::Poly(p)
    }
}

impl From<FnHandle> for Target {
    fn from(h: FnHandle) -> Self {
        Target::Handle(h)
    }
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::Poly(p) => p.dim(),
            Target::Handle(h) => h.dim(),
        }
    }

    pub fn scaled(&self, c: f64) -> Target {
        match self {
            Target::Poly(p) => Target::Poly(p.scale(c)),
            Target::Handle(h) => Target::Handle(h.scaled(c)),
        }
    }

    pub fn influences(&self, quad: &QuadratureSpec) -> Result<InfluenceProfile> {
        match self {
            Target::Poly(p) => Ok(InfluenceProfile::new(
                p.partial_l1_norms(quad)?,
                Some(p.partial_l2_norms().into_iter().map(Estimate::exact).collect()),
            )),
            Target::Handle(h) => finite_diff_influences(h, DEFAULT_FD_STEP, quad),
        }
    }

    /// `||f - integral f||_2`; exact for polynomials, by quadrature otherwise.
    pub fn centered_l2(&self, quad: &QuadratureSpec) -> Result<f64> {
        match self {
            Target::Poly(p) => Ok(p.centered_l2_norm()),
            Target::Handle(h) => {
                let m = quad::integrate_many(h.dim(), quad, 2, |x, out| {
                    let v = h.eval(x);
                    out[0] = v;
                    out[1] = v * v;
                })?;
                Ok((m[1].value - m[0].value * m[0].value).max(0.0).sqrt())
            }
        }
    }

    pub fn projection(&self, s: &CoordSet, quad: &QuadratureSpec) -> Result<Projection> {
        match self {
            Target::Poly(p) => Ok(Projection::Poly(p.cond_exp(s)?)),
            Target::Handle(h) => Ok(Projection::Handle(grid_cond_exp(h, s, quad)?)),
        }
    }

    /// Prepares repeated evaluations of `||f - E_S f||_1` for many `S`.
    pub fn error_meter(&self, quad: &QuadratureSpec) -> Result<ErrorMeter> {
        match self {
            Target::Poly(p) => Ok(ErrorMeter::Poly(p.clone(), *quad)),
            Target::Handle(h) => {
                let n = quad.resolve_grid(h.dim())?;
                let fine = GridTable::sample(h, n)?;
                let coarse = match (Resolved::Grid { points_per_axis: n }).coarse() {
                    Some(Resolved::Grid { points_per_axis }) => Some(GridTable::sample(h, points_per_axis)?),
                    _ => None,
                };
                Ok(ErrorMeter::Grid { fine, coarse })
            }
        }
    }
}

/// `E_S f` in the representation of its source.
#[derive(Clone, Debug)]
pub enum Projection {
    Poly(TrigPoly),
    Handle(FnHandle),
}

impl Projection {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Projection::Poly(p) => p.eval(x),
            Projection::Handle(h) => h.eval(x),
        }
    }

    pub fn to_handle(&self) -> FnHandle {
        match self {
            Projection::Poly(p) => p.to_handle(),
            Projection::Handle(h) => h.clone(),
        }
    }

    /// Structural check that the projection depends only on `s`.
    pub fn depends_only_on(&self, s: &CoordSet) -> bool {
        match self {
            Projection::Poly(p) => p.depends_only_on(s),
            Projection::Handle(h) => h.support().is_some_and(|sup| sup.is_subset(s)),
        }
    }
}

/// Measures `||f - E_S f||_1`. For handles the grid tables are sampled once;
/// the half-width is the change against the half-resolution grid.
pub enum ErrorMeter {
    Poly(TrigPoly, QuadratureSpec),
    Grid { fine: GridTable, coarse: Option<GridTable> },
}

impl ErrorMeter {
    pub fn error(&self, s: &CoordSet) -> Result<Estimate> {
        match self {
            ErrorMeter::Poly(p, quad) => p.sub(&p.cond_exp(s)?)?.lp_norm(1.0, quad),
            ErrorMeter::Grid { fine, coarse } => {
                let value = fine.mean_abs_diff(&fine.cond_exp(s)?)?;
                let half_width = match coarse {
                    Some(c) => (value - c.mean_abs_diff(&c.cond_exp(s)?)?).abs(),
                    None => value,
                };
                Ok(Estimate { value, half_width })
            }
        }
    }
}

/// `||f - E_S f||_1` with a half-width.
pub fn junta_error(f: &Target, s: &CoordSet, quad: &QuadratureSpec) -> Result<Estimate> {
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: s.dim() });
    }
    f.error_meter(quad)?.error(s)
}

/// The result of an extraction.
#[derive(Clone, Debug)]
pub struct JuntaApproximation {
    pub s: CoordSet,
    /// `E_S f` in the units of the input.
    pub projection: Projection,
    /// Measured `||f - E_S f||_1` in the units of the input.
    pub l1_error: Estimate,
    pub schedule: ParamSchedule,
    /// Factor `c >= 1` the input was divided by before thresholding.
    pub rescaling: f64,
    /// Influences of the input (not rescaled).
    pub influences: InfluenceProfile,
}

impl JuntaApproximation {
    /// The error of the rescaled input `f / c`, the quantity the schedule's
    /// guarantees refer to.
    pub fn normalized_error(&self) -> Estimate {
        self.l1_error.scale(1.0 / self.rescaling)
    }

    pub fn report(&self) -> JuntaReport {
        let certified = self.schedule.mode == Mode::Certified;
        JuntaReport {
            s: self.s.one_based(),
            eta: self.schedule.eta(),
            log10_eta: self.schedule.log10_eta(),
            t: self.schedule.t,
            epsilon: self.schedule.epsilon,
            mode: self.schedule.mode,
            l1_error: self.l1_error.value,
            half_width: self.l1_error.half_width,
            size_bound: self.schedule.size_bound(),
            log10_size_bound: self.schedule.log10_size_bound(),
            rescaling: self.rescaling,
            normalized_l1_error: self.normalized_error().value,
            certified_bound: certified.then(|| self.schedule.certified_bound()),
        }
    }
}

/// Serializable summary of a [`JuntaApproximation`]. `S` is one-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JuntaReport {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub eta: f64,
    pub log10_eta: f64,
    pub t: f64,
    pub epsilon: f64,
    pub mode: Mode,
    pub l1_error: f64,
    pub half_width: f64,
    /// `1/eta`, or `None` when it overflows.
    pub size_bound: Option<f64>,
    pub log10_size_bound: f64,
    pub rescaling: f64,
    pub normalized_l1_error: f64,
    /// `2 sqrt(2t) + t^-a eta^b`, reported in certified mode.
    pub certified_bound: Option<f64>,
}

/// Rescaling factor `c = max(||grad f||_{L1}, ||f - integral f||_2)` when
/// that exceeds 1, else 1. The gradient norm enters through the lower end of
/// its estimate, so quadrature noise alone never triggers a rescale.
pub fn rescaling_factor(grad_l1: Estimate, centered_l2: f64) -> f64 {
    grad_l1.lower().max(centered_l2).max(1.0)
}

/// Extracts a junta for `f` under `schedule`.
///
/// Inputs outside the normalized class are divided by the factor from
/// [`rescaling_factor`]; errors are reported in the input's units.
///
/// Certified mode thresholds at the schedule's `eta`. Empirical mode raises
/// `eta` through the distinct influence values and keeps the largest one whose
/// set meets `||f/c - E_S f/c||_1 + half_width < epsilon`.
pub fn extract_junta(f: &Target, schedule: &ParamSchedule, quad: &QuadratureSpec) -> Result<JuntaApproximation> {
    let influences = f.influences(quad)?;
    let c = rescaling_factor(influences.total_l1(), f.centered_l2(quad)?);
    let normalized = influences.scale(1.0 / c);
    let meter = f.error_meter(quad)?;
    let mut schedule = schedule.clone();
    let (s, l1_error) = match schedule.mode {
        Mode::Certified => {
            let s = normalized.threshold_ln(schedule.ln_eta);
            let err = meter.error(&s)?;
            (s, err)
        }
        Mode::Empirical => {
            let (eta, s, err) = empirical_search(&normalized, &meter, c * schedule.epsilon)?;
            schedule = schedule.with_eta(eta);
            (s, err)
        }
    };
    let projection = f.projection(&s, quad)?;
    Ok(JuntaApproximation { s, projection, l1_error, schedule, rescaling: c, influences })
}

/// Empirical extraction against an absolute error target in the units of
/// `f`, without rescaling.
pub fn minimal_junta(f: &Target, max_error: f64, quad: &QuadratureSpec) -> Result<JuntaApproximation> {
    if max_error.is_nan() || max_error <= 0.0 {
        return Err(Error::param("target error must be positive"));
    }
    let influences = f.influences(quad)?;
    let meter = f.error_meter(quad)?;
    let (eta, s, l1_error) = empirical_search(&influences, &meter, max_error)?;
    let epsilon = max_error.min(2.0);
    let schedule = select_parameters(epsilon, Mode::Empirical)?.with_eta(eta);
    let projection = f.projection(&s, quad)?;
    Ok(JuntaApproximation { s, projection, l1_error, schedule, rescaling: 1.0, influences })
}

/// Scans thresholds from above. Returns the first `(eta, S, error)` with
/// `error.upper() < goal`; the full coordinate set always qualifies.
fn empirical_search(profile: &InfluenceProfile, meter: &ErrorMeter, goal: f64) -> Result<(f64, CoordSet, Estimate)> {
    let mut levels: Vec<f64> = profile.l1.iter().map(Estimate::upper).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let top = levels.first().copied().unwrap_or(0.0);
    // Just above every influence: S is empty.
    let above = if top > 0.0 { top * (1.0 + 1e-9) } else { f64::MIN_POSITIVE };
    let mut candidates = vec![above];
    candidates.extend(levels.into_iter().filter(|&l| l > 0.0));
    for eta in candidates {
        let s = profile.threshold(eta);
        let err = meter.error(&s)?;
        if err.upper() < goal {
            return Ok((eta, s, err));
        }
    }
    // Only reachable through quadrature noise on zero-influence coordinates:
    // fall back to the full set, whose error is exactly zero.
    let full = CoordSet::full(profile.dim());
    let err = meter.error(&full)?;
    Ok((0.0, full, err))
}
