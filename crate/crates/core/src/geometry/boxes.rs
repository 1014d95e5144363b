use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::junta::{minimal_junta, Target};
use crate::quad::{probability_est, FnHandle, GridTable, QuadratureSpec};
use crate::torus::CoordSet;

/// Closed interval `[lo, hi]` inside `[0,1]`. Serialized as `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Distance from `t` to the interval.
    pub fn gap_to(&self, t: f64) -> f64 {
        (self.lo - t).max(t - self.hi).max(0.0)
    }

    /// Distance between two intervals.
    pub fn gap(&self, other: &Interval) -> f64 {
        (self.lo - other.hi).max(other.lo - self.hi).max(0.0)
    }
}

/// A finite union of axis-aligned boxes in `[0,1]^N`. Serialized as a list
/// of boxes, each a list of `[lo, hi]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxSet {
    boxes: Vec<Vec<Interval>>,
}

impl BoxSet {
    pub fn new(boxes: Vec<Vec<Interval>>) -> Result<Self> {
        let s = Self { boxes };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.boxes.first().map(Vec::len).ok_or_else(|| Error::param("a box set needs a box"))?;
        if dim == 0 {
            return Err(Error::param("boxes need at least one coordinate"));
        }
        for b in &self.boxes {
            if b.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: b.len() });
            }
            if let Some(i) = b.iter().find(|i| !(0.0 <= i.lo && i.lo <= i.hi && i.hi <= 1.0)) {
                return Err(Error::param(format!("interval [{}, {}] is not inside [0,1]", i.lo, i.hi)));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let b: BoxSet = serde_json::from_str(s)?;
        b.validate()?;
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].len()
    }

    pub fn boxes(&self) -> &[Vec<Interval>] {
        &self.boxes
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.iter().zip(x).all(|(i, &t)| i.lo <= t && t <= i.hi))
    }

    /// `dist_inf(x, A)`.
    pub fn dist_inf(&self, x: &[f64]) -> f64 {
        self.boxes
            .iter()
            .map(|b| b.iter().zip(x).map(|(i, &t)| i.gap_to(t)).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact `inf { d_inf(x, y) : x in self, y in other }`.
    pub fn linf_distance(&self, other: &BoxSet) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self
            .boxes
            .iter()
            .flat_map(|a| other.boxes.iter().map(move |b| a.iter().zip(b).map(|(i, j)| i.gap(j)).fold(0.0, f64::max)))
            .fold(f64::INFINITY, f64::min))
    }

    /// `x -> min(delta, dist_inf(x, self))` on the cube.
    pub fn clipped_distance(&self, delta: f64) -> FnHandle {
        let a = self.clone();
        FnHandle::cube(self.dim(), move |x| a.dist_inf(x).min(delta))
    }
}

pub fn linf_distance(a: &BoxSet, b: &BoxSet) -> Result<f64> {
    a.linf_distance(b)
}

/// Level sets `A' = {g <= lo}`, `B' = {g >= hi}` of `g = E_S f`, stored as
/// the grid table of `g` over the cells of the `S` coordinates.
#[derive(Clone, Debug)]
pub struct IsoSets {
    pub s: CoordSet,
    pub g: GridTable,
    pub lo: f64,
    pub hi: f64,
}

impl IsoSets {
    pub fn in_a(&self, x: &[f64]) -> bool {
        self.g.lookup(x) <= self.lo
    }

    pub fn in_b(&self, x: &[f64]) -> bool {
        self.g.lookup(x) >= self.hi
    }

    /// Lower bound on `d_inf(A', B')` from the closed cells of the grid, or
    /// `None` if either set is empty.
    pub fn separation(&self) -> Option<f64> {
        let axes: Vec<usize> = self.s.iter().collect();
        let n = self.g.points_per_axis();
        let d = axes.len();
        let count = n.pow(d as u32);
        let mut idx = vec![0usize; self.g.dim()];
        let mut label = vec![0u8; count];
        for (c, l) in label.iter_mut().enumerate() {
            let mut rem = c;
            for &a in axes.iter().rev() {
                idx[a] = rem % n;
                rem /= n;
            }
            let v = self.g.at(&idx);
            *l = u8::from(v <= self.lo) | (u8::from(v >= self.hi) << 1);
        }
        if !label.iter().any(|&l| l & 1 != 0) || !label.iter().any(|&l| l & 2 != 0) {
            return None;
        }
        let r = chebyshev_gap(&label, n, d);
        Some(r.saturating_sub(1) as f64 / n as f64)
    }
}

/// Smallest Chebyshev index distance from a cell with bit 1 to a cell with
/// bit 2, by breadth-first search over king moves.
fn chebyshev_gap(label: &[u8], n: usize, d: usize) -> usize {
    let mut dist = vec![usize::MAX; label.len()];
    let mut queue = VecDeque::new();
    for (c, &l) in label.iter().enumerate() {
        if l & 1 != 0 {
            if l & 2 != 0 {
                return 0;
            }
            dist[c] = 0;
            queue.push_back(c);
        }
    }
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut o| {
            (0..d)
                .map(|_| {
                    let v = (o % 3) as i64 - 1;
                    o /= 3;
                    v
                })
                .collect()
        })
        .filter(|o: &Vec<i64>| o.iter().any(|&v| v != 0))
        .collect();
    let mut coords = vec![0i64; d];
    while let Some(c) = queue.pop_front() {
        let mut rem = c;
        for k in (0..d).rev() {
            coords[k] = (rem % n) as i64;
            rem /= n;
        }
        'next: for o in &offsets {
            let mut j = 0usize;
            for k in 0..d {
                let v = coords[k] + o[k];
                if v < 0 || v >= n as i64 {
                    continue 'next;
                }
                j = j * n + v as usize;
            }
            if dist[j] == usize::MAX {
                dist[j] = dist[c] + 1;
                if label[j] & 2 != 0 {
                    return dist[j];
                }
                queue.push_back(j);
            }
        }
    }
    usize::MAX
}

/// Measured outcome of [`separated_junta_sets`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoReport {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub delta: f64,
    pub epsilon: f64,
    pub input_distance: f64,
    pub junta_target: f64,
    pub junta_error: f64,
    pub junta_half_width: f64,
    /// Levels defining `A'` and `B'`.
    pub level_lo: f64,
    pub level_hi: f64,
    pub loss_a: f64,
    pub loss_a_half_width: f64,
    pub loss_b: f64,
    pub loss_b_half_width: f64,
    pub separation: Option<f64>,
    pub pass: bool,
}

/// Replaces separated box sets `A`, `B` by sets determined by few coordinates.
///
/// With `f = min(delta, dist_inf(., A))` and `S` from a junta extraction with
/// `||f - E_S f||_1 < eps^2 / 8`, returns `A' = {E_S f <= eps/4}` and
/// `B' = {E_S f >= delta - eps/4}`. Markov's inequality bounds both losses
/// `mu(A \ A')` and `mu(B \ B')` by `eps/2`, and since `E_S f` is 1-Lipschitz
/// the sets are at distance at least `delta - eps/2` (less one grid cell).
/// Losses are Monte-Carlo estimates with `samples` points.
pub fn separated_junta_sets(
    a: &BoxSet,
    b: &BoxSet,
    delta: f64,
    epsilon: f64,
    quad: &QuadratureSpec,
    samples: usize,
) -> Result<(IsoSets, IsoReport)> {
    if !(delta > 0.0 && epsilon > 0.0) {
        return Err(Error::param("delta and epsilon must be positive"));
    }
    if delta <= epsilon / 2.0 {
        return Err(Error::param("delta must exceed epsilon / 2 for the level sets to be disjoint"));
    }
    let dist = a.linf_distance(b)?;
    if dist < delta - 1e-12 {
        return Err(Error::Precondition(format!("sets are at distance {dist}, below delta = {delta}")));
    }
    let f = a.clipped_distance(delta);
    let target = epsilon * epsilon / 8.0;
    let j = minimal_junta(&Target::Handle(f.clone()), target, quad)?;
    let n = quad.resolve_grid(a.dim())?;
    let g = GridTable::sample(&f, n)?.cond_exp(&j.s)?;
    let sets = IsoSets { s: j.s.clone(), g, lo: epsilon / 4.0, hi: delta - epsilon / 4.0 };
    let mc = QuadratureSpec::monte_carlo(samples, quad.seed);
    let loss_a = probability_est(a.dim(), &mc, |x| a.contains(x) && !sets.in_a(x))?;
    let loss_b = probability_est(a.dim(), &mc.with_seed(quad.seed ^ 1), |x| b.contains(x) && !sets.in_b(x))?;
    let separation = sets.separation();
    let pass = loss_a.upper() < epsilon && loss_b.upper() < epsilon && separation.is_none_or(|s| s >= delta - epsilon);
    let report = IsoReport {
        s: j.s.one_based(),
        delta,
        epsilon,
        input_distance: dist,
        junta_target: target,
        junta_error: j.l1_error.value,
        junta_half_width: j.l1_error.half_width,
        level_lo: sets.lo,
        level_hi: sets.hi,
        loss_a: loss_a.value,
        loss_a_half_width: loss_a.half_width,
        loss_b: loss_b.value,
        loss_b_half_width: loss_b.half_width,
        separation,
        pass,
    };
    Ok((sets, report))
}

/// Draws a pair of box sets in `[0,1]^n` with between 1 and `max_boxes`
/// boxes each and `linf_distance >= min_delta`, by rejection.
pub fn random_box_pair(n: usize, max_boxes: usize, min_delta: f64, seed: u64) -> Result<(BoxSet, BoxSet)> {
    if n == 0 || max_boxes == 0 || !(0.0..1.0).contains(&min_delta) {
        return Err(Error::param("need n >= 1, max_boxes >= 1 and min_delta in [0,1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(1..=max_boxes);
        let boxes = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let len: f64 = rng.random_range(0.05..0.4);
                        let lo: f64 = rng.random_range(0.0..1.0 - len);
                        Interval::new(lo, lo + len)
                    })
                    .collect()
            })
            .collect();
        BoxSet { boxes }
    };
    for _ in 0..100_000 {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        if a.linf_distance(&b)? >= min_delta {
            return Ok((a, b));
        }
    }
    Err(Error::param(format!("no box pair at distance {min_delta} found")))
}

/// Returns `true` if `x -> dist_inf(x, A)` clipped at `delta` is 1-Lipschitz
/// for `d_inf` on `pairs` random pairs.
pub fn clipped_distance_is_contraction(a: &BoxSet, delta: f64, pairs: usize, seed: u64) -> bool {
    let f = a.clipped_distance(delta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pairs).all(|_| {
        let x: Vec<f64> = (0..a.dim()).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..a.dim()).map(|_| rng.random()).collect();
        let d = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        (f.eval(&x) - f.eval(&y)).abs() <= d + 1e-12
    })
}
