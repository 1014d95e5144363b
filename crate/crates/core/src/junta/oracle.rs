use crate::error::{Error, Result};
use crate::par;
use crate::quad::{Estimate, QuadratureSpec};
use crate::torus::CoordSet;

use super::Target;

/// Maximum number of subsets the oracle will enumerate.
pub const ORACLE_SUBSET_LIMIT: u128 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub s: CoordSet,
    pub error: Estimate,
    pub subsets: usize,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All subsets of `0..n` with at most `p` elements, by size then
/// lexicographically.
fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 0..=p.min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.clone());
            let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Minimizes `||f - E_S f||_1` over every `S` with `|S| <= p`. Ties go to
/// the earliest set in (size, lexicographic) order.
pub fn best_junta_oracle(f: &Target, p: usize, quad: &QuadratureSpec) -> Result<OracleResult> {
    let n = f.dim();
    let count: u128 = (0..=p.min(n)).map(|k| binomial(n, k)).sum();
    if count > ORACLE_SUBSET_LIMIT {
        return Err(Error::EnumerationGuard { count, limit: ORACLE_SUBSET_LIMIT });
    }
    let meter = f.error_meter(quad)?;
    let sets = subsets(n, p);
    let errors = par::map_slice(&sets, |s| meter.error(&CoordSet::new(n, s.iter().copied()).expect("in range")));
    let mut best: Option<(usize, Estimate)> = None;
    for (i, e) in errors.into_iter().enumerate() {
        let e = e?;
        if best.is_none_or(|(_, b)| e.value < b.value) {
            best = Some((i, e));
        }
    }
    let (i, error) = best.expect("the empty set is always enumerated");
    Ok(OracleResult { s: CoordSet::new(n, sets[i].iter().copied())?, error, subsets: sets.len() })
}
