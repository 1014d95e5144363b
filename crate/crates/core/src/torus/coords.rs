use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A frequency multi-index `k` in `Z^N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreqVector(pub(crate) Vec<i32>);

impl FreqVector {
    pub fn new(k: Vec<i32>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::param("frequency vector needs dimension >= 1"));
        }
        Ok(Self(k))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Frequency `unit * e_n`.
    pub fn axis(dim: usize, n: usize, unit: i32) -> Self {
        let mut k = vec![0; dim];
        k[n] = unit;
        Self(k)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|k| -k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// `|k|^2 = sum k_n^2`.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|&k| (k as f64) * (k as f64)).sum()
    }

    /// True if `k` is lexicographically positive (first nonzero entry > 0).
    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|&&k| k != 0).is_some_and(|&k| k > 0)
    }
}

/// A subset of the coordinates `{0, ..., N-1}` in sorted order.
///
/// Indices are zero-based in the library; reports print them one-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordSet {
    dim: usize,
    members: Vec<usize>,
}

impl CoordSet {
    pub fn new(dim: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { dim, members })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, members: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Self { dim, members: (0..dim).collect() }
    }

    /// Builds a set from one-based indices, as written in reports and CLI input.
    pub fn from_one_based(dim: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let zero: Vec<usize> = members
            .into_iter()
            .map(|m| m.checked_sub(1).ok_or(Error::IndexOutOfRange { index: 0, dim }))
            .collect::<Result<_>>()?;
        Self::new(dim, zero)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self) -> CoordSet {
        Self { dim: self.dim, members: (0..self.dim).filter(|n| !self.contains(*n)).collect() }
    }

    pub fn union(&self, other: &CoordSet) -> CoordSet {
        Self::new(self.dim.max(other.dim), self.iter().chain(other.iter())).expect("members in range")
    }

    pub fn is_subset(&self, other: &CoordSet) -> bool {
        self.iter().all(|n| other.contains(n))
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.members.iter().map(|m| m + 1).collect()
    }
}

impl fmt::Display for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        write!(f, "}}")
    }
}
