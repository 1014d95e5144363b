//! Tensor-grid tables: conditional expectations by averaging node values and
//! the CSV box-grid dump format.

use std::path::Path;

use crate::error::{Error, Result};
use crate::par;
use crate::quad::{grid_node, Domain, FnHandle, QuadratureSpec, GRID_NODE_CAP};
use crate::torus::CoordSet;

/// Node values of a function on a midpoint tensor grid. Axes that have been
/// averaged out have length 1. Storage is row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct GridTable {
    n: usize,
    domain: Domain,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl GridTable {
    /// Evaluates `h` at every node of the grid with `n` points per axis.
    pub fn sample(h: &FnHandle, n: usize) -> Result<Self> {
        let dim = h.dim();
        if n == 0 {
            return Err(Error::param("grid needs at least one point per axis"));
        }
        let count = n
            .checked_pow(dim as u32)
            .filter(|&c| c <= GRID_NODE_CAP)
            .ok_or_else(|| Error::param(format!("grid {n}^{dim} exceeds the node cap")))?;
        let parts = par::map_chunks(count, par::CHUNK, |range| {
            let mut x = vec![0.0; dim];
            range
                .map(|i| {
                    grid_node(i, n, &mut x);
                    let v = h.eval(&x);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFinite(x.clone()))
                    }
                })
                .collect::<Result<Vec<f64>>>()
        });
        let mut values = Vec::with_capacity(count);
        for p in parts {
            values.extend(p?);
        }
        Ok(Self { n, domain: h.domain(), shape: vec![n; dim], values })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Axes that still carry `n` nodes.
    pub fn live_axes(&self) -> CoordSet {
        CoordSet::new(self.dim(), (0..self.dim()).filter(|&a| self.shape[a] > 1 || self.n == 1))
            .expect("axes are in range")
    }

    /// Integrates out one coordinate.
    pub fn average_axis(&self, axis: usize) -> Result<GridTable> {
        if axis >= self.dim() {
            return Err(Error::IndexOutOfRange { index: axis, dim: self.dim() });
        }
        let len = self.shape[axis];
        if len == 1 {
            return Ok(self.clone());
        }
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            let base = o * len * inner;
            let dst = &mut values[o * inner..(o + 1) * inner];
            for j in 0..len {
                let src = &self.values[base + j * inner..base + (j + 1) * inner];
                dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
            }
            dst.iter_mut().for_each(|d| *d /= len as f64);
        }
        let mut shape = self.shape.clone();
        shape[axis] = 1;
        Ok(GridTable { n: self.n, domain: self.domain, shape, values })
    }

    /// Averages out every coordinate outside `keep`, in ascending order.
    pub fn cond_exp(&self, keep: &CoordSet) -> Result<GridTable> {
        let order: Vec<usize> = keep.complement().iter().collect();
        self.cond_exp_in_order(keep, &order)
    }

    /// Averages out the coordinates outside `keep` in the given order.
    pub fn cond_exp_in_order(&self, keep: &CoordSet, order: &[usize]) -> Result<GridTable> {
        if keep.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: keep.dim() });
        }
        let mut expected: Vec<usize> = keep.complement().iter().collect();
        let mut given = order.to_vec();
        given.sort_unstable();
        expected.sort_unstable();
        if given != expected {
            return Err(Error::param("averaging order must list exactly the excluded coordinates"));
        }
        let mut t = self.clone();
        for &a in order {
            t = t.average_axis(a)?;
        }
        Ok(t)
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![0; self.dim()];
        let mut acc = 1;
        for a in (0..self.dim()).rev() {
            s[a] = if self.shape[a] == 1 { 0 } else { acc };
            acc *= self.shape[a];
        }
        s
    }

    /// Index of the grid cell containing `t` along one axis.
    fn cell(&self, t: f64) -> usize {
        let t = match self.domain {
            Domain::Torus => t.rem_euclid(1.0),
            Domain::Cube => t,
        };
        ((t * self.n as f64).floor().max(0.0) as usize).min(self.n - 1)
    }

    /// Piecewise-constant extension: the value of the cell containing `x`.
    pub fn lookup(&self, x: &[f64]) -> f64 {
        let strides = self.strides();
        let idx: usize = (0..self.dim()).filter(|&a| strides[a] != 0).map(|a| self.cell(x[a]) * strides[a]).sum();
        self.values[idx]
    }

    /// Value at the node with per-axis indices `idx` (averaged axes ignored).
    pub fn at(&self, idx: &[usize]) -> f64 {
        let strides = self.strides();
        self.values[idx.iter().zip(&strides).map(|(i, s)| i * s).sum::<usize>()]
    }

    /// Mean of `|self - other|` over the nodes of `self`, where `other` is a
    /// reduction of the same grid broadcast along its averaged axes.
    pub fn mean_abs_diff(&self, other: &GridTable) -> Result<f64> {
        if other.dim() != self.dim() || other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let dim = self.dim();
        let ostrides = other.strides();
        let n = self.n;
        let parts = par::map_chunks(self.values.len(), par::CHUNK, |range| {
            let mut acc = 0.0;
            for i in range {
                let (mut rem, mut j) = (i, 0);
                for a in (0..dim).rev() {
                    j += (rem % n) * ostrides[a];
                    rem /= n;
                }
                acc += (self.values[i] - other.values[j]).abs();
            }
            acc
        });
        Ok(parts.into_iter().sum::<f64>() / self.values.len() as f64)
    }

    /// The piecewise-constant function on grid cells, as a handle whose
    /// support is the set of live axes.
    pub fn into_handle(self) -> FnHandle {
        let dim = self.dim();
        let support = self.live_axes();
        let domain = self.domain;
        FnHandle::new(dim, domain, move |x| self.lookup(x)).with_support(support)
    }
}

/// `E_S h` at grid resolution: averages the node values of `h` over the
/// coordinates outside `s`, extended piecewise-constantly over grid cells.
pub fn grid_cond_exp(h: &FnHandle, s: &CoordSet, quad: &QuadratureSpec) -> Result<FnHandle> {
    if s.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: s.dim() });
    }
    let n = quad.resolve_grid(h.dim())?;
    Ok(GridTable::sample(h, n)?.cond_exp(s)?.into_handle())
}

/// Writes the node coordinates and values of `h` on an `n`-point grid as CSV
/// with header `x1,...,xN,value`.
pub fn write_grid_dump(h: &FnHandle, n: usize, path: &Path) -> Result<()> {
    let table = GridTable::sample(h, n)?;
    let dim = h.dim();
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(csv_err)?;
    let mut x = vec![0.0; dim];
    for (i, v) in table.values.iter().enumerate() {
        grid_node(i, n, &mut x);
        let mut row: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        row.push(v.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a box-grid dump into a piecewise-constant handle on `domain`.
pub fn read_grid_dump(path: &Path, domain: Domain) -> Result<FnHandle> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let dim = r
        .headers()
        .map_err(csv_err)?
        .len()
        .checked_sub(1)
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Parse("grid dump needs at least one coordinate column and a value column".into()))?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let nums = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if nums.len() != dim + 1 {
            return Err(Error::Parse(format!("row has {} fields, expected {}", nums.len(), dim + 1)));
        }
        rows.push(nums);
    }
    let n = (rows.len() as f64).powf(1.0 / dim as f64).round() as usize;
    if n == 0 || n.pow(dim as u32) != rows.len() {
        return Err(Error::Parse(format!("{} rows do not form a {dim}-dimensional grid", rows.len())));
    }
    let mut values = vec![f64::NAN; rows.len()];
    for row in &rows {
        let mut idx = 0;
        for &c in &row[..dim] {
            let cell = c * n as f64 - 0.5;
            let k = cell.round();
            if (cell - k).abs() > 1e-6 || k < 0.0 || k >= n as f64 {
                return Err(Error::Parse(format!("coordinate {c} is not a node of the {n}-point grid")));
            }
            idx = idx * n + k as usize;
        }
        if !values[idx].is_nan() {
            return Err(Error::Parse("duplicate grid node".into()));
        }
        values[idx] = row[dim];
    }
    Ok(GridTable { n, domain, shape: vec![n; dim], values }.into_handle())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}
