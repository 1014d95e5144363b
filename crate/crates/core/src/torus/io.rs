//! Text and JSON serialisations of [`TrigPoly`].
//!
//! Text format:
//!
//! ```text
//! # comments and blank lines are ignored
//! trigpoly 2
//! 1 0 0.5 0
//! -1 0 0.5 -0
//! ```
//!
//! The header gives the dimension; each record is a frequency vector followed
//! by the real and imaginary parts. Numbers are written in shortest
//! round-trip form, so `read(write(f)) == f` exactly.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TrigPoly;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    dim: usize,
    coeffs: Vec<CoeffDoc>,
}

#[derive(Serialize, Deserialize)]
struct CoeffDoc {
    k: Vec<i32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl TrigPoly {
    pub fn to_text(&self) -> String {
        let mut s = format!("trigpoly {}\n", self.dim);
        for (k, c) in &self.coeffs {
            for kn in k.as_slice() {
                let _ = write!(s, "{kn} ");
            }
            let _ = writeln!(s, "{:e} {:e}", c.re, c.im);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty trigpoly document".into()))?;
        let dim = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["trigpoly", d] => d.parse::<usize>().map_err(|e| Error::Parse(format!("bad dimension: {e}")))?,
            _ => return Err(Error::Parse(format!("expected `trigpoly <dim>`, got `{header}`"))),
        };
        let mut coeffs = Vec::new();
        for (no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != dim + 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, got {}",
                    no + 1,
                    dim + 2,
                    fields.len()
                )));
            }
            let k = fields[..dim]
                .iter()
                .map(|f| f.parse::<i32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            let num = |f: &str| f.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)));
            coeffs.push((k, Complex64::new(num(fields[dim])?, num(fields[dim + 1])?)));
        }
        Self::from_coeffs(dim, coeffs)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// JSON form: `{"dim": N, "coeffs": [{"k": [...], "re": x, "im": y}, ...]}`.
    /// Missing conjugate partners are completed on input.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: PolyDoc = serde_json::from_str(s)?;
        Self::from_coeffs(doc.dim, doc.coeffs.into_iter().map(|c| (c.k, Complex64::new(c.re, c.im))))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = PolyDoc {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| CoeffDoc { k: k.as_slice().to_vec(), re: c.re, im: c.im })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }
}
