//! Junta approximation of Lipschitz and smooth functions on products of
//! tori and intervals, with numerical checks of the supporting inequalities.
//!
//! * [`torus`]: trigonometric polynomials and exact Fourier-side operators.
//! * [`quad`]: quadrature, Monte-Carlo sampling, black-box handles, the tent
//!   map and Lipschitz regularization on finite metric spaces.
//! * [`junta`]: influences, parameter schedules and junta extraction.
//! * [`inequality`]: randomized verification of the smoothing inequalities.
//! * [`geometry`]: Hamming-metric vector maps and separated set pairs.
//! * [`report`]: JSON-lines and CSV output.
//! * [`cli`]: the `juntalab` command.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod inequality;
pub mod junta;
pub mod par;
pub mod quad;
pub mod report;
pub mod torus;

pub use error::{Error, Result};
