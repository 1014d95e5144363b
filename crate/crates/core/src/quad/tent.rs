//! Transfer from the cube to the torus through the tent map.

use crate::error::{Error, Result};
use crate::quad::{Domain, FnHandle};

/// `F(theta) = 2 theta` on `[0, 1/2)`, `2 - 2 theta` on `[1/2, 1)`, applied to
/// `theta mod 1`. It pushes Haar measure on the circle to Lebesgue measure on
/// `[0, 1]` and is 2-Lipschitz.
#[inline]
pub fn tent_map(theta: f64) -> f64 {
    let t = theta.rem_euclid(1.0);
    if t < 0.5 {
        2.0 * t
    } else {
        2.0 - 2.0 * t
    }
}

#[inline]
fn tent_slope(theta: f64) -> f64 {
    if theta.rem_euclid(1.0) < 0.5 {
        2.0
    } else {
        -2.0
    }
}

/// Returns `h o F^N` as a torus function. An analytic gradient of `h` is
/// carried over by the chain rule.
pub fn tent_transfer(h: &FnHandle) -> Result<FnHandle> {
    if h.domain() != Domain::Cube {
        return Err(Error::WrongDomain { expected: "cube" });
    }
    let dim = h.dim();
    let inner = h.clone();
    let mut out = FnHandle::new(dim, Domain::Torus, move |theta| {
        let y: Vec<f64> = theta.iter().map(|&t| tent_map(t)).collect();
        inner.eval(&y)
    });
    if h.has_gradient() {
        let inner = h.clone();
        out = out.with_gradient(move |theta, g| {
            let y: Vec<f64> = theta.iter().map(|&t| tent_map(t)).collect();
            inner.gradient(&y, g);
            for (gn, &t) in g.iter_mut().zip(theta) {
                *gn *= tent_slope(t);
            }
        });
    }
    if let Some(s) = h.support() {
        out = out.with_support(s.clone());
    }
    Ok(out)
}
