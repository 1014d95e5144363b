use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `eta` from the closed-form bound; guaranteed but astronomically small.
    Certified,
    /// `eta` raised as far as the measured error allows. No certificate.
    Empirical,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "certified" => Ok(Mode::Certified),
            "empirical" => Ok(Mode::Empirical),
            _ => Err(Error::Parse(format!("unknown mode `{s}`"))),
        }
    }
}

/// Smoothing time `t`, threshold `eta` and the exponents
/// `a = e^{-2t}/(1+e^{-2t})`, `b = (1-e^{-2t})/(2(1+e^{-2t}))`.
///
/// `eta` is stored as `ln_eta` because the certified value underflows `f64`
/// for every practical `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamSchedule {
    pub epsilon: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub ln_eta: f64,
    pub mode: Mode,
}

/// Margin keeping `t^-a eta^b < epsilon/2` strict after rounding.
const ETA_MARGIN: f64 = 1e-6;

impl ParamSchedule {
    pub fn exponents(t: f64) -> (f64, f64) {
        let e = (-2.0 * t).exp();
        (e / (1.0 + e), -(-2.0 * t).exp_m1() / (2.0 * (1.0 + e)))
    }

    /// `ln eta` solving `t^-a eta^b = (1 - margin) epsilon / 2`.
    pub fn certified_ln_eta(epsilon: f64, t: f64) -> f64 {
        let (a, b) = Self::exponents(t);
        ((epsilon / 2.0 * (1.0 - ETA_MARGIN)).ln() + a * t.ln()) / b
    }

    /// `eta`, which is `0.0` when it underflows.
    pub fn eta(&self) -> f64 {
        self.ln_eta.exp()
    }

    pub fn log10_eta(&self) -> f64 {
        self.ln_eta / std::f64::consts::LN_10
    }

    /// `1/eta`, the bound on `|S|` for normalized inputs, when representable.
    pub fn size_bound(&self) -> Option<f64> {
        Some((-self.ln_eta).exp()).filter(|v| v.is_finite())
    }

    pub fn log10_size_bound(&self) -> f64 {
        -self.log10_eta()
    }

    /// `eta * |S| <= 1`, evaluated in the log domain.
    pub fn size_certificate_holds(&self, s_len: usize) -> bool {
        s_len == 0 || self.ln_eta + (s_len as f64).ln() <= 0.0
    }

    /// `t^-a eta^b`, the bound on `||P_2t f - E_S P_2t f||_2`.
    pub fn smoothing_bound(&self) -> f64 {
        (-self.a * self.t.ln() + self.b * self.ln_eta).exp()
    }

    /// `2 sqrt(2t) + t^-a eta^b`, the bound on `||f - E_S f||_1` for
    /// normalized inputs.
    pub fn certified_bound(&self) -> f64 {
        2.0 * (2.0 * self.t).sqrt() + self.smoothing_bound()
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.ln_eta = eta.ln();
        self
    }
}

/// `t = epsilon^2/64`; in certified mode `eta` solves the smoothing bound
/// with `epsilon/2` on the right. Empirical mode starts from the same `eta`
/// and replaces it during extraction.
pub fn select_parameters(epsilon: f64, mode: Mode) -> Result<ParamSchedule> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::param(format!("epsilon must lie in (0, 2], got {epsilon}")));
    }
    let t = epsilon * epsilon / 64.0;
    let (a, b) = ParamSchedule::exponents(t);
    let ln_eta = ParamSchedule::certified_ln_eta(epsilon, t);
    Ok(ParamSchedule { epsilon, t, a, b, ln_eta, mode })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_lies_in_the_allowed_window() {
        let s = select_parameters(0.5, Mode::Certified).unwrap();
        assert!(s.t > 0.0 && s.t < 0.0078125);
        assert!(2.0 * (2.0 * s.t).sqrt() < 0.25);
    }

    #[test]
    fn exponents_at_one_tenth() {
        let (a, b) = ParamSchedule::exponents(0.1);
        let e = (-0.2f64).exp();
        assert!((a - e / (1.0 + e)).abs() < 1e-15);
        assert!((b - (1.0 - e) / (2.0 * (1.0 + e))).abs() < 1e-15);
        assert!((a - 0.4502).abs() < 1e-4);
        assert!((b - 0.0498).abs() < 1e-4);
    }

    #[test]
    fn certified_eta_satisfies_the_bound() {
        for eps in [0.01, 0.1, 0.5, 1.0, 2.0] {
            let s = select_parameters(eps, Mode::Certified).unwrap();
            assert!(s.smoothing_bound() < eps / 2.0);
            assert!(s.certified_bound() < eps);
            assert!(s.a > 0.0 && s.a <= 0.5 && s.b > 0.0 && s.b < 0.25);
            assert!(s.log10_size_bound() > 0.0);
        }
    }

    #[test]
    fn underflowing_eta_is_handled() {
        let s = select_parameters(0.5, Mode::Certified).unwrap();
        assert_eq!(s.eta(), 0.0);
        assert!(s.size_bound().is_none());
        assert!(s.log10_eta() < -300.0);
        assert!(s.size_certificate_holds(1_000_000));
    }

    #[test]
    fn epsilon_range() {
        assert!(select_parameters(0.0, Mode::Empirical).is_err());
        assert!(select_parameters(3.0, Mode::Empirical).is_err());
        assert!(select_parameters(f64::NAN, Mode::Empirical).is_err());
        assert!(select_parameters(2.0, Mode::Empirical).is_ok());
    }
}
