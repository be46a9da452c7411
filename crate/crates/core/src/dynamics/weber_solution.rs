//! Exact solution of the linear sweep `η = αt` through parabolic-cylinder functions.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TwoLevelState;
use crate::asymptotics::weber_constants;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::specfun::{weber_y, weber_y_prime, Parity};

/// `ψ1 = c11 y_even(a1; z) + c12 y_odd(a1; z)` and
/// `ψ2 = c21 y_even(a2; z) + c22 y_odd(a2; z)` with `z = e^{-iπ/4} √(2α) t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeberSolution {
    pub a1: Complex64,
    pub a2: Complex64,
    pub c11: Complex64,
    pub c12: Complex64,
    pub c21: Complex64,
    pub c22: Complex64,
    pub alpha: f64,
}

impl WeberSolution {
    /// Solution with `Ψ(0) = (a, b)`. Also valid for `δx ≠ 0`.
    pub fn new(p: &ModelParams, a: Complex64, b: Complex64) -> Result<Self> {
        p.validate_sweep()?;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument("initial amplitudes must be finite".into()));
        }
        let (a1, a2) = weber_constants(p)?;
        // dz/dt = e^{-iπ/4} √(2α) and y_odd'(0) = 1, so c = -i H_ij ψ_j(0) e^{iπ/4} / √(2α).
        let k = Complex64::from_polar(1.0 / (2.0 * p.alpha).sqrt(), FRAC_PI_4);
        let up = Complex64::new(p.gamma - p.delta_y, -p.delta_x);
        let down = Complex64::new(p.gamma + p.delta_y, -p.delta_x);
        Ok(WeberSolution {
            a1,
            a2,
            c11: a,
            c12: k * up * b,
            c21: b,
            c22: k * down * a,
            alpha: p.alpha,
        })
    }

    pub fn z(&self, t: f64) -> Complex64 {
        Complex64::from_polar((2.0 * self.alpha).sqrt() * t, -FRAC_PI_4)
    }

    pub fn state(&self, t: f64) -> Result<TwoLevelState> {
        let z = self.z(t);
        let psi1 = self.c11 * weber_y(Parity::Even, self.a1, z)?
            + self.c12 * weber_y(Parity::Odd, self.a1, z)?;
        let psi2 = self.c21 * weber_y(Parity::Even, self.a2, z)?
            + self.c22 * weber_y(Parity::Odd, self.a2, z)?;
        Ok(TwoLevelState { psi1, psi2, t })
    }

    /// `dΨ/dt` at `t`.
    pub fn derivative(&self, t: f64) -> Result<[Complex64; 2]> {
        let z = self.z(t);
        let dz = Complex64::from_polar((2.0 * self.alpha).sqrt(), -FRAC_PI_4);
        let d1 = self.c11 * weber_y_prime(Parity::Even, self.a1, z)?
            + self.c12 * weber_y_prime(Parity::Odd, self.a1, z)?;
        let d2 = self.c21 * weber_y_prime(Parity::Even, self.a2, z)?
            + self.c22 * weber_y_prime(Parity::Odd, self.a2, z)?;
        Ok([dz * d1, dz * d2])
    }
}

/// Exact `Ψ(t)` for `η = αt`, `δx = 0` and `Ψ(0) = (a, b)`.
pub fn analytic_solution(p: &ModelParams, init: (Complex64, Complex64), t: f64) -> Result<TwoLevelState> {
    if !p.is_pt_symmetric() {
        return Err(Error::NotApplicable(format!(
            "analytic_solution needs delta_x = 0 (got {}); use WeberSolution::new or propagate",
            p.delta_x
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t} is not finite")));
    }
    WeberSolution::new(p, init.0, init.1)?.state(t)
}

/// Exact `Ψ(t)` for `η = αt` and `Ψ(0) = (0, 1)` with any `δx`.
pub fn analytic_solution_dx(p: &ModelParams, t: f64) -> Result<TwoLevelState> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t} is not finite")));
    }
    WeberSolution::new(p, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))?.state(t)
}
