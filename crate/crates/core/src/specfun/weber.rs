//! Even and odd particular solutions of the Weber equation
//! `y'' - (z²/4 + a) y = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kummer::kummer_m;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `y(0) = 1`, `y'(0) = 0`
    Even,
    /// `y(0) = 0`, `y'(0) = 1`
    Odd,
}

/// even: `e^{-z²/4} M(a/2 + 1/4, 1/2, z²/2)`;
/// odd: `z e^{-z²/4} M(a/2 + 3/4, 3/2, z²/2)`.
pub fn weber_y(parity: Parity, a_nu: Complex64, z: Complex64) -> Result<Complex64> {
    let x = z * z * 0.5;
    let gauss = (-z * z * 0.25).exp();
    match parity {
        Parity::Even => Ok(gauss * kummer_m(a_nu * 0.5 + 0.25, 0.5.into(), x)?),
        Parity::Odd => {
            if z == Complex64::new(0.0, 0.0) {
                return Ok(z);
            }
            Ok(z * gauss * kummer_m(a_nu * 0.5 + 0.75, 1.5.into(), x)?)
        }
    }
}

/// `dy/dz`, using `M'(a, b, x) = (a/b) M(a+1, b+1, x)`.
pub fn weber_y_prime(parity: Parity, a_nu: Complex64, z: Complex64) -> Result<Complex64> {
    let x = z * z * 0.5;
    let gauss = (-z * z * 0.25).exp();
    match parity {
        Parity::Even => {
            let p = a_nu * 0.5 + 0.25;
            if z == Complex64::new(0.0, 0.0) {
                return Ok(z);
            }
            let m0 = kummer_m(p, 0.5.into(), x)?;
            let m1 = kummer_m(p + 1.0, 1.5.into(), x)?;
            Ok(gauss * z * (-0.5 * m0 + 2.0 * p * m1))
        }
        Parity::Odd => {
            let p = a_nu * 0.5 + 0.75;
            let m0 = kummer_m(p, 1.5.into(), x)?;
            if z == Complex64::new(0.0, 0.0) {
                return Ok(m0);
            }
            let m1 = kummer_m(p + 1.0, 2.5.into(), x)?;
            Ok(gauss * ((1.0 - x) * m0 + 2.0 * x * p / 1.5 * m1))
        }
    }
}

/// `dy/dz` at the origin, read off the leading series terms.
pub fn weber_y_prime_at_zero(parity: Parity) -> Complex64 {
    match parity {
        Parity::Even => Complex64::new(0.0, 0.0),
        Parity::Odd => Complex64::new(1.0, 0.0),
    }
}
