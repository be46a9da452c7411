//! Complex Gamma function (Lanczos, g = 7, n = 9) and Pochhammer symbols.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;

const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln(2π)/2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Lanczos log-Gamma for Re z ≥ 1/2.
fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `ln sin(w)` on some branch, without overflow for large |Im w|.
fn ln_sin(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    if w.im > 0.0 {
        // sin w = e^{-iw} (1 - e^{2iw}) i / 2
        -i * w + ((1.0 - (2.0 * i * w).exp()) * i * 0.5).ln()
    } else {
        // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
        i * w + ((1.0 - (-2.0 * i * w).exp()) / (2.0 * i)).ln()
    }
}

/// Principal-ish complex log-Gamma. The imaginary part is only defined
/// modulo 2π, which is all that exponentiation needs.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma of non-finite {z}")));
    }
    if is_gamma_pole(z) {
        return Err(Error::Pole(z));
    }
    if z.re < 0.5 {
        let lg = ln_gamma_lanczos(1.0 - z);
        Ok(PI.ln() - ln_sin(PI * z) - lg)
    } else {
        Ok(ln_gamma_lanczos(z))
    }
}

/// Γ(z) on the complex plane, with reflection for Re z < 1/2.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re > 0.0 && z.re == z.re.round() && z.re <= 20.0 {
        let n = z.re as u32;
        return Ok(Complex64::new((1..n).map(f64::from).product(), 0.0));
    }
    Ok(ln_gamma(z)?.exp())
}

/// 1/Γ(z), an entire function: zero at the poles of Γ.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        // 1/Γ(z) = sin(πz) Γ(1-z) / π, finite near the poles.
        let g = ln_gamma_lanczos(1.0 - z).exp();
        return (PI * z).sin() * g / PI;
    }
    (-ln_gamma_lanczos(z)).exp()
}

/// Rising factorial `(f)_n = f (f+1) … (f+n-1)`, `(f)_0 = 1`.
pub fn pochhammer(f: Complex64, n: i64) -> Result<Complex64> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!(
            "Pochhammer order must be non-negative, got {n}"
        )));
    }
    Ok((0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (f + k as f64)))
}
