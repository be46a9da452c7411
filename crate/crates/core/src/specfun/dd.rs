//! Double-double (~106-bit) real and complex arithmetic for the Kummer series.
//!
//! Only the operations the series recurrence needs are provided.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct DD {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> DD {
        DD::from_f64(x)
    }
}

impl Add for DD {
    type Output = DD;
    #[inline]
    fn add(self, b: DD) -> DD {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        DD { hi, lo }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DD {
    type Output = DD;
    #[inline]
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    #[inline]
    fn mul(self, b: DD) -> DD {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b * DD::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DD::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::from_f64(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub fn one() -> CDD {
        CDD {
            re: DD::from_f64(1.0),
            im: DD::ZERO,
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Magnitude of the leading parts; good enough for convergence tests.
    pub fn norm_f64(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

impl From<Complex64> for CDD {
    fn from(z: Complex64) -> CDD {
        CDD {
            re: z.re.into(),
            im: z.im.into(),
        }
    }
}

impl Add for CDD {
    type Output = CDD;
    #[inline]
    fn add(self, b: CDD) -> CDD {
        CDD {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Mul for CDD {
    type Output = CDD;
    #[inline]
    fn mul(self, b: CDD) -> CDD {
        CDD {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for CDD {
    type Output = CDD;
    fn div(self, b: CDD) -> CDD {
        let den = b.re * b.re + b.im * b.im;
        let num = self * CDD { re: b.re, im: -b.im };
        CDD {
            re: num.re / den,
            im: num.im / den,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_in_f64() {
        let big = DD::from_f64(1e20);
        let sum = (big + DD::from_f64(1.0)) - big;
        assert_eq!(sum.to_f64(), 1.0);

        let third = DD::from_f64(1.0) / DD::from_f64(3.0);
        let back = third * DD::from_f64(3.0) - DD::from_f64(1.0);
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn complex_division() {
        let a = CDD::from(Complex64::new(1.0, 2.0));
        let b = CDD::from(Complex64::new(-3.0, 0.5));
        let q = (a / b).to_c64();
        let expected = Complex64::new(1.0, 2.0) / Complex64::new(-3.0, 0.5);
        assert!((q - expected).norm() < 1e-16);
    }
}
