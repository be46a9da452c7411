//! Minimal dense 2×2 complex linear algebra.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Vec2 = [Complex64; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn sigma_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Mat2([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [m[0][0].into(), m[0][1].into()],
            [m[1][0].into(), m[1][1].into()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Sandwich `u† M v`.
    pub fn sandwich(&self, u: &Vec2, v: &Vec2) -> Complex64 {
        inner(u, &self.apply(v))
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

/// Hermitian inner product `u† v`.
pub fn inner(u: &Vec2, v: &Vec2) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn norm(v: &Vec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

pub fn normalized(v: &Vec2) -> Vec2 {
    let n = norm(v);
    [v[0] / n, v[1] / n]
}
