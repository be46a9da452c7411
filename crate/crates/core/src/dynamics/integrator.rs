//! Dormand–Prince 5(4) on complex 2-vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Vec2;

pub const DEFAULT_ATOL: f64 = 1e-12;
pub const DEFAULT_RTOL: f64 = 1e-10;

/// Amplitudes beyond this abort the run.
pub const MAGNITUDE_LIMIT: f64 = 1e150;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &Vec2, terms: &[(f64, &Vec2)], h: f64) -> Vec2 {
    let mut out = *y;
    for (c, k) in terms {
        let s = c * h;
        out[0] += k[0] * s;
        out[1] += k[1] * s;
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
}

/// Adaptive integrator for `y' = f(t, y)`. The step size is kept between
/// calls to [`Dopri5::advance`] so a sampled run does not restart from scratch.
pub struct Dopri5<F> {
    f: F,
    pub atol: f64,
    pub rtol: f64,
    h: Option<f64>,
    pub stats: StepStats,
}

impl<F> Dopri5<F>
where
    F: Fn(f64, &Vec2) -> Vec2,
{
    pub fn new(f: F) -> Self {
        Dopri5 {
            f,
            atol: DEFAULT_ATOL,
            rtol: DEFAULT_RTOL,
            h: None,
            stats: StepStats::default(),
        }
    }

    pub fn with_tolerances(mut self, atol: f64, rtol: f64) -> Self {
        self.atol = atol;
        self.rtol = rtol;
        self
    }

    fn initial_step(&self, t: f64, y: &Vec2, k1: &Vec2, span: f64) -> f64 {
        let sc = |v: &Vec2| {
            let s: f64 = (0..2)
                .map(|i| {
                    let w = self.atol + self.rtol * y[i].norm();
                    (v[i].norm() / w).powi(2)
                })
                .sum();
            (s / 2.0).sqrt()
        };
        let d0 = sc(y);
        let d1 = sc(k1);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1 = axpy(y, &[(1.0, k1)], h0);
        let k2 = (self.f)(t + h0, &y1);
        let d2 = sc(&[k2[0] - k1[0], k2[1] - k1[1]]) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Integrates from `(t0, y0)` to exactly `t1 > t0`.
    pub fn advance(&mut self, t0: f64, y0: Vec2, t1: f64) -> Result<Vec2> {
        if t1 == t0 {
            return Ok(y0);
        }
        if !(t1 > t0) {
            return Err(Error::InvalidArgument(format!(
                "integration must move forward in time ({t0} -> {t1})"
            )));
        }
        let f = &self.f;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(t, &y, &k1, t1 - t0),
        };

        loop {
            let remaining = t1 - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step <= 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::Stiffness { t, h: step });
            }

            let k2 = f(t + C2 * step, &axpy(&y, &[(A21, &k1)], step));
            let k3 = f(t + C3 * step, &axpy(&y, &[(A31, &k1), (A32, &k2)], step));
            let k4 = f(
                t + C4 * step,
                &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step),
            );
            let k5 = f(
                t + C5 * step,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step),
            );
            let k6 = f(
                t + step,
                &axpy(
                    &y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    step,
                ),
            );
            let y_new = axpy(
                &y,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                step,
            );
            let t_new = if last { t1 } else { t + step };
            let k7 = f(t_new, &y_new);

            let mut err_sq = 0.0;
            for i in 0..2 {
                let e: Complex64 = (k1[i] * E1
                    + k3[i] * E3
                    + k4[i] * E4
                    + k5[i] * E5
                    + k6[i] * E6
                    + k7[i] * E7)
                    * step;
                let w = self.atol + self.rtol * y[i].norm().max(y_new[i].norm());
                err_sq += (e.norm() / w).powi(2);
            }
            let err = (err_sq / 2.0).sqrt();

            if !err.is_finite() {
                self.stats.rejected += 1;
                h = step * 0.1;
                continue;
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };

            if err <= 1.0 {
                self.stats.accepted += 1;
                t = t_new;
                y = y_new;
                k1 = k7;
                let mag = y[0].norm().max(y[1].norm());
                if !(mag <= MAGNITUDE_LIMIT) {
                    return Err(Error::Magnitude { t, magnitude: mag });
                }
                // A step clipped to hit t1 says little about the natural size.
                if !last || factor < 1.0 {
                    h = step * factor;
                }
                if last {
                    self.h = Some(h);
                    return Ok(y);
                }
            } else {
                self.stats.rejected += 1;
                h = step * factor.min(1.0);
            }
        }
    }
}
