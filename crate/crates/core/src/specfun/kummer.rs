//! Kummer's confluent hypergeometric function `M(a, b, x)` for complex
//! arguments.
//!
//! Small `|x|` uses the defining power series summed in double-double
//! arithmetic, which absorbs the cancellation that builds up along the
//! imaginary axis. Large `|x|` uses the two-term large-argument expansion
//!
//! ```text
//! M(a,b,x)/Γ(b) ~ e^{±iπa} x^{-a}/Γ(b-a) Σ_n (a)_n (1+a-b)_n/n! (-x)^{-n}
//!               + e^x x^{a-b}/Γ(a)      Σ_n (b-a)_n (1-a)_n/n! x^{-n}
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::dd::{CDD, DD};
use super::gamma::{complex_gamma, is_gamma_pole, recip_gamma};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerArgs {
    pub a: Complex64,
    pub b: Complex64,
    pub x: Complex64,
}

impl KummerArgs {
    pub fn new(a: Complex64, b: Complex64, x: Complex64) -> Result<Self> {
        let args = KummerArgs { a, b, x };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite Kummer arguments a = {}, b = {}, x = {}",
                self.a, self.b, self.x
            )));
        }
        if is_gamma_pole(self.b) {
            return Err(Error::InvalidArgument(format!(
                "b = {} is zero or a negative integer",
                self.b
            )));
        }
        Ok(())
    }
}

/// Sign of the `e^{±iπa}` factor, fixed by `arg(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticBranch {
    /// `-π/2 < arg(x) < 3π/2`
    Plus,
    /// `-3π/2 < arg(x) ≤ -π/2`
    Minus,
}

impl AsymptoticBranch {
    /// Branch for the principal argument of `x`. Arguments within 1e-12 of
    /// `-π/2` snap onto it, so `z²/2` computed from `z = e^{-iπ/4} r` always
    /// lands on the minus branch.
    pub fn for_argument(x: Complex64) -> Self {
        let arg = x.arg();
        if arg <= -FRAC_PI_2 + 1e-12 && arg > -PI {
            AsymptoticBranch::Minus
        } else {
            AsymptoticBranch::Plus
        }
    }

    /// Branch whose sector of validity is centred on `x`: minus in the lower
    /// half plane, plus otherwise. Agrees with [`Self::for_argument`] on the
    /// negative imaginary axis but stays away from the edge of the plus sector
    /// for `-π/2 < arg(x) < 0`, where the plus form loses accuracy.
    pub fn preferred(x: Complex64) -> Self {
        if x.im < 0.0 || Self::for_argument(x) == AsymptoticBranch::Minus {
            AsymptoticBranch::Minus
        } else {
            AsymptoticBranch::Plus
        }
    }

    fn sign(self) -> f64 {
        match self {
            AsymptoticBranch::Plus => 1.0,
            AsymptoticBranch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerOptions {
    /// `|x|` at and above which the large-argument expansion is tried first.
    pub switch_radius: f64,
    /// Largest accepted relative error estimate.
    pub rel_tol: f64,
    pub max_series_terms: usize,
    /// Cap on each adaptive asymptotic sum.
    pub max_asymptotic_terms: usize,
}

impl Default for KummerOptions {
    fn default() -> Self {
        KummerOptions {
            switch_radius: 30.0,
            rel_tol: 1e-10,
            max_series_terms: 5000,
            max_asymptotic_terms: 200,
        }
    }
}

pub const DEFAULT_TRUNCATION: usize = 12;

/// Value plus an estimate of its absolute error.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Estimate {
    pub value: Complex64,
    pub abs_err: f64,
}

impl Estimate {
    fn rel_err(&self) -> f64 {
        let m = self.value.norm();
        if m == 0.0 {
            if self.abs_err == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_err / m
        }
    }
}

/// Relative size below which a series term no longer changes the sum.
const TERM_CUTOFF: f64 = 1e-18;
/// Unit roundoff of double-double arithmetic.
const DD_EPS: f64 = 1.3e-32;

pub(crate) fn series_estimate(args: &KummerArgs, max_terms: usize) -> Result<Estimate> {
    let KummerArgs { a, b, x } = *args;
    if x == Complex64::new(0.0, 0.0) {
        return Ok(Estimate {
            value: Complex64::new(1.0, 0.0),
            abs_err: 0.0,
        });
    }
    let (a_dd, b_dd, x_dd) = (CDD::from(a), CDD::from(b), CDD::from(x));
    let mut term = CDD::one();
    let mut sum = CDD::one();
    let mut max_term: f64 = 1.0;
    let mut quiet = 0;
    for n in 0..max_terms {
        let nn = DD::from_f64(n as f64);
        let an = CDD {
            re: a_dd.re + nn,
            im: a_dd.im,
        };
        let bn = CDD {
            re: b_dd.re + nn,
            im: b_dd.im,
        };
        let den = bn
            * CDD {
                re: DD::from_f64((n + 1) as f64),
                im: DD::ZERO,
            };
        term = (term * an * x_dd) / den;
        sum = sum + term;
        let t = term.norm_f64();
        max_term = max_term.max(t);
        if t == 0.0 {
            // (a)_n vanished: polynomial case, exact.
            return Ok(Estimate {
                value: sum.to_c64(),
                abs_err: max_term * (n as f64 + 1.0) * DD_EPS,
            });
        }
        // Only trust the cutoff once terms shrink geometrically.
        let ratio = (a + n as f64).norm() * x.norm() / ((b + n as f64).norm() * (n + 1) as f64);
        if ratio < 0.5 && t < TERM_CUTOFF * sum.norm_f64() {
            quiet += 1;
            if quiet >= 2 {
                let rounding = max_term * (n as f64 + 1.0) * DD_EPS * 4.0;
                let value = sum.to_c64();
                let tail = t;
                return Ok(Estimate {
                    value,
                    abs_err: rounding + tail + value.norm() * f64::EPSILON,
                });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::PrecisionLoss(format!(
        "Kummer series did not converge within {max_terms} terms (a = {a}, b = {b}, x = {x})"
    )))
}

/// `M(a, b, x) = Σ (a)_n x^n / ((b)_n n!)`, summed until the tail is
/// negligible. Fails if cancellation among the terms eats the precision.
pub fn kummer_m_series(args: &KummerArgs) -> Result<Complex64> {
    kummer_m_series_with(args, &KummerOptions::default())
}

pub fn kummer_m_series_with(args: &KummerArgs, opts: &KummerOptions) -> Result<Complex64> {
    args.validate()?;
    let est = series_estimate(args, opts.max_series_terms)?;
    if est.rel_err() > opts.rel_tol {
        return Err(Error::PrecisionLoss(format!(
            "Kummer series at |x| = {:.3} lost precision (relative error estimate {:.1e})",
            args.x.norm(),
            est.rel_err()
        )));
    }
    Ok(est.value)
}

/// How many terms each asymptotic sum may use.
#[derive(Debug, Clone, Copy)]
enum Truncation {
    Fixed(usize, usize),
    Adaptive(usize),
}

/// Partial sum of `Σ_n (p)_n (q)_n / n! · w^n` with the magnitude of the first
/// omitted term as its error estimate. `limit = Some(k)` sums exactly `k`
/// terms; `None` stops at the cutoff or at the smallest term, whichever
/// comes first.
fn asymptotic_sum(
    p: Complex64,
    q: Complex64,
    w: Complex64,
    limit: Option<usize>,
    cap: usize,
) -> (Complex64, f64) {
    let step = |term: Complex64, n: usize| term * (p + n as f64) * (q + n as f64) * w / (n + 1) as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    if let Some(k) = limit {
        for n in 0..k.saturating_sub(1) {
            term = step(term, n);
            sum += term;
        }
        return (sum, step(term, k.saturating_sub(1)).norm());
    }
    let mut prev = 1.0;
    for n in 0..cap {
        let next = step(term, n);
        let mag = next.norm();
        if mag == 0.0 {
            return (sum, 0.0);
        }
        if mag > prev {
            return (sum, prev);
        }
        sum += next;
        if mag < TERM_CUTOFF * sum.norm() {
            return (sum, mag);
        }
        term = next;
        prev = mag;
    }
    (sum, prev)
}

fn asymptotic_estimate(
    args: &KummerArgs,
    branch: AsymptoticBranch,
    truncation: Truncation,
) -> Result<Estimate> {
    let KummerArgs { a, b, x } = *args;
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::PrecisionLoss("asymptotic expansion at x = 0".into()));
    }
    let i = Complex64::i();
    let ln_x = x.ln();
    let (limit1, limit2, cap) = match truncation {
        Truncation::Fixed(r, s) => (Some(r), Some(s), r.max(s)),
        Truncation::Adaptive(cap) => (None, None, cap),
    };

    let rg_bma = recip_gamma(b - a);
    let (s1, e1, pref1) = if rg_bma == Complex64::new(0.0, 0.0) {
        (Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0))
    } else {
        let pref = (branch.sign() * i * PI * a - a * ln_x).exp() * rg_bma;
        let (s, e) = asymptotic_sum(a, 1.0 + a - b, -1.0 / x, limit1, cap);
        (s, e, pref)
    };

    let rg_a = recip_gamma(a);
    let (s2, e2, pref2) = if rg_a == Complex64::new(0.0, 0.0) {
        (Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0))
    } else {
        let pref = (x + (a - b) * ln_x).exp() * rg_a;
        let (s, e) = asymptotic_sum(b - a, 1.0 - a, 1.0 / x, limit2, cap);
        (s, e, pref)
    };

    let gb = complex_gamma(b)?;
    let part1 = pref1 * s1;
    let part2 = pref2 * s2;
    let value = gb * (part1 + part2);
    let rounding = 8.0 * f64::EPSILON * (part1.norm() + part2.norm()) * gb.norm()
        * (1.0 + a.norm() + b.norm());
    let abs_err = gb.norm() * (pref1.norm() * e1 + pref2.norm() * e2) + rounding;
    if !value.is_finite() {
        return Err(Error::PrecisionLoss(format!(
            "asymptotic Kummer evaluation overflowed (a = {a}, b = {b}, x = {x})"
        )));
    }
    Ok(Estimate { value, abs_err })
}

/// Large-`|x|` expansion with `r` and `s` terms in the two sums. Fails when the
/// first omitted terms exceed the default relative tolerance.
pub fn kummer_m_asymptotic(
    args: &KummerArgs,
    branch: AsymptoticBranch,
    r: usize,
    s: usize,
) -> Result<Complex64> {
    kummer_m_asymptotic_with(args, branch, r, s, &KummerOptions::default())
}

pub fn kummer_m_asymptotic_with(
    args: &KummerArgs,
    branch: AsymptoticBranch,
    r: usize,
    s: usize,
    opts: &KummerOptions,
) -> Result<Complex64> {
    args.validate()?;
    if r == 0 || s == 0 {
        return Err(Error::InvalidArgument("truncation orders must be positive".into()));
    }
    let est = asymptotic_estimate(args, branch, Truncation::Fixed(r, s))?;
    if est.rel_err() > opts.rel_tol {
        return Err(Error::PrecisionLoss(format!(
            "|x| = {:.3} too small for R = {r}, S = {s} (relative error estimate {:.1e})",
            args.x.norm(),
            est.rel_err()
        )));
    }
    Ok(est.value)
}

/// Leading terms `Γ(b) [e^{±iπa} x^{-a} / Γ(b-a) + e^x x^{a-b} / Γ(a)]` of the
/// large-`|x|` expansion, with no accuracy check.
pub fn kummer_m_leading(args: &KummerArgs, branch: AsymptoticBranch) -> Result<Complex64> {
    args.validate()?;
    Ok(asymptotic_estimate(args, branch, Truncation::Fixed(1, 1))?.value)
}

/// `M(a, b, x)` choosing between series and large-argument expansion.
pub fn kummer_m(a: Complex64, b: Complex64, x: Complex64) -> Result<Complex64> {
    kummer_m_with(&KummerArgs::new(a, b, x)?, &KummerOptions::default())
}

pub fn kummer_m_with(args: &KummerArgs, opts: &KummerOptions) -> Result<Complex64> {
    args.validate()?;
    let terminating = is_gamma_pole(args.a);
    if terminating || args.x.norm() < opts.switch_radius {
        return kummer_m_series_with(args, opts);
    }
    let branch = AsymptoticBranch::preferred(args.x);
    let asym = asymptotic_estimate(args, branch, Truncation::Adaptive(opts.max_asymptotic_terms))?;
    if asym.rel_err() <= opts.rel_tol {
        return Ok(asym.value);
    }
    // Large parameters can push the optimal truncation error up; the
    // double-double series may still cope.
    match series_estimate(args, opts.max_series_terms) {
        Ok(series) if series.rel_err() <= opts.rel_tol => Ok(series.value),
        Ok(series) => Err(Error::PrecisionLoss(format!(
            "M({}, {}, {}) unresolved: asymptotic error {:.1e}, series error {:.1e}",
            args.a,
            args.b,
            args.x,
            asym.rel_err(),
            series.rel_err()
        ))),
        Err(_) => Err(Error::PrecisionLoss(format!(
            "M({}, {}, {}) unresolved: asymptotic error {:.1e}",
            args.a,
            args.b,
            args.x,
            asym.rel_err()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::pochhammer;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    /// Independent oracle: each term built from explicit Pochhammer products and
    /// factorials, accumulated with Neumaier compensation.
    fn direct_series(a: Complex64, b: Complex64, x: Complex64, terms: i64) -> Complex64 {
        let mut sum = c(0.0, 0.0);
        let mut comp = c(0.0, 0.0);
        let mut fact = 1.0f64;
        let mut xn = c(1.0, 0.0);
        for n in 0..terms {
            if n > 0 {
                fact *= n as f64;
                xn *= x;
            }
            let t = pochhammer(a, n).unwrap() / pochhammer(b, n).unwrap() * xn / fact;
            if !t.is_finite() || t.norm() == 0.0 && n > 10 {
                break;
            }
            for (s, cc, v) in [(&mut sum.re, &mut comp.re, t.re), (&mut sum.im, &mut comp.im, t.im)] {
                let nt = *s + v;
                if s.abs() >= v.abs() {
                    *cc += (*s - nt) + v;
                } else {
                    *cc += (v - nt) + *s;
                }
                *s = nt;
            }
        }
        sum + comp
    }

    #[test]
    fn series_basics() {
        let args = KummerArgs::new(c(0.3, 1.0), c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(kummer_m_series(&args).unwrap(), c(1.0, 0.0));
        let args = KummerArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(rel(kummer_m_series(&args).unwrap(), c(std::f64::consts::E, 0.0)) < 1e-15);
    }

    #[test]
    fn series_matches_direct_summation() {
        let (a, b, x) = (c(0.5, 0.3), c(0.5, 0.0), c(0.0, 0.2));
        let oracle = direct_series(a, b, x, 400);
        let m = kummer_m_series(&KummerArgs::new(a, b, x).unwrap()).unwrap();
        assert!(rel(m, oracle) < 1e-15, "{m} vs {oracle}");
    }

    #[test]
    fn rejects_poles_in_b() {
        assert!(KummerArgs::new(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(kummer_m(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn exponential_identity_along_negative_imaginary_axis() {
        for r in [1.0, 10.0, 40.0, 100.0] {
            let x = c(0.0, -r);
            let m = kummer_m(c(1.0, 0.0), c(1.0, 0.0), x).unwrap();
            assert!(rel(m, x.exp()) < 1e-10, "|x| = {r}");
        }
        let args = KummerArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(40.0, 0.0)).unwrap();
        let m = kummer_m_asymptotic(&args, AsymptoticBranch::Plus, 12, 12).unwrap();
        assert!(rel(m, c(40f64.exp(), 0.0)) < 1e-10);
    }

    #[test]
    fn branch_selection() {
        assert_eq!(AsymptoticBranch::for_argument(c(0.0, -1.0)), AsymptoticBranch::Minus);
        assert_eq!(AsymptoticBranch::for_argument(c(-1.0, -1.0)), AsymptoticBranch::Minus);
        assert_eq!(AsymptoticBranch::for_argument(c(1.0, -1.0)), AsymptoticBranch::Plus);
        assert_eq!(AsymptoticBranch::for_argument(c(0.0, 1.0)), AsymptoticBranch::Plus);
        assert_eq!(AsymptoticBranch::for_argument(c(-1.0, 0.0)), AsymptoticBranch::Plus);
        let z = Complex64::from_polar(3.0, -std::f64::consts::FRAC_PI_4);
        assert_eq!(AsymptoticBranch::for_argument(z * z / 2.0), AsymptoticBranch::Minus);
    }

    #[test]
    fn series_and_asymptotic_agree_at_switch_radius() {
        let args = KummerArgs::new(c(0.25, 2.0), c(0.5, 0.0), c(0.0, -30.0)).unwrap();
        let s = kummer_m_series(&args).unwrap();
        let a = kummer_m_asymptotic(&args, AsymptoticBranch::Minus, 25, 25).unwrap();
        assert!(rel(a, s) < 1e-9, "{a} vs {s}");
        let d = kummer_m(args.a, args.b, args.x).unwrap();
        assert!(rel(d, s) < 1e-9);
        // Twelve terms are not enough here and the evaluator says so.
        assert!(matches!(
            kummer_m_asymptotic(&args, AsymptoticBranch::Minus, 12, 12),
            Err(Error::PrecisionLoss(_))
        ));
    }

    #[test]
    fn asymptotic_refuses_small_arguments() {
        let args = KummerArgs::new(c(0.25, 2.0), c(0.5, 0.0), c(0.0, -3.0)).unwrap();
        assert!(matches!(
            kummer_m_asymptotic(&args, AsymptoticBranch::Minus, 12, 12),
            Err(Error::PrecisionLoss(_))
        ));
    }

    #[test]
    fn terminating_and_exponential_cases() {
        // a = 0 gives 1; a = b gives e^x, both exactly representable by either form.
        let x = c(0.0, -45.0);
        assert!(rel(kummer_m(c(0.0, 0.0), c(0.5, 0.0), x).unwrap(), c(1.0, 0.0)) < 1e-15);
        assert!(rel(kummer_m(c(0.5, 0.0), c(0.5, 0.0), x).unwrap(), x.exp()) < 1e-12);
        // M(-2, b, x) = 1 - 2x/b + x²/(b(b+1))
        let b = c(1.5, 0.0);
        let x = c(3.0, -1.0);
        let expected = 1.0 - 2.0 * x / b + x * x / (b * (b + 1.0));
        assert!(rel(kummer_m(c(-2.0, 0.0), b, x).unwrap(), expected) < 1e-14);
    }

    proptest! {
        #[test]
        fn contiguous_relation(
            are in -1.5..1.5f64, aim in -3.0..3.0f64,
            bre in 0.2..2.0f64, bim in -1.0..1.0f64,
            r in 0.1..60.0f64, th in -3.1..3.1f64,
        ) {
            let a = c(are, aim);
            let b = c(bre, bim);
            let x = Complex64::from_polar(r, th);
            let m = |aa: Complex64| kummer_m(aa, b, x);
            if let (Ok(m0), Ok(m1), Ok(m2)) = (m(a - 1.0), m(a), m(a + 1.0)) {
                let lhs = (b - a) * m0 + (2.0 * a - b + x) * m1 - a * m2;
                let scale = ((b - a) * m0).norm() + ((2.0 * a - b + x) * m1).norm() + (a * m2).norm();
                prop_assert!(lhs.norm() <= 1e-8 * scale, "residual {} / {}", lhs.norm(), scale);
            }
        }

        #[test]
        fn overlap_annulus_consistency(
            aim in -3.0..3.0f64, are in -0.5..1.0f64, th in -3.0..3.0f64, r in 30.0..36.0f64,
            odd in proptest::bool::ANY,
        ) {
            let b = if odd { c(1.5, 0.0) } else { c(0.5, 0.0) };
            let args = KummerArgs::new(c(are, aim), b, Complex64::from_polar(r, th)).unwrap();
            let series = series_estimate(&args, 5000).unwrap();
            let asym = asymptotic_estimate(
                &args, AsymptoticBranch::preferred(args.x), Truncation::Adaptive(200),
            ).unwrap();
            prop_assume!(series.rel_err() < 1e-12 && asym.rel_err() < 1e-11);
            prop_assert!(rel(asym.value, series.value) < 1e-9,
                "asym {} series {}", asym.value, series.value);
        }
    }
}
