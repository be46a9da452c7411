//! Closed-form long-time predictions for the linear sweep `η = αt`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::WeberSolution;
use crate::error::{Error, Result};
use crate::model::{ModelParams, DELTA_ZERO_TOL};
use crate::specfun::{kummer_m_leading, ln_gamma, AsymptoticBranch, KummerArgs};

/// Smallest `α t²` accepted by [`asymptotic_amplitudes`].
pub const ASYMPTOTIC_MIN_ALPHA_T2: f64 = 10.0;

/// `γ̃² = (γ² - δy²) / α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTilde {
    pub value_sq: f64,
}

impl GammaTilde {
    pub fn of(p: &ModelParams) -> Result<Self> {
        p.validate_sweep()?;
        Ok(GammaTilde {
            value_sq: (p.gamma * p.gamma - p.delta_y * p.delta_y) / p.alpha,
        })
    }
}

/// `ε = [i(γ² - δy² - δx²) + 2 δx δy] / (4α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Epsilon {
    pub value: Complex64,
}

impl Epsilon {
    pub fn of(p: &ModelParams) -> Result<Self> {
        p.validate_sweep()?;
        let im = p.gamma.powi(2) - p.delta_y.powi(2) - p.delta_x.powi(2);
        Ok(Epsilon {
            value: Complex64::new(2.0 * p.delta_x * p.delta_y, im) / (4.0 * p.alpha),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeLabel {
    RatioDiverges,
    RatioConvergesRp,
    NoEqualDistribution,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::RatioDiverges => "ratio-diverges",
            RegimeLabel::RatioConvergesRp => "ratio-converges-rp",
            RegimeLabel::NoEqualDistribution => "no-equal-distribution",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub label: RegimeLabel,
    /// `δy δx / α`
    pub product: f64,
    /// The product sits on a threshold `±1/2`.
    pub marginal: bool,
}

/// `a_{1,2} = [i(γ² - δx² - δy²) + 2 δx γ] / (2α) ∓ 1/2`.
pub fn weber_constants(p: &ModelParams) -> Result<(Complex64, Complex64)> {
    p.validate_sweep()?;
    let centre = Complex64::new(
        2.0 * p.delta_x * p.gamma,
        p.gamma.powi(2) - p.delta_x.powi(2) - p.delta_y.powi(2),
    ) / (2.0 * p.alpha);
    Ok((centre - 0.5, centre + 0.5))
}

/// Both sides of `λ |Γ(1/2 + iλ)|² / |Γ(1 + iλ)|² = tanh(πλ)` at `λ = γ̃²/4`,
/// returned as `(lhs, rhs)`.
pub fn tanh_identity(gamma_tilde_sq: f64) -> (f64, f64) {
    let lambda = gamma_tilde_sq / 4.0;
    let rhs = (PI * lambda).tanh();
    if lambda == 0.0 {
        return (0.0, rhs);
    }
    let half = ln_gamma(Complex64::new(0.5, lambda)).expect("Re = 1/2 is never a pole");
    let one = ln_gamma(Complex64::new(1.0, lambda)).expect("Re = 1 is never a pole");
    let lhs = lambda * (2.0 * (half.re - one.re)).exp();
    (lhs, rhs)
}

fn require_no_delta_x(p: &ModelParams, what: &str) -> Result<()> {
    if p.delta_x.abs() >= DELTA_ZERO_TOL {
        return Err(Error::NotApplicable(format!(
            "{what} assumes delta_x = 0 (got {})",
            p.delta_x
        )));
    }
    Ok(())
}

/// Adiabatic-limit amplitude ratio `|ψ1/ψ2| → |(γ - δy)/(γ + δy)|^{1/2}`
/// after a slow sweep through the PT-broken bubble. Square it for the
/// occupation-probability ratio.
pub fn predicted_ratio(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    require_no_delta_x(p, "predicted_ratio")?;
    if p.gamma <= p.delta_y.abs() {
        return Err(Error::NoExceptionalPoint(format!(
            "gamma = {} <= |delta_y| = {}: the sweep never enters a PT-broken phase",
            p.gamma,
            p.delta_y.abs()
        )));
    }
    Ok(((p.gamma - p.delta_y) / (p.gamma + p.delta_y)).abs().sqrt())
}

const MARGINAL_TOL: f64 = 1e-12;

/// Long-time behaviour of `|ψ1/ψ2|` for `δx ≠ 0`, starting from `Ψ(0) = (0, 1)`.
pub fn regime_classify_dx(p: &ModelParams) -> Result<RegimeReport> {
    p.validate_sweep()?;
    if p.delta_x.abs() < DELTA_ZERO_TOL {
        return Err(Error::NotApplicable(
            "delta_x = 0: use predicted_ratio instead".into(),
        ));
    }
    let product = p.delta_y * p.delta_x / p.alpha;
    let marginal = (product.abs() - 0.5).abs() <= MARGINAL_TOL;
    let label = if product < -0.5 && !marginal {
        RegimeLabel::RatioDiverges
    } else {
        RegimeLabel::NoEqualDistribution
    };
    Ok(RegimeReport {
        label,
        product,
        marginal,
    })
}

/// Regime for any parameters: `ratio-converges-rp` when `δx = 0`, otherwise
/// [`regime_classify_dx`].
pub fn regime(p: &ModelParams) -> Result<RegimeReport> {
    if p.delta_x.abs() < DELTA_ZERO_TOL {
        p.validate_sweep()?;
        return Ok(RegimeReport {
            label: RegimeLabel::RatioConvergesRp,
            product: 0.0,
            marginal: false,
        });
    }
    regime_classify_dx(p)
}

/// Leading-order `(ψ1, ψ2)` at large `α t²`: each Kummer function replaced by
/// the first term of both of its asymptotic series.
pub fn asymptotic_amplitudes(
    p: &ModelParams,
    init: (Complex64, Complex64),
    t: f64,
) -> Result<(Complex64, Complex64)> {
    require_no_delta_x(p, "asymptotic_amplitudes")?;
    let w = WeberSolution::new(p, init.0, init.1)?;
    let at2 = p.alpha * t * t;
    if !(at2 >= ASYMPTOTIC_MIN_ALPHA_T2) {
        return Err(Error::OutOfRegime(format!(
            "alpha t^2 = {at2:.3} < {ASYMPTOTIC_MIN_ALPHA_T2}"
        )));
    }
    let z = Complex64::from_polar((2.0 * p.alpha).sqrt() * t, -FRAC_PI_4);
    let x = Complex64::new(0.0, -at2);
    let gauss = (-x * 0.5).exp();
    let lead = |a: Complex64, b: f64| {
        let args = KummerArgs::new(a, b.into(), x)?;
        kummer_m_leading(&args, AsymptoticBranch::Minus)
    };
    let y = |a_nu: Complex64| -> Result<(Complex64, Complex64)> {
        let even = gauss * lead(a_nu * 0.5 + 0.25, 0.5)?;
        let odd = z * gauss * lead(a_nu * 0.5 + 0.75, 1.5)?;
        Ok((even, odd))
    };
    let (y11, y12) = y(w.a1)?;
    let (y21, y22) = y(w.a2)?;
    Ok((w.c11 * y11 + w.c12 * y12, w.c21 * y21 + w.c22 * y22))
}
