//! Self-check suite behind `ptbubble verify`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::tanh_identity;
use crate::dynamics::{analytic_solution, propagate, uniform_grid, TwoLevelState};
use crate::error::Result;
use crate::linalg::Mat2;
use crate::model::{EtaSchedule, ModelParams};
use crate::perturbation::{perturbative_corrections, PerturbationSetup};
use crate::specfun::{complex_gamma, kummer_m, kummer_m_series, KummerArgs};
use crate::spectra::find_bubble;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    fn record(&mut self, suite: &'static str, name: String, value: Result<f64>, tol: f64) {
        let (passed, detail) = match value {
            Ok(v) => (v <= tol, format!("{v:.3e} (tol {tol:.0e})")),
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check {
            suite,
            name,
            passed,
            detail,
        });
    }
}

/// Largest relative deviation of `|Γ(1/2 + iλ)|²` and `|Γ(1 + iλ)|²` from
/// `π / cosh(πλ)` and `πλ / sinh(πλ)`.
pub fn gamma_modulus_error(lambda: f64) -> Result<f64> {
    let half = complex_gamma(Complex64::new(0.5, lambda))?.norm_sqr();
    let one = complex_gamma(Complex64::new(1.0, lambda))?.norm_sqr();
    let e1 = (half - PI / (PI * lambda).cosh()).abs() / (PI / (PI * lambda).cosh());
    let e2 = (one - PI * lambda / (PI * lambda).sinh()).abs() / (PI * lambda / (PI * lambda).sinh());
    Ok(e1.max(e2))
}

/// Relative error of `M(1, 1, x) = e^x` at `x = -i r`.
pub fn kummer_exp_error(r: f64) -> Result<f64> {
    let x = Complex64::from_polar(r, -FRAC_PI_2);
    let m = kummer_m(1.0.into(), 1.0.into(), x)?;
    Ok((m - x.exp()).norm() / x.exp().norm())
}

/// Relative gap between the tanh identity's two sides at `γ̃² = 4λ`.
pub fn tanh_identity_error(lambda: f64) -> f64 {
    let (l, r) = tanh_identity(4.0 * lambda);
    (l - r).abs() / r.abs().max(f64::MIN_POSITIVE)
}

/// Random linear-sweep problem with `δx = 0`, `|δy| ≤ γ ≤ 1` and
/// `α ∈ [0.05, 0.5]`.
pub fn random_sweep(rng: &mut impl Rng) -> (ModelParams, Complex64, Complex64) {
    let gamma = rng.random_range(0.0..1.0);
    let delta_y = rng.random_range(-1.0..=1.0) * gamma;
    let alpha = rng.random_range(0.05..=0.5);
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let (a, b) = (c(), c());
    let p = ModelParams::new(0.0, 0.0, delta_y, gamma, alpha).expect("finite by construction");
    (p, a, b)
}

/// Largest `‖Ψ_numeric - Ψ_exact‖ / ‖Ψ_exact‖` over `n` points of `[0, t_end]`.
pub fn analytic_vs_numeric(
    p: &ModelParams,
    a: Complex64,
    b: Complex64,
    t_end: f64,
    n: usize,
) -> Result<f64> {
    let grid = uniform_grid(0.0, t_end, n);
    let tr = propagate(
        p,
        &EtaSchedule::linear(p.alpha),
        &TwoLevelState::new(a, b, 0.0),
        &grid,
    )?;
    let mut worst: f64 = 0.0;
    for s in &tr.samples {
        let ex = analytic_solution(p, (a, b), s.t())?;
        let d = (s.state.psi1 - ex.psi1).norm().hypot((s.state.psi2 - ex.psi2).norm());
        worst = worst.max(d / ex.norm());
    }
    Ok(worst)
}

/// Runs every check. `seed` drives the randomised ones.
pub fn run_all(seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::default();
    for lambda in [0.1, 0.5, 1.0, 3.0, 10.0] {
        rep.record("specfun", format!("gamma moduli, lambda = {lambda}"), gamma_modulus_error(lambda), 1e-12);
    }
    for r in [1.0, 10.0, 40.0] {
        rep.record("specfun", format!("M(1,1,x) = e^x, |x| = {r}"), kummer_exp_error(r), 1e-10);
    }
    for (a, r) in [(Complex64::new(0.25, 2.0), 30.0), (Complex64::new(-0.25, 0.7), 32.0)] {
        let x = Complex64::new(0.0, -r);
        let v = KummerArgs::new(a, 0.5.into(), x).and_then(|args| {
            let s = kummer_m_series(&args)?;
            let d = kummer_m(a, 0.5.into(), x)?;
            Ok((s - d).norm() / s.norm())
        });
        rep.record("specfun", format!("series/asymptotic overlap, a = {a}, |x| = {r}"), v, 1e-9);
    }
    for lambda in [0.1, 0.5, 1.0, 3.0, 10.0] {
        rep.record("tanh", format!("tanh identity, gt^2/4 = {lambda}"), Ok(tanh_identity_error(lambda)), 1e-12);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..20 {
        let (p, a, b) = random_sweep(&mut rng);
        rep.record(
            "analytic-vs-numeric",
            format!("case {k}: gamma = {:.3}, delta_y = {:.3}, alpha = {:.3}", p.gamma, p.delta_y, p.alpha),
            analytic_vs_numeric(&p, a, b, 10.0, 41),
            1e-6,
        );
    }

    for gamma in [0.05, 0.2, 0.4] {
        let v = ModelParams::stationary(0.0, 0.0, 0.0, gamma).and_then(|p| {
            let b = find_bubble(&p)?;
            Ok((b.eta_plus - gamma).abs().max((b.eta_minus + gamma).abs()))
        });
        rep.record("spectra", format!("EPs at +-gamma, gamma = {gamma}"), v, 1e-8);
    }

    let sz = Mat2::sigma_z();
    let pert_err = |lambda: f64| -> Result<f64> {
        let s = PerturbationSetup::new(sz, Mat2::sigma_x(), lambda)?;
        let approx = perturbative_corrections(&s)?.second_order();
        Ok((s.exact_eigenvalues()[0] - approx[0]).norm())
    };
    let ratio = pert_err(0.05).and_then(|a| Ok(a / pert_err(0.025)?));
    rep.record(
        "perturbation",
        "fourth-order error scaling (|ratio - 16|)".into(),
        ratio.map(|r| (r - 16.0).abs()),
        4.0,
    );
    let first = PerturbationSetup::new(sz, Mat2::sigma_x(), 0.05)
        .and_then(|s| perturbative_corrections(&s))
        .map(|r| r.e1[0].norm().max(r.e1[1].norm()));
    rep.record("perturbation", "first order vanishes".into(), first, 1e-14);
    rep
}
