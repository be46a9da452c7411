//! Perturbation theory for a dissipative term `iλV` added to a Hermitian `H0`.
//!
//! The zeroth-order problem is Hermitian, so ordinary Rayleigh–Schrödinger
//! sums apply. Levels are ordered `[lower, upper]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, normalized, Mat2, Vec2};
use crate::spectra::eigenvalues;

pub const HERMITIAN_TOL: f64 = 1e-12;

/// Below this zeroth-order gap the nondegenerate sums are refused.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSetup {
    pub h0: Mat2,
    pub v_p: Mat2,
    pub lambda: f64,
}

impl PerturbationSetup {
    pub fn new(h0: Mat2, v_p: Mat2, lambda: f64) -> Result<Self> {
        let s = PerturbationSetup { h0, v_p, lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must be finite and non-negative",
                self.lambda
            )));
        }
        for (name, m) in [("h0", &self.h0), ("v_p", &self.v_p)] {
            if !m.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} has non-finite entries")));
            }
            if !m.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::InvalidParameter(format!("{name} is not Hermitian")));
            }
        }
        Ok(())
    }

    /// `H0 + iλV`.
    pub fn full_hamiltonian(&self) -> Mat2 {
        self.h0 + self.v_p.scale(Complex64::new(0.0, self.lambda))
    }

    /// Exact eigenvalues of [`Self::full_hamiltonian`], state-1 first.
    pub fn exact_eigenvalues(&self) -> [Complex64; 2] {
        eigenvalues(&self.full_hamiltonian())
    }
}

/// Closed-form diagonalisation of a Hermitian 2×2 matrix: ascending real
/// eigenvalues and orthonormal eigenvectors. A scalar matrix gets the
/// standard basis.
pub fn hermitian_eigen(h: &Mat2) -> ([f64; 2], [Vec2; 2]) {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    if r == 0.0 {
        return ([mean, mean], [[one, zero], [zero, one]]);
    }
    let vec_for = |e: f64| -> Vec2 {
        // Rows of (H - e) give two candidate null vectors; take the better one.
        let c1 = [b, Complex64::new(e - a, 0.0)];
        let c2 = [Complex64::new(e - d, 0.0), b.conj()];
        let pick = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
        normalized(&pick)
    };
    let (lo, hi) = (mean - r, mean + r);
    ([lo, hi], [vec_for(lo), vec_for(hi)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub e0: [f64; 2],
    pub e1: [Complex64; 2],
    pub e2: [Complex64; 2],
    /// `E_upper - E_lower` of `H0`.
    pub gap0: f64,
}

impl CorrectionReport {
    /// `E0 + E1 + E2` per level.
    pub fn second_order(&self) -> [Complex64; 2] {
        [0, 1].map(|k| self.e0[k] + self.e1[k] + self.e2[k])
    }
}

/// First- and second-order corrections of both levels.
pub fn perturbative_corrections(s: &PerturbationSetup) -> Result<CorrectionReport> {
    s.validate()?;
    let (e0, vecs) = hermitian_eigen(&s.h0);
    let gap0 = e0[1] - e0[0];
    if gap0 <= DEGENERACY_TOL {
        return Err(Error::NotApplicable(format!(
            "H0 is degenerate (gap {gap0:e}); use degenerate_block"
        )));
    }
    let i_lambda = Complex64::new(0.0, s.lambda);
    let v = |a: usize, b: usize| s.v_p.sandwich(&vecs[a], &vecs[b]);
    let e1 = [0, 1].map(|k| i_lambda * v(k, k));
    let e2 = [0, 1].map(|k| {
        let o = 1 - k;
        Complex64::new(-s.lambda * s.lambda * v(k, o).norm_sqr() / (e0[k] - e0[o]), 0.0)
    });
    Ok(CorrectionReport { e0, e1, e2, gap0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateBlock {
    /// `iλ ⟨a|V|b⟩` in the basis (upper, lower) of `H0`.
    pub m: Mat2,
    /// Eigenvalues of `m`, measured from the mean zeroth-order level.
    pub eigenvalues: [Complex64; 2],
}

/// The effective `iλV` block inside a near-degenerate pair. It is
/// skew-Hermitian, so its spectrum is purely imaginary.
pub fn degenerate_block(s: &PerturbationSetup) -> Result<DegenerateBlock> {
    s.validate()?;
    let (_, vecs) = hermitian_eigen(&s.h0);
    let basis = [vecs[1], vecs[0]];
    let w = |a: usize, b: usize| s.v_p.sandwich(&basis[a], &basis[b]);
    let herm = Mat2::new(w(0, 0), w(0, 1), w(1, 0), w(1, 1));
    let i_lambda = Complex64::new(0.0, s.lambda);
    let m = herm.scale(i_lambda);
    if (m + m.dagger()).norm() > 1e-12 * m.norm().max(1.0) {
        return Err(Error::PrecisionLoss("degenerate block is not skew-Hermitian".into()));
    }
    let (ev, _) = hermitian_eigen(&herm);
    Ok(DegenerateBlock {
        m,
        eigenvalues: ev.map(|e| i_lambda * e),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubblePrediction {
    /// `[η_min, η_max]` where `ΔE(η) < 2λ |⟨e|V|g⟩|`.
    pub predicted: Option<(f64, f64)>,
    /// `[η_min, η_max]` where `H0(η) + iλV` has a complex-conjugate pair.
    pub exact: Option<(f64, f64)>,
    /// The two windows disagree on whether a bubble exists, or the
    /// heuristic sits on its threshold somewhere on the scan.
    pub marginal: bool,
}

fn refine_edge(f: &impl Fn(f64) -> bool, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if f(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

fn window(f: impl Fn(f64) -> bool, scan: &[f64]) -> Option<(f64, f64)> {
    let flags: Vec<bool> = scan.iter().map(|&e| f(e)).collect();
    let first = flags.iter().position(|&b| b)?;
    let last = flags.iter().rposition(|&b| b)?;
    let lo = if first > 0 {
        refine_edge(&f, scan[first], scan[first - 1])
    } else {
        scan[first]
    };
    let hi = if last + 1 < scan.len() {
        refine_edge(&f, scan[last], scan[last + 1])
    } else {
        scan[last]
    };
    Some((lo, hi))
}

/// Heuristic EP window from comparing the zeroth-order gap with the coupling,
/// next to the exact window, over an increasing `eta_scan`. `h0_builder`
/// supplies `H0(η)`; `s.h0` is not used.
pub fn bubble_prediction(
    s: &PerturbationSetup,
    eta_scan: &[f64],
    h0_builder: impl Fn(f64) -> Mat2,
) -> Result<BubblePrediction> {
    s.validate()?;
    if eta_scan.is_empty() || eta_scan.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("eta_scan must be non-empty and increasing".into()));
    }
    for &eta in eta_scan {
        PerturbationSetup::new(h0_builder(eta), s.v_p, s.lambda)?;
    }
    let margin = |eta: f64| {
        let (e, v) = hermitian_eigen(&h0_builder(eta));
        (e[1] - e[0]) - 2.0 * s.lambda * s.v_p.sandwich(&v[1], &v[0]).norm()
    };
    let iv = s.v_p.scale(Complex64::new(0.0, s.lambda));
    let broken = |eta: f64| {
        let h = h0_builder(eta) + iv;
        let [e1, e2] = eigenvalues(&h);
        (e1.im - e2.im).abs() > 1e-12 * h.norm().max(1.0)
    };
    let predicted = window(|e| margin(e) < 0.0, eta_scan);
    let exact = window(broken, eta_scan);
    let touching = eta_scan
        .iter()
        .any(|&e| margin(e).abs() <= 1e-9 * s.lambda.max(1e-300));
    Ok(BubblePrediction {
        predicted,
        exact,
        marginal: predicted.is_some() != exact.is_some() || touching,
    })
}
