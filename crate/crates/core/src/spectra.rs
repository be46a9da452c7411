//! Instantaneous eigenstructure of 2×2 non-Hermitian Hamiltonians.
//!
//! Eigenvalues are closed-form roots of the characteristic polynomial. Right
//! eigenvectors satisfy `H r = e r`, left eigenvectors `l† H = e l†`; both are
//! returned with unit Euclidean norm.
//!
//! State 1 is the eigenvalue with the smaller real part, or with the smaller
//! imaginary part when the real parts agree.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, normalized, Mat2, Vec2};
use crate::model::{hamiltonian_unchecked, ModelParams};

/// Eigenvalues closer than this (relative to ‖H‖) are treated as coalesced.
pub const COALESCENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub e1: Complex64,
    pub e2: Complex64,
    pub r1: Vec2,
    pub r2: Vec2,
    pub l1: Vec2,
    pub l2: Vec2,
    /// `max_k 1/|l_k† r_k|` for unit vectors; 1 for normal matrices and
    /// unbounded towards an exceptional point.
    pub condition: f64,
}

impl EigenSystem {
    pub fn eigenvalue(&self, which: usize) -> Complex64 {
        if which == 1 {
            self.e1
        } else {
            self.e2
        }
    }

    pub fn right(&self, which: usize) -> &Vec2 {
        if which == 1 {
            &self.r1
        } else {
            &self.r2
        }
    }

    pub fn left(&self, which: usize) -> &Vec2 {
        if which == 1 {
            &self.l1
        } else {
            &self.l2
        }
    }
}

fn real_part_tol(h: &Mat2) -> f64 {
    1e-12 * h.norm().max(1.0)
}

/// Orders a pair so that state 1 has the smaller real part (smaller imaginary
/// part on ties).
fn order_pair(a: Complex64, b: Complex64, tol: f64) -> (Complex64, Complex64) {
    if (a.re - b.re).abs() <= tol {
        if a.im <= b.im {
            (a, b)
        } else {
            (b, a)
        }
    } else if a.re < b.re {
        (a, b)
    } else {
        (b, a)
    }
}

fn raw_eigenvalues(h: &Mat2) -> (Complex64, Complex64) {
    let half_trace = h.trace() * 0.5;
    let half_diff = (h[(0, 0)] - h[(1, 1)]) * 0.5;
    let s = (half_diff * half_diff + h[(0, 1)] * h[(1, 0)]).sqrt();
    (half_trace - s, half_trace + s)
}

/// Both eigenvalues, labelled by the state-1 convention. Well defined at
/// exceptional points.
pub fn eigenvalues(h: &Mat2) -> [Complex64; 2] {
    let (a, b) = raw_eigenvalues(h);
    let (e1, e2) = order_pair(a, b, real_part_tol(h));
    [e1, e2]
}

/// Unit norm with the larger component real and positive (the first one on
/// ties), so eigenvector phases are reproducible.
fn gauge_fixed(v: &Vec2) -> Vec2 {
    let v = normalized(v);
    let k = if v[1].norm() > v[0].norm() * (1.0 + 1e-12) { 1 } else { 0 };
    let phase = v[k].conj() / v[k].norm();
    [v[0] * phase, v[1] * phase]
}

fn right_vector(h: &Mat2, e: Complex64) -> Option<Vec2> {
    let c1 = [h[(0, 1)], e - h[(0, 0)]];
    let c2 = [e - h[(1, 1)], h[(1, 0)]];
    let v = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
    (norm(&v) > 0.0).then(|| gauge_fixed(&v))
}

/// `l` with `l† H = e l†`, i.e. `w = conj(l)` solves `wᵀ H = e wᵀ`.
fn left_vector(h: &Mat2, e: Complex64) -> Option<Vec2> {
    let c1 = [h[(1, 0)], e - h[(0, 0)]];
    let c2 = [e - h[(1, 1)], h[(0, 1)]];
    let w = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
    (norm(&w) > 0.0).then(|| gauge_fixed(&[w[0].conj(), w[1].conj()]))
}

/// Closed-form eigensystem of a 2×2 complex matrix.
///
/// Fails with [`Error::Coalescence`] when the two eigenvalues coincide to
/// within `1e-8 ‖H‖` and `H` is not a multiple of the identity.
pub fn eigensystem(h: &Mat2) -> Result<EigenSystem> {
    if !h.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let [e1, e2] = eigenvalues(h);
    let scale = h.norm();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    if (e1 - e2).norm() <= COALESCENCE_TOL * scale || scale == 0.0 {
        let off = h[(0, 1)].norm() + h[(1, 0)].norm();
        let diag = (h[(0, 0)] - h[(1, 1)]).norm();
        if off + diag <= 1e-14 * scale.max(f64::MIN_POSITIVE) || scale == 0.0 {
            // Scalar matrix: every vector is an eigenvector.
            return Ok(EigenSystem {
                e1,
                e2,
                r1: [one, zero],
                r2: [zero, one],
                l1: [one, zero],
                l2: [zero, one],
                condition: 1.0,
            });
        }
        let e = (e1 + e2) * 0.5;
        let v = right_vector(h, e).unwrap_or([one, zero]);
        return Err(Error::Coalescence {
            eigenvalue: e,
            eigenvector: v,
        });
    }

    let vec_or = |v: Option<Vec2>| v.ok_or(Error::Coalescence {
        eigenvalue: e1,
        eigenvector: [one, zero],
    });
    let r1 = vec_or(right_vector(h, e1))?;
    let r2 = vec_or(right_vector(h, e2))?;
    let l1 = vec_or(left_vector(h, e1))?;
    let l2 = vec_or(left_vector(h, e2))?;
    let overlap = inner(&l1, &r1).norm().min(inner(&l2, &r2).norm());
    let condition = if overlap > 0.0 { 1.0 / overlap } else { f64::INFINITY };
    Ok(EigenSystem {
        e1,
        e2,
        r1,
        r2,
        l1,
        l2,
        condition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PtPhase {
    RealSpectrum,
    Broken,
}

fn require_pt(p: &ModelParams) -> Result<()> {
    if !p.is_pt_symmetric() {
        return Err(Error::NotApplicable(format!(
            "delta_x = {} breaks PT symmetry; the real/broken dichotomy does not apply",
            p.delta_x
        )));
    }
    p.validate()
}

fn is_broken(p: &ModelParams, eta: f64) -> bool {
    let h = hamiltonian_unchecked(p, eta);
    let tol = 1e-10 * h.norm().max(1.0);
    eigenvalues(&h).iter().any(|e| e.im.abs() >= tol)
}

/// Real spectrum vs complex-conjugate pair, for PT-symmetric parameters.
pub fn pt_phase(p: &ModelParams, eta: f64) -> Result<PtPhase> {
    require_pt(p)?;
    if !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta = {eta} is not finite")));
    }
    Ok(if is_broken(p, eta) {
        PtPhase::Broken
    } else {
        PtPhase::RealSpectrum
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleReport {
    pub exists: bool,
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub diameter: f64,
}

impl BubbleReport {
    fn absent() -> Self {
        BubbleReport {
            exists: false,
            eta_minus: 0.0,
            eta_plus: 0.0,
            diameter: 0.0,
        }
    }
}

/// Bisects between a broken point `inside` and an unbroken point `outside`.
fn bisect_edge(p: &ModelParams, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if is_broken(p, mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// Locates the PT-breaking bubble around η = 0 by bisection on the sign of
/// `|Im E(η)|`.
pub fn find_bubble(p: &ModelParams) -> Result<BubbleReport> {
    require_pt(p)?;
    if !is_broken(p, 0.0) {
        return Ok(BubbleReport::absent());
    }
    let mut reach = p.gamma.max(1e-6);
    while is_broken(p, reach) || is_broken(p, -reach) {
        reach *= 2.0;
        if !reach.is_finite() {
            return Err(Error::NotApplicable("spectrum never becomes real".into()));
        }
    }
    let eta_plus = bisect_edge(p, 0.0, reach);
    let eta_minus = bisect_edge(p, 0.0, -reach);
    Ok(BubbleReport {
        exists: true,
        eta_minus,
        eta_plus,
        diameter: eta_plus - eta_minus,
    })
}

/// Bubble diameter for each γ, other parameters taken from `p`.
pub fn bubble_size_scan(p: &ModelParams, gammas: &[f64]) -> Result<Vec<(f64, f64)>> {
    gammas
        .par_iter()
        .map(|&g| {
            let q = ModelParams { gamma: g, ..*p };
            find_bubble(&q).map(|b| (g, b.diameter))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub eta: f64,
    pub e1: Complex64,
    pub e2: Complex64,
}

/// Eigenvalues over an η grid. The first point uses the state-1 rule; later
/// points keep each branch continuous by nearest-neighbour matching.
pub fn spectrum_scan(p: &ModelParams, etas: &[f64]) -> Result<Vec<SpectrumPoint>> {
    p.validate()?;
    let mut out: Vec<SpectrumPoint> = Vec::with_capacity(etas.len());
    for &eta in etas {
        if !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("eta = {eta} is not finite")));
        }
        let [a, b] = eigenvalues(&hamiltonian_unchecked(p, eta));
        let (e1, e2) = match out.last() {
            None => (a, b),
            Some(prev) => {
                let keep = (prev.e1 - a).norm() + (prev.e2 - b).norm();
                let swap = (prev.e1 - b).norm() + (prev.e2 - a).norm();
                if swap < keep {
                    (b, a)
                } else {
                    (a, b)
                }
            }
        };
        out.push(SpectrumPoint { eta, e1, e2 });
    }
    Ok(out)
}

/// How a spin expectation value is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectationKind {
    /// `r† σ r / r† r`: the polarisation of the right eigenstate.
    #[default]
    Right,
    /// `l† σ r / l† r`
    Biorthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinExpectation {
    pub sx: Complex64,
    pub sy: Complex64,
    pub sz: Complex64,
}

/// Pauli expectation values in eigenstate `which` (1 or 2).
pub fn spin_expectations(
    sys: &EigenSystem,
    which: usize,
    kind: ExpectationKind,
) -> Result<SpinExpectation> {
    if which != 1 && which != 2 {
        return Err(Error::InvalidArgument(format!("eigenstate index {which} is not 1 or 2")));
    }
    if !sys.condition.is_finite() {
        return Err(Error::Coalescence {
            eigenvalue: sys.eigenvalue(which),
            eigenvector: *sys.right(which),
        });
    }
    let r = sys.right(which);
    let bra = match kind {
        ExpectationKind::Right => r,
        ExpectationKind::Biorthogonal => sys.left(which),
    };
    let den = inner(bra, r);
    let ev = |m: Mat2| m.sandwich(bra, r) / den;
    Ok(SpinExpectation {
        sx: ev(Mat2::sigma_x()),
        sy: ev(Mat2::sigma_y()),
        sz: ev(Mat2::sigma_z()),
    })
}
