//! Time evolution `i∂tΨ = H(t)Ψ`: adaptive propagation, the exact linear-sweep
//! solution and the cyclic protocol with biorthogonal projection coefficients.
//!
//! Evolution is not unitary. Amplitudes are propagated raw and can grow well
//! beyond 1; see [`loss_normalization`] for the optional background-loss gauge.

mod integrator;
mod weber_solution;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, Vec2};
use crate::model::{hamiltonian_unchecked, EtaSchedule, ModelParams, ScheduleKind};
use crate::spectra::{eigensystem, eigenvalues, COALESCENCE_TOL};

pub use integrator::{Dopri5, StepStats, DEFAULT_ATOL, DEFAULT_RTOL, MAGNITUDE_LIMIT};
pub use weber_solution::{analytic_solution, analytic_solution_dx, WeberSolution};

/// Samples whose eigenvector condition number exceeds this carry no projection.
pub const EP_CONDITION_LIMIT: f64 = 1e8;

/// Samples per cyclic run, uniform over `[0, 2 t_f]`.
pub const CYCLIC_SAMPLES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelState {
    pub psi1: Complex64,
    pub psi2: Complex64,
    pub t: f64,
}

impl TwoLevelState {
    pub fn new(psi1: Complex64, psi2: Complex64, t: f64) -> Self {
        TwoLevelState { psi1, psi2, t }
    }

    pub fn amplitudes(&self) -> Vec2 {
        [self.psi1, self.psi2]
    }

    pub fn norm(&self) -> f64 {
        self.psi1.norm().hypot(self.psi2.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.psi1.is_finite() && self.psi2.is_finite() && self.t.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    /// `Ψ(t0) = (a, b)`.
    Amplitudes { a: Complex64, b: Complex64 },
    /// `cos θ |Ψ1(t0)⟩ + e^{iφ} sin θ |Ψ2(t0)⟩` in the instantaneous right eigenbasis.
    Eigenbasis { theta: f64, phi: f64 },
}

impl InitialCondition {
    pub fn state(&self, p: &ModelParams, s: &EtaSchedule, t0: f64) -> Result<TwoLevelState> {
        match *self {
            InitialCondition::Amplitudes { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidArgument("initial amplitudes must be finite".into()));
                }
                if a.norm() == 0.0 && b.norm() == 0.0 {
                    return Err(Error::InvalidArgument("initial state (A, B) = (0, 0)".into()));
                }
                Ok(TwoLevelState::new(a, b, t0))
            }
            InitialCondition::Eigenbasis { theta, phi } => {
                if !(theta.is_finite() && phi.is_finite()) {
                    return Err(Error::InvalidArgument("theta and phi must be finite".into()));
                }
                let h = hamiltonian_unchecked(p, s.eta_at(t0));
                let sys = eigensystem(&h)?;
                let w2 = Complex64::from_polar(theta.sin(), phi);
                let ct = theta.cos();
                Ok(TwoLevelState::new(
                    sys.r1[0] * ct + sys.r2[0] * w2,
                    sys.r1[1] * ct + sys.r2[1] * w2,
                    t0,
                ))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub state: TwoLevelState,
    pub eta: f64,
    pub e1: Complex64,
    pub e2: Complex64,
    /// `None` close to an exceptional point, where the normalisation is undefined.
    pub c1: Option<Complex64>,
    pub c2: Option<Complex64>,
}

impl Sample {
    pub fn t(&self) -> f64 {
        self.state.t
    }

    pub fn ep_flag(&self) -> bool {
        self.c1.is_none()
    }

    pub fn abs_c(&self) -> Option<(f64, f64)> {
        Some((self.c1?.norm(), self.c2?.norm()))
    }

    fn build(p: &ModelParams, eta: f64, state: TwoLevelState) -> Sample {
        let h = hamiltonian_unchecked(p, eta);
        let [e1, e2] = eigenvalues(&h);
        let (c1, c2) = match projection_coefficients(&state, &h) {
            Ok((a, b)) => (Some(a), Some(b)),
            Err(_) => (None, None),
        };
        Sample {
            state,
            eta,
            e1,
            e2,
            c1,
            c2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub schedule: EtaSchedule,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    /// The sample whose time is closest to `t`.
    pub fn nearest(&self, t: f64) -> &Sample {
        let i = self.samples.partition_point(|s| s.t() < t);
        match (i.checked_sub(1), self.samples.get(i)) {
            (Some(j), Some(b)) if (t - self.samples[j].t()) < (b.t() - t) => &self.samples[j],
            (_, Some(b)) => b,
            (Some(j), None) => &self.samples[j],
            (None, None) => unreachable!("trajectories are never empty"),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Uniform grid of `n ≥ 2` points over `[t0, t1]` with exact endpoints.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t0];
    }
    let step = (t1 - t0) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { t1 } else { t0 + step * k as f64 })
        .collect()
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid contains non-finite values".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Integrates `i∂tΨ = H(η(t))Ψ` from `init` (at `t_grid[0]`) and records a
/// [`Sample`] at every grid point.
pub fn propagate(
    p: &ModelParams,
    s: &EtaSchedule,
    init: &TwoLevelState,
    t_grid: &[f64],
) -> Result<Trajectory> {
    p.validate()?;
    s.validate()?;
    check_grid(t_grid)?;
    if init.t != t_grid[0] {
        return Err(Error::InvalidArgument(format!(
            "initial state is at t = {} but the grid starts at {}",
            init.t, t_grid[0]
        )));
    }
    if !init.is_finite() {
        return Err(Error::InvalidArgument("initial state is not finite".into()));
    }
    if s.kind == ScheduleKind::Cyclic && t_grid[0] < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cyclic schedule is defined for t >= 0, got {}",
            t_grid[0]
        )));
    }

    let params = *p;
    let sched = *s;
    let mi = Complex64::new(0.0, -1.0);
    let mut ig = Dopri5::new(move |t, y: &Vec2| {
        let hy = hamiltonian_unchecked(&params, sched.eta_at(t)).apply(y);
        [mi * hy[0], mi * hy[1]]
    });
    // The cyclic ramp has a kink at t_f; never step across it.
    let kink = (s.kind == ScheduleKind::Cyclic).then_some(s.t_f);

    let mut samples = Vec::with_capacity(t_grid.len());
    let mut y = init.amplitudes();
    samples.push(Sample::build(p, s.eta_at(t_grid[0]), *init));
    for w in t_grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        y = match kink {
            Some(k) if t0 < k && k < t1 => {
                let mid = ig.advance(t0, y, k)?;
                ig.advance(k, mid, t1)?
            }
            _ => ig.advance(t0, y, t1)?,
        };
        let state = TwoLevelState::new(y[0], y[1], t1);
        samples.push(Sample::build(p, s.eta_at(t1), state));
    }
    Ok(Trajectory {
        params: *p,
        schedule: *s,
        samples,
    })
}

/// Biorthogonal projections `C_k = ⟨l_k|Ψ⟩ / |⟨l_k|r_k⟩|` onto the
/// instantaneous eigenstates of `h`, with unit right eigenvectors.
///
/// Fails with [`Error::Coalescence`] at exceptional points, where the
/// condition number exceeds [`EP_CONDITION_LIMIT`], and at degenerate points,
/// where the eigenbasis is not unique.
pub fn projection_coefficients(
    state: &TwoLevelState,
    h: &crate::linalg::Mat2,
) -> Result<(Complex64, Complex64)> {
    let sys = eigensystem(h)?;
    let degenerate = (sys.e1 - sys.e2).norm() <= COALESCENCE_TOL * h.norm();
    if degenerate || !(sys.condition <= EP_CONDITION_LIMIT) {
        return Err(Error::Coalescence {
            eigenvalue: (sys.e1 + sys.e2) * 0.5,
            eigenvector: sys.r1,
        });
    }
    let psi = state.amplitudes();
    let c = |l: &Vec2, r: &Vec2| inner(l, &psi) / inner(l, r).norm();
    Ok((c(&sys.l1, &sys.r1), c(&sys.l2, &sys.r2)))
}

fn cyclic_schedule(p: &ModelParams, t_f: f64) -> Result<EtaSchedule> {
    p.validate()?;
    if !(t_f.is_finite() && t_f > 0.0) {
        return Err(Error::InvalidParameter(format!("t_f = {t_f} must be positive")));
    }
    let s = EtaSchedule::cyclic(t_f);
    // A caller-supplied sweep rate must agree with the ramp.
    if p.alpha != 0.0 && (p.alpha * t_f - 1.0).abs() > 1e-12 {
        return Err(Error::InconsistentSchedule(format!(
            "alpha * t_f = {} but the cyclic ramp requires 1",
            p.alpha * t_f
        )));
    }
    s.validate()?;
    Ok(s)
}

/// The out-and-back ramp `η: -1 → 0 → -1` over `[0, 2 t_f]` starting from
/// `cos θ |Ψ1⟩ + e^{iφ} sin θ |Ψ2⟩`, sampled at [`CYCLIC_SAMPLES`] points.
pub fn cyclic_experiment(p: &ModelParams, theta: f64, phi: f64, t_f: f64) -> Result<Trajectory> {
    cyclic_experiment_with(p, theta, phi, t_f, CYCLIC_SAMPLES)
}

pub fn cyclic_experiment_with(
    p: &ModelParams,
    theta: f64,
    phi: f64,
    t_f: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let s = cyclic_schedule(p, t_f)?;
    let p = p.with_alpha(s.alpha);
    let init = InitialCondition::Eigenbasis { theta, phi }.state(&p, &s, 0.0)?;
    propagate(&p, &s, &init, &uniform_grid(0.0, 2.0 * t_f, n_samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaScanRow {
    pub theta: f64,
    /// `||C1| - |C2||` at `2 t_f`.
    pub delta_c: Option<f64>,
    pub abs_c1_end: Option<f64>,
    pub abs_c2_end: Option<f64>,
    /// `|C2| / |C1|` at `t_f`.
    pub ratio_tf: Option<f64>,
    pub abs_c1_tf: Option<f64>,
    pub abs_c2_tf: Option<f64>,
}

/// Runs the cyclic protocol for every `θ` in parallel and reports the
/// final imbalance and the mid-protocol ratio.
pub fn initial_state_scan(
    p: &ModelParams,
    thetas: &[f64],
    phi: f64,
    t_f: f64,
) -> Result<Vec<ThetaScanRow>> {
    let s = cyclic_schedule(p, t_f)?;
    let p = p.with_alpha(s.alpha);
    let grid = [0.0, t_f, 2.0 * t_f];
    thetas
        .par_iter()
        .map(|&theta| {
            let init = InitialCondition::Eigenbasis { theta, phi }.state(&p, &s, 0.0)?;
            let traj = propagate(&p, &s, &init, &grid)?;
            let mid = traj.samples[1].abs_c();
            let end = traj.samples[2].abs_c();
            Ok(ThetaScanRow {
                theta,
                delta_c: end.map(|(a, b)| (a - b).abs()),
                abs_c1_end: end.map(|e| e.0),
                abs_c2_end: end.map(|e| e.1),
                ratio_tf: mid.map(|(a, b)| b / a),
                abs_c1_tf: mid.map(|m| m.0),
                abs_c2_tf: mid.map(|m| m.1),
            })
        })
        .collect()
}

/// Probability scale `e^{-γ t}` of a uniform background loss `γ`.
pub fn background_loss_factor(gamma: f64, t: f64) -> f64 {
    (-gamma * t).exp()
}

/// Applies the background loss the model leaves out: probabilities are
/// multiplied by `e^{-γ t}` (amplitudes and `C_k` by `e^{-γ t / 2}`).
pub fn loss_normalization(traj: &Trajectory, gamma: f64) -> Trajectory {
    let mut out = traj.clone();
    for s in &mut out.samples {
        let f = background_loss_factor(gamma, s.t()).sqrt();
        s.state.psi1 *= f;
        s.state.psi2 *= f;
        s.c1 = s.c1.map(|c| c * f);
        s.c2 = s.c2.map(|c| c * f);
    }
    out
}
