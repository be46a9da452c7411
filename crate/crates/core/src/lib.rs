//! Spectra, exceptional points and nonadiabatic sweeps of dissipative
//! two-level systems `H = -η σz + δx σx + δy σy + iγ σx`.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: parameters, the Hamiltonian family, symmetry classification and
//!   sweep schedules for `η(t)`.
//! - [`specfun`]: complex Gamma, Pochhammer symbols, Kummer's `M(a, b, x)` and the
//!   even/odd parabolic-cylinder (Weber) solutions.
//! - [`spectra`]: closed-form 2×2 eigensystems with left and right eigenvectors,
//!   PT-phase classification and location of the PT-breaking bubble.
//! - [`dynamics`]: adaptive integration of `i∂tΨ = H(t)Ψ`, the exact Weber/Kummer
//!   solution of the linear sweep and the cyclic gap-closing protocol.
//! - [`asymptotics`]: closed-form long-time predictions for linear sweeps.
//! - [`perturbation`]: second-order and degenerate perturbation theory for a
//!   dissipative term `iλV` on a Hermitian `H0`.
//! - [`cli`] and [`verify`]: the `ptbubble` command-line driver and its
//!   self-check suite.

pub mod asymptotics;
pub mod cli;
pub mod csv;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod specfun;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use model::{EtaSchedule, GapBehavior, ModelParams, ScheduleKind, SymmetryReport};
pub use spectra::{BubbleReport, EigenSystem, PtPhase};
pub use dynamics::{Trajectory, TwoLevelState, WeberSolution};


