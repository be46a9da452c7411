use ::ptbubble::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::ptbubble as core;
use core::asymptotics;
use core::dynamics::{self, TwoLevelState};
use core::linalg::Mat2;
use core::model::EtaSchedule;
use core::perturbation;
use core::specfun;
use core::spectra;

create_exception!(ptbubble, PtBubbleError, PyValueError);

fn err(e: core::Error) -> PyErr {
    PtBubbleError::new_err(e.to_string())
}

fn mat2(rows: [[Complex64; 2]; 2]) -> Mat2 {
    Mat2(rows)
}

#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams(core::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (gamma, delta_x=0.0, delta_y=0.0, eta=0.0, alpha=0.0))]
    fn new(gamma: f64, delta_x: f64, delta_y: f64, eta: f64, alpha: f64) -> PyResult<Self> {
        core::ModelParams::new(eta, delta_x, delta_y, gamma, alpha)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn delta_x(&self) -> f64 {
        self.0.delta_x
    }

    #[getter]
    fn delta_y(&self) -> f64 {
        self.0.delta_y
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    fn is_pt_symmetric(&self) -> bool {
        self.0.is_pt_symmetric()
    }

    /// 2x2 Hamiltonian at the stored η, as nested lists.
    fn hamiltonian(&self) -> PyResult<[[Complex64; 2]; 2]> {
        self.0.hamiltonian().map(|h| h.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "ModelParams(gamma={}, delta_x={}, delta_y={}, eta={}, alpha={})",
            p.gamma, p.delta_x, p.delta_y, p.eta, p.alpha
        )
    }
}

/// Sampled trajectory. Projection coefficients are `None` where masked.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory(dynamics::Trajectory);

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn t(&self) -> Vec<f64> {
        self.0.samples.iter().map(|s| s.t()).collect()
    }

    #[getter]
    fn eta(&self) -> Vec<f64> {
        self.0.samples.iter().map(|s| s.eta).collect()
    }

    #[getter]
    fn psi(&self) -> Vec<(Complex64, Complex64)> {
        self.0.samples.iter().map(|s| (s.state.psi1, s.state.psi2)).collect()
    }

    #[getter]
    fn energies(&self) -> Vec<(Complex64, Complex64)> {
        self.0.samples.iter().map(|s| (s.e1, s.e2)).collect()
    }

    #[getter]
    fn c1(&self) -> Vec<Option<Complex64>> {
        self.0.samples.iter().map(|s| s.c1).collect()
    }

    #[getter]
    fn c2(&self) -> Vec<Option<Complex64>> {
        self.0.samples.iter().map(|s| s.c2).collect()
    }

    /// Multiplies amplitudes by `e^{-γt/2}`.
    fn loss_normalized(&self) -> Self {
        Self(dynamics::loss_normalization(&self.0, self.0.params.gamma))
    }
}

#[pyfunction]
fn eigenvalues(p: &PyModelParams, eta: f64) -> PyResult<(Complex64, Complex64)> {
    let h = core::model::build_hamiltonian(&p.0, eta).map_err(err)?;
    let [a, b] = spectra::eigenvalues(&h);
    Ok((a, b))
}

#[pyfunction]
fn spectrum_scan(p: &PyModelParams, etas: Vec<f64>) -> PyResult<Vec<(f64, Complex64, Complex64)>> {
    let pts = spectra::spectrum_scan(&p.0, &etas).map_err(err)?;
    Ok(pts.into_iter().map(|s| (s.eta, s.e1, s.e2)).collect())
}

/// `(eta_minus, eta_plus)` of the PT-broken bubble, or `None`.
#[pyfunction]
fn find_bubble(p: &PyModelParams) -> PyResult<Option<(f64, f64)>> {
    let b = spectra::find_bubble(&p.0).map_err(err)?;
    Ok(b.exists.then_some((b.eta_minus, b.eta_plus)))
}

#[pyfunction]
#[pyo3(signature = (p, theta, phi, t_f, samples=dynamics::CYCLIC_SAMPLES))]
fn cyclic_experiment(p: &PyModelParams, theta: f64, phi: f64, t_f: f64, samples: usize) -> PyResult<PyTrajectory> {
    dynamics::cyclic_experiment_with(&p.0, theta, phi, t_f, samples)
        .map(PyTrajectory)
        .map_err(err)
}

/// Linear sweep `η = α t` from `(a, b)` at `t_grid[0]`.
#[pyfunction]
fn propagate_linear(p: &PyModelParams, a: Complex64, b: Complex64, t_grid: Vec<f64>) -> PyResult<PyTrajectory> {
    let t0 = *t_grid.first().ok_or_else(|| PtBubbleError::new_err("empty time grid"))?;
    let init = TwoLevelState::new(a, b, t0);
    dynamics::propagate(&p.0, &EtaSchedule::linear(p.0.alpha), &init, &t_grid)
        .map(PyTrajectory)
        .map_err(err)
}

#[pyfunction]
fn analytic_solution(p: &PyModelParams, a: Complex64, b: Complex64, t: f64) -> PyResult<(Complex64, Complex64)> {
    let s = dynamics::analytic_solution(&p.0, (a, b), t).map_err(err)?;
    Ok((s.psi1, s.psi2))
}

#[pyfunction]
fn predicted_ratio(p: &PyModelParams) -> PyResult<f64> {
    asymptotics::predicted_ratio(&p.0).map_err(err)
}

#[pyfunction]
fn regime(p: &PyModelParams) -> PyResult<&'static str> {
    asymptotics::regime(&p.0).map(|r| r.label.as_str()).map_err(err)
}

/// `(e0, e1, e2)` per level of `h0 + iλ v`, levels ordered lower, upper.
#[pyfunction]
fn perturbative_corrections(
    h0: [[Complex64; 2]; 2],
    v: [[Complex64; 2]; 2],
    lam: f64,
) -> PyResult<Vec<(f64, Complex64, Complex64)>> {
    let s = perturbation::PerturbationSetup::new(mat2(h0), mat2(v), lam).map_err(err)?;
    let r = perturbation::perturbative_corrections(&s).map_err(err)?;
    Ok((0..2).map(|k| (r.e0[k], r.e1[k], r.e2[k])).collect())
}

#[pyfunction]
fn complex_gamma(z: Complex64) -> PyResult<Complex64> {
    specfun::complex_gamma(z).map_err(err)
}

#[pyfunction]
fn kummer_m(a: Complex64, b: Complex64, x: Complex64) -> PyResult<Complex64> {
    specfun::kummer_m(a, b, x).map_err(err)
}

/// Runs the self-check suite; returns `(passed, failed)`.
#[pyfunction]
#[pyo3(signature = (seed=7))]
fn verify(seed: u64) -> (usize, usize) {
    let r = core::verify::run_all(seed);
    (r.passed(), r.failed())
}

#[pymodule]
fn ptbubble(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PtBubbleError", m.py().get_type::<PtBubbleError>())?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_scan, m)?)?;
    m.add_function(wrap_pyfunction!(find_bubble, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(propagate_linear, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_solution, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(regime, m)?)?;
    m.add_function(wrap_pyfunction!(perturbative_corrections, m)?)?;
    m.add_function(wrap_pyfunction!(complex_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_m, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
