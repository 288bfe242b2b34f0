//! Python bindings: objectives, the tuner step, certificates, sweeps,
//! regret and the experiment harness.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use hightuner::harness::{self, output, ExperimentConfig};
use hightuner::objectives::{DiagonalQuadratic, LogSumExpObjective, Objective, SwitchingRegression};
use hightuner::optimizers::{self, HtState};
use hightuner::params::{HtHyperParams, ParamSchedule, VectorSchedule};
use hightuner::{metrics, stability, TimeVaryingObjective, Vector};

fn err(e: hightuner::Error) -> PyErr {
    match e {
        hightuner::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn schedule(points: Vec<(usize, f64)>) -> PyResult<ParamSchedule> {
    ParamSchedule::new(points).map_err(err)
}

/// A time-varying objective. Build one with the static constructors.
#[pyclass(name = "Objective", frozen)]
struct PyObjective {
    inner: Objective,
}

#[pymethods]
impl PyObjective {
    /// `log(2a) + log cosh(b (x - c))` with each of `a, b, c` a list of
    /// `(start_step, value)` pairs.
    #[staticmethod]
    fn log_sum_exp(a: Vec<(usize, f64)>, b: Vec<(usize, f64)>, c: Vec<(usize, f64)>) -> PyResult<Self> {
        let o = LogSumExpObjective::new(schedule(a)?, schedule(b)?, schedule(c)?).map_err(err)?;
        Ok(PyObjective {
            inner: Objective::LogSumExp(o),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (data, optimum=None))]
    fn regression(data: Vec<(usize, Vec<f64>)>, optimum: Option<Vec<f64>>) -> PyResult<Self> {
        let data = VectorSchedule::new(data.into_iter().map(|(t, v)| (t, Vector::new(v))).collect()).map_err(err)?;
        let o = SwitchingRegression::new(data, optimum.map(Vector::new)).map_err(err)?;
        Ok(PyObjective {
            inner: Objective::Regression(o),
        })
    }

    #[staticmethod]
    fn quadratic(weights: Vec<f64>, center: Vec<(usize, Vec<f64>)>) -> PyResult<Self> {
        let center =
            VectorSchedule::new(center.into_iter().map(|(t, v)| (t, Vector::new(v))).collect()).map_err(err)?;
        let o = DiagonalQuadratic::new(Vector::new(weights), center).map_err(err)?;
        Ok(PyObjective {
            inner: Objective::Quadratic(o),
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, t: usize, x: Vec<f64>) -> PyResult<f64> {
        self.inner.value(t, &x).map_err(err)
    }

    fn grad(&self, t: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.grad(t, &x).map(Vector::into_inner).map_err(err)
    }

    fn smoothness_bound(&self, t: usize) -> f64 {
        self.inner.smoothness_bound(t)
    }

    fn optimum(&self, t: usize) -> Option<Vec<f64>> {
        self.inner.optimum(t).map(Vector::into_inner)
    }

    fn min_value(&self, t: usize) -> Option<f64> {
        self.inner.min_value(t)
    }
}

/// One tuner step. Returns `(x, y_next, z_next)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn ht_step(
    obj: &PyObjective,
    t: usize,
    y: Vec<f64>,
    z: Vec<f64>,
    gamma: f64,
    mu: f64,
    beta: f64,
    normalizer: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let state = HtState::new(Vector::new(y), Vector::new(z)).map_err(err)?;
    let h = HtHyperParams::new(gamma, mu, beta, normalizer);
    let s = optimizers::ht_step(&state, t, &obj.inner, &h).map_err(err)?;
    Ok((s.x.into_inner(), s.next.y.into_inner(), s.next.z.into_inner()))
}

#[pyfunction]
fn c_coeffs(gamma: f64, mu: f64, beta: f64, lam: f64, xi_t: f64, xi_next: f64) -> PyResult<(f64, f64, f64)> {
    stability::c_coeffs(gamma, mu, beta, lam, xi_t, xi_next).map_err(err)
}

/// Certificate as a dict: coefficients, discriminant, verdict and the
/// membership flags of the simpler condition sets.
#[pyfunction]
#[pyo3(signature = (gamma, mu, beta, lam=1.0, xi_t=1.0, xi_next=1.0))]
fn check_thm2<'py>(
    py: Python<'py>,
    gamma: f64,
    mu: f64,
    beta: f64,
    lam: f64,
    xi_t: f64,
    xi_next: f64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let c = stability::check_thm2(gamma, mu, beta, lam, xi_t, xi_next);
    let d = pyo3::types::PyDict::new(py);
    d.set_item("c5", c.c5)?;
    d.set_item("c6", c.c6)?;
    d.set_item("c7", c.c7)?;
    d.set_item("discriminant", c.discriminant)?;
    d.set_item("verdict", c.verdict.as_str())?;
    d.set_item("stable", c.thm2_ok())?;
    d.set_item("prop1_ok", c.prop1_ok)?;
    d.set_item("cor1_ok", c.cor1_ok)?;
    d.set_item("legacy_ok", c.legacy_ok)?;
    Ok(d)
}

#[pyfunction]
fn check_prop1(beta: f64, mu: f64, gamma: f64, epsilon: f64) -> bool {
    stability::check_prop1(beta, mu, gamma, epsilon)
}

#[pyfunction]
fn legacy_gamma_cap(beta: f64) -> f64 {
    optimizers::legacy_gamma_cap(beta)
}

/// Rows of `(gamma, c5, c6, c7, discriminant, verdict)`.
#[pyfunction]
fn sweep_gamma(gamma_min: f64, gamma_max: f64, steps: usize) -> PyResult<Vec<(f64, f64, f64, f64, f64, bool)>> {
    Ok(harness::sweep_gamma(gamma_min, gamma_max, steps)
        .map_err(err)?
        .into_iter()
        .map(|r| (r.gamma, r.c5, r.c6, r.c7, r.discriminant, r.verdict))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (obj, horizon, tol=1e-9))]
fn best_fixed_in_hindsight(obj: &PyObjective, horizon: usize, tol: f64) -> PyResult<Vec<f64>> {
    metrics::best_fixed_in_hindsight(&obj.inner, horizon, tol)
        .map(Vector::into_inner)
        .map_err(err)
}

/// `(regret, average_regret, x_bar)` of `costs[t] = f_t(x_t)`.
#[pyfunction]
#[pyo3(signature = (costs, obj, horizon, tol=1e-9))]
fn regret(costs: Vec<f64>, obj: &PyObjective, horizon: usize, tol: f64) -> PyResult<(f64, f64, Vec<f64>)> {
    let r = metrics::regret(&costs, &obj.inner, horizon, tol).map_err(err)?;
    Ok((r.regret, r.average_regret, r.x_bar.into_inner()))
}

/// Runs a JSON config and returns the trace CSV text.
#[pyfunction]
fn run_config(config_json: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err)?;
    let trace = harness::run_experiment(&cfg).map_err(err)?;
    Ok(output::trace_to_string(&trace))
}

/// Runs a built-in preset and returns the trace CSV text.
#[pyfunction]
#[pyo3(signature = (name, tau=None))]
fn repro(name: &str, tau: Option<usize>) -> PyResult<String> {
    let trace = harness::repro(name, tau).map_err(err)?;
    Ok(output::trace_to_string(&trace))
}

/// The JSON of a built-in preset, as a starting point for custom configs.
#[pyfunction]
#[pyo3(signature = (name, tau=None))]
fn preset_json(name: &str, tau: Option<usize>) -> PyResult<String> {
    Ok(harness::preset(name, tau).map_err(err)?.to_json())
}

#[pymodule]
fn hightuner_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyObjective>()?;
    m.add_function(wrap_pyfunction!(ht_step, m)?)?;
    m.add_function(wrap_pyfunction!(c_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(check_thm2, m)?)?;
    m.add_function(wrap_pyfunction!(check_prop1, m)?)?;
    m.add_function(wrap_pyfunction!(legacy_gamma_cap, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(best_fixed_in_hindsight, m)?)?;
    m.add_function(wrap_pyfunction!(regret, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(repro, m)?)?;
    m.add_function(wrap_pyfunction!(preset_json, m)?)?;
    Ok(())
}
