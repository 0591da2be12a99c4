//! Python bindings: problems, seeded searches, experiments and sizing.

use std::collections::HashMap;

use pyo3::exceptions::{PyValueError, PyRuntimeError};
use pyo3::prelude::*;

use tabu_core::harness::{self, ExperimentConfig};
use tabu_core::hydraulics::{size_transmission, SizingInputs};
use tabu_core::problems::{Problem, ProblemKind};
use tabu_core::{benchmarks, tabu, Error, ParameterVector};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Diverged { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn point(values: Vec<f64>) -> PyResult<ParameterVector> {
    ParameterVector::new(values).map_err(py_err)
}

/// Best point of one search run.
#[pyclass(name = "RunResult", get_all, frozen)]
struct PyRunResult {
    point: Vec<f64>,
    value: f64,
    evaluations: u64,
    termination: &'static str,
    step_reductions: u32,
}

#[pymethods]
impl PyRunResult {
    fn __repr__(&self) -> String {
        format!(
            "RunResult(point={:?}, value={}, evaluations={}, termination='{}')",
            self.point, self.value, self.evaluations, self.termination
        )
    }
}

/// One of the five optimisation problems with its default settings.
#[pyclass(name = "Problem")]
struct PyProblem {
    config: ExperimentConfig,
}

#[pymethods]
impl PyProblem {
    /// `name` is one of rastrigin, schwefel, transmission, two_motor, actuator.
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let kind: ProblemKind = name.parse().map_err(py_err)?;
        Ok(Self {
            config: ExperimentConfig::new(kind),
        })
    }

    /// Build from config text (`key = value` lines).
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        Ok(Self {
            config: harness::parse_config_str(text).map_err(py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.config.problem.as_str()
    }

    /// `(name, unit, lower, upper, grid)` for every design parameter.
    fn dimensions(&self) -> Vec<(String, String, f64, f64, f64)> {
        self.problem()
            .space()
            .dims()
            .iter()
            .map(|d| (d.name.clone(), d.unit.clone(), d.lower, d.upper, d.grid))
            .collect()
    }

    /// Objective value of a design; `inf` when it cannot be simulated.
    fn evaluate(&self, params: Vec<f64>) -> PyResult<f64> {
        Ok(self.problem().evaluate(&point(params)?))
    }

    /// Steady speeds (r/min), pressure drops (bar), relief and pump flow (L/min).
    fn steady_metrics(&self, params: Vec<f64>) -> PyResult<Option<HashMap<&'static str, Vec<f64>>>> {
        let a = self.problem().assess(&point(params)?).map_err(py_err)?;
        Ok(a.metrics.map(|m| {
            HashMap::from([
                ("speeds_rpm", m.speeds_rpm),
                ("pressure_drops_bar", m.pressure_drops_bar),
                ("relief_flow_lpm", vec![m.relief_flow_lpm]),
                ("pump_flow_lpm", vec![m.pump_flow_lpm]),
            ])
        }))
    }

    /// Simulated signals in SI units, keyed by name, plus `time`.
    fn simulate(&self, params: Vec<f64>) -> PyResult<HashMap<String, Vec<f64>>> {
        let trace = self
            .problem()
            .simulate(&point(params)?)
            .map_err(py_err)?
            .ok_or_else(|| PyValueError::new_err(format!("{} is not a circuit", self.name())))?;
        if let Some(t) = trace.diverged_at {
            return Err(py_err(Error::Diverged { time: t }));
        }
        let mut out: HashMap<String, Vec<f64>> = trace.signals.into_iter().map(|s| (s.name, s.values)).collect();
        out.insert("time".into(), trace.time);
        Ok(out)
    }

    /// One seeded search with this problem's settings.
    #[pyo3(signature = (seed=0))]
    fn search(&self, py: Python<'_>, seed: u64) -> PyResult<PyRunResult> {
        let problem = self.problem();
        let schedule = self.config.schedule();
        let cfg = self.config.search.clone().with_seed(seed);
        let r = py
            .detach(|| tabu::run(&problem.space(), &schedule, &problem, &cfg))
            .map_err(py_err)?;
        Ok(PyRunResult {
            point: r.best.point.into_values(),
            value: r.best.value,
            evaluations: r.evaluations_used,
            termination: r.terminated_by.as_str(),
            step_reductions: r.step_reductions,
        })
    }

    /// Run the full seeded experiment and return its report as CSV text.
    #[pyo3(signature = (runs=None, seed=None))]
    fn experiment(&self, py: Python<'_>, runs: Option<usize>, seed: Option<u64>) -> PyResult<String> {
        let mut cfg = self.config.clone();
        if let Some(r) = runs {
            cfg.runs = r;
        }
        if let Some(s) = seed {
            cfg.base_seed = s;
        }
        let report = py.detach(|| harness::run_experiment(&cfg)).map_err(py_err)?;
        Ok(report.to_csv_string())
    }

    fn config_text(&self) -> String {
        self.config.to_config_text()
    }
}

impl PyProblem {
    fn problem(&self) -> Problem {
        self.config.problem()
    }
}

/// Designer's motor and pump displacements in cc/rev.
#[pyfunction]
#[pyo3(signature = (load_torque=100.0, target_speed=300.0, pump_speed=1500.0, pressure=85.0, eta=0.95))]
fn sizing(load_torque: f64, target_speed: f64, pump_speed: f64, pressure: f64, eta: f64) -> PyResult<(f64, f64)> {
    let s = size_transmission(&SizingInputs {
        load_torque,
        target_speed,
        pump_speed,
        assumed_pressure: pressure,
        eta_mm: eta,
        eta_vm: eta,
        eta_vp: eta,
    })
    .map_err(py_err)?;
    Ok((s.motor_displacement, s.pump_displacement))
}

#[pyfunction]
fn rastrigin(x: f64, y: f64) -> f64 {
    benchmarks::rastrigin(x, y)
}

#[pyfunction]
fn schwefel(x: Vec<f64>) -> f64 {
    benchmarks::schwefel(&x)
}

#[pymodule]
fn tabu_fluid(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(sizing, m)?)?;
    m.add_function(wrap_pyfunction!(rastrigin, m)?)?;
    m.add_function(wrap_pyfunction!(schwefel, m)?)?;
    Ok(())
}
