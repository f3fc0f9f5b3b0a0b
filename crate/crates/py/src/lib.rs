//! Python bindings for the synthesis library.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stlnn::abstraction::{decompose_with, AbstractionGraph, AbstractionOptions};
use stlnn::bench::run_bench;
use stlnn::config::RunConfig;
use stlnn::dynamics::{builtin_dynamics, DynamicsModel};
use stlnn::planner::{prepare, Outcome, Planner};
use stlnn::separation::{minimal_partition_points, time_partition, TimePartitionSet};
use stlnn::solution::{check_solution, SolutionFile};
use stlnn::timed::{build_automaton, TimedNfa};
use stlnn::trajectory::Trajectory;
use stlnn::{Error, LabelSignal, SpecFile};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn partition_set(spec: &SpecFile, points: Option<Vec<f64>>) -> PyResult<TimePartitionSet> {
    match points {
        None => Ok(minimal_partition_points(&spec.formula)),
        Some(p) => TimePartitionSet::new(p).map_err(py_err),
    }
}

/// A parsed specification file: variables, predicates and a formula.
#[pyclass(name = "Spec", module = "stlnn_py", skip_from_py_object)]
#[derive(Clone)]
struct PySpec {
    inner: SpecFile,
}

#[pymethods]
impl PySpec {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PySpec { inner: SpecFile::parse(text).map_err(py_err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Self::new(&text)
    }

    #[getter]
    fn formula(&self) -> String {
        self.inner.formula.display_with(&self.inner.predicates.names()).to_string()
    }

    #[getter]
    fn predicates(&self) -> Vec<String> {
        self.inner.predicates.names()
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.predicates.vars().to_vec()
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.formula.horizon()
    }

    /// Bitmask of the predicates that hold at `x`.
    fn label(&self, x: Vec<f64>) -> PyResult<u32> {
        self.inner.predicates.label(&x).map_err(py_err)
    }

    /// Monitor verdict on a timed word of `(symbol, time)` pairs, holding
    /// the last symbol.
    fn satisfied_by(&self, word: Vec<(u32, f64)>) -> PyResult<bool> {
        let mut sig = LabelSignal::from_timed_word(&word).map_err(py_err)?;
        sig.hold_last();
        sig.satisfies(&self.inner.formula, 0.0).map_err(py_err)
    }

    #[pyo3(signature = (partition=None))]
    fn clauses(&self, partition: Option<Vec<f64>>) -> PyResult<Vec<String>> {
        let t = partition_set(&self.inner, partition)?;
        let names = self.inner.predicates.names();
        let cs = time_partition(&self.inner.formula, &t).map_err(py_err)?;
        Ok(cs.iter().map(|c| c.display_with(&names).to_string()).collect())
    }

    #[pyo3(signature = (partition=None))]
    fn automaton(&self, partition: Option<Vec<f64>>) -> PyResult<PyAutomaton> {
        let t = partition_set(&self.inner, partition)?;
        let ta = build_automaton(&self.inner.formula, Some(&t)).map_err(py_err)?;
        Ok(PyAutomaton { inner: Arc::new(ta), names: self.inner.predicates.names() })
    }

    fn __repr__(&self) -> String {
        format!("Spec({:?})", self.formula())
    }
}

/// Timed automaton of a specification.
#[pyclass(name = "Automaton", module = "stlnn_py")]
struct PyAutomaton {
    inner: Arc<TimedNfa>,
    names: Vec<String>,
}

#[pymethods]
impl PyAutomaton {
    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    #[getter]
    fn num_transitions(&self) -> usize {
        self.inner.num_transitions()
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.horizon()
    }

    #[getter]
    fn initial(&self) -> Vec<usize> {
        self.inner.initial().to_vec()
    }

    #[getter]
    fn accepting(&self) -> Vec<usize> {
        self.inner.accepting_states()
    }

    fn invariant(&self, q: usize) -> PyResult<String> {
        if q >= self.inner.num_states() {
            return Err(PyValueError::new_err(format!("no state {}", q)));
        }
        Ok(self.inner.inv(q).to_string())
    }

    /// `(guard, target)` pairs leaving `q`.
    fn edges(&self, q: usize) -> PyResult<Vec<(String, usize)>> {
        if q >= self.inner.num_states() {
            return Err(PyValueError::new_err(format!("no state {}", q)));
        }
        Ok(self.inner.edges(q).iter().map(|(g, r)| (g.display_with(&self.names).to_string(), *r)).collect())
    }

    fn accepts(&self, word: Vec<(u32, f64)>) -> bool {
        self.inner.accepts_timed_word(&word)
    }

    fn to_dot(&self) -> String {
        self.inner.to_dot(&self.names)
    }
}

/// Predicate abstraction of a box state space.
#[pyclass(name = "Abstraction", module = "stlnn_py")]
struct PyAbstraction {
    inner: Arc<AbstractionGraph>,
}

#[pymethods]
impl PyAbstraction {
    #[new]
    #[pyo3(signature = (spec, lo, hi, max_depth=None))]
    fn new(spec: &PySpec, lo: Vec<f64>, hi: Vec<f64>, max_depth: Option<u32>) -> PyResult<Self> {
        let b = stlnn::abstraction::StateBox::new(lo, hi).map_err(py_err)?;
        let mut opts = AbstractionOptions::default();
        if let Some(d) = max_depth {
            opts.max_depth = d;
        }
        let g = decompose_with(&b, &spec.inner.predicates, opts).map_err(py_err)?;
        Ok(PyAbstraction { inner: Arc::new(g) })
    }

    #[getter]
    fn num_regions(&self) -> usize {
        self.inner.num_regions()
    }

    #[getter]
    fn impure_fraction(&self) -> f64 {
        self.inner.impure_fraction()
    }

    fn region_of(&self, x: Vec<f64>) -> PyResult<usize> {
        self.inner.region_of(&x).map_err(py_err)
    }

    fn label(&self, d: usize) -> PyResult<u32> {
        if d >= self.inner.num_regions() {
            return Err(PyValueError::new_err(format!("no region {}", d)));
        }
        Ok(self.inner.label(d))
    }

    fn neighbors(&self, d: usize) -> PyResult<Vec<usize>> {
        if d >= self.inner.num_regions() {
            return Err(PyValueError::new_err(format!("no region {}", d)));
        }
        Ok(self.inner.neighbors(d).to_vec())
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }
}

/// One of the built-in vector fields.
#[pyclass(name = "Dynamics", module = "stlnn_py")]
struct PyDynamics {
    inner: DynamicsModel,
}

#[pymethods]
impl PyDynamics {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(PyDynamics { inner: builtin_dynamics(name).map_err(py_err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn state_names(&self) -> Vec<String> {
        self.inner.state_names.clone()
    }

    #[getter]
    fn control_names(&self) -> Vec<String> {
        self.inner.control_names.clone()
    }

    fn f(&self, x: Vec<f64>, u: Vec<f64>) -> PyResult<Vec<f64>> {
        if x.len() != self.inner.state_dim() || u.len() != self.inner.control_dim() {
            return Err(PyValueError::new_err("dimension mismatch"));
        }
        Ok(self.inner.f(&x, &u))
    }

    /// States at every integration step of the piecewise-constant controls,
    /// as `(t, x)` pairs.
    fn simulate(&self, x0: Vec<f64>, controls: Vec<(Vec<f64>, f64)>) -> PyResult<Vec<(f64, Vec<f64>)>> {
        let traj = Trajectory::simulate(&self.inner, &x0, &controls).map_err(py_err)?;
        let mut out = vec![(0.0, x0)];
        for seg in &traj.segments {
            for (t, x) in seg.times.iter().zip(&seg.states).skip(1) {
                out.push((*t, x.clone()));
            }
        }
        Ok(out)
    }
}

/// A synthesized trajectory and its controller.
#[pyclass(name = "Solution", module = "stlnn_py")]
struct PySolution {
    file: SolutionFile,
    sys: DynamicsModel,
}

#[pymethods]
impl PySolution {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let file = SolutionFile::parse(text).map_err(py_err)?;
        let sys = builtin_dynamics(&file.dynamics).map_err(py_err)?;
        Ok(PySolution { file, sys })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.file.seed
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.file.rows.iter().map(|r| r.t).collect()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<f64>> {
        self.file.rows.iter().map(|r| r.x.clone()).collect()
    }

    /// `(u, dt)` per segment.
    #[getter]
    fn controls(&self) -> Vec<(Vec<f64>, f64)> {
        self.file.controls()
    }

    #[getter]
    fn automaton_states(&self) -> Vec<usize> {
        self.file.rows.iter().map(|r| r.q).collect()
    }

    #[getter]
    fn regions(&self) -> Vec<usize> {
        self.file.rows.iter().map(|r| r.d).collect()
    }

    #[getter]
    fn word(&self) -> Vec<(u32, f64)> {
        self.file.word.clone()
    }

    fn to_text(&self) -> String {
        self.file.to_text(&self.sys)
    }

    /// Re-simulates and evaluates `spec`; returns a dict with `monitor`,
    /// `automaton`, `violation` and `passed`.
    fn check<'py>(&self, py: Python<'py>, spec: &PySpec) -> PyResult<Bound<'py, PyDict>> {
        let rep = check_solution(&self.file, &self.sys, &spec.inner.formula, &spec.inner.predicates).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("monitor", rep.monitor)?;
        d.set_item("automaton", rep.automaton)?;
        d.set_item("violation", rep.violation)?;
        d.set_item("end_time", rep.end_time)?;
        d.set_item("passed", rep.passed())?;
        Ok(d)
    }

    fn __len__(&self) -> usize {
        self.file.rows.len()
    }
}

/// A run configuration file.
#[pyclass(name = "Config", module = "stlnn_py")]
struct PyConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyConfig { inner: RunConfig::load(&path).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (text, base="."))]
    fn parse(text: &str, base: &str) -> PyResult<Self> {
        Ok(PyConfig { inner: RunConfig::parse(text, Path::new(base)).map_err(py_err)? })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn trials(&self) -> usize {
        self.inner.trials
    }

    #[getter]
    fn dynamics(&self) -> String {
        self.inner.dynamics.clone()
    }

    #[getter]
    fn spec(&self) -> PyResult<PySpec> {
        PySpec::load(self.inner.spec.clone())
    }

    /// One synthesis run; `None` when the budget runs out. Raises
    /// `ValueError` when the problem is infeasible from the start.
    #[pyo3(signature = (seed=None))]
    fn synthesize(&self, py: Python<'_>, seed: Option<u64>) -> PyResult<Option<PySolution>> {
        let cfg = &self.inner;
        py.detach(|| {
            let problem = cfg.problem()?;
            let pc = cfg.planner(&problem, seed.unwrap_or(cfg.seed))?;
            let setup = prepare(&problem, &pc)?;
            Ok(match Planner::new(&problem, &setup, &pc)?.run()? {
                Outcome::Solved(sol) => {
                    Some(PySolution { file: SolutionFile::from_solution(&sol, &problem.sys), sys: problem.sys.clone() })
                }
                Outcome::NoSolution(_) => None,
            })
        })
        .map_err(py_err)
    }

    /// Seeded trials; returns the aggregate and per-trial rows as dicts.
    #[pyo3(signature = (trials=None))]
    fn bench<'py>(&self, py: Python<'py>, trials: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
        let mut cfg = self.inner.clone();
        if let Some(t) = trials {
            cfg.trials = t.max(1);
        }
        let (rep, _) = py.detach(|| run_bench("bench", &cfg)).map_err(py_err)?;
        let d = PyDict::new(py);
        let a = &rep.aggregate;
        d.set_item("trials", a.trials)?;
        d.set_item("successes", a.successes)?;
        d.set_item("success_rate", a.success_rate)?;
        d.set_item("mean_time", a.mean_time)?;
        d.set_item("std_time", a.std_time)?;
        let rows: Vec<Bound<'py, PyDict>> = rep
            .rows
            .iter()
            .map(|r| {
                let row = PyDict::new(py);
                row.set_item("seed", r.seed)?;
                row.set_item("success", r.success)?;
                row.set_item("time", r.time)?;
                row.set_item("tree_size", r.tree_size)?;
                row.set_item("iterations", r.iterations)?;
                row.set_item("verified", r.verified)?;
                Ok(row)
            })
            .collect::<PyResult<_>>()?;
        d.set_item("rows", rows)?;
        Ok(d)
    }
}

#[pymodule]
fn stlnn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyAutomaton>()?;
    m.add_class::<PyAbstraction>()?;
    m.add_class::<PyDynamics>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyConfig>()?;
    m.add("BUILTIN_DYNAMICS", stlnn::dynamics::BUILTIN_NAMES.to_vec())?;
    Ok(())
}
