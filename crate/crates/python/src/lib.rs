//! Python bindings: `import wenods_py`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use wenods::cnn::ArchSpec;
use wenods::fileio::{self, GridFile};
use wenods::metrics::{self, VariableErrors, VARIABLES};
use wenods::solver::SnapshotPolicy;

fn to_py(e: wenods::Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn variables(v: &VariableErrors) -> BTreeMap<&'static str, f64> {
    VARIABLES.iter().copied().zip(v.to_array()).collect()
}

#[pyclass(name = "RiemannSpec", module = "wenods_py", skip_from_py_object)]
#[derive(Clone)]
struct PyRiemannSpec(wenods::RiemannSpec);

#[pymethods]
impl PyRiemannSpec {
    /// Four `(rho, u, v, p)` quadrant states, counterclockwise from the upper right.
    #[new]
    fn new(states: [(f64, f64, f64, f64); 4], gamma: f64, t_final: f64, config: u8) -> PyResult<Self> {
        let states = states.map(|(rho, u, v, p)| wenods::PrimitiveState::new(rho, u, v, p));
        wenods::RiemannSpec::new(states, gamma, t_final, config).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        wenods::builtin_ic(name).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        wenods::RiemannSpec::from_json(text).map(Self).map_err(to_py)
    }

    /// Rejection-sample configuration 2, 3 or 16 from a seeded stream.
    #[staticmethod]
    fn sample(config: u8, seed: u64) -> PyResult<Self> {
        use wenods::riemann::{sample_config, SampleRanges};
        let ranges = SampleRanges::standard(config).map_err(to_py)?;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        sample_config(config, &ranges, &mut rng).map(|(s, _)| Self(s)).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn t_final(&self) -> f64 {
        self.0.t_final
    }

    #[setter]
    fn set_t_final(&mut self, t: f64) -> PyResult<()> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(PyValueError::new_err(format!("t_final must be finite and non-negative, got {t}")));
        }
        self.0.t_final = t;
        Ok(())
    }

    #[getter]
    fn config(&self) -> u8 {
        self.0.config
    }

    #[getter]
    fn states(&self) -> Vec<(f64, f64, f64, f64)> {
        self.0.states.iter().map(|w| (w.rho, w.u, w.v, w.p)).collect()
    }

    fn state_at(&self, x: f64, y: f64) -> (f64, f64, f64, f64) {
        let w = self.0.state_at(x, y);
        (w.rho, w.u, w.v, w.p)
    }

    /// Residuals of the wave relations tying the quadrant states together.
    fn verify_relations(&self) -> PyResult<Vec<(String, f64)>> {
        wenods::verify_relations(&self.0).map(|r| r.residuals).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("RiemannSpec(config={}, gamma={}, t_final={})", self.0.config, self.0.gamma, self.0.t_final)
    }
}

/// Conserved variables on an `nx x ny` node grid.
#[pyclass(name = "Field", module = "wenods_py", skip_from_py_object)]
#[derive(Clone)]
struct PyField(wenods::StateField);

#[pymethods]
impl PyField {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        GridFile::read(&path).and_then(|g| g.to_state_field()).map(Self).map_err(to_py)
    }

    #[getter]
    fn nx(&self) -> usize {
        self.0.nx
    }

    #[getter]
    fn ny(&self) -> usize {
        self.0.ny
    }

    /// `[rho, rho u, rho v, E]`, each row-major with x fastest.
    fn conserved(&self) -> Vec<Vec<f64>> {
        (0..4).map(|c| self.0.component(c)).collect()
    }

    #[pyo3(signature = (gamma = 1.4))]
    fn primitive(&self, gamma: f64) -> PyResult<BTreeMap<&'static str, Vec<f64>>> {
        let gas = wenods::GasModel::new(gamma).map_err(to_py)?;
        let planes = metrics::primitive_planes(&self.0, &gas).map_err(to_py)?;
        Ok(VARIABLES.iter().copied().zip(planes).collect())
    }

    fn restrict(&self, nx: usize, ny: usize) -> PyResult<Self> {
        self.0.restrict(nx, ny).map(Self).map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        GridFile::from_state_field(&self.0).write(path).map_err(to_py)
    }

    /// Write `rho/u/v/p.f64grid` into `dir`.
    #[pyo3(signature = (dir, gamma = 1.4))]
    fn write_primitive(&self, dir: PathBuf, gamma: f64) -> PyResult<Vec<PathBuf>> {
        let gas = wenods::GasModel::new(gamma).map_err(to_py)?;
        std::fs::create_dir_all(&dir)?;
        fileio::write_primitive_dir(&dir, &self.0, &gas).map_err(to_py)
    }

    /// Per-variable L1 errors against `reference`, restricted to this grid.
    #[pyo3(signature = (reference, gamma = 1.4))]
    fn l1_errors(&self, reference: &PyField, gamma: f64) -> PyResult<BTreeMap<&'static str, f64>> {
        let gas = wenods::GasModel::new(gamma).map_err(to_py)?;
        let coarse = reference.0.restrict(self.0.nx, self.0.ny).map_err(to_py)?;
        let a = metrics::primitive_planes(&self.0, &gas).map_err(to_py)?;
        let b = metrics::primitive_planes(&coarse, &gas).map_err(to_py)?;
        metrics::l1_by_variable(&a, &b).map(|v| variables(&v)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Field({}x{})", self.0.nx, self.0.ny)
    }
}

#[pyclass(name = "CnnModel", module = "wenods_py", skip_from_py_object)]
#[derive(Clone)]
struct PyCnnModel(wenods::CnnModel);

#[pymethods]
impl PyCnnModel {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        wenods::load_weights(path).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        wenods::CnnModel::from_json(text).map(Self).map_err(to_py)
    }

    /// Untrained network of architecture "A", "B" or "C" with all parameters zero.
    #[staticmethod]
    fn zeros(arch: &str) -> PyResult<Self> {
        let tag = match arch {
            "A" | "a" => wenods::ArchTag::A,
            "B" | "b" => wenods::ArchTag::B,
            "C" | "c" => wenods::ArchTag::C,
            other => return Err(PyValueError::new_err(format!("unknown architecture `{other}`"))),
        };
        wenods::CnnModel::zeros(&ArchSpec::default_for(tag)).map(Self).map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(path).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k
    }

    /// Multipliers for a line of characteristic fluxes, one list per channel.
    fn forward(&self, line: Vec<[f64; 4]>) -> PyResult<Vec<Vec<f64>>> {
        let request = wenods::cnn::MultiplierRequest::padded(line, self.0.k).map_err(to_py)?;
        let out = self.0.forward(&request).map_err(to_py)?;
        Ok(out.into_iter().map(|f| f.values).collect())
    }
}

#[pyclass(name = "Solver", module = "wenods_py")]
struct PySolver(wenods::Solver);

#[pymethods]
impl PySolver {
    #[new]
    #[pyo3(signature = (scheme = "z", gamma = 1.4, eps = 1e-6, model = None))]
    fn new(scheme: &str, gamma: f64, eps: f64, model: Option<&PyCnnModel>) -> PyResult<Self> {
        let scheme: wenods::Scheme = scheme.parse().map_err(to_py)?;
        let mut config = wenods::SchemeConfig::with_scheme(scheme);
        config.eps = eps;
        let gas = wenods::GasModel::new(gamma).map_err(to_py)?;
        wenods::Solver::new(config, gas, model.map(|m| m.0.clone())).map(Self).map_err(to_py)
    }

    #[getter]
    fn scheme(&self) -> String {
        self.0.config().scheme.to_string()
    }

    /// Advance to `spec.t_final`; returns `(field, steps)`.
    fn solve(&self, py: Python<'_>, spec: &PyRiemannSpec, nx: usize, ny: usize) -> PyResult<(PyField, usize)> {
        let run = py.detach(|| self.0.solve(&spec.0, nx, ny)).map_err(to_py)?;
        Ok((PyField(run.final_field), run.steps))
    }

    /// Final field plus the state every `every` steps.
    fn trajectory(
        &self,
        py: Python<'_>,
        spec: &PyRiemannSpec,
        nx: usize,
        ny: usize,
        every: usize,
    ) -> PyResult<Vec<(usize, f64, PyField)>> {
        if every == 0 {
            return Err(PyValueError::new_err("every must be positive"));
        }
        let mut snaps = Vec::new();
        py.detach(|| {
            self.0.run(&spec.0, nx, ny, SnapshotPolicy::EveryNSteps(every), &mut |s| {
                snaps.push((s.step, s.time, PyField(s.field)));
                Ok(())
            })
        })
        .map_err(to_py)?;
        Ok(snaps)
    }
}

/// Fine-grid WENO-Z solution used as ground truth.
#[pyfunction]
#[pyo3(signature = (spec, fine = 400))]
fn make_reference(py: Python<'_>, spec: &PyRiemannSpec, fine: usize) -> PyResult<PyField> {
    let run = py
        .detach(|| wenods::make_reference(&spec.0, fine, SnapshotPolicy::FinalOnly, &mut |_| Ok(())))
        .map_err(to_py)?;
    Ok(PyField(run.final_field))
}

/// Baseline versus candidate L1 errors per grid.
#[pyfunction]
fn compare(
    py: Python<'_>,
    spec: &PyRiemannSpec,
    grids: Vec<(usize, usize)>,
    baseline: &PySolver,
    candidate: &PySolver,
    reference: &PyField,
) -> PyResult<Vec<BTreeMap<String, Py<PyAny>>>> {
    let rows = py
        .detach(|| metrics::compare_table(&spec.0, &grids, &baseline.0, &candidate.0, &reference.0))
        .map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let mut row = BTreeMap::new();
            row.insert("nx".to_owned(), r.nx.into_pyobject(py)?.into_any().unbind());
            row.insert("ny".to_owned(), r.ny.into_pyobject(py)?.into_any().unbind());
            for (key, v) in [("baseline", &r.baseline.l1), ("candidate", &r.candidate.l1), ("ratio", &r.ratio)] {
                row.insert(key.to_owned(), variables(v).into_pyobject(py)?.into_any().unbind());
            }
            Ok(row)
        })
        .collect()
}

#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    wenods::riemann::BUILTIN_NAMES.to_vec()
}

#[pymodule]
fn wenods_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRiemannSpec>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyCnnModel>()?;
    m.add_class::<PySolver>()?;
    m.add_function(wrap_pyfunction!(make_reference, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    Ok(())
}
