//! Python bindings for `cohwit`.
//!
//! Matrices cross the boundary as lists of rows of Python `complex` (plain
//! floats are accepted on input). Reports come back as plain dicts.
//!
//! ```python
//! import cohwit
//! rho = cohwit.canonical_coherent(3)
//! w = cohwit.lemma2_witness(3, 0.0, 2.0)
//! w.evaluate(rho).value   # 3.0
//! ```

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

use cohwit::cli::{FamilyDocument, WitnessDocument};
use cohwit::linalg::ComplexMatrix;
use cohwit::Seed;

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(py_err)
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A validated density matrix (Hermitian, unit trace, positive semidefinite).
#[pyclass(frozen, skip_from_py_object, name = "DensityMatrix", module = "cohwit")]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: cohwit::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let inner = cohwit::DensityMatrix::new(to_matrix(rows)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn rows(&self) -> Vec<Vec<Complex64>> {
        self.inner.matrix().rows()
    }

    fn l1_coherence(&self) -> f64 {
        cohwit::l1_coherence(&self.inner)
    }

    fn bloch_vector(&self) -> Vec<f64> {
        cohwit::bloch_vector(&self.inner).components().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.inner.dim())
    }
}

#[pyclass(frozen, name = "DetectionReport", module = "cohwit")]
struct PyDetectionReport {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    interval: (f64, f64),
    #[pyo3(get)]
    margin: f64,
    #[pyo3(get)]
    detect_eps: f64,
    #[pyo3(get)]
    verdict: &'static str,
}

#[pymethods]
impl PyDetectionReport {
    #[getter]
    fn detected(&self) -> bool {
        self.verdict == cohwit::Verdict::Detected.as_str()
    }

    fn __repr__(&self) -> String {
        format!(
            "DetectionReport(value={}, interval=({}, {}), margin={}, verdict={})",
            self.value, self.interval.0, self.interval.1, self.margin, self.verdict
        )
    }
}

impl From<cohwit::DetectionReport> for PyDetectionReport {
    fn from(r: cohwit::DetectionReport) -> Self {
        Self {
            value: r.value,
            interval: (r.interval[0], r.interval[1]),
            margin: r.margin,
            detect_eps: r.detect_eps,
            verdict: r.verdict.as_str(),
        }
    }
}

/// Hermitian matrix with the interval [m, M] spanned by its diagonal.
#[pyclass(frozen, from_py_object, name = "Witness", module = "cohwit")]
#[derive(Clone)]
struct PyWitness {
    inner: cohwit::Witness,
}

#[pymethods]
impl PyWitness {
    #[new]
    #[pyo3(signature = (rows, detect_eps = 1e-9))]
    fn new(rows: Vec<Vec<Complex64>>, detect_eps: f64) -> PyResult<Self> {
        let inner = cohwit::Witness::from_matrix(to_matrix(rows)?, detect_eps).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: WitnessDocument = serde_json::from_str(text).map_err(py_err)?;
        Ok(Self {
            inner: doc.to_witness().map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&WitnessDocument::from_witness(&self.inner)).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn interval(&self) -> (f64, f64) {
        self.inner.interval()
    }

    #[getter]
    fn detect_eps(&self) -> f64 {
        self.inner.detect_eps()
    }

    fn rows(&self) -> Vec<Vec<Complex64>> {
        self.inner.matrix().rows()
    }

    fn evaluate(&self, rho: &PyDensityMatrix) -> PyResult<PyDetectionReport> {
        Ok(cohwit::evaluate(&self.inner, &rho.inner)
            .map_err(py_err)?
            .into())
    }

    /// Incoherent probabilities p with Tr(W diag(p)) = h.
    fn delta_h(&self, h: f64) -> PyResult<Vec<f64>> {
        Ok(cohwit::delta_h(&self.inner, h)
            .map_err(py_err)?
            .probs()
            .to_vec())
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.interval();
        format!("Witness(dim={}, interval=[{lo}, {hi}])", self.inner.dim())
    }
}

#[pyclass(frozen, name = "WitnessFamily", module = "cohwit")]
struct PyWitnessFamily {
    inner: cohwit::WitnessFamily,
}

#[pymethods]
impl PyWitnessFamily {
    #[new]
    fn new(label: String, members: Vec<PyWitness>) -> PyResult<Self> {
        let members = members.into_iter().map(|w| w.inner).collect();
        Ok(Self {
            inner: cohwit::WitnessFamily::new(label, members).map_err(py_err)?,
        })
    }

    #[getter]
    fn label(&self) -> &str {
        self.inner.label()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn members(&self) -> Vec<PyWitness> {
        self.inner
            .members()
            .iter()
            .map(|w| PyWitness { inner: w.clone() })
            .collect()
    }

    fn detects(&self, rho: &PyDensityMatrix) -> PyResult<bool> {
        self.inner.detects(&rho.inner).map_err(py_err)
    }

    fn verdicts(&self, rho: &PyDensityMatrix) -> PyResult<Vec<&'static str>> {
        Ok(self
            .inner
            .verdicts(&rho.inner)
            .map_err(py_err)?
            .into_iter()
            .map(cohwit::Verdict::as_str)
            .collect())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&FamilyDocument::from_family(&self.inner)).map_err(py_err)
    }
}

#[pyfunction]
fn generator(d: usize, i: usize) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(cohwit::generator(d, i).map_err(py_err)?.rows())
}

#[pyfunction]
fn state_from_bloch(d: usize, r: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(cohwit::state_from_bloch(d, &r).map_err(py_err)?.rows())
}

#[pyfunction]
fn offdiag_support(rho: &PyDensityMatrix) -> Vec<usize> {
    cohwit::offdiag_support(&rho.inner)
}

#[pyfunction]
fn l1_coherence(rho: &PyDensityMatrix) -> f64 {
    cohwit::l1_coherence(&rho.inner)
}

fn check_dim(d: usize) -> PyResult<()> {
    if d < 2 {
        return Err(py_err(cohwit::Error::InvalidDimension(d)));
    }
    Ok(())
}

#[pyfunction]
fn sample_ginibre(d: usize, seed: u64) -> PyResult<PyDensityMatrix> {
    check_dim(d)?;
    Ok(PyDensityMatrix {
        inner: cohwit::sample_ginibre(d, Seed(seed)),
    })
}

#[pyfunction]
fn sample_incoherent(d: usize, seed: u64) -> PyResult<Vec<f64>> {
    check_dim(d)?;
    Ok(cohwit::sample_incoherent(d, Seed(seed)).probs().to_vec())
}

#[pyfunction]
fn canonical_coherent(d: usize) -> PyResult<PyDensityMatrix> {
    Ok(PyDensityMatrix {
        inner: cohwit::canonical_coherent(d).map_err(py_err)?,
    })
}

#[pyfunction]
fn qubit_state(x: f64, y: f64, z: f64) -> PyResult<PyDensityMatrix> {
    Ok(PyDensityMatrix {
        inner: cohwit::qubit_state(x, y, z).map_err(py_err)?,
    })
}

#[pyfunction]
fn incoherent_state(probs: Vec<f64>) -> PyResult<PyDensityMatrix> {
    Ok(PyDensityMatrix {
        inner: cohwit::IncoherentState::new(probs)
            .map_err(py_err)?
            .to_density(),
    })
}

fn wrap(w: cohwit::Result<cohwit::Witness>) -> PyResult<PyWitness> {
    Ok(PyWitness {
        inner: w.map_err(py_err)?,
    })
}

#[pyfunction]
#[pyo3(name = "lemma2_witness")]
fn py_lemma2_witness(d: usize, m: f64, big_m: f64) -> PyResult<PyWitness> {
    wrap(cohwit::lemma2_witness(d, m, big_m))
}

#[pyfunction]
fn tailored_witness(rho: &PyDensityMatrix, m: f64, big_m: f64) -> PyResult<PyWitness> {
    wrap(cohwit::tailored_witness(&rho.inner, m, big_m))
}

#[pyfunction]
fn qubit_witness(k: f64, a: f64, b: f64, c: f64) -> PyResult<PyWitness> {
    wrap(cohwit::qubit_witness(k, a, b, c))
}

/// "Effective", "NumericallyMarginal" or "Ineffective".
#[pyfunction]
fn is_effective_qubit(a: f64, b: f64, c: f64) -> PyResult<&'static str> {
    Ok(match cohwit::is_effective_qubit(a, b, c).map_err(py_err)? {
        cohwit::Effectiveness::Effective => "Effective",
        cohwit::Effectiveness::NumericallyMarginal => "NumericallyMarginal",
        cohwit::Effectiveness::Ineffective => "Ineffective",
    })
}

#[pyfunction]
fn qubit_pair_family(k: f64, a1: f64, b1: f64, a2: f64, b2: f64) -> PyResult<PyWitnessFamily> {
    Ok(PyWitnessFamily {
        inner: cohwit::qubit_pair_family(k, a1, b1, a2, b2).map_err(py_err)?,
    })
}

#[pyfunction]
fn w_eta(d: usize, k: f64, eta: Vec<f64>) -> PyResult<PyWitness> {
    wrap(cohwit::w_eta(d, k, &eta))
}

#[pyfunction]
fn theorem2_witness(rho: &PyDensityMatrix, k: f64) -> PyResult<PyWitness> {
    wrap(cohwit::theorem2_witness(&rho.inner, k))
}

#[pyfunction]
#[pyo3(signature = (d, k = 0.0, s = None))]
fn finite_family(d: usize, k: f64, s: Option<Vec<f64>>) -> PyResult<PyWitnessFamily> {
    Ok(PyWitnessFamily {
        inner: cohwit::finite_family(d, k, s.as_deref()).map_err(py_err)?,
    })
}

#[pyfunction]
fn verify_lemma1<'py>(
    py: Python<'py>,
    d: usize,
    n_witnesses: usize,
    n_states: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = cohwit::verify_lemma1(d, n_witnesses, n_states, Seed(seed)).map_err(py_err)?;
    json_to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (family, n_states, seed, threshold = cohwit::verify::COHERENCE_THRESHOLD))]
fn verify_coverage<'py>(
    py: Python<'py>,
    family: &PyWitnessFamily,
    n_states: usize,
    seed: u64,
    threshold: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = cohwit::verify_coverage(
        &family.inner,
        family.inner.dim(),
        n_states,
        Seed(seed),
        threshold,
    )
    .map_err(py_err)?;
    json_to_py(py, &rep)
}

#[pyfunction]
fn qubit_geometry_check<'py>(
    py: Python<'py>,
    k: f64,
    a: f64,
    b: f64,
    c: f64,
    grid_n: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = cohwit::qubit_geometry_check(k, a, b, c, grid_n).map_err(py_err)?;
    json_to_py(py, &rep)
}

#[pymodule]
#[pyo3(name = "cohwit")]
pub fn cohwit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyDetectionReport>()?;
    m.add_class::<PyWitness>()?;
    m.add_class::<PyWitnessFamily>()?;
    m.add_function(wrap_pyfunction!(generator, m)?)?;
    m.add_function(wrap_pyfunction!(state_from_bloch, m)?)?;
    m.add_function(wrap_pyfunction!(offdiag_support, m)?)?;
    m.add_function(wrap_pyfunction!(l1_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(sample_ginibre, m)?)?;
    m.add_function(wrap_pyfunction!(sample_incoherent, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_coherent, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_state, m)?)?;
    m.add_function(wrap_pyfunction!(incoherent_state, m)?)?;
    m.add_function(wrap_pyfunction!(py_lemma2_witness, m)?)?;
    m.add_function(wrap_pyfunction!(tailored_witness, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_witness, m)?)?;
    m.add_function(wrap_pyfunction!(is_effective_qubit, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_pair_family, m)?)?;
    m.add_function(wrap_pyfunction!(w_eta, m)?)?;
    m.add_function(wrap_pyfunction!(theorem2_witness, m)?)?;
    m.add_function(wrap_pyfunction!(finite_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_geometry_check, m)?)?;
    Ok(())
}
