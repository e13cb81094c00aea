//! Python bindings. Matrices cross the boundary as nested lists of Python
//! `complex` (a numpy array's `.tolist()` works), vectors as flat lists.

use imaginarity::channels::{self, Channel};
use imaginarity::linalg::{ComplexMatrix, RealMatrix, Tolerance};
use imaginarity::states::{self, DensityMatrix, PureState};
use imaginarity::{measures, transforms, Error};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Rows = Vec<Vec<Complex64>>;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tolerance(atol: f64) -> PyResult<Tolerance> {
    Tolerance::uniform(atol).map_err(py_err)
}

fn to_matrix(rows: &Rows) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err(
            "expected a non-empty rectangular matrix",
        ));
    }
    Ok(ComplexMatrix::from_fn(n, m, |r, c| rows[r][c]))
}

fn from_matrix(m: &ComplexMatrix) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_real(m: &RealMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Density matrix on `C^d`, validated on construction.
#[pyclass(
    name = "DensityMatrix",
    module = "imaginarity",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    #[pyo3(signature = (rows, atol = 1e-9))]
    fn new(rows: Rows, atol: f64) -> PyResult<Self> {
        let inner = DensityMatrix::new(to_matrix(&rows)?, tolerance(atol)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn maximally_mixed(d: usize) -> Self {
        Self {
            inner: DensityMatrix::maximally_mixed(d),
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Rows {
        from_matrix(self.inner.mat())
    }

    #[pyo3(signature = (atol = 1e-9))]
    fn is_free(&self, atol: f64) -> PyResult<bool> {
        Ok(states::is_free_state(&self.inner, tolerance(atol)?))
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.inner.dim())
    }
}

/// Normalized state vector.
#[pyclass(
    name = "PureState",
    module = "imaginarity",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyPureState {
    inner: PureState,
}

#[pymethods]
impl PyPureState {
    /// Amplitudes are normalized when `normalize` is true, otherwise the
    /// norm must already be 1.
    #[new]
    #[pyo3(signature = (amplitudes, normalize = false, atol = 1e-9))]
    fn new(amplitudes: Vec<Complex64>, normalize: bool, atol: f64) -> PyResult<Self> {
        let inner = if normalize {
            PureState::normalized(amplitudes.into()).map_err(py_err)?
        } else {
            PureState::from_slice(&amplitudes, tolerance(atol)?).map_err(py_err)?
        };
        Ok(Self { inner })
    }

    #[staticmethod]
    fn theta(theta: f64, d: usize) -> PyResult<Self> {
        Ok(Self {
            inner: PureState::theta_state(theta, d).map_err(py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().iter().copied().collect()
    }

    fn density(&self) -> PyDensityMatrix {
        PyDensityMatrix {
            inner: self.inner.density(),
        }
    }

    fn __repr__(&self) -> String {
        format!("PureState(dim={})", self.inner.dim())
    }
}

/// CPTP map given by its Choi matrix (output ⊗ input ordering).
#[pyclass(name = "Channel", module = "imaginarity", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChannel {
    inner: Channel,
}

#[pymethods]
impl PyChannel {
    #[new]
    #[pyo3(signature = (choi, dim_out, dim_in, atol = 1e-9))]
    fn new(choi: Rows, dim_out: usize, dim_in: usize, atol: f64) -> PyResult<Self> {
        let inner =
            Channel::new(to_matrix(&choi)?, dim_out, dim_in, tolerance(atol)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn identity(d: usize) -> Self {
        Self {
            inner: Channel::identity(d),
        }
    }

    #[staticmethod]
    fn unitary(u: Rows) -> PyResult<Self> {
        let inner = Channel::unitary(&to_matrix(&u)?, Tolerance::default()).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// The qubit channel with Choi `½I − ¼σ_z⊗σ_y`.
    #[staticmethod]
    fn rng_witness() -> Self {
        Self {
            inner: channels::rng_witness_channel(),
        }
    }

    /// Seeded random channel; `kind` is `"real"`, `"general"` or `"rng"`.
    #[staticmethod]
    #[pyo3(signature = (dim, seed, kind = "real"))]
    fn sample(dim: usize, seed: u64, kind: &str) -> PyResult<Self> {
        let inner = match kind {
            "real" => channels::sample_real_choi_channel(dim, seed),
            "general" => channels::sample_channel(dim, seed),
            "rng" => channels::sample_rng_channel(dim, seed),
            other => return Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim_out(&self) -> usize {
        self.inner.dim_out()
    }

    #[getter]
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }

    fn choi(&self) -> Rows {
        from_matrix(self.inner.choi())
    }

    fn kraus(&self) -> PyResult<Vec<Rows>> {
        let ks = channels::kraus_from_choi(&self.inner, Tolerance::default()).map_err(py_err)?;
        Ok(ks.operators().iter().map(from_matrix).collect())
    }

    fn apply(&self, state: &PyDensityMatrix) -> PyResult<PyDensityMatrix> {
        let inner = channels::apply(&self.inner, &state.inner).map_err(py_err)?;
        Ok(PyDensityMatrix { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Channel(dim_out={}, dim_in={})",
            self.inner.dim_out(),
            self.inner.dim_in()
        )
    }
}

/// `½‖ρ − ρᵀ‖₁`.
#[pyfunction]
fn measure_m(state: &PyDensityMatrix) -> f64 {
    measures::measure_m(&state.inner).value
}

/// Robustness of imaginarity by bisection.
#[pyfunction]
#[pyo3(signature = (state, atol = 1e-9))]
fn robustness(state: &PyDensityMatrix, atol: f64) -> PyResult<f64> {
    Ok(measures::robustness(&state.inner, tolerance(atol)?).value)
}

#[pyfunction]
#[pyo3(signature = (state, atol = 1e-9))]
fn is_free_state(state: &PyDensityMatrix, atol: f64) -> PyResult<bool> {
    Ok(states::is_free_state(&state.inner, tolerance(atol)?))
}

#[pyfunction]
fn maximally_imaginary(d: usize) -> PyResult<PyPureState> {
    Ok(PyPureState {
        inner: states::maximally_imaginary(d).map_err(py_err)?,
    })
}

/// `(theta, q, phase)` with `e^{i phase} q |ψ⟩ = |θ⟩`.
#[pyfunction]
fn canonical_pure_form(psi: &PyPureState) -> (f64, Vec<Vec<f64>>, f64) {
    let cf = states::canonical_pure_form(&psi.inner);
    (cf.theta, from_real(&cf.q), cf.phase)
}

#[pyfunction]
#[pyo3(signature = (channel, atol = 1e-9))]
fn is_rng(channel: &PyChannel, atol: f64) -> PyResult<bool> {
    Ok(channels::is_rng(&channel.inner, tolerance(atol)?))
}

#[pyfunction]
#[pyo3(signature = (channel, atol = 1e-9))]
fn is_completely_rng(channel: &PyChannel, atol: f64) -> PyResult<bool> {
    Ok(channels::is_completely_rng(
        &channel.inner,
        tolerance(atol)?,
    ))
}

#[pyfunction]
#[pyo3(signature = (channel, atol = 1e-9))]
fn is_transposition_covariant(channel: &PyChannel, atol: f64) -> PyResult<bool> {
    Ok(channels::is_transposition_covariant(
        &channel.inner,
        tolerance(atol)?,
    ))
}

/// `(theta, q)` with `u = e^{iθ} q`, or `None` when `u` is not free.
#[pyfunction]
#[pyo3(signature = (u, atol = 1e-9))]
fn is_free_unitary(u: Rows, atol: f64) -> PyResult<Option<(f64, Vec<Vec<f64>>)>> {
    let f = channels::is_free_unitary(&to_matrix(&u)?, tolerance(atol)?).map_err(py_err)?;
    Ok(f.map(|f| (f.theta, from_real(&f.q))))
}

#[pyfunction]
fn transform_exists(psi: &PyPureState, phi: &PyPureState) -> bool {
    transforms::transform_exists(&psi.inner, &phi.inner)
}

/// Free channel taking `psi` to `phi`, with the fidelity it achieves.
#[pyfunction]
#[pyo3(signature = (psi, phi, atol = 1e-9))]
fn synthesize(psi: &PyPureState, phi: &PyPureState, atol: f64) -> PyResult<(PyChannel, f64)> {
    let plan = transforms::synthesize(&psi.inner, &phi.inner, tolerance(atol)?).map_err(py_err)?;
    let fid = plan.fidelity(&psi.inner, &phi.inner).map_err(py_err)?;
    Ok((PyChannel { inner: plan.total }, fid))
}

#[pymodule]
#[pyo3(name = "imaginarity")]
fn imaginarity_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyPureState>()?;
    m.add_class::<PyChannel>()?;
    m.add_function(wrap_pyfunction!(measure_m, m)?)?;
    m.add_function(wrap_pyfunction!(robustness, m)?)?;
    m.add_function(wrap_pyfunction!(is_free_state, m)?)?;
    m.add_function(wrap_pyfunction!(maximally_imaginary, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_pure_form, m)?)?;
    m.add_function(wrap_pyfunction!(is_rng, m)?)?;
    m.add_function(wrap_pyfunction!(is_completely_rng, m)?)?;
    m.add_function(wrap_pyfunction!(is_transposition_covariant, m)?)?;
    m.add_function(wrap_pyfunction!(is_free_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(transform_exists, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    Ok(())
}
