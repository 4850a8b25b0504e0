//! Python bindings for the gaussest library: the Gaussian state family,
//! the meter model, the two-arm estimation protocol, and the sweep
//! harness. Values mirror the Rust API one to one; sweeps release the
//! GIL while they run.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use gaussest::emit::rows_from_sweep;
use gaussest::experiment as exp;
use gaussest::protocol;
use gaussest::rng::{standard_normal, substream, SimRng, STREAM_SCHEME};

fn value_err(e: gaussest::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Deterministic random stream (ChaCha8 keyed from a master seed and an
/// index path).
#[pyclass]
struct Rng {
    inner: SimRng,
}

#[pymethods]
impl Rng {
    #[new]
    #[pyo3(signature = (seed, path = None))]
    fn new(seed: u64, path: Option<Vec<u64>>) -> Self {
        Rng {
            inner: substream(seed, &path.unwrap_or_default()),
        }
    }

    /// One standard normal draw.
    fn normal(&mut self) -> f64 {
        standard_normal(&mut self.inner)
    }
}

#[pyclass(frozen)]
struct GaussianState {
    inner: gaussest::GaussianState,
}

#[pymethods]
impl GaussianState {
    /// Build a state from (u, kappa, q0, p0).
    #[new]
    #[pyo3(signature = (u, kappa, q0 = 0.0, p0 = 0.0))]
    fn new(u: f64, kappa: f64, q0: f64, p0: f64) -> PyResult<Self> {
        gaussest::GaussianState::from_params(&gaussest::StateParams::new(u, kappa, q0, p0))
            .map(|inner| GaussianState { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn coherent(q0: f64, p0: f64) -> Self {
        GaussianState {
            inner: gaussest::GaussianState::coherent(q0, p0),
        }
    }

    /// Build a state directly from center and spreads.
    #[staticmethod]
    fn from_moments(q0: f64, p0: f64, dq: f64, dp: f64) -> PyResult<Self> {
        gaussest::GaussianState::new(q0, p0, dq, dp)
            .map(|inner| GaussianState { inner })
            .map_err(value_err)
    }

    #[getter]
    fn q0(&self) -> f64 {
        self.inner.q0()
    }

    #[getter]
    fn p0(&self) -> f64 {
        self.inner.p0()
    }

    #[getter]
    fn dq(&self) -> f64 {
        self.inner.dq()
    }

    #[getter]
    fn dp(&self) -> f64 {
        self.inner.dp()
    }

    fn wigner_density(&self, q: f64, p: f64) -> f64 {
        self.inner.wigner_density(q, p)
    }

    /// (vqq, vpp, vqp)
    fn variance_matrix(&self) -> (f64, f64, f64) {
        let v = self.inner.variance_matrix();
        (v.vqq, v.vpp, v.vqp)
    }

    fn satisfies_uncertainty(&self) -> bool {
        self.inner.variance_matrix().satisfies_uncertainty()
    }

    fn marginal_q(&self) -> Gaussian1D {
        Gaussian1D {
            inner: self.inner.marginal_q(),
        }
    }

    fn marginal_p(&self) -> Gaussian1D {
        Gaussian1D {
            inner: self.inner.marginal_p(),
        }
    }

    fn displace(&self, dq0: f64, dp0: f64) -> Self {
        GaussianState {
            inner: self.inner.displace(dq0, dp0),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "GaussianState(q0={}, p0={}, dq={}, dp={})",
            self.inner.q0(),
            self.inner.p0(),
            self.inner.dq(),
            self.inner.dp()
        )
    }
}

/// Minimum-uncertainty pointer with position spread dqm and derived
/// momentum spread 1/(2 dqm).
#[pyclass(frozen)]
struct Meter {
    inner: gaussest::Meter,
}

#[pymethods]
impl Meter {
    #[new]
    fn new(dqm: f64) -> PyResult<Self> {
        gaussest::Meter::new(dqm)
            .map(|inner| Meter { inner })
            .map_err(value_err)
    }

    #[getter]
    fn dqm(&self) -> f64 {
        self.inner.dqm()
    }

    #[getter]
    fn dpm(&self) -> f64 {
        self.inner.dpm()
    }

    fn __repr__(&self) -> String {
        format!("Meter(dqm={}, dpm={})", self.inner.dqm(), self.inner.dpm())
    }
}

/// A univariate normal density.
#[pyclass(frozen)]
struct Gaussian1D {
    inner: gaussest::Gaussian1D,
}

#[pymethods]
impl Gaussian1D {
    #[new]
    fn new(mean: f64, variance: f64) -> PyResult<Self> {
        gaussest::Gaussian1D::new(mean, variance)
            .map(|inner| Gaussian1D { inner })
            .map_err(value_err)
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    #[getter]
    fn variance(&self) -> f64 {
        self.inner.variance()
    }

    fn pdf(&self, x: f64) -> f64 {
        self.inner.pdf(x)
    }

    fn sample(&self, rng: &mut Rng) -> f64 {
        self.inner.sample(&mut rng.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Gaussian1D(mean={}, variance={})",
            self.inner.mean(),
            self.inner.variance()
        )
    }
}

/// The four reading channels of one weak-protocol run.
#[pyclass(frozen)]
struct ReadingSet {
    inner: protocol::ReadingSet,
}

#[pymethods]
impl ReadingSet {
    #[getter]
    fn weak_q(&self) -> Vec<f64> {
        self.inner.weak_q.clone()
    }

    #[getter]
    fn strong_p(&self) -> Vec<f64> {
        self.inner.strong_p.clone()
    }

    #[getter]
    fn weak_p(&self) -> Vec<f64> {
        self.inner.weak_p.clone()
    }

    #[getter]
    fn strong_q(&self) -> Vec<f64> {
        self.inner.strong_q.clone()
    }
}

#[pyclass(frozen)]
struct EstimationResult {
    inner: protocol::EstimationResult,
}

#[pymethods]
impl EstimationResult {
    #[getter]
    fn q0_est(&self) -> f64 {
        self.inner.q0_est
    }

    #[getter]
    fn p0_est(&self) -> f64 {
        self.inner.p0_est
    }

    #[getter]
    fn dq_est(&self) -> f64 {
        self.inner.dq_est
    }

    #[getter]
    fn dp_est(&self) -> f64 {
        self.inner.dp_est
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.inner.scheme.as_str()
    }

    #[getter]
    fn n_q(&self) -> usize {
        self.inner.n_q
    }

    #[getter]
    fn n_p(&self) -> usize {
        self.inner.n_p
    }

    fn __repr__(&self) -> String {
        format!(
            "EstimationResult(q0_est={}, p0_est={}, dq_est={}, dp_est={}, scheme='{}')",
            self.inner.q0_est,
            self.inner.p0_est,
            self.inner.dq_est,
            self.inner.dp_est,
            self.inner.scheme.as_str()
        )
    }
}

#[pyfunction]
fn weak_q_reading_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    Gaussian1D {
        inner: gaussest::measurement::weak_q_reading_density(&state.inner, &meter.inner),
    }
}

#[pyfunction]
fn weak_p_reading_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    Gaussian1D {
        inner: gaussest::measurement::weak_p_reading_density(&state.inner, &meter.inner),
    }
}

#[pyfunction]
fn post_weak_q_state(state: &GaussianState, meter: &Meter) -> GaussianState {
    GaussianState {
        inner: gaussest::measurement::post_weak_q_state(&state.inner, &meter.inner),
    }
}

#[pyfunction]
fn post_weak_p_state(state: &GaussianState, meter: &Meter) -> GaussianState {
    GaussianState {
        inner: gaussest::measurement::post_weak_p_state(&state.inner, &meter.inner),
    }
}

#[pyfunction]
fn post_weak_q_projective_p_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    Gaussian1D {
        inner: gaussest::measurement::post_weak_q_projective_p_density(&state.inner, &meter.inner),
    }
}

#[pyfunction]
fn post_weak_p_projective_q_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    Gaussian1D {
        inner: gaussest::measurement::post_weak_p_projective_q_density(&state.inner, &meter.inner),
    }
}

#[pyfunction]
fn projective_q_density(state: &GaussianState) -> Gaussian1D {
    Gaussian1D {
        inner: gaussest::measurement::projective_q_density(&state.inner),
    }
}

#[pyfunction]
fn projective_p_density(state: &GaussianState) -> Gaussian1D {
    Gaussian1D {
        inner: gaussest::measurement::projective_p_density(&state.inner),
    }
}

/// One weak measurement: returns (reading, post_state).
#[pyfunction]
fn measure_weak_q(
    state: &GaussianState,
    meter: &Meter,
    rng: &mut Rng,
) -> (f64, GaussianState) {
    let outcome = gaussest::measurement::measure_weak_q(&state.inner, &meter.inner, &mut rng.inner);
    (outcome.reading, GaussianState { inner: outcome.post_state })
}

#[pyfunction]
fn measure_weak_p(
    state: &GaussianState,
    meter: &Meter,
    rng: &mut Rng,
) -> (f64, GaussianState) {
    let outcome = gaussest::measurement::measure_weak_p(&state.inner, &meter.inner, &mut rng.inner);
    (outcome.reading, GaussianState { inner: outcome.post_state })
}

#[pyfunction]
fn run_weak_protocol(
    state: &GaussianState,
    n: usize,
    meter: &Meter,
    rng: &mut Rng,
) -> PyResult<ReadingSet> {
    protocol::run_weak_protocol(&state.inner, n, &meter.inner, &mut rng.inner)
        .map(|inner| ReadingSet { inner })
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (readings, meter, deconvolve = true, weighting = false))]
fn estimate_from_readings(
    readings: &ReadingSet,
    meter: &Meter,
    deconvolve: bool,
    weighting: bool,
) -> PyResult<EstimationResult> {
    let opts = protocol::EstimatorOptions {
        deconvolve,
        inverse_variance_weighting: weighting,
    };
    protocol::estimate_from_readings(&readings.inner, &meter.inner, &opts)
        .map(|inner| EstimationResult { inner })
        .map_err(value_err)
}

#[pyfunction]
fn run_projective_baseline(
    state: &GaussianState,
    n: usize,
    rng: &mut Rng,
) -> PyResult<EstimationResult> {
    protocol::run_projective_baseline(&state.inner, n, &mut rng.inner)
        .map(|inner| EstimationResult { inner })
        .map_err(value_err)
}

/// (d1, d2)
#[pyfunction]
fn distances(truth: &GaussianState, est: &EstimationResult) -> (f64, f64) {
    let d = protocol::distances(&truth.inner, &est.inner);
    (d.d1, d.d2)
}

/// (d1, d2) with the compatibility d2 that compares dq to the dp
/// estimate.
#[pyfunction]
fn distances_as_printed(truth: &GaussianState, est: &EstimationResult) -> (f64, f64) {
    let d = protocol::distances_as_printed(&truth.inner, &est.inner);
    (d.d1, d.d2)
}

/// One weak trial and one projective trial on the same state:
/// ((d1_weak, d2_weak), (d1_proj, d2_proj)).
#[pyfunction]
#[pyo3(signature = (state, n, inv_dqm, weak_rng, proj_rng,
                    deconvolve = true, weighting = false, d2_printed_form = false))]
#[allow(clippy::too_many_arguments)]
fn run_trial(
    state: &GaussianState,
    n: usize,
    inv_dqm: f64,
    weak_rng: &mut Rng,
    proj_rng: &mut Rng,
    deconvolve: bool,
    weighting: bool,
    d2_printed_form: bool,
) -> PyResult<((f64, f64), (f64, f64))> {
    let opts = exp::TrialOptions {
        estimator: protocol::EstimatorOptions {
            deconvolve,
            inverse_variance_weighting: weighting,
        },
        d2_printed_form,
    };
    let (weak, proj) = exp::run_trial(
        &state.inner,
        n,
        inv_dqm,
        &opts,
        &mut weak_rng.inner,
        &mut proj_rng.inner,
    )
    .map_err(value_err)?;
    Ok(((weak.d1, weak.d2), (proj.d1, proj.d2)))
}

#[pyfunction]
fn random_state(kappa: f64, rng: &mut Rng) -> PyResult<GaussianState> {
    exp::random_state(kappa, &mut rng.inner)
        .map(|inner| GaussianState { inner })
        .map_err(value_err)
}

#[pyfunction]
fn default_inv_dqm_grid() -> Vec<f64> {
    exp::default_inv_dqm_grid()
}

/// Full Monte Carlo sweep; returns one dict per
/// (ensemble size, grid point, scheme), mirroring the CSV schema.
#[pyfunction]
#[pyo3(signature = (kappa, *, n_states = None, n_runs = None, ensemble_sizes = None,
                    inv_dqm_grid = None, u_range = None, center_range = None,
                    master_seed = None, deconvolve = None, weighting = None,
                    average_estimates_first = None, d2_printed_form = None))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    kappa: f64,
    n_states: Option<usize>,
    n_runs: Option<usize>,
    ensemble_sizes: Option<Vec<usize>>,
    inv_dqm_grid: Option<Vec<f64>>,
    u_range: Option<(f64, f64)>,
    center_range: Option<(f64, f64)>,
    master_seed: Option<u64>,
    deconvolve: Option<bool>,
    weighting: Option<bool>,
    average_estimates_first: Option<bool>,
    d2_printed_form: Option<bool>,
) -> PyResult<Bound<'py, PyList>> {
    let mut cfg = exp::ExperimentConfig::with_kappa(kappa);
    macro_rules! merge {
        ($($field:ident),+ $(,)?) => {
            $( if let Some(value) = $field { cfg.$field = value; } )+
        };
    }
    merge!(
        n_states,
        n_runs,
        ensemble_sizes,
        inv_dqm_grid,
        u_range,
        center_range,
        master_seed,
        deconvolve,
        weighting,
        average_estimates_first,
        d2_printed_form,
    );
    let result = py
        .detach(|| exp::run_sweep(&cfg))
        .map_err(value_err)?;

    let rows = PyList::empty(py);
    for row in rows_from_sweep(&result) {
        let item = PyDict::new(py);
        item.set_item("kappa", row.kappa)?;
        item.set_item("ensemble_size", row.ensemble_size)?;
        item.set_item("inv_dqm", row.inv_dqm)?;
        item.set_item("scheme", row.scheme.as_str())?;
        item.set_item("d1_mean", row.d1_mean)?;
        item.set_item("d1_se", row.d1_se)?;
        item.set_item("d2_mean", row.d2_mean)?;
        item.set_item("d2_se", row.d2_se)?;
        item.set_item("n_states", row.n_states)?;
        item.set_item("n_runs", row.n_runs)?;
        item.set_item("master_seed", row.master_seed)?;
        rows.append(item)?;
    }
    Ok(rows)
}

/// Run the analytic self-checks; returns (name, passed, detail) tuples.
#[pyfunction]
fn validate_selfcheck(py: Python<'_>) -> Vec<(&'static str, bool, String)> {
    py.detach(|| {
        gaussest::selfcheck::validate_selfcheck()
            .checks
            .into_iter()
            .map(|c| (c.name, c.passed, c.detail))
            .collect()
    })
}

#[pymodule]
fn gaussest_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("STREAM_SCHEME", STREAM_SCHEME)?;
    m.add_class::<Rng>()?;
    m.add_class::<GaussianState>()?;
    m.add_class::<Meter>()?;
    m.add_class::<Gaussian1D>()?;
    m.add_class::<ReadingSet>()?;
    m.add_class::<EstimationResult>()?;
    m.add_function(wrap_pyfunction!(weak_q_reading_density, m)?)?;
    m.add_function(wrap_pyfunction!(weak_p_reading_density, m)?)?;
    m.add_function(wrap_pyfunction!(post_weak_q_state, m)?)?;
    m.add_function(wrap_pyfunction!(post_weak_p_state, m)?)?;
    m.add_function(wrap_pyfunction!(post_weak_q_projective_p_density, m)?)?;
    m.add_function(wrap_pyfunction!(post_weak_p_projective_q_density, m)?)?;
    m.add_function(wrap_pyfunction!(projective_q_density, m)?)?;
    m.add_function(wrap_pyfunction!(projective_p_density, m)?)?;
    m.add_function(wrap_pyfunction!(measure_weak_q, m)?)?;
    m.add_function(wrap_pyfunction!(measure_weak_p, m)?)?;
    m.add_function(wrap_pyfunction!(run_weak_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_from_readings, m)?)?;
    m.add_function(wrap_pyfunction!(run_projective_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(distances, m)?)?;
    m.add_function(wrap_pyfunction!(distances_as_printed, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(random_state, m)?)?;
    m.add_function(wrap_pyfunction!(default_inv_dqm_grid, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(validate_selfcheck, m)?)?;
    Ok(())
}
