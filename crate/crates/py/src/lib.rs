//! Python bindings: instance construction, the splitting solver, the three
//! baselines, the exhaustive verification oracle, random user drops, and the
//! dBm/watt conversions. Solutions come back as plain dicts so Python-side
//! consumers need no extra types.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rsma_core::baselines::{solve_broadcast, solve_noma, solve_ofdma, BaselineSolution};
use rsma_core::channel::ChannelParams;
use rsma_core::error::Error;
use rsma_core::model::{NetworkInstance as CoreInstance, SolverParams};
use rsma_core::oracle::{oracle_solve as core_oracle_solve, OracleConfig};
use rsma_core::search::solve_rsma_auto;

/// Domain and config mistakes are the caller's to fix (ValueError); an
/// infeasible instance or any other solver-side condition surfaces as a
/// RuntimeError carrying the diagnostic text.
fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Config { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// One downlink cell: ascending channel gains, noise power, bandwidth,
/// power budget, detection threshold, per-user rate demands (linear units).
#[pyclass(name = "NetworkInstance", frozen)]
struct PyNetworkInstance {
    inner: CoreInstance,
}

#[pymethods]
impl PyNetworkInstance {
    #[new]
    fn new(
        gains: Vec<f64>,
        sigma2_w: f64,
        bandwidth_hz: f64,
        p_max_w: f64,
        theta_w: f64,
        r_min_bps: Vec<f64>,
    ) -> PyResult<Self> {
        CoreInstance::new(gains, sigma2_w, bandwidth_hz, p_max_w, theta_w, r_min_bps)
            .map(|inner| PyNetworkInstance { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn gains(&self) -> Vec<f64> {
        self.inner.h.clone()
    }

    #[getter]
    fn sigma2_w(&self) -> f64 {
        self.inner.sigma2
    }

    #[getter]
    fn bandwidth_hz(&self) -> f64 {
        self.inner.bandwidth
    }

    #[getter]
    fn p_max_w(&self) -> f64 {
        self.inner.p_max
    }

    #[getter]
    fn theta_w(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn r_min_bps(&self) -> Vec<f64> {
        self.inner.r_min.clone()
    }

    fn num_users(&self) -> usize {
        self.inner.num_users()
    }

    fn __repr__(&self) -> String {
        format!(
            "NetworkInstance(users={}, p_max_w={:e}, bandwidth_hz={:e})",
            self.inner.num_users(),
            self.inner.p_max,
            self.inner.bandwidth
        )
    }
}

fn baseline_dict<'py>(py: Python<'py>, sol: &BaselineSolution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("scheme", format!("{:?}", sol.scheme).to_lowercase())?;
    d.set_item("sum_rate_bps", sol.sum_rate)?;
    d.set_item("user_total_rates_bps", sol.user_total_rates.clone())?;
    d.set_item("common_power_w", sol.powers.p0)?;
    d.set_item("private_powers_w", sol.powers.p_priv.clone())?;
    Ok(d)
}

/// Globally optimal rate splitting: common shares, powers, per-user totals.
/// `xi_rel` overrides the common-power grid step as a fraction of the
/// budget.
#[pyfunction]
#[pyo3(signature = (inst, xi_rel=None))]
fn solve_rsma<'py>(
    py: Python<'py>,
    inst: &PyNetworkInstance,
    xi_rel: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut params = SolverParams::for_instance(&inst.inner);
    if let Some(rel) = xi_rel {
        if !(rel > 0.0) {
            return Err(PyValueError::new_err(format!(
                "xi_rel must be positive, got {rel}"
            )));
        }
        params = params.with_xi(rel * inst.inner.p_max);
    }
    let (sol, trace) = solve_rsma_auto(&inst.inner, &params).map_err(to_py_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("sum_rate_bps", sol.sum_rate)?;
    d.set_item("common_shares_bps", sol.rates.a.clone())?;
    d.set_item("common_power_w", sol.powers.p0)?;
    d.set_item("private_powers_w", sol.powers.p_priv.clone())?;
    d.set_item("user_total_rates_bps", sol.user_total_rates.clone())?;
    d.set_item("common_rate_bps", sol.common_rate_c1)?;
    d.set_item("surplus_user", sol.k_star)?;
    d.set_item("solve_path", format!("{:?}", trace.path))?;
    Ok(d)
}

/// Layered superposition with successive cancellation (ascending gains).
#[pyfunction]
fn noma<'py>(py: Python<'py>, inst: &PyNetworkInstance) -> PyResult<Bound<'py, PyDict>> {
    baseline_dict(py, &solve_noma(&inst.inner).map_err(to_py_err)?)
}

/// Orthogonal equal slices with water-filling on the leftover budget.
#[pyfunction]
fn ofdma<'py>(py: Python<'py>, inst: &PyNetworkInstance) -> PyResult<Bound<'py, PyDict>> {
    baseline_dict(py, &solve_ofdma(&inst.inner).map_err(to_py_err)?)
}

/// Superposition without any cancellation or common stream.
#[pyfunction]
fn broadcast<'py>(py: Python<'py>, inst: &PyNetworkInstance) -> PyResult<Bound<'py, PyDict>> {
    baseline_dict(py, &solve_broadcast(&inst.inner).map_err(to_py_err)?)
}

/// Exhaustive grid verification of the raw problem (up to 3 users):
/// best feasible point and a resolution allowance on the objective.
#[pyfunction]
fn oracle_solve<'py>(py: Python<'py>, inst: &PyNetworkInstance) -> PyResult<Bound<'py, PyDict>> {
    let cfg = OracleConfig::for_users(inst.inner.num_users());
    let sol = core_oracle_solve(&inst.inner, &cfg).map_err(to_py_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("objective_bps", sol.objective)?;
    d.set_item("slack_bps", sol.slack)?;
    d.set_item("common_shares_bps", sol.a)?;
    d.set_item("common_power_w", sol.powers.p0)?;
    d.set_item("private_powers_w", sol.powers.p_priv)?;
    Ok(d)
}

/// Ascending channel gains for `k` users dropped uniformly in a square cell
/// (base station at the center), log-distance path loss plus log-normal
/// shadowing. `(seed, stream)` pairs are reproducible and independent.
#[pyfunction]
#[pyo3(signature = (k, seed=0, stream=0, cell_side_m=300.0, shadow_sigma_db=4.0))]
fn drop_users(
    k: usize,
    seed: u64,
    stream: u64,
    cell_side_m: f64,
    shadow_sigma_db: f64,
) -> PyResult<Vec<f64>> {
    let params = ChannelParams {
        cell_side_m,
        shadow_sigma_db,
        seed,
        ..ChannelParams::default()
    };
    params.drop_users_stream(k, stream).map_err(to_py_err)
}

#[pyfunction]
fn dbm_to_watt(dbm: f64) -> f64 {
    rsma_core::channel::dbm_to_watt(dbm)
}

#[pyfunction]
fn watt_to_dbm(watt: f64) -> PyResult<f64> {
    rsma_core::channel::watt_to_dbm(watt).map_err(to_py_err)
}

#[pymodule]
fn rsma_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetworkInstance>()?;
    m.add_function(wrap_pyfunction!(solve_rsma, m)?)?;
    m.add_function(wrap_pyfunction!(noma, m)?)?;
    m.add_function(wrap_pyfunction!(ofdma, m)?)?;
    m.add_function(wrap_pyfunction!(broadcast, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_solve, m)?)?;
    m.add_function(wrap_pyfunction!(drop_users, m)?)?;
    m.add_function(wrap_pyfunction!(dbm_to_watt, m)?)?;
    m.add_function(wrap_pyfunction!(watt_to_dbm, m)?)?;
    Ok(())
}
