//! Python bindings for the cograte library: thin `pyclass` wrappers around
//! the core types plus module-level functions for each scheme.
//!
//! Build the extension with `cargo build -p cograte-py`, then import the
//! produced `libcograte.so` as `cograte.so` (see `python/smoke_test.py`).

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cograte_core::{bounds, model, oracle, sense_opt, simulator, Error};

/// Parameter and scenario problems surface as `ValueError`; solver and
/// feasibility problems as `RuntimeError`.
fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_)
        | Error::InvalidScenario(_)
        | Error::ScenarioParse(_)
        | Error::ScenarioIo(_) => PyValueError::new_err(e.to_string()),
        Error::InfeasibleProfile(_) | Error::NonConvergence { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// model wrappers
// ---------------------------------------------------------------------------

/// Channel operating point (SNRs, squared cross gains, interference gap).
#[pyclass(name = "ChannelParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChannelParams {
    inner: model::ChannelParams,
}

#[pymethods]
impl PyChannelParams {
    #[new]
    fn new(snr1: f64, snr2: f64, h12_sq: f64, h21_sq: f64, inr_gap: f64) -> PyResult<Self> {
        let inner = model::ChannelParams { snr1, snr2, h12_sq, h21_sq, inr_gap };
        inner.validate().map_err(to_py_err)?;
        Ok(PyChannelParams { inner })
    }

    #[getter]
    fn snr1(&self) -> f64 {
        self.inner.snr1
    }

    #[getter]
    fn snr2(&self) -> f64 {
        self.inner.snr2
    }

    #[getter]
    fn h12_sq(&self) -> f64 {
        self.inner.h12_sq
    }

    #[getter]
    fn h21_sq(&self) -> f64 {
        self.inner.h21_sq
    }

    #[getter]
    fn inr_gap(&self) -> f64 {
        self.inner.inr_gap
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelParams(snr1={}, snr2={}, h12_sq={}, h21_sq={}, inr_gap={})",
            self.inner.snr1,
            self.inner.snr2,
            self.inner.h12_sq,
            self.inner.h21_sq,
            self.inner.inr_gap
        )
    }
}

/// Quantities derived from the channel: INR2, the INR cap, and the SIC caps.
#[pyclass(name = "DerivedLimits", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDerivedLimits {
    inner: model::DerivedLimits,
}

#[pymethods]
impl PyDerivedLimits {
    #[getter]
    fn inr2(&self) -> f64 {
        self.inner.inr2
    }

    #[getter]
    fn inr_c(&self) -> f64 {
        self.inner.inr_c
    }

    #[getter]
    fn sic_c(&self) -> f64 {
        self.inner.sic_c
    }

    #[getter]
    fn sic_prime_c(&self) -> f64 {
        self.inner.sic_prime_c
    }

    fn __repr__(&self) -> String {
        format!(
            "DerivedLimits(inr2={}, inr_c={}, sic_c={}, sic_prime_c={})",
            self.inner.inr2, self.inner.inr_c, self.inner.sic_c, self.inner.sic_prime_c
        )
    }
}

/// Block activity model: prior over the starting state plus the switch-time
/// pmf over slots `1..=T+1`.
#[pyclass(name = "TrafficModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTrafficModel {
    inner: model::TrafficModel,
}

#[pymethods]
impl PyTrafficModel {
    #[new]
    fn new(t_len: usize, pi0: f64, f: Vec<f64>) -> PyResult<Self> {
        let inner = model::TrafficModel::new(t_len, pi0, 1.0 - pi0, f).map_err(to_py_err)?;
        Ok(PyTrafficModel { inner })
    }

    /// Uniform switch-time pmf over `1..=T+1`.
    #[staticmethod]
    fn uniform(t_len: usize, pi0: f64) -> PyResult<Self> {
        let inner =
            model::TrafficModel::uniform(t_len, pi0, 1.0 - pi0).map_err(to_py_err)?;
        Ok(PyTrafficModel { inner })
    }

    /// Deterministic switch at slot `tau` (use `T + 1` for "never").
    #[staticmethod]
    fn point_mass(t_len: usize, pi0: f64, tau: usize) -> PyResult<Self> {
        let inner =
            model::TrafficModel::point_mass(t_len, pi0, 1.0 - pi0, tau).map_err(to_py_err)?;
        Ok(PyTrafficModel { inner })
    }

    #[getter]
    fn t_len(&self) -> usize {
        self.inner.t_len()
    }

    #[getter]
    fn pi0(&self) -> f64 {
        self.inner.pi0()
    }

    /// `P(slot t on | started in s0)` for `t in 1..=T`.
    fn beta_s(&self, s0: u8, t: usize) -> f64 {
        self.inner.beta_s(s0, t)
    }

    /// Stationary on-fraction implied by the prior and the pmf.
    fn long_run_on_fraction(&self) -> f64 {
        self.inner.long_run_on_fraction()
    }

    fn __repr__(&self) -> String {
        format!("TrafficModel(T={}, pi0={})", self.inner.t_len(), self.inner.pi0())
    }
}

/// Binary sensing error channel (miss and false-alarm probabilities).
#[pyclass(name = "SensingModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySensingModel {
    inner: model::SensingModel,
}

#[pymethods]
impl PySensingModel {
    #[new]
    fn new(p_m: f64, p_f: f64) -> PyResult<Self> {
        let inner = model::SensingModel { p_m, p_f };
        inner.validate().map_err(to_py_err)?;
        Ok(PySensingModel { inner })
    }

    /// Error-free sensing (`P_M = P_F = 0`).
    #[staticmethod]
    fn perfect() -> Self {
        PySensingModel { inner: model::SensingModel::PERFECT }
    }

    #[getter]
    fn p_m(&self) -> f64 {
        self.inner.p_m
    }

    #[getter]
    fn p_f(&self) -> f64 {
        self.inner.p_f
    }

    fn __repr__(&self) -> String {
        format!("SensingModel(p_m={}, p_f={})", self.inner.p_m, self.inner.p_f)
    }
}

/// A parsed scenario file (channel + traffic + sensing + optional beta).
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    inner: model::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Parses scenario JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyScenario { inner: model::Scenario::from_json_str(text).map_err(to_py_err)? })
    }

    /// Loads a scenario JSON file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyScenario { inner: model::Scenario::load(&path).map_err(to_py_err)? })
    }

    #[getter]
    fn channel(&self) -> PyChannelParams {
        PyChannelParams { inner: self.inner.channel }
    }

    #[getter]
    fn sensing(&self) -> PySensingModel {
        PySensingModel { inner: self.inner.sensing }
    }

    /// Builds the traffic model declared by the scenario.
    fn traffic(&self) -> PyResult<PyTrafficModel> {
        Ok(PyTrafficModel { inner: self.inner.traffic.build().map_err(to_py_err)? })
    }

    /// The long-run on-fraction the closed-form schemes use.
    fn beta(&self) -> PyResult<f64> {
        let traffic = self.inner.traffic.build().map_err(to_py_err)?;
        Ok(self.inner.resolved_beta(&traffic))
    }
}

// ---------------------------------------------------------------------------
// scheme results
// ---------------------------------------------------------------------------

/// Genie-aided power split and the closed-form branch that produced it.
#[pyclass(name = "GenieAllocation", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGenieAllocation {
    inner: bounds::GenieAllocation,
}

#[pymethods]
impl PyGenieAllocation {
    #[getter]
    fn rho0(&self) -> f64 {
        self.inner.rho0
    }

    #[getter]
    fn rho1n(&self) -> f64 {
        self.inner.rho1n
    }

    #[getter]
    fn rho1s(&self) -> f64 {
        self.inner.rho1s
    }

    #[getter]
    fn regime(&self) -> String {
        format!("{:?}", self.inner.regime)
    }

    fn __repr__(&self) -> String {
        format!(
            "GenieAllocation(rho0={}, rho1n={}, rho1s={}, regime={:?})",
            self.inner.rho0, self.inner.rho1n, self.inner.rho1s, self.inner.regime
        )
    }
}

/// Optimal static superposition split of the no-sensing scheme.
#[pyclass(name = "NoSensingResult", frozen)]
struct PyNoSensingResult {
    #[pyo3(get)]
    alpha_star: f64,
    #[pyo3(get)]
    rate: f64,
    /// Region code: "R1", "R2", "R3", or "NA".
    #[pyo3(get)]
    region: String,
}

#[pymethods]
impl PyNoSensingResult {
    fn __repr__(&self) -> String {
        format!(
            "NoSensingResult(alpha_star={}, rate={}, region={})",
            self.alpha_star, self.rate, self.region
        )
    }
}

/// Per-slot, per-sensed-state power profile of the sense-and-send schemes.
#[pyclass(name = "PowerProfile", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPowerProfile {
    inner: sense_opt::PowerProfile,
}

#[pymethods]
impl PyPowerProfile {
    #[new]
    fn new(rho_n: [Vec<f64>; 2], rho_s: [Vec<f64>; 2]) -> PyResult<Self> {
        if rho_n[0].len() != rho_n[1].len()
            || rho_s[0].len() != rho_s[1].len()
            || rho_n[0].len() != rho_s[0].len()
        {
            return Err(PyValueError::new_err(
                "rho_n and rho_s must each hold two rows of equal length",
            ));
        }
        Ok(PyPowerProfile { inner: sense_opt::PowerProfile { rho_n, rho_s } })
    }

    /// Layer-1 rows `[sensed_off, sensed_on]` as lists of length `T`.
    #[getter]
    fn rho_n(&self) -> Vec<Vec<f64>> {
        self.inner.rho_n.to_vec()
    }

    /// Layer-2 rows `[sensed_off, sensed_on]` as lists of length `T`.
    #[getter]
    fn rho_s(&self) -> Vec<Vec<f64>> {
        self.inner.rho_s.to_vec()
    }

    #[getter]
    fn t_len(&self) -> usize {
        self.inner.t_len()
    }

    fn __repr__(&self) -> String {
        format!("PowerProfile(T={})", self.inner.t_len())
    }
}

/// Rate evaluation: the achievable rate, constraint slacks, and (on solver
/// outputs) the water-level multiplier.
#[pyclass(name = "RateReport", frozen)]
struct PyRateReport {
    #[pyo3(get)]
    r2: f64,
    /// Normalized water-level multiplier; `None` except on solver outputs.
    #[pyo3(get)]
    lambda_: Option<f64>,
    /// `(avg_power, inr_min, sic_min)` slacks.
    #[pyo3(get)]
    slacks: (f64, f64, f64),
    /// Conditional block rates `(r00, r01, r10, r11)`.
    #[pyo3(get)]
    components: (f64, f64, f64, f64),
}

impl PyRateReport {
    fn from_core(r: &sense_opt::RateReport) -> Self {
        PyRateReport {
            r2: r.r2,
            lambda_: r.lambda,
            slacks: (r.slacks.avg_power, r.slacks.inr_min, r.slacks.sic_min),
            components: (
                r.components.r00,
                r.components.r01,
                r.components.r10,
                r.components.r11,
            ),
        }
    }
}

#[pymethods]
impl PyRateReport {
    fn __repr__(&self) -> String {
        format!("RateReport(r2={}, lambda={:?}, slacks={:?})", self.r2, self.lambda_, self.slacks)
    }
}

/// Monte Carlo rate estimate with a 95% confidence interval.
#[pyclass(name = "RateEstimate", frozen)]
struct PyRateEstimate {
    #[pyo3(get)]
    mean: f64,
    #[pyo3(get)]
    std_error: f64,
    #[pyo3(get)]
    ci_low: f64,
    #[pyo3(get)]
    ci_high: f64,
    #[pyo3(get)]
    num_blocks: usize,
}

#[pymethods]
impl PyRateEstimate {
    fn __repr__(&self) -> String {
        format!(
            "RateEstimate(mean={}, std_error={}, ci=[{}, {}], num_blocks={})",
            self.mean, self.std_error, self.ci_low, self.ci_high, self.num_blocks
        )
    }
}

// ---------------------------------------------------------------------------
// module functions
// ---------------------------------------------------------------------------

/// `C(x) = (1/2) log2(1 + x)` — capacity of a real AWGN channel at SNR `x`.
#[pyfunction]
fn cap(x: f64) -> f64 {
    model::cap(x)
}

/// Derives INR2, INR_C, and the SIC caps from the channel at on-fraction
/// `beta`.
#[pyfunction]
fn derive_limits(params: &PyChannelParams, beta: f64) -> PyResult<PyDerivedLimits> {
    Ok(PyDerivedLimits { inner: model::derive_limits(&params.inner, beta).map_err(to_py_err)? })
}

/// Closed-form genie-aided power split at on-fraction `beta`.
#[pyfunction]
fn genie_power(limits: &PyDerivedLimits, snr2: f64, beta: f64) -> PyResult<PyGenieAllocation> {
    Ok(PyGenieAllocation {
        inner: bounds::genie_power(&limits.inner, snr2, beta).map_err(to_py_err)?,
    })
}

/// Average rate of a genie-aided allocation.
#[pyfunction]
fn genie_rate(alloc: &PyGenieAllocation, limits: &PyDerivedLimits, beta: f64) -> f64 {
    bounds::genie_rate(&alloc.inner, &limits.inner, beta)
}

/// No-sensing operating-region code at the given operating point:
/// "R1" (treat as noise), "R2" (superposition), "R3" (decode primary
/// first), or "NA".
#[pyfunction]
fn classify_region(
    limits: &PyDerivedLimits,
    snr1: f64,
    snr2: f64,
    inr_gap: f64,
) -> &'static str {
    bounds::classify_region(&limits.inner, snr1, snr2, inr_gap).code()
}

/// Optimal static split `alpha*` and rate of the no-sensing scheme.
#[pyfunction]
fn no_sensing_alpha_star(
    limits: &PyDerivedLimits,
    snr1: f64,
    snr2: f64,
    inr_gap: f64,
) -> PyResult<PyNoSensingResult> {
    let res = bounds::no_sensing_alpha_star(&limits.inner, snr1, snr2, inr_gap)
        .map_err(to_py_err)?;
    Ok(PyNoSensingResult {
        alpha_star: res.alpha_star,
        rate: res.rate,
        region: res.region.code().to_string(),
    })
}

/// Optimal sense-and-send power profile and its rate report under (possibly
/// noisy) sensing.
#[pyfunction]
fn optimize_profile(
    params: &PyChannelParams,
    traffic: &PyTrafficModel,
    sensing: &PySensingModel,
) -> PyResult<(PyPowerProfile, PyRateReport)> {
    let (profile, report) =
        sense_opt::optimize_profile(&params.inner, &traffic.inner, &sensing.inner)
            .map_err(to_py_err)?;
    Ok((PyPowerProfile { inner: profile }, PyRateReport::from_core(&report)))
}

/// Error-free-sensing capacity (optimize_profile at `P_M = P_F = 0`).
#[pyfunction]
fn perfect_sensing_capacity(
    params: &PyChannelParams,
    traffic: &PyTrafficModel,
) -> PyResult<PyRateReport> {
    let report = sense_opt::perfect_sensing_capacity(&params.inner, &traffic.inner)
        .map_err(to_py_err)?;
    Ok(PyRateReport::from_core(&report))
}

/// Rate report of an arbitrary feasible profile.
#[pyfunction]
fn achievable_rate(
    profile: &PyPowerProfile,
    params: &PyChannelParams,
    traffic: &PyTrafficModel,
    sensing: &PySensingModel,
) -> PyResult<PyRateReport> {
    let report = sense_opt::achievable_rate(
        &profile.inner,
        &params.inner,
        &traffic.inner,
        &sensing.inner,
    )
    .map_err(to_py_err)?;
    Ok(PyRateReport::from_core(&report))
}

/// Structure check of a solver profile: returns `(pass, violations)`.
#[pyfunction]
fn check_monotone(profile: &PyPowerProfile, inr_c: f64) -> (bool, Vec<String>) {
    let report = sense_opt::check_monotone(&profile.inner, inr_c);
    (report.pass(), report.violations)
}

/// Primary-protection audit of a profile: returns `(pass, violations)`.
#[pyfunction]
fn primary_protection_check(
    profile: &PyPowerProfile,
    params: &PyChannelParams,
) -> (bool, Vec<String>) {
    let report = simulator::primary_protection_check(&profile.inner, &params.inner);
    (report.pass, report.violations)
}

/// Seeded Monte Carlo estimate of a profile's average rate.
#[pyfunction]
fn empirical_rate(
    profile: &PyPowerProfile,
    params: &PyChannelParams,
    traffic: &PyTrafficModel,
    sensing: &PySensingModel,
    num_blocks: usize,
    seed: u64,
) -> PyResult<PyRateEstimate> {
    let config = simulator::SimConfig { num_blocks, seed };
    let est = simulator::empirical_rate(
        &profile.inner,
        &params.inner,
        &traffic.inner,
        &sensing.inner,
        &config,
    )
    .map_err(to_py_err)?;
    Ok(PyRateEstimate {
        mean: est.mean,
        std_error: est.std_error,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        num_blocks: est.num_blocks,
    })
}

/// Independent 3-D grid search for the genie split; returns
/// `((rho0, rho1n, rho1s), rate)`.
#[pyfunction]
fn grid_genie(
    limits: &PyDerivedLimits,
    snr2: f64,
    beta: f64,
) -> PyResult<((f64, f64, f64), f64)> {
    oracle::grid_genie(&limits.inner, snr2, beta, &oracle::GridSpec::default())
        .map_err(to_py_err)
}

/// Independent 1-D grid search for the no-sensing split; returns
/// `(alpha, rate)`.
#[pyfunction]
fn grid_alpha(
    limits: &PyDerivedLimits,
    snr1: f64,
    snr2: f64,
    inr_gap: f64,
) -> PyResult<(f64, f64)> {
    oracle::grid_alpha(&limits.inner, snr1, snr2, inr_gap, &oracle::GridSpec::one_dim())
        .map_err(to_py_err)
}

#[pymodule]
fn cograte(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannelParams>()?;
    m.add_class::<PyDerivedLimits>()?;
    m.add_class::<PyTrafficModel>()?;
    m.add_class::<PySensingModel>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyGenieAllocation>()?;
    m.add_class::<PyNoSensingResult>()?;
    m.add_class::<PyPowerProfile>()?;
    m.add_class::<PyRateReport>()?;
    m.add_class::<PyRateEstimate>()?;
    m.add_function(wrap_pyfunction!(cap, m)?)?;
    m.add_function(wrap_pyfunction!(derive_limits, m)?)?;
    m.add_function(wrap_pyfunction!(genie_power, m)?)?;
    m.add_function(wrap_pyfunction!(genie_rate, m)?)?;
    m.add_function(wrap_pyfunction!(classify_region, m)?)?;
    m.add_function(wrap_pyfunction!(no_sensing_alpha_star, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_profile, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_sensing_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(achievable_rate, m)?)?;
    m.add_function(wrap_pyfunction!(check_monotone, m)?)?;
    m.add_function(wrap_pyfunction!(primary_protection_check, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_rate, m)?)?;
    m.add_function(wrap_pyfunction!(grid_genie, m)?)?;
    m.add_function(wrap_pyfunction!(grid_alpha, m)?)?;
    Ok(())
}
