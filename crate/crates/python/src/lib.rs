//! Python bindings: simulation runs, the sharing model, regression fits and
//! log parsing/aggregation.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use memesim_core::content::FeatureVector;
use memesim_core::decision::{share_probability as core_share_probability, SharingModel};
use memesim_core::engine::{self, EventKind, EventRecord};
use memesim_core::logio;
use memesim_core::stats::{self, DesignMatrix, FitResult, LogisticOptions, ModelKind};

create_exception!(memesim, ConfigError, PyValueError);
create_exception!(memesim, StatsError, PyValueError);
create_exception!(memesim, LogParseError, PyValueError);

fn config_err(e: memesim_core::error::ConfigError) -> PyErr {
    ConfigError::new_err(e.to_string())
}

fn stats_err(e: stats::StatsError) -> PyErr {
    StatsError::new_err(format!("{}: {e}", e.code()))
}

/// Simulation parameters. Construct with defaults, then adjust with
/// `set(name, value)` or load from JSON.
#[pyclass(name = "SimConfig", module = "memesim", skip_from_py_object)]
#[derive(Clone)]
struct PySimConfig {
    inner: engine::SimConfig,
}

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = engine::SimConfig::default();
        if let Some(kw) = kwargs {
            for (k, v) in kw.iter() {
                let name: String = k.extract()?;
                inner.set_param(&name, v.extract()?).map_err(config_err)?;
            }
        }
        Ok(Self { inner })
    }

    /// Parses the `simulation` object of a run configuration.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: engine::SimConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::new_err(e.to_string()))?;
        inner.validate().map_err(config_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    /// Sets a numeric parameter, e.g. `set("neighbor_radius", 2.5)` or
    /// `set("intercept", -5.0)`.
    fn set(&mut self, name: &str, value: f64) -> PyResult<()> {
        self.inner.set_param(name, value).map_err(config_err)
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(config_err)
    }

    #[getter]
    fn population(&self) -> u32 {
        self.inner.population
    }

    #[getter]
    fn recruits(&self) -> u32 {
        self.inner.recruits
    }

    #[getter]
    fn horizon_ticks(&self) -> u32 {
        self.inner.horizon_ticks
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    fn __repr__(&self) -> String {
        format!("SimConfig({})", self.to_json())
    }
}

/// Output of one run.
#[pyclass(name = "SimResult", module = "memesim")]
struct PySimResult {
    inner: engine::SimOutput,
}

fn record_tuple(r: &EventRecord) -> (u64, u32, Option<u32>, &'static str) {
    (r.tick, r.agent_id, r.meme_id, r.kind.as_str())
}

#[pymethods]
impl PySimResult {
    /// `(tick, currently_infected, cumulative_exposures)` per tick.
    #[getter]
    fn series(&self) -> Vec<(u64, u64, u64)> {
        self.inner
            .series
            .iter()
            .map(|s| (s.tick, s.currently_infected, s.cumulative_exposures))
            .collect()
    }

    /// EXPOSE count per meme, indexed by meme id.
    #[getter]
    fn hits(&self) -> Vec<u64> {
        self.inner.hits.clone()
    }

    /// `(tick, agent_id, meme_id or None, kind)` per event.
    #[getter]
    fn events(&self) -> Vec<(u64, u32, Option<u32>, &'static str)> {
        self.inner.events.iter().map(record_tuple).collect()
    }

    #[getter]
    fn final_cumulative_exposures(&self) -> u64 {
        self.inner.final_cumulative_exposures()
    }

    /// The event log as text, one line per event.
    fn event_log(&self) -> String {
        let mut buf = Vec::new();
        logio::write_log(&mut buf, &self.inner.events).expect("writing to memory");
        String::from_utf8(buf).expect("log is ASCII")
    }

    /// Rule violations found by replaying the event log; empty when valid.
    fn check_transitions(&self) -> Vec<String> {
        engine::check_transitions(&self.inner.events)
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.events.len()
    }
}

#[pyfunction]
fn run(py: Python<'_>, config: PyRef<'_, PySimConfig>) -> PyResult<PySimResult> {
    let cfg = config.inner.clone();
    let inner = py.detach(|| engine::run(cfg)).map_err(config_err)?;
    Ok(PySimResult { inner })
}

/// Share probability for perceived features `(humor, self_relevance,
/// self_reference)`. Coefficients default to the shipped consumer model.
#[pyfunction]
#[pyo3(signature = (humor, self_relevance, self_reference, intercept=None, w_humor=None, w_relevance=None, w_selfref=None))]
fn share_probability(
    humor: f64,
    self_relevance: f64,
    self_reference: f64,
    intercept: Option<f64>,
    w_humor: Option<f64>,
    w_relevance: Option<f64>,
    w_selfref: Option<f64>,
) -> PyResult<f64> {
    let d = SharingModel::default();
    let model = SharingModel {
        intercept: intercept.unwrap_or(d.intercept),
        w_humor: w_humor.unwrap_or(d.w_humor),
        w_relevance: w_relevance.unwrap_or(d.w_relevance),
        w_selfref: w_selfref.unwrap_or(d.w_selfref),
    };
    let f = FeatureVector {
        humor,
        self_relevance,
        self_reference,
    };
    core_share_probability(&model, &f).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn design(x: Vec<Vec<f64>>, y: Vec<f64>, names: Option<Vec<String>>) -> PyResult<DesignMatrix> {
    let k = x.first().map_or(0, Vec::len);
    let names = names.unwrap_or_else(|| (0..k).map(|j| format!("x{j}")).collect());
    if names.len() != k {
        return Err(PyValueError::new_err(format!(
            "{} names for {k} features",
            names.len()
        )));
    }
    DesignMatrix::new(names, &x, y).map_err(stats_err)
}

fn fit_dict<'py>(py: Python<'py>, fit: &FitResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let model = match fit.model {
        ModelKind::Ols => "ols",
        ModelKind::Logistic => "logistic",
    };
    d.set_item("model", model)?;
    d.set_item("terms", fit.terms.clone())?;
    d.set_item("coefficients", fit.coefficients.clone())?;
    d.set_item("r_squared", fit.r_squared)?;
    d.set_item("mcfadden_pseudo_r2", fit.mcfadden_pseudo_r2)?;
    d.set_item("binary_ols_r_squared", fit.binary_ols_r_squared)?;
    d.set_item("log_likelihood", fit.log_likelihood)?;
    d.set_item("null_log_likelihood", fit.null_log_likelihood)?;
    d.set_item("gradient_norm", fit.gradient_norm)?;
    d.set_item("converged", fit.converged)?;
    d.set_item("iterations", fit.iterations)?;
    Ok(d)
}

/// Least squares with an intercept. `x` is a list of rows.
#[pyfunction]
#[pyo3(signature = (x, y, names=None))]
fn ols_fit<'py>(
    py: Python<'py>,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    names: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    let fit = stats::ols_fit(&design(x, y, names)?).map_err(stats_err)?;
    fit_dict(py, &fit)
}

/// Logistic regression with an intercept; `y` must be 0/1.
#[pyfunction]
#[pyo3(signature = (x, y, names=None, ridge=1e-6, max_iter=100, tol=1e-8))]
fn logistic_fit<'py>(
    py: Python<'py>,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    names: Option<Vec<String>>,
    ridge: f64,
    max_iter: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = LogisticOptions {
        ridge,
        max_iter,
        tol,
    };
    let fit = stats::logistic_fit(&design(x, y, names)?, opts).map_err(stats_err)?;
    fit_dict(py, &fit)
}

/// Parses one log line into `(tick, agent_id, meme_id or None, kind)`.
#[pyfunction]
fn parse_line(line: &str) -> PyResult<(u64, u32, Option<u32>, &'static str)> {
    logio::parse_line(line)
        .map(|r| record_tuple(&r))
        .map_err(|e| LogParseError::new_err(e.to_string()))
}

fn parse_kind(kind: &str) -> PyResult<EventKind> {
    kind.parse()
        .map_err(|_| PyValueError::new_err(format!("unknown event kind {kind:?}")))
}

#[pyfunction]
#[pyo3(signature = (tick, agent_id, kind, meme_id=None))]
fn emit_line(tick: u64, agent_id: u32, kind: &str, meme_id: Option<u32>) -> PyResult<String> {
    let r = EventRecord {
        tick,
        kind: parse_kind(kind)?,
        agent_id,
        meme_id,
    };
    if !r.is_well_formed() {
        return Err(PyValueError::new_err(
            "RECRUIT takes no meme id and every other kind needs one",
        ));
    }
    Ok(logio::emit_line(&r))
}

/// Per-meme hit counts of log lines. Returns a dict with the summary
/// statistics plus `per_meme` and `bins` mappings.
#[pyfunction]
#[pyo3(signature = (lines, bin_width=1, counted_kinds=None))]
fn aggregate_hits<'py>(
    py: Python<'py>,
    lines: Vec<String>,
    bin_width: u64,
    counted_kinds: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    if bin_width == 0 {
        return Err(PyValueError::new_err("bin_width must be at least 1"));
    }
    let kinds = match counted_kinds {
        Some(ks) => ks
            .iter()
            .map(|k| parse_kind(k))
            .collect::<PyResult<Vec<_>>>()?,
        None => logio::DEFAULT_COUNTED_KINDS.to_vec(),
    };
    let mut agg = logio::HitAggregator::new(&kinds, bin_width);
    for (i, line) in lines.iter().enumerate() {
        let r = logio::parse_line(line)
            .map_err(|e| LogParseError::new_err(format!("line {}: {e}", i + 1)))?;
        agg.push(&r);
    }
    let s = agg.finish();
    let d = PyDict::new(py);
    d.set_item("total_hits", s.total_hits)?;
    d.set_item("meme_count", s.meme_count)?;
    d.set_item("max_hits", s.max_hits)?;
    d.set_item("median_hits", s.median_hits)?;
    d.set_item("fraction_below_2", s.fraction_below_2)?;
    d.set_item("last_tick", s.last_tick)?;
    d.set_item("per_meme", s.per_meme.clone())?;
    d.set_item("bins", s.binned_series())?;
    Ok(d)
}

#[pymodule]
fn memesim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PySimConfig>()?;
    m.add_class::<PySimResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(share_probability, m)?)?;
    m.add_function(wrap_pyfunction!(ols_fit, m)?)?;
    m.add_function(wrap_pyfunction!(logistic_fit, m)?)?;
    m.add_function(wrap_pyfunction!(parse_line, m)?)?;
    m.add_function(wrap_pyfunction!(emit_line, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_hits, m)?)?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("StatsError", py.get_type::<StatsError>())?;
    m.add("LogParseError", py.get_type::<LogParseError>())?;
    Ok(())
}
