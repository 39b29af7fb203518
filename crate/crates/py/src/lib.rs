//! Python bindings for the conversation engine.

use std::path::PathBuf;
use std::sync::Arc;

use gunrock_core::analytics::{self, DEFAULT_MIN_USER_TURNS};
use gunrock_core::phonetic::{self, Corrector, PhoneticIndex, RateBounds, TimedToken};
use gunrock_core::{load_components, DataSource, EngineConfig, ServiceError};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(gunrock, GunrockError, PyException);
create_exception!(gunrock, SessionNotFound, GunrockError);
create_exception!(gunrock, SessionClosed, GunrockError);
create_exception!(gunrock, SessionBusy, GunrockError);

fn service_err(e: ServiceError) -> PyErr {
    let msg = e.to_string();
    match e {
        ServiceError::NotFound(_) => SessionNotFound::new_err(msg),
        ServiceError::Closed(_) => SessionClosed::new_err(msg),
        ServiceError::Busy(_) => SessionBusy::new_err(msg),
        ServiceError::InvalidInput(_) => PyValueError::new_err(msg),
        ServiceError::Storage(_) | ServiceError::Config(_) => GunrockError::new_err(msg),
    }
}

fn other_err(e: impl std::fmt::Display) -> PyErr {
    GunrockError::new_err(e.to_string())
}

/// Serialize through JSON into plain Python dicts and lists.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(other_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn tokens_from(raw: Vec<(String, u64, u64)>) -> PyResult<Vec<TimedToken>> {
    raw.into_iter()
        .map(|(w, s, e)| TimedToken::new(w, s, e).map_err(|err| PyValueError::new_err(err.to_string())))
        .collect()
}

fn source(config_dir: Option<PathBuf>) -> DataSource {
    config_dir.map_or(DataSource::Bundled, DataSource::Dir)
}

/// A conversation engine holding any number of sessions.
#[pyclass(frozen)]
struct Engine {
    inner: gunrock_core::Engine,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (config_dir=None, log_path=None, user_store=None, seed=0))]
    fn new(config_dir: Option<PathBuf>, log_path: Option<PathBuf>, user_store: Option<PathBuf>, seed: u64) -> PyResult<Self> {
        let config = EngineConfig { data: source(config_dir), log_path, user_store, seed, ..Default::default() };
        let inner = gunrock_core::Engine::new(config).map_err(service_err)?;
        Ok(Engine { inner })
    }

    /// Returns `(session_id, greeting)`.
    #[pyo3(signature = (user_ref="anonymous"))]
    fn open_session(&self, py: Python<'_>, user_ref: &str) -> PyResult<(String, String)> {
        let opened = py.detach(|| self.inner.open_session(user_ref)).map_err(service_err)?;
        Ok((opened.session_id, opened.greeting))
    }

    /// Handle a turn of `(word, start_ms, end_ms)` tuples.
    fn handle_turn<'py>(&self, py: Python<'py>, session_id: &str, tokens: Vec<(String, u64, u64)>) -> PyResult<Bound<'py, PyAny>> {
        let tokens = tokens_from(tokens)?;
        let reply = py.detach(|| self.inner.handle_turn(session_id, &tokens)).map_err(service_err)?;
        to_py(py, &reply)
    }

    fn handle_text<'py>(&self, py: Python<'py>, session_id: &str, text: &str) -> PyResult<Bound<'py, PyAny>> {
        let reply = py.detach(|| self.inner.handle_text(session_id, text)).map_err(service_err)?;
        to_py(py, &reply)
    }

    #[pyo3(signature = (session_id, rating=None))]
    fn close_session<'py>(&self, py: Python<'py>, session_id: &str, rating: Option<u8>) -> PyResult<Bound<'py, PyAny>> {
        let record = py.detach(|| self.inner.close_session(session_id, rating)).map_err(service_err)?;
        to_py(py, &record)
    }

    fn conversation<'py>(&self, py: Python<'py>, session_id: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.conversation(session_id).map_err(service_err)?)
    }

    fn dialog_state<'py>(&self, py: Python<'py>, session_id: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.dialog_state(session_id).map_err(service_err)?)
    }

    #[getter]
    fn session_count(&self) -> usize {
        self.inner.session_count()
    }
}

/// Phonetic spelling corrector over `(phrase, domain)` gazetteer rows.
#[pyclass(frozen)]
struct PhoneticCorrector {
    inner: Corrector,
}

#[pymethods]
impl PhoneticCorrector {
    #[new]
    #[pyo3(signature = (entries, use_timing=true))]
    fn new(entries: Vec<(String, String)>, use_timing: bool) -> PyResult<Self> {
        let components = load_components(&DataSource::Bundled).map_err(other_err)?;
        let bounds = if use_timing { RateBounds::default() } else { RateBounds::disabled() };
        let index = Arc::new(PhoneticIndex::build(entries));
        Ok(PhoneticCorrector { inner: Corrector::new(vec![index], Arc::clone(&components.pipeline.chunker), bounds) })
    }

    /// Returns `{"text", "words", "applied"}`.
    fn correct<'py>(&self, py: Python<'py>, tokens: Vec<(String, u64, u64)>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.correct(&tokens_from(tokens)?))
    }
}

/// `(primary, secondary)` Double Metaphone codes of one word.
#[pyfunction]
fn double_metaphone(word: &str) -> PyResult<(String, String)> {
    let code = phonetic::encode_double_metaphone(word).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((code.primary, code.secondary))
}

#[pyfunction]
fn ols_fit<'py>(py: Python<'py>, x: Vec<f64>, y: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let fit = analytics::ols_fit(&x, &y).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &fit)
}

/// Metrics and regressions over a JSONL conversation log.
#[pyfunction]
#[pyo3(signature = (path, min_user_turns=DEFAULT_MIN_USER_TURNS))]
fn analyze_log<'py>(py: Python<'py>, path: PathBuf, min_user_turns: u32) -> PyResult<Bound<'py, PyAny>> {
    let loaded = py.detach(|| analytics::load_logs(&path, min_user_turns)).map_err(other_err)?;
    let report = analytics::run_engagement_analyses(&loaded.metrics);
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (path, conversations=2000, seed=7))]
fn write_synthetic_log<'py>(py: Python<'py>, path: PathBuf, conversations: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let cfg = analytics::SynthConfig { conversations, seed, ..Default::default() };
    let summary = py.detach(|| analytics::write_synthetic_log(&path, &cfg)).map_err(other_err)?;
    to_py(py, &summary)
}

#[pymodule]
fn gunrock(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_class::<PhoneticCorrector>()?;
    m.add_function(wrap_pyfunction!(double_metaphone, m)?)?;
    m.add_function(wrap_pyfunction!(ols_fit, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_log, m)?)?;
    m.add_function(wrap_pyfunction!(write_synthetic_log, m)?)?;
    let py = m.py();
    m.add("GunrockError", py.get_type::<GunrockError>())?;
    m.add("SessionNotFound", py.get_type::<SessionNotFound>())?;
    m.add("SessionClosed", py.get_type::<SessionClosed>())?;
    m.add("SessionBusy", py.get_type::<SessionBusy>())?;
    Ok(())
}
