//! Python bindings. Scenarios and results cross the boundary as JSON text so
//! the Python side can use the standard `json` module.

use crashgather::engine::Trace;
use crashgather::render::render_frames;
use crashgather::scenario::{bundled_names as names, bundled_source, Scenario};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

fn parse(text: &str) -> PyResult<Scenario> {
    Scenario::from_json(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Names of the scenarios shipped with the library.
#[pyfunction]
fn bundled_names() -> Vec<&'static str> {
    names()
}

/// Source JSON of a bundled scenario.
#[pyfunction]
fn bundled_scenario(name: &str) -> PyResult<&'static str> {
    bundled_source(name).ok_or_else(|| PyKeyError::new_err(name.to_string()))
}

/// Raises `ValueError` if the scenario fails schema or admissibility checks.
#[pyfunction]
fn validate(scenario: &str) -> PyResult<()> {
    parse(scenario).map(|_| ())
}

/// Runs a scenario and returns a JSON document with the outcome, the
/// invariant report and the trace events.
#[pyfunction]
#[pyo3(signature = (scenario, seed=None))]
fn run_scenario(scenario: &str, seed: Option<u64>) -> PyResult<String> {
    let mut s = parse(scenario)?;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    let run = s.run();
    let doc = serde_json::json!({
        "scenario": s.name,
        "seed": s.seed,
        "outcome": run.outcome,
        "expectation_met": run.expectation_met,
        "checks": run.report,
        "trace": run.trace,
    });
    Ok(doc.to_string())
}

/// SVG frames for a trace given as JSONL, one frame every `every` events.
#[pyfunction]
#[pyo3(signature = (trace_jsonl, every=1))]
fn render(trace_jsonl: &str, every: usize) -> PyResult<Vec<String>> {
    if every == 0 {
        return Err(PyValueError::new_err("every must be at least 1"));
    }
    let events = Trace::events_from_jsonl(trace_jsonl).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(render_frames(&events, every))
}

#[pymodule]
fn crashgather_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(bundled_names, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    Ok(())
}
