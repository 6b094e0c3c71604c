//! Python bindings for the s-logic engine.
//!
//! Exposes formulas, theories, frames, and the fact database to
//! Python. Verdicts come back as plain values: booleans and status
//! strings plus optional evidence text, with frames as lists of
//! variable-to-truth dicts.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use slogic::semantics::Evidence;
use slogic::zoodb::{self, CheckResult, Engine, QueryAnswer};

fn value_err(message: impl ToString) -> PyErr {
    PyValueError::new_err(message.to_string())
}

fn runtime_err(message: impl ToString) -> PyErr {
    PyRuntimeError::new_err(message.to_string())
}

fn evidence_text(e: &Evidence) -> String {
    match e {
        Evidence::Tableau(proof) => proof.render_text(),
        Evidence::Trace(trace) => trace.render_text(),
        Evidence::Semantic => "established by exhaustive valuation search\n".into(),
    }
}

/// A strict implication `A => B` or strict nonimplication `A =/> B`.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct SFormula {
    inner: slogic::SFormula,
}

#[pymethods]
impl SFormula {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        slogic::parse_sformula(text)
            .map(|inner| SFormula { inner })
            .map_err(value_err)
    }

    /// "=>" or "=/>".
    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind {
            slogic::SKind::StrictImp => "=>",
            slogic::SKind::StrictNonImp => "=/>",
        }
    }

    /// The same formula with the strict operator flipped.
    fn strict_negation(&self) -> SFormula {
        SFormula { inner: self.inner.strict_negation() }
    }

    fn vars(&self) -> Vec<String> {
        self.inner.vars().iter().map(|v| v.as_str().to_owned()).collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SFormula({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &SFormula) -> bool {
        self.inner == other.inner
    }
}

/// A nonempty set of valuations; the countermodel shape.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Frame {
    inner: slogic::Frame,
}

#[pymethods]
impl Frame {
    /// One dict per world, mapping variable names to truth values.
    fn worlds(&self) -> Vec<BTreeMap<String, bool>> {
        self.inner
            .worlds()
            .iter()
            .map(|w| w.iter().map(|(v, b)| (v.as_str().to_owned(), b)).collect())
            .collect()
    }

    fn satisfies(&self, phi: &SFormula) -> bool {
        self.inner.satisfies(&phi.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Frame({})", self.inner.to_json())
    }
}

fn parse_lines(lines: Vec<String>) -> PyResult<slogic::Theory> {
    let mut theory = slogic::Theory::new();
    for line in &lines {
        theory.insert(slogic::parse_sformula(line).map_err(value_err)?);
    }
    Ok(theory)
}

/// Tableau decision: is `phi` a strict consequence of the theory
/// lines? Returns `(True, evidence_text)` or `(False, countermodel)`.
#[pyfunction]
fn decide(theory: Vec<String>, phi: &SFormula) -> PyResult<(bool, Py<PyAny>)> {
    let theory = parse_lines(theory)?;
    let verdict = slogic::decide(&theory, &phi.inner).map_err(runtime_err)?;
    Python::attach(|py| match verdict {
        slogic::Verdict::Consequence(e) => {
            Ok((true, evidence_text(&e).into_pyobject(py)?.unbind().into()))
        }
        slogic::Verdict::NotConsequence(frame) => Ok((
            false,
            Py::new(py, Frame { inner: frame })?.into_pyobject(py)?.unbind().into(),
        )),
    })
}

/// Brute-force semantic oracle over the mentioned variables.
#[pyfunction]
fn oracle_consequence(theory: Vec<String>, phi: &SFormula) -> PyResult<bool> {
    let theory = parse_lines(theory)?;
    Ok(slogic::oracle_consequence(&theory, &phi.inner).is_consequence())
}

fn engine_from(name: &str) -> PyResult<Engine> {
    match name {
        "auto" => Ok(Engine::Auto),
        "tableau" => Ok(Engine::Tableau),
        "f1" => Ok(Engine::F1),
        "f2" => Ok(Engine::F2),
        "oracle" => Ok(Engine::Oracle),
        other => Err(value_err(format!(
            "unknown engine `{other}` (expected auto, tableau, f1, f2, or oracle)"
        ))),
    }
}

/// An ingested `.slt` fact database.
#[pyclass(frozen)]
struct Database {
    inner: zoodb::Database,
}

#[pymethods]
impl Database {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        match zoodb::ingest(text) {
            Ok((inner, _warnings)) => Ok(Database { inner }),
            Err(diags) => {
                let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
                Err(value_err(lines.join("\n")))
            }
        }
    }

    /// "F1", "F2", or "general".
    #[getter]
    fn fragment_class(&self) -> String {
        self.inner.fragment_class().to_string()
    }

    fn vars(&self) -> Vec<String> {
        self.inner
            .declared_vars()
            .iter()
            .map(|v| v.as_str().to_owned())
            .collect()
    }

    fn facts(&self) -> Vec<String> {
        self.inner.records().iter().map(|r| r.fact.to_string()).collect()
    }

    /// `(True, model)` for a consistent database, `(False, report
    /// text)` otherwise.
    fn check(&self) -> PyResult<(bool, Py<PyAny>)> {
        let result = zoodb::check(&self.inner).map_err(runtime_err)?;
        Python::attach(|py| match result {
            CheckResult::Consistent(frame) => Ok((
                true,
                Py::new(py, Frame { inner: frame })?.into_pyobject(py)?.unbind().into(),
            )),
            CheckResult::Inconsistent(report) => {
                Ok((false, report.to_string().into_pyobject(py)?.unbind().into()))
            }
        })
    }

    /// Trichotomy query: returns `(status, detail)` where status is
    /// "PROVED", "REFUTED", "INDEPENDENT", or "INCONSISTENT" and
    /// detail is evidence text, a pair of countermodel frames, or a
    /// report.
    #[pyo3(signature = (phi, engine = "auto"))]
    fn query(&self, phi: &SFormula, engine: &str) -> PyResult<(String, Py<PyAny>)> {
        let engine = engine_from(engine)?;
        let answer = zoodb::query_with(&self.inner, &phi.inner, engine).map_err(runtime_err)?;
        let status = answer.status().to_owned();
        Python::attach(|py| {
            let detail: Py<PyAny> = match answer {
                QueryAnswer::Proved(e) | QueryAnswer::Refuted(e) => {
                    evidence_text(&e).into_pyobject(py)?.unbind().into()
                }
                QueryAnswer::Independent { against_query, against_negation } => (
                    Py::new(py, Frame { inner: against_query })?,
                    Py::new(py, Frame { inner: against_negation })?,
                )
                    .into_pyobject(py)?
                    .unbind()
                    .into(),
                QueryAnswer::Inconsistent(report) => {
                    report.to_string().into_pyobject(py)?.unbind().into()
                }
            };
            Ok((status, detail))
        })
    }

    /// `{"vars": [...], "cells": [[status, ...], ...]}`.
    fn matrix(&self) -> PyResult<String> {
        let m = zoodb::matrix(&self.inner).map_err(runtime_err)?;
        Ok(m.to_json().to_string())
    }

    fn to_dot(&self) -> PyResult<String> {
        let m = zoodb::matrix(&self.inner).map_err(runtime_err)?;
        Ok(zoodb::export_dot(&m))
    }

    /// Strongest derivable fragment facts, rendered.
    #[pyo3(signature = (max_ante = 2))]
    fn saturate(&self, max_ante: usize) -> PyResult<Vec<String>> {
        let report = zoodb::saturate_db(&self.inner, max_ante).map_err(runtime_err)?;
        Ok(report.facts.iter().map(|(f, _)| f.to_string()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Database({} facts, {} vars, {})",
            self.inner.records().len(),
            self.inner.declared_vars().len(),
            self.inner.fragment_class()
        )
    }
}

#[pymodule]
fn slogic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SFormula>()?;
    m.add_class::<Frame>()?;
    m.add_class::<Database>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_consequence, m)?)?;
    Ok(())
}
