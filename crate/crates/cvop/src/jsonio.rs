//! Artifact serialization with byte-reproducible output.
//!
//! Every float is printed with 17 significant digits (`{:.16e}`), which
//! round-trips `f64` exactly; object keys are emitted in sorted order.
//! Two runs with the same inputs therefore produce identical bytes.
//! Non-finite floats are rejected: artifacts never contain NaN or
//! infinities, unbounded quantities are encoded structurally.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde_json::{Map, Value};

use crate::classify::{BoundednessReport, BoundaryProbe, WEstimate};
use crate::cone::PolyCone;
use crate::error::CvopError;
use crate::sandwich::{DivergenceOutcome, DivergenceTrace, SandwichResult};
use crate::setops::SetopsValue;
use crate::solver::{ScalarStatus, ScalarVerdict};
use crate::upper_set::UpperSet;
use crate::Result;

pub fn num(x: f64) -> Result<Value> {
    if !x.is_finite() {
        return Err(CvopError::InvalidProblem(format!(
            "non-finite value {x} cannot be serialized"
        )));
    }
    Ok(Value::Number(serde_json::Number::from_f64(x).expect("finite")))
}

pub fn vector(v: &DVector<f64>) -> Result<Value> {
    Ok(Value::Array(
        v.iter().map(|&x| num(x)).collect::<Result<Vec<_>>>()?,
    ))
}

pub fn vectors(vs: &[DVector<f64>]) -> Result<Value> {
    Ok(Value::Array(
        vs.iter().map(vector).collect::<Result<Vec<_>>>()?,
    ))
}

fn opt_vector(v: &Option<DVector<f64>>) -> Result<Value> {
    match v {
        Some(v) => vector(v),
        None => Ok(Value::Null),
    }
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

// ---------------------------------------------------------------------
// Deterministic writer

fn emit_into(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let x = n.as_f64().expect("number is one of i64/u64/f64");
                out.push_str(&format!("{x:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string encoding"))
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let scalars = items
                .iter()
                .all(|x| matches!(x, Value::Number(_) | Value::Bool(_)));
            if scalars {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    emit_into(item, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                emit_into(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key encoding"));
                out.push_str(": ");
                emit_into(item, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Renders a value as a reproducible JSON document (trailing newline).
pub fn emit(value: &Value) -> String {
    let mut out = String::new();
    emit_into(value, 0, &mut out);
    out.push('\n');
    out
}

pub fn write_artifact(path: &std::path::Path, value: &Value) -> Result<()> {
    std::fs::write(path, emit(value))?;
    Ok(())
}

pub fn parse_str(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(CvopError::from_serde)
}

// ---------------------------------------------------------------------
// Readback helpers

fn want_array<'v>(value: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| CvopError::InvalidProblem(format!("{what} must be an array")))
}

pub fn vector_from(value: &Value, what: &str) -> Result<DVector<f64>> {
    let items = want_array(value, what)?;
    let mut coords = Vec::with_capacity(items.len());
    for item in items {
        coords.push(item.as_f64().ok_or_else(|| {
            CvopError::InvalidProblem(format!("{what} entries must be numbers"))
        })?);
    }
    Ok(DVector::from_vec(coords))
}

pub fn vectors_from(value: &Value, what: &str) -> Result<Vec<DVector<f64>>> {
    want_array(value, what)?
        .iter()
        .map(|item| vector_from(item, what))
        .collect()
}

// ---------------------------------------------------------------------
// Cones and upper sets

pub fn cone_to_json(cone: &PolyCone) -> Result<Value> {
    Ok(obj(vec![
        ("dim", Value::from(cone.dim() as u64)),
        ("generators", vectors(cone.generators())?),
        ("normals", vectors(cone.normals())?),
    ]))
}

pub fn cone_from_json(value: &Value) -> Result<PolyCone> {
    let dim = value
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| CvopError::InvalidProblem("cone needs a dim field".into()))?
        as usize;
    if let Some(gens) = value.get("generators").filter(|v| !v.is_null()) {
        let gens = vectors_from(gens, "cone generators")?;
        if !gens.is_empty() {
            return PolyCone::from_generators(dim, &gens);
        }
    }
    if let Some(normals) = value.get("normals").filter(|v| !v.is_null()) {
        let normals = vectors_from(normals, "cone normals")?;
        if !normals.is_empty() {
            return PolyCone::from_normals(dim, &normals);
        }
    }
    Err(CvopError::EmptyCone)
}

pub fn upperset_to_json(set: &UpperSet) -> Result<Value> {
    let rays = if set.is_empty() {
        Value::Array(Vec::new())
    } else {
        vectors(set.recession_cone()?.generators())?
    };
    Ok(obj(vec![
        ("dim", Value::from(set.dim() as u64)),
        ("points", vectors(set.points())?),
        ("rays", rays),
        ("cone", cone_to_json(set.ordering_cone())?),
    ]))
}

pub fn upperset_from_json(value: &Value) -> Result<UpperSet> {
    let cone = cone_from_json(
        value
            .get("cone")
            .ok_or_else(|| CvopError::InvalidProblem("upper set needs a cone".into()))?,
    )?;
    let points = vectors_from(
        value
            .get("points")
            .ok_or_else(|| CvopError::InvalidProblem("upper set needs points".into()))?,
        "points",
    )?;
    if points.is_empty() {
        return Ok(UpperSet::empty(cone));
    }
    let mut rays = vectors_from(
        value
            .get("rays")
            .ok_or_else(|| CvopError::InvalidProblem("upper set needs rays".into()))?,
        "rays",
    )?;
    // Rays are recession directions on top of the ordering cone, so an
    // empty list means "just the cone"; merging keeps round-trips exact.
    rays.extend(cone.generators().iter().cloned());
    let rec = PolyCone::from_generators(cone.dim(), &rays)?;
    UpperSet::new(&points, rec, cone)
}

// ---------------------------------------------------------------------
// Solver and classifier reports

fn status_str(status: ScalarStatus) -> &'static str {
    match status {
        ScalarStatus::Bounded => "BOUNDED",
        ScalarStatus::Divergent => "DIVERGENT",
        ScalarStatus::MaxIterations => "MAX_ITERATIONS",
    }
}

/// Finite numbers serialize as numbers; an unbounded certificate field
/// (divergent scalarizations have no gap or residual) becomes null.
fn num_or_null(x: f64) -> Result<Value> {
    if x.is_finite() {
        num(x)
    } else {
        Ok(Value::Null)
    }
}

pub fn verdict_to_json(v: &ScalarVerdict) -> Result<Value> {
    let value = match v.value {
        Some(x) => num_or_null(x)?,
        None => Value::Null,
    };
    Ok(obj(vec![
        ("status", Value::String(status_str(v.status).into())),
        ("weight", vector(&v.weight)?),
        ("value", value),
        ("bound_gap", num_or_null(v.bound_gap)?),
        ("argmin", opt_vector(&v.argmin)?),
        ("ray", opt_vector(&v.ray)?),
        ("kkt_residual", num_or_null(v.kkt_residual)?),
        ("iterations", Value::from(v.iterations as u64)),
    ]))
}

fn opt_cone(cone: &Option<PolyCone>) -> Result<Value> {
    match cone {
        Some(c) => cone_to_json(c),
        None => Ok(Value::Null),
    }
}

fn w_estimate_to_json(w: &WEstimate) -> Result<Value> {
    Ok(obj(vec![
        ("resolution_deg", num(w.resolution_deg)?),
        ("bounded", vectors(&w.bounded_dirs)?),
        ("divergent", vectors(&w.divergent_dirs)?),
        ("undetermined", vectors(&w.undetermined_dirs)?),
        ("cone_hull", opt_cone(&w.cone_hull)?),
        (
            "evidence",
            Value::Array(
                w.evidence
                    .iter()
                    .map(verdict_to_json)
                    .collect::<Result<Vec<_>>>()?,
            ),
        ),
    ]))
}

fn probe_to_json(p: &BoundaryProbe) -> Result<Value> {
    Ok(obj(vec![
        ("bounded_end", vector(&p.bounded_end)?),
        ("divergent_end", vector(&p.divergent_end)?),
        ("divergent_moved", Value::Bool(p.divergent_moved)),
        ("undetermined", Value::Bool(p.undetermined)),
        ("steps", Value::from(p.steps as u64)),
    ]))
}

pub fn classify_report_to_json(report: &BoundednessReport) -> Result<Value> {
    Ok(obj(vec![
        ("verdict", Value::String(report.verdict.to_string())),
        ("resolution_deg", num(report.resolution_deg)?),
        ("w_estimate", w_estimate_to_json(&report.w_estimate)?),
        ("recc_estimate", opt_cone(&report.recc_estimate)?),
        ("anchor", opt_vector(&report.anchor)?),
        (
            "probes",
            Value::Array(
                report
                    .probes
                    .iter()
                    .map(probe_to_json)
                    .collect::<Result<Vec<_>>>()?,
            ),
        ),
        (
            "refinement_evidence",
            Value::Array(
                report
                    .refinement_evidence
                    .iter()
                    .map(verdict_to_json)
                    .collect::<Result<Vec<_>>>()?,
            ),
        ),
    ]))
}

// ---------------------------------------------------------------------
// Sandwich and divergence artifacts

pub fn sandwich_result_to_json(result: &SandwichResult) -> Result<Value> {
    let eps_certified = if result.eps_certified.is_finite() {
        num(result.eps_certified)?
    } else {
        Value::Null
    };
    let shifted = if result.eps_certified.is_finite() {
        upperset_to_json(&result.shifted_outer()?)?
    } else {
        Value::Null
    };
    let weights = result
        .weight_log
        .iter()
        .map(|(w, support)| {
            Ok(obj(vec![
                ("weight", vector(w)?),
                ("support", num(*support)?),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(obj(vec![
        ("certified", Value::Bool(result.certified)),
        ("eps_requested", num(result.eps_requested)?),
        ("eps_certified", eps_certified),
        ("direction", vector(&result.direction)?),
        ("k_used", cone_to_json(&result.k_used)?),
        ("weak_minimizers", vectors(&result.weak_minimizers)?),
        ("inner", upperset_to_json(&result.inner)?),
        ("outer", upperset_to_json(&result.outer)?),
        ("shifted_outer", shifted),
        ("weights", Value::Array(weights)),
    ]))
}

fn trace_to_json(kind: &str, reason: Option<&str>, trace: &DivergenceTrace) -> Result<Value> {
    let distances = trace
        .distances
        .iter()
        .map(|(n, d)| {
            Ok(obj(vec![
                ("n", Value::from(*n as u64)),
                ("distance", num_or_null(*d)?),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(obj(vec![
        ("kind", Value::String(kind.into())),
        (
            "reason",
            reason.map_or(Value::Null, |r| Value::String(r.into())),
        ),
        ("y_bar", vector(&trace.y_bar)?),
        ("k_bar", vector(&trace.k_bar)?),
        ("distances", Value::Array(distances)),
    ]))
}

pub fn divergence_outcome_to_json(outcome: &DivergenceOutcome) -> Result<Value> {
    match outcome {
        DivergenceOutcome::Diverging(trace) => trace_to_json("DIVERGING", None, trace),
        DivergenceOutcome::Contradiction { trace, reason } => {
            trace_to_json("CONTRADICTION", Some(reason), trace)
        }
    }
}

// ---------------------------------------------------------------------
// Set-operation requests

pub fn setops_request_from_json(
    value: &Value,
) -> Result<(String, BTreeMap<String, UpperSet>)> {
    let expr = value
        .get("expr")
        .and_then(Value::as_str)
        .ok_or_else(|| {
            CvopError::InvalidProblem("request needs a string field 'expr'".into())
        })?
        .to_string();
    let mut bindings = BTreeMap::new();
    if let Some(raw) = value.get("bindings") {
        let map = raw.as_object().ok_or_else(|| {
            CvopError::InvalidProblem("'bindings' must be an object".into())
        })?;
        for (name, set) in map {
            bindings.insert(name.clone(), upperset_from_json(set)?);
        }
    }
    Ok((expr, bindings))
}

pub fn setops_value_to_json(value: &SetopsValue) -> Result<Value> {
    match value {
        SetopsValue::Set(set) => Ok(obj(vec![
            ("kind", Value::String("set".into())),
            ("set", upperset_to_json(set)?),
        ])),
        SetopsValue::Bool(b) => Ok(obj(vec![
            ("kind", Value::String("bool".into())),
            ("value", Value::Bool(*b)),
        ])),
    }
}

// ---------------------------------------------------------------------
// Run records

pub struct RunRecord {
    pub command: String,
    pub spec_sha256: String,
    pub config: Value,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn run_record_to_json(record: &RunRecord) -> Result<Value> {
    Ok(obj(vec![
        ("version", Value::String(env!("CARGO_PKG_VERSION").into())),
        ("command", Value::String(record.command.clone())),
        ("spec_sha256", Value::String(record.spec_sha256.clone())),
        ("config", record.config.clone()),
        ("outputs", Value::Array(
            record
                .outputs
                .iter()
                .map(|p| Value::String(p.clone()))
                .collect(),
        )),
        ("wall_time_s", num(record.wall_time_s)?),
    ]))
}
