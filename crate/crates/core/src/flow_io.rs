//! JSON files for flows and globe attachments.
//!
//! States, path ids and cells may be written as strings or numbers; both are
//! read as their text.

use std::collections::HashMap;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flow::{DiscreteFlow, GlobAttachment, PathInfo};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowFile {
    states: Vec<Value>,
    paths: Vec<PathEntry>,
    #[serde(default)]
    compose: Vec<[Value; 3]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PathEntry {
    id: Value,
    src: Value,
    tgt: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AttachmentFile {
    g0: Value,
    g1: Value,
    #[serde(default)]
    boundary: Vec<Value>,
    cells: Vec<Value>,
    #[serde(default)]
    attach: HashMap<String, Value>,
    #[serde(default)]
    incl: HashMap<String, Value>,
}

fn token(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("expected a string or number, got {other}"))),
    }
}

fn lookup(table: &HashMap<String, usize>, key: &str, what: &str) -> Result<usize> {
    table
        .get(key)
        .copied()
        .ok_or_else(|| Error::Parse(format!("unknown {what} {key:?}")))
}

pub fn parse_flow(text: &str) -> Result<DiscreteFlow> {
    let file: FlowFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let states: Vec<String> = file.states.iter().map(token).collect::<Result<_>>()?;
    let state_index: HashMap<String, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut paths = Vec::new();
    for p in &file.paths {
        paths.push(PathInfo {
            id: token(&p.id)?,
            src: lookup(&state_index, &token(&p.src)?, "state")?,
            tgt: lookup(&state_index, &token(&p.tgt)?, "state")?,
        });
    }
    let path_index: HashMap<String, usize> = paths.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
    let mut compose = Vec::new();
    for [p, q, r] in &file.compose {
        compose.push((
            lookup(&path_index, &token(p)?, "path")?,
            lookup(&path_index, &token(q)?, "path")?,
            lookup(&path_index, &token(r)?, "path")?,
        ));
    }
    DiscreteFlow::new(states, paths, compose)
}

pub fn parse_attachment(text: &str, base: &DiscreteFlow) -> Result<GlobAttachment> {
    let file: AttachmentFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let state = |v: &Value| -> Result<usize> {
        let label = token(v)?;
        base.state_index(&label).ok_or_else(|| Error::Parse(format!("unknown state {label:?}")))
    };
    let boundary: Vec<String> = file.boundary.iter().map(token).collect::<Result<_>>()?;
    let cells: Vec<String> = file.cells.iter().map(token).collect::<Result<_>>()?;
    let cell_index: HashMap<String, usize> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    for key in file.attach.keys().chain(file.incl.keys()) {
        if !boundary.contains(key) {
            return Err(Error::Parse(format!("{key:?} is not a boundary element")));
        }
    }
    let mut attach = Vec::new();
    let mut incl = Vec::new();
    for b in &boundary {
        let p = file.attach.get(b).ok_or_else(|| Error::Parse(format!("attach misses {b:?}")))?;
        let id = token(p)?;
        attach.push(base.path_index(&id).ok_or_else(|| Error::Parse(format!("unknown path {id:?}")))?);
        let z = file.incl.get(b).ok_or_else(|| Error::Parse(format!("incl misses {b:?}")))?;
        incl.push(lookup(&cell_index, &token(z)?, "cell")?);
    }
    let att = GlobAttachment { g0: state(&file.g0)?, g1: state(&file.g1)?, boundary, cells, attach, incl };
    att.validate(base)?;
    Ok(att)
}

pub fn flow_to_json(flow: &DiscreteFlow) -> Value {
    json!({
        "states": flow.states(),
        "paths": flow.paths().iter().map(|p| json!({
            "id": p.id,
            "src": flow.state_label(p.src),
            "tgt": flow.state_label(p.tgt),
        })).collect::<Vec<_>>(),
        "compose": flow.compose_table().iter().map(|&(p, q, r)| json!([
            flow.path(p).id, flow.path(q).id, flow.path(r).id
        ])).collect::<Vec<_>>(),
    })
}

pub fn attachment_to_json(att: &GlobAttachment, base: &DiscreteFlow) -> Value {
    let attach: serde_json::Map<String, Value> = att
        .boundary
        .iter()
        .zip(&att.attach)
        .map(|(b, &p)| (b.clone(), Value::String(base.path(p).id.clone())))
        .collect();
    let incl: serde_json::Map<String, Value> = att
        .boundary
        .iter()
        .zip(&att.incl)
        .map(|(b, &z)| (b.clone(), Value::String(att.cells[z].clone())))
        .collect();
    json!({
        "g0": base.state_label(att.g0),
        "g1": base.state_label(att.g1),
        "boundary": att.boundary,
        "cells": att.cells,
        "attach": attach,
        "incl": incl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = r#"{"states":[0,1,2],
        "paths":[{"id":"p","src":0,"tgt":1},{"id":"q","src":1,"tgt":2},{"id":"r","src":0,"tgt":2}],
        "compose":[["p","q","r"]]}"#;

    #[test]
    fn round_trip() {
        let flow = parse_flow(THREE).unwrap();
        assert_eq!(flow.path_count(), 3);
        let again = parse_flow(&flow_to_json(&flow).to_string()).unwrap();
        assert_eq!(again, flow);
        let att = parse_attachment(
            r#"{"g0":1,"g1":2,"boundary":["s"],"cells":["s","z"],"attach":{"s":"q"},"incl":{"s":"s"}}"#,
            &flow,
        )
        .unwrap();
        assert_eq!(att.attach, vec![1]);
        let back = parse_attachment(&attachment_to_json(&att, &flow).to_string(), &flow).unwrap();
        assert_eq!(back, att);
    }

    #[test]
    fn loader_reports_associativity_witness() {
        let text = r#"{"states":["x"],
            "paths":[{"id":"a","src":"x","tgt":"x"},{"id":"b","src":"x","tgt":"x"}],
            "compose":[["a","a","b"],["b","a","a"],["a","b","b"],["b","b","b"]]}"#;
        let err = parse_flow(text).unwrap_err();
        assert!(err.to_string().contains("not associative at (a, a, a)"), "{err}");
    }

    #[test]
    fn loader_rejects_bad_input() {
        assert!(matches!(parse_flow("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_flow(r#"{"states":[0],"paths":[{"id":"p","src":0,"tgt":9}]}"#), Err(Error::Parse(_))));
        let flow = parse_flow(THREE).unwrap();
        let att = r#"{"g0":0,"g1":2,"boundary":["s"],"cells":["z"],"attach":{"s":"p"},"incl":{"s":"z"}}"#;
        assert!(matches!(parse_attachment(att, &flow), Err(Error::InvalidAttachment(_))));
    }
}
