//! JSON export. Preopetopes are `"point"`, `{"degen": p}` or `{"nodes": [[addr, p], ...]}`
//! with node addresses in lexicographic order; addresses are strings in the text syntax.

use serde_json::{json, Map, Value as Json};

use super::parse::{parse_address, serialize_address, serialize_ocmt};
use super::script::Value;
use super::{Pos, TextError};
use crate::address::Address;
use crate::complex::{check_identities, Complex};
use crate::named::Sequent;
use crate::nset::Ocmt;
use crate::preopetope::Preopetope;
use crate::unnamed::UnnamedSequent;

pub fn address_from_json(j: &Json) -> Result<Address, TextError> {
    match j {
        Json::String(s) => parse_address(s),
        _ => Err(bad("an address must be a string")),
    }
}

fn bad(msg: &str) -> TextError {
    TextError::parse(Pos { line: 1, col: 1 }, msg)
}

pub fn preopetope_to_json(p: &Preopetope) -> Json {
    match p {
        Preopetope::Point => json!("point"),
        Preopetope::Degen(q) => json!({ "degen": preopetope_to_json(q) }),
        Preopetope::Nodes { map, .. } => {
            let mut entries: Vec<(&Address, &Preopetope)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.lex_compare(b.0).unwrap_or_else(|_| a.0.cmp(b.0)));
            let nodes: Vec<Json> =
                entries.into_iter().map(|(a, q)| json!([serialize_address(a), preopetope_to_json(q)])).collect();
            json!({ "nodes": nodes })
        }
    }
}

pub fn preopetope_from_json(j: &Json) -> Result<Preopetope, TextError> {
    match j {
        Json::String(s) if s == "point" => Ok(Preopetope::Point),
        Json::Object(o) if o.len() == 1 && o.contains_key("degen") => Ok(Preopetope::degen(preopetope_from_json(&o["degen"])?)),
        Json::Object(o) if o.len() == 1 && o.contains_key("nodes") => {
            let Json::Array(items) = &o["nodes"] else { return Err(bad("`nodes` must be an array")) };
            let mut map = std::collections::BTreeMap::new();
            for item in items {
                let Some([a, q]) = item.as_array().map(Vec::as_slice) else {
                    return Err(bad("a node must be a pair [address, preopetope]"));
                };
                let a = address_from_json(a)?;
                if map.insert(a.clone(), preopetope_from_json(q)?).is_some() {
                    return Err(bad(&format!("duplicate node {a}")));
                }
            }
            Preopetope::from_map(map).map_err(|e| TextError::rule(Pos { line: 1, col: 1 }, e.to_string()))
        }
        _ => Err(bad("expected \"point\", {\"degen\": ...} or {\"nodes\": [...]}")),
    }
}

pub fn unnamed_to_json(s: &UnnamedSequent) -> Json {
    let ctx: Vec<Json> = s.ctx.iter().map(|(l, n)| json!([serialize_address(l), serialize_address(n)])).collect();
    json!({
        "context": ctx,
        "source": preopetope_to_json(&s.src),
        "target": s.tgt.as_ref().map_or(Json::Null, preopetope_to_json),
    })
}

pub fn sequent_to_json(s: &Sequent) -> Json {
    let ctx: Map<String, Json> = s.ctx.iter().map(|(v, t)| (v.to_string(), json!(t.to_string()))).collect();
    let classes: Vec<Vec<String>> =
        s.theory.classes().into_iter().map(|c| c.iter().map(|v| v.to_string()).collect()).collect();
    json!({
        "theory": classes,
        "context": ctx,
        "term": s.term.to_string(),
        "type": s.ty.to_string(),
    })
}

pub fn ocmt_to_json(o: &Ocmt) -> Json {
    let ctx: Map<String, Json> = o.ctx.iter().map(|(v, t)| (v.to_string(), json!(t.to_string()))).collect();
    let classes: Vec<Vec<String>> =
        o.theory.classes().into_iter().map(|c| c.iter().map(|v| v.to_string()).collect()).collect();
    json!({ "theory": classes, "context": ctx, "text": serialize_ocmt(o) })
}

/// Cells with faces as indices, plus the identity-check report.
pub fn complex_to_json(c: &Complex) -> Json {
    let cells: Vec<Json> = c
        .cells
        .iter()
        .map(|cell| {
            let sources: Vec<Json> = cell.sources.iter().map(|(a, i)| json!([serialize_address(a), i])).collect();
            json!({
                "names": cell.names,
                "dim": cell.dim,
                "shape": preopetope_to_json(&cell.shape),
                "sources": sources,
                "target": cell.target,
            })
        })
        .collect();
    let report = match check_identities(c) {
        Ok(()) => json!({ "ok": true }),
        Err(e) => json!({ "ok": false, "error": e.to_string() }),
    };
    let counts: Map<String, Json> = c.count_by_dim().into_iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
    json!({ "cells": cells, "counts": counts, "identities": report })
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Preopetope(p) => json!({ "preopetope": preopetope_to_json(p) }),
        Value::Unnamed(s) => json!({ "unnamed": unnamed_to_json(s) }),
        Value::Named(s) => json!({ "named": sequent_to_json(s) }),
        Value::Set(o) => json!({ "ocmt": ocmt_to_json(o) }),
        Value::Context(c) => {
            let cells: Vec<Json> = c
                .cells
                .iter()
                .map(|cell| {
                    let srcs: Vec<Json> =
                        cell.srcs.iter().map(|(a, n)| json!([serialize_address(a), n])).collect();
                    json!({
                        "name": cell.name,
                        "shape": preopetope_to_json(&cell.shape),
                        "sources": srcs,
                        "target": cell.tgt,
                    })
                })
                .collect();
            json!({ "context": cells })
        }
    }
}
