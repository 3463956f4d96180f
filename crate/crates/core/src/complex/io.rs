//! Filtration files: text lines `v0 v1 … vk ; value` and a JSON equivalent.
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! export followed by import reproduces the complex bit for bit.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{FilteredComplex, SimplexRecord};
use crate::error::{Error, Result};

/// One parsed line of a filtration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationRecord {
    pub vertices: Vec<u32>,
    pub value: f64,
    #[serde(skip)]
    pub line: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonFiltration {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dimension_cap: Option<usize>,
    #[serde(default)]
    truncated: bool,
    simplices: Vec<FiltrationRecord>,
}

/// Parses the text format; `#` starts a comment, blank lines are skipped.
pub fn parse_text_records(text: &str) -> Result<Vec<FiltrationRecord>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (verts, value) = content
            .split_once(';')
            .ok_or_else(|| Error::Parse { line, msg: "expected `v0 v1 … ; value`".into() })?;
        let vertices = verts
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|e| Error::Parse { line, msg: format!("vertex `{t}`: {e}") }))
            .collect::<Result<Vec<u32>>>()?;
        if vertices.is_empty() {
            return Err(Error::Parse { line, msg: "empty vertex list".into() });
        }
        let value = value
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse { line, msg: format!("value: {e}") })?;
        out.push(FiltrationRecord { vertices, value, line });
    }
    Ok(out)
}

fn to_complex(records: Vec<FiltrationRecord>, cap: Option<usize>, truncated: bool) -> Result<FilteredComplex> {
    if records.is_empty() {
        return Err(Error::InvalidInput("filtration file lists no simplices".into()));
    }
    FilteredComplex::new(records.into_iter().map(|r| (r.vertices, r.value)).collect(), cap, truncated)
}

/// Header directive marking a truncated skeleton: `#! truncated <cap>`.
fn truncation_directive(text: &str) -> Option<usize> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix("#! truncated"))
        .find_map(|rest| rest.trim().parse().ok())
}

pub fn import_text(text: &str) -> Result<FilteredComplex> {
    let cap = truncation_directive(text);
    to_complex(parse_text_records(text)?, cap, cap.is_some())
}

pub fn import_json(text: &str) -> Result<FilteredComplex> {
    let f: JsonFiltration = serde_json::from_str(text)?;
    to_complex(f.simplices, f.dimension_cap, f.truncated)
}

/// Dispatches on content: JSON objects go to [`import_json`], everything
/// else to [`import_text`].
pub fn import_filtration(text: &str) -> Result<FilteredComplex> {
    if text.trim_start().starts_with('{') {
        import_json(text)
    } else {
        import_text(text)
    }
}

pub fn export_text(cx: &FilteredComplex) -> String {
    let mut s = String::new();
    if cx.is_truncated() {
        let _ = writeln!(s, "#! truncated {}", cx.dimension_cap());
    }
    for r in cx.records() {
        let verts: Vec<String> = r.vertices.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{} ; {:?}", verts.join(" "), r.value);
    }
    s
}

pub fn export_json(cx: &FilteredComplex) -> String {
    let f = JsonFiltration {
        dimension_cap: Some(cx.dimension_cap()),
        truncated: cx.is_truncated(),
        simplices: cx
            .records()
            .iter()
            .map(|r: &SimplexRecord| FiltrationRecord { vertices: r.vertices.clone(), value: r.value, line: 0 })
            .collect(),
    };
    serde_json::to_string_pretty(&f).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_stage_file() {
        let cx = import_text("0 ; 0\n1 ; 0\n0 1 ; 1\n").unwrap();
        assert_eq!(cx.len(), 3);
        assert_eq!(cx.critical_values(), &[0.0, 1.0]);
    }

    #[test]
    fn missing_endpoint() {
        let err = import_text("0 ; 0\n0 1 ; 1\n").unwrap_err();
        assert!(err.to_string().contains("missing face"), "{err}");
    }

    #[test]
    fn parse_errors_carry_lines() {
        match parse_text_records("0 ; 0\n\n1 x ; 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn roundtrip_is_exact() {
        let awkward = [0.1 + 0.2, 1.0 / 3.0, 1e-300, 12345.678901234567];
        let mut text = String::from("0 ; 0\n1 ; 0\n2 ; 0\n");
        text += &format!("0 1 ; {:?}\n0 2 ; {:?}\n1 2 ; {:?}\n0 1 2 ; {:?}\n", awkward[0], awkward[1], awkward[2], awkward[3]);
        let cx = import_text(&text).unwrap();
        assert_eq!(import_text(&export_text(&cx)).unwrap(), cx);
        assert_eq!(import_json(&export_json(&cx)).unwrap(), cx);
    }
}
