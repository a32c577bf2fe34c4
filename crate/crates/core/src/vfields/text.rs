//! Three-line text format: `dx: <series>`, `dy1: <series>`, `dy2: <series>`.
//!
//! Blank lines and lines starting with `#` are ignored.

use super::VectorField;
use crate::series::text::parse_series_at;
use crate::series::{ParseError, TruncatedSeries};

pub fn parse_field_text(text: &str, order: u32) -> Result<VectorField, ParseError> {
    let mut comps: [Option<TruncatedSeries>; 3] = [None, None, None];
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - trimmed.len();
        let err = |column: usize, message: String| ParseError { line, column, message };
        let Some((label, body)) = trimmed.split_once(':') else {
            return Err(err(indent + 1, "expected 'dx:', 'dy1:' or 'dy2:'".into()));
        };
        let slot = match label.trim() {
            "dx" => 0,
            "dy1" => 1,
            "dy2" => 2,
            other => return Err(err(indent + 1, format!("unknown component '{other}'"))),
        };
        if comps[slot].is_some() {
            return Err(err(indent + 1, format!("component '{}' given twice", label.trim())));
        }
        let column = indent + label.len() + 2;
        comps[slot] = Some(parse_series_at(body, order, line, column)?);
    }
    let names = ["dx", "dy1", "dy2"];
    let mut out = Vec::with_capacity(3);
    for (slot, c) in comps.into_iter().enumerate() {
        match c {
            Some(s) => out.push(s),
            None => {
                return Err(ParseError {
                    line: last_line,
                    column: 1,
                    message: format!("missing component '{}'", names[slot]),
                })
            }
        }
    }
    let [bx, b1, b2]: [TruncatedSeries; 3] = out.try_into().expect("three components");
    Ok(VectorField::new(bx, b1, b2))
}
