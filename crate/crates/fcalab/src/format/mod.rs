//! Text formats: rules, configurations, energies, encodings and compiled
//! layouts. All formats are line oriented and round-trip exactly.

mod config;
mod encoding;
mod energy;
mod layout;
mod rule;

pub use config::{emit_config, parse_config};
pub use encoding::{emit_encoding, parse_encoding, EncodingSpecKind, ParsedEncoding};
pub use energy::{emit_energy, parse_energy};
pub use layout::{emit_layout_grid, emit_target, parse_target, render_wire_config};
pub use rule::{emit_rule, parse_rule, ParsedRule};

use crate::core::Coord;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("unknown state label `{0}`")]
    UnknownLabel(String),
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error(transparent)]
    Core(#[from] crate::core::CoreError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error(transparent)]
    Energy(#[from] crate::energy::EnergyError),
    #[error(transparent)]
    Transform(#[from] crate::transform::TransformError),
    #[error("{0}")]
    Other(String),
}

pub(crate) fn parse_offset(tok: &str, line: usize) -> Result<Coord, FormatError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| FormatError::Syntax(line, format!("offset `{tok}` not parenthesized")))?;
    inner
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<i64>()
                .map_err(|_| FormatError::Syntax(line, format!("bad coordinate in `{tok}`")))
        })
        .collect()
}

pub(crate) fn fmt_offset(c: &[i64]) -> String {
    let body: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    format!("({})", body.join(","))
}

/// Splits a file into `[section]` blocks of `(line_number, line)` pairs.
pub(crate) fn sections(text: &str) -> Vec<(String, Vec<(usize, String)>)> {
    let mut out: Vec<(String, Vec<(usize, String)>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim().to_string();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            out.push((line[1..line.len() - 1].to_string(), Vec::new()));
        } else if let Some(last) = out.last_mut() {
            last.1.push((i + 1, line));
        } else {
            out.push((String::new(), vec![(i + 1, line)]));
        }
    }
    out
}

/// Parses `key = value` from a section body.
pub(crate) fn kv(body: &[(usize, String)]) -> Vec<(usize, String, String)> {
    body.iter()
        .filter_map(|(n, line)| {
            line.split_once('=')
                .map(|(k, v)| (*n, k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

pub(crate) fn lookup<'a>(
    pairs: &'a [(usize, String, String)],
    key: &str,
) -> Result<&'a str, FormatError> {
    pairs
        .iter()
        .find(|(_, k, _)| k == key)
        .map(|(_, _, v)| v.as_str())
        .ok_or_else(|| FormatError::MissingKey(key.to_string()))
}
