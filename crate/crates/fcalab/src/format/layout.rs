//! Compiled-target files: a human-readable wire grid plus a sidecar that
//! round-trips the whole target (tile cells, readout, timing, source rule).

use crate::core::Configuration;
use crate::universal::{CellSpec, CompiledTarget, GateKind, NetValue, TileTemplate, U5};

use super::rule::{emit_rule, parse_rule};
use super::{fmt_offset, kv, lookup, parse_offset, sections, FormatError};

/// The template skeleton as a wire-alphabet grid (unfired bits everywhere),
/// in the configuration text format.
pub fn emit_layout_grid(target: &CompiledTarget) -> String {
    let (tw, th) = target.tile.size;
    let mut out = String::new();
    out.push_str(&format!("dim = 2\nbox = 0..{} 0..{}\nbackground = B\n", tw - 1, th - 1));
    let mut grid = vec![vec!["B"; tw as usize]; th as usize];
    for &((x, y), spec) in &target.tile.cells {
        let v = match spec {
            CellSpec::Wire(NetValue::ConstFired) => "F",
            CellSpec::Wire(_) => "W",
            CellSpec::Cross { .. } => "W",
            CellSpec::Gate { .. } => "B",
            CellSpec::Tag(t) => t.label(),
        };
        grid[y as usize][x as usize] = v;
    }
    for row in &grid {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn net_str(n: NetValue) -> String {
    match n {
        NetValue::Bit { owner, bit, leg } => format!("b{owner}.{bit}.{leg}"),
        NetValue::Derived(i) => format!("d{i}"),
        NetValue::ConstFired => "cf".into(),
        NetValue::ConstUnfired => "cu".into(),
    }
}

fn parse_net(tok: &str) -> Result<NetValue, FormatError> {
    if tok == "cf" {
        return Ok(NetValue::ConstFired);
    }
    if tok == "cu" {
        return Ok(NetValue::ConstUnfired);
    }
    if let Some(rest) = tok.strip_prefix('d') {
        return rest
            .parse()
            .map(NetValue::Derived)
            .map_err(|_| FormatError::Other(format!("bad net `{tok}`")));
    }
    if let Some(rest) = tok.strip_prefix('b') {
        let parts: Vec<&str> = rest.split('.').collect();
        if parts.len() == 3 {
            let bad = || FormatError::Other(format!("bad net `{tok}`"));
            return Ok(NetValue::Bit {
                owner: parts[0].parse().map_err(|_| bad())?,
                bit: parts[1].parse().map_err(|_| bad())?,
                leg: parts[2].parse().map_err(|_| bad())?,
            });
        }
    }
    Err(FormatError::Other(format!("bad net `{tok}`")))
}

/// Sidecar: everything needed to rebuild the compiled target exactly.
pub fn emit_target(target: &CompiledTarget) -> Result<String, FormatError> {
    let mut out = String::new();
    out.push_str("[target]\n");
    out.push_str(&format!("block = {} {}\n", target.tile.size.0, target.tile.size.1));
    out.push_str(&format!("period = {}\n", target.tile.period));
    out.push_str(&format!("bits = {}\n", target.tile.bits));
    out.push_str(&format!("self-owner = {}\n", target.tile.self_owner));
    out.push_str(&format!("factor = {}\n", target.factor));
    let owners: Vec<String> = target.tile.owners.iter().map(|c| fmt_offset(c)).collect();
    out.push_str(&format!("owners = {}\n", owners.join(" ")));
    out.push_str("[readout]\n");
    for (j, cells) in target.tile.readout.iter().enumerate() {
        let pts: Vec<String> = cells.iter().map(|&(x, y)| format!("({x},{y})")).collect();
        out.push_str(&format!("{j} = {}\n", pts.join(" ")));
    }
    out.push_str("[cells]\n");
    for &((x, y), spec) in &target.tile.cells {
        let body = match spec {
            CellSpec::Wire(n) => format!("w {}", net_str(n)),
            CellSpec::Cross { h, v } => format!("x {} {}", net_str(h), net_str(v)),
            CellSpec::Gate { kind, row } => {
                let k = match kind {
                    GateKind::Alpha => "a",
                    GateKind::Exists => "e",
                    GateKind::Forall => "f",
                };
                format!("g {k} {row}")
            }
            CellSpec::Tag(t) => format!("t {}", t.label()),
        };
        out.push_str(&format!("{x},{y} {body}\n"));
    }
    out.push_str("[source-rule]\n");
    out.push_str(&emit_rule(&target.source, None)?);
    Ok(out)
}

pub fn parse_target(text: &str) -> Result<CompiledTarget, FormatError> {
    let secs = sections(text);
    let head = secs
        .iter()
        .find(|(n, _)| n == "target")
        .ok_or_else(|| FormatError::MissingKey("[target]".into()))?;
    let pairs = kv(&head.1);
    let block: Vec<i64> = lookup(&pairs, "block")?
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    let period: u64 =
        lookup(&pairs, "period")?.parse().map_err(|_| FormatError::Other("bad period".into()))?;
    let bits: usize =
        lookup(&pairs, "bits")?.parse().map_err(|_| FormatError::Other("bad bits".into()))?;
    let self_owner: usize = lookup(&pairs, "self-owner")?
        .parse()
        .map_err(|_| FormatError::Other("bad self-owner".into()))?;
    let factor: u32 =
        lookup(&pairs, "factor")?.parse().map_err(|_| FormatError::Other("bad factor".into()))?;
    let owners = lookup(&pairs, "owners")?
        .split_whitespace()
        .map(|tok| parse_offset(tok, 0))
        .collect::<Result<Vec<_>, _>>()?;

    let mut readout: Vec<Vec<(i64, i64)>> = Vec::new();
    if let Some((_, body)) = secs.iter().find(|(n, _)| n == "readout") {
        let rows = kv(body);
        for j in 0..rows.len() {
            let v = lookup(&rows, &j.to_string())?;
            let pts = v
                .split_whitespace()
                .map(|tok| parse_offset(tok, 0).map(|c| (c[0], c[1])))
                .collect::<Result<Vec<_>, _>>()?;
            readout.push(pts);
        }
    }

    let mut cells: Vec<((i64, i64), CellSpec)> = Vec::new();
    if let Some((_, body)) = secs.iter().find(|(n, _)| n == "cells") {
        for (n, line) in body {
            let mut toks = line.split_whitespace();
            let pos = toks.next().ok_or_else(|| FormatError::Syntax(*n, "empty cell".into()))?;
            let (xs, ys) = pos
                .split_once(',')
                .ok_or_else(|| FormatError::Syntax(*n, "bad cell position".into()))?;
            let p = (
                xs.parse::<i64>().map_err(|_| FormatError::Syntax(*n, "bad x".into()))?,
                ys.parse::<i64>().map_err(|_| FormatError::Syntax(*n, "bad y".into()))?,
            );
            let kind = toks.next().ok_or_else(|| FormatError::Syntax(*n, "missing kind".into()))?;
            let spec = match kind {
                "w" => CellSpec::Wire(parse_net(
                    toks.next().ok_or_else(|| FormatError::Syntax(*n, "missing net".into()))?,
                )?),
                "x" => {
                    let h = parse_net(
                        toks.next().ok_or_else(|| FormatError::Syntax(*n, "missing h".into()))?,
                    )?;
                    let v = parse_net(
                        toks.next().ok_or_else(|| FormatError::Syntax(*n, "missing v".into()))?,
                    )?;
                    CellSpec::Cross { h, v }
                }
                "g" => {
                    let k = match toks.next() {
                        Some("a") => GateKind::Alpha,
                        Some("e") => GateKind::Exists,
                        Some("f") => GateKind::Forall,
                        other => {
                            return Err(FormatError::Syntax(*n, format!("bad gate `{other:?}`")))
                        }
                    };
                    let row: u8 = toks
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| FormatError::Syntax(*n, "bad gate row".into()))?;
                    CellSpec::Gate { kind: k, row }
                }
                "t" => {
                    let t = match toks.next() {
                        Some("H") => U5::H,
                        Some("V") => U5::V,
                        other => {
                            return Err(FormatError::Syntax(*n, format!("bad tag `{other:?}`")))
                        }
                    };
                    CellSpec::Tag(t)
                }
                other => return Err(FormatError::Syntax(*n, format!("bad cell kind `{other}`"))),
            };
            cells.push((p, spec));
        }
    }

    // source rule: everything after [source-rule]
    let pos = secs
        .iter()
        .position(|(n, _)| n == "source-rule")
        .ok_or_else(|| FormatError::MissingKey("[source-rule]".into()))?;
    let mut body = String::new();
    for (name, lines) in &secs[pos + 1..] {
        body.push_str(&format!("[{name}]\n"));
        for (_, l) in lines {
            body.push_str(l);
            body.push('\n');
        }
    }
    let source = parse_rule(&body)?.rule;
    let plan = crate::universal::build_macrocell(&source)
        .map_err(|e| FormatError::Other(e.to_string()))?;
    Ok(CompiledTarget {
        source,
        plan,
        tile: TileTemplate {
            size: (block[0], block[1]),
            owners,
            self_owner,
            bits,
            cells,
            readout,
            period,
        },
        factor,
    })
}

/// Renders a wire configuration as ASCII art rows (north at the top).
pub fn render_wire_config(c: &Configuration) -> String {
    let bbox = c.bbox();
    let mut out = String::new();
    for y in (bbox.lo[1]..=bbox.hi[1]).rev() {
        for x in bbox.lo[0]..=bbox.hi[0] {
            let s = c.get(&[x, y]);
            out.push_str(U5::ALL[s.idx()].label());
        }
        out.push('\n');
    }
    out
}
