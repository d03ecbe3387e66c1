//! Encoding files: the block vector, context offsets, slowdown, target
//! background and a coder — an explicit table, a reference to a compiled
//! layout, or an embedded base rule for reduction encodings.

use std::collections::BTreeMap;

use crate::core::{decode_window, Limits, RuleTable, State};
use crate::simcheck::{Coder, Encoding};

use super::rule::{emit_rule, parse_rule};
use super::{fmt_offset, kv, lookup, parse_offset, sections, FormatError};

/// How an encoding's coder is stored.
pub enum EncodingSpecKind<'a> {
    /// Materialize the coder as an explicit window table.
    Table,
    /// Reference to a compiled layout sidecar file.
    Compiled { layout_path: &'a str },
    /// The base rule of a von Neumann reduction; the encoding is rebuilt.
    VnReduction {
        base: &'a RuleTable,
        base_order: Option<&'a crate::analysis::StateOrder>,
    },
}

/// A parsed encoding: ready to use, or a reference the caller resolves.
pub enum ParsedEncoding {
    Ready(Encoding),
    CompiledReference { layout_path: String },
}

const TABLE_CAP: u64 = 200_000;

pub fn emit_encoding(
    enc: &Encoding,
    src: &RuleTable,
    tgt_label: impl Fn(State) -> String,
    kind: EncodingSpecKind<'_>,
) -> Result<String, FormatError> {
    let mut out = String::new();
    out.push_str("[encoding]\n");
    let blocks: Vec<String> = enc.block.iter().map(|b| b.to_string()).collect();
    out.push_str(&format!("block = {}\n", blocks.join(" ")));
    let ctx: Vec<String> = enc.context.iter().map(|c| fmt_offset(c)).collect();
    out.push_str(&format!("context = {}\n", ctx.join(" ")));
    out.push_str(&format!("slowdown = {}\n", enc.slowdown));
    out.push_str(&format!("target-background = {}\n", tgt_label(enc.target_background)));
    match kind {
        EncodingSpecKind::Table => {
            out.push_str("coder = table\n[coder]\n");
            let q = src.state_count();
            let total = q
                .checked_pow(enc.context.len() as u32)
                .filter(|&t| t <= TABLE_CAP)
                .ok_or_else(|| {
                    FormatError::Other("window space too large for a table coder".into())
                })?;
            for i in 0..total {
                let w = decode_window(i, q, enc.context.len());
                let block = enc
                    .encode_block(&w)
                    .map_err(|e| FormatError::Other(e.to_string()))?;
                let lhs: Vec<String> = w.iter().map(|&s| src.label(s)).collect();
                let rhs: Vec<String> = block.iter().map(|&s| tgt_label(s)).collect();
                out.push_str(&format!("{} -> {}\n", lhs.join(" "), rhs.join(" ")));
            }
        }
        EncodingSpecKind::Compiled { layout_path } => {
            out.push_str(&format!("coder = compiled\nlayout = {layout_path}\n"));
        }
        EncodingSpecKind::VnReduction { base, base_order } => {
            out.push_str("coder = vn-reduction\n");
            out.push_str(&emit_rule(base, base_order)?);
        }
    }
    Ok(out)
}

/// Parses an encoding file. `src` and `tgt` resolve state labels for table
/// coders; compiled references are returned for the caller to resolve.
pub fn parse_encoding(
    text: &str,
    src: &RuleTable,
    tgt: Option<&RuleTable>,
) -> Result<ParsedEncoding, FormatError> {
    let secs = sections(text);
    let head = secs
        .iter()
        .find(|(name, _)| name == "encoding")
        .ok_or_else(|| FormatError::MissingKey("[encoding]".into()))?;
    let pairs = kv(&head.1);
    let block: Vec<i64> = lookup(&pairs, "block")?
        .split_whitespace()
        .map(|v| v.parse::<i64>().map_err(|_| FormatError::Other("bad block".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let context = lookup(&pairs, "context")?
        .split_whitespace()
        .map(|tok| parse_offset(tok, 0))
        .collect::<Result<Vec<_>, _>>()?;
    let slowdown: u64 = lookup(&pairs, "slowdown")?
        .parse()
        .map_err(|_| FormatError::Other("bad slowdown".into()))?;
    let coder_kind = lookup(&pairs, "coder")?;
    match coder_kind {
        "compiled" => Ok(ParsedEncoding::CompiledReference {
            layout_path: lookup(&pairs, "layout")?.to_string(),
        }),
        "vn-reduction" => {
            let rest: Vec<(String, Vec<(usize, String)>)> = secs
                .iter()
                .filter(|(name, _)| name != "encoding")
                .cloned()
                .collect();
            let mut body = String::new();
            for (name, lines) in rest {
                body.push_str(&format!("[{name}]\n"));
                for (_, l) in lines {
                    body.push_str(&l);
                    body.push('\n');
                }
            }
            let base = parse_rule(&body)?;
            let red = crate::transform::reduce_to_vn(
                &base.rule,
                base.order.as_ref(),
                &Limits::default(),
            )?;
            Ok(ParsedEncoding::Ready(red.encoding))
        }
        "table" => {
            let tgt = tgt.ok_or_else(|| {
                FormatError::Other("table coder needs the target rule for labels".into())
            })?;
            let bg_label = lookup(&pairs, "target-background")?;
            let target_background = tgt
                .state_of(bg_label)
                .map_err(|_| FormatError::UnknownLabel(bg_label.to_string()))?;
            let body = secs
                .iter()
                .find(|(name, _)| name == "coder")
                .map(|(_, b)| b.clone())
                .unwrap_or_default();
            let mut table = BTreeMap::new();
            for (n, line) in &body {
                let (lhs, rhs) = line
                    .split_once("->")
                    .ok_or_else(|| FormatError::Syntax(*n, "expected `->`".into()))?;
                let w = lhs
                    .split_whitespace()
                    .map(|tok| {
                        src.state_of(tok).map_err(|_| FormatError::UnknownLabel(tok.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let b = rhs
                    .split_whitespace()
                    .map(|tok| {
                        tgt.state_of(tok).map_err(|_| FormatError::UnknownLabel(tok.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                table.insert(w, b);
            }
            Ok(ParsedEncoding::Ready(Encoding::new(
                block,
                context,
                slowdown,
                Coder::Table(table),
                target_background,
            )))
        }
        other => Err(FormatError::Other(format!("unknown coder kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;
    use crate::transform::to_unary;

    #[test]
    fn recoding_encoding_roundtrips_as_table() {
        let f = fixture("f_min(2)").unwrap();
        let (unary, recode) = to_unary(&f.rule, f.order.as_ref().unwrap()).unwrap();
        let enc = recode.as_encoding(1, recode.forward(f.rule.background()));
        let text = emit_encoding(&enc, &f.rule, |s| unary.label(s), EncodingSpecKind::Table)
            .unwrap();
        let parsed = parse_encoding(&text, &f.rule, Some(&unary)).unwrap();
        let enc2 = match parsed {
            ParsedEncoding::Ready(e) => e,
            _ => panic!("expected a ready encoding"),
        };
        assert_eq!(enc2.block, enc.block);
        assert_eq!(enc2.slowdown, enc.slowdown);
        for s in 0..f.rule.state_count() as u32 {
            assert_eq!(
                enc2.encode_block(&[State(s)]).unwrap(),
                enc.encode_block(&[State(s)]).unwrap()
            );
        }
    }
}
