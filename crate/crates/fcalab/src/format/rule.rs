//! Rule files: a `[rule]` header, an ordered `[transitions]` list with `*`
//! wildcards, and optionally an embedded freezing order as cover pairs.
//! Product rules produced by the von Neumann reduction are stored as a
//! `[vn-reduction]` header followed by the base rule, and rebuilt
//! deterministically on parse.

use crate::analysis::StateOrder;
use crate::core::{Limits, LocalRule, PatternTok, RuleTable, State, Transition};
use crate::transform::reduce_to_vn;

use super::{fmt_offset, kv, lookup, parse_offset, sections, FormatError};

/// A parsed rule file: the rule plus its embedded order, if any.
#[derive(Debug, Clone)]
pub struct ParsedRule {
    pub rule: RuleTable,
    pub order: Option<StateOrder>,
}

pub fn parse_rule(text: &str) -> Result<ParsedRule, FormatError> {
    let secs = sections(text);
    if let Some(pos) = secs.iter().position(|(name, _)| name == "vn-reduction") {
        // order line applies to the base rule below
        let rest_sections = &secs[pos + 1..];
        let rest = rebuild(rest_sections);
        let base = parse_rule(&rest)?;
        let red = reduce_to_vn(&base.rule, base.order.as_ref(), &Limits::default())?;
        return Ok(ParsedRule { rule: red.rule, order: Some(red.order) });
    }
    let rule_sec = secs
        .iter()
        .find(|(name, _)| name == "rule")
        .ok_or_else(|| FormatError::MissingKey("[rule]".into()))?;
    let pairs = kv(&rule_sec.1);
    let name = lookup(&pairs, "name")?.to_string();
    let dim: usize = lookup(&pairs, "dim")?
        .parse()
        .map_err(|_| FormatError::Other("bad dim".into()))?;
    let labels: Vec<String> =
        lookup(&pairs, "states")?.split_whitespace().map(|s| s.to_string()).collect();
    let background = lookup(&pairs, "background")?.to_string();
    let neighborhood = lookup(&pairs, "neighborhood")?
        .split_whitespace()
        .map(|tok| parse_offset(tok, 0))
        .collect::<Result<Vec<_>, _>>()?;

    let state_of = |tok: &str| -> Result<State, FormatError> {
        labels
            .iter()
            .position(|l| l == tok)
            .map(|i| State(i as u32))
            .ok_or_else(|| FormatError::UnknownLabel(tok.to_string()))
    };

    let mut transitions = Vec::new();
    if let Some((_, body)) = secs.iter().find(|(name, _)| name == "transitions") {
        for (n, line) in body {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| FormatError::Syntax(*n, "expected `->`".into()))?;
            let pattern = lhs
                .split_whitespace()
                .map(|tok| {
                    if tok == "*" {
                        Ok(PatternTok::Any)
                    } else {
                        state_of(tok).map(PatternTok::Literal)
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            if pattern.len() != neighborhood.len() {
                return Err(FormatError::Syntax(
                    *n,
                    format!("{} pattern tokens for {} offsets", pattern.len(), neighborhood.len()),
                ));
            }
            let output = state_of(rhs.trim())?;
            transitions.push(Transition { pattern, output });
        }
    }
    let rule = RuleTable::new(name, dim, labels, &background, neighborhood, transitions)?;

    let order = match pairs.iter().find(|(_, k, _)| k == "order") {
        None => None,
        Some((n, _, spec)) => {
            let covers = spec
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|pair| {
                    let (hi, lo) = pair
                        .split_once('>')
                        .ok_or_else(|| FormatError::Syntax(*n, format!("bad cover `{pair}`")))?;
                    Ok((rule.state_of(hi.trim())?, rule.state_of(lo.trim())?))
                })
                .collect::<Result<Vec<_>, FormatError>>()?;
            Some(StateOrder::from_covers(rule.state_count() as usize, &covers)?)
        }
    };
    Ok(ParsedRule { rule, order })
}

fn rebuild(secs: &[(String, Vec<(usize, String)>)]) -> String {
    let mut out = String::new();
    for (name, body) in secs {
        out.push_str(&format!("[{name}]\n"));
        for (_, line) in body {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

pub fn emit_rule(rule: &RuleTable, order: Option<&StateOrder>) -> Result<String, FormatError> {
    let labels = rule
        .explicit_labels()
        .ok_or_else(|| FormatError::Other("rule has no materializable text form".into()))?;
    let transitions = match rule.local() {
        LocalRule::Table(t) => t,
        LocalRule::Computed(_) => {
            return Err(FormatError::Other("computed rules have no transition list".into()))
        }
    };
    let mut out = String::new();
    out.push_str("[rule]\n");
    out.push_str(&format!("name = {}\n", rule.name));
    out.push_str(&format!("dim = {}\n", rule.dim()));
    out.push_str(&format!("states = {}\n", labels.join(" ")));
    out.push_str(&format!("background = {}\n", rule.label(rule.background())));
    let offs: Vec<String> = rule.neighborhood().iter().map(|c| fmt_offset(c)).collect();
    out.push_str(&format!("neighborhood = {}\n", offs.join(" ")));
    if let Some(order) = order {
        if let Some(covers) = order.covers() {
            let pairs: Vec<String> = covers
                .iter()
                .map(|(hi, lo)| format!("{}>{}", rule.label(*hi), rule.label(*lo)))
                .collect();
            out.push_str(&format!("order = {}\n", pairs.join(", ")));
        }
    }
    out.push_str("[transitions]\n");
    for t in transitions {
        let lhs: Vec<String> = t
            .pattern
            .iter()
            .map(|p| match p {
                PatternTok::Any => "*".to_string(),
                PatternTok::Literal(s) => rule.label(*s),
            })
            .collect();
        out.push_str(&format!("{} -> {}\n", lhs.join(" "), rule.label(t.output)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;

    #[test]
    fn fixture_rules_roundtrip() {
        for name in ["f_arrows", "monotone_gadget", "f_min(2)", "bootstrap2", "f_iota(2)", "u5"] {
            let f = fixture(name).unwrap();
            let text = emit_rule(&f.rule, f.order.as_ref()).unwrap();
            let parsed = parse_rule(&text).unwrap();
            assert_eq!(parsed.rule.state_count(), f.rule.state_count(), "{name}");
            assert_eq!(parsed.rule.neighborhood(), f.rule.neighborhood(), "{name}");
            // identical local behavior over every small window
            let q = f.rule.state_count();
            let len = f.rule.neighborhood().len();
            let total = q.pow(len as u32).min(20_000);
            for i in 0..total {
                let w = crate::core::decode_window(i, q, len);
                assert_eq!(parsed.rule.apply(&w), f.rule.apply(&w));
            }
        }
    }

    #[test]
    fn unknown_labels_rejected() {
        let text = "[rule]\nname = x\ndim = 1\nstates = a b\nbackground = a\nneighborhood = (0)\n[transitions]\nc -> a\n";
        assert!(matches!(parse_rule(text), Err(FormatError::UnknownLabel(_))));
    }

    #[test]
    fn vn_reduced_rules_roundtrip() {
        let f = fixture("f_min(1)").unwrap();
        let red = reduce_to_vn(&f.rule, f.order.as_ref(), &Limits::default()).unwrap();
        let mut text = String::from("[vn-reduction]\n");
        text.push_str(&emit_rule(&f.rule, f.order.as_ref()).unwrap());
        let parsed = parse_rule(&text).unwrap();
        assert_eq!(parsed.rule.state_count(), red.rule.state_count());
        // same local function on a few windows
        for i in 0..200u64 {
            let w = crate::core::decode_window(
                i * 97 % red.rule.state_count().pow(3),
                red.rule.state_count(),
                red.rule.neighborhood().len(),
            );
            assert_eq!(parsed.rule.apply(&w), red.rule.apply(&w));
        }
    }
}
