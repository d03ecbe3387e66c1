//! Energy map files: an `[energy]` header and a first-match `[lambda]` row
//! list with `*` wildcards.

use crate::core::{PatternTok, RuleTable};
use crate::energy::EnergyMap;

use super::{fmt_offset, kv, lookup, parse_offset, sections, FormatError};

pub fn parse_energy(text: &str, rule: &RuleTable) -> Result<EnergyMap, FormatError> {
    let secs = sections(text);
    let head = secs
        .iter()
        .find(|(name, _)| name == "energy")
        .ok_or_else(|| FormatError::MissingKey("[energy]".into()))?;
    let pairs = kv(&head.1);
    let neighborhood = lookup(&pairs, "neighborhood")?
        .split_whitespace()
        .map(|tok| parse_offset(tok, 0))
        .collect::<Result<Vec<_>, _>>()?;
    let k: u32 =
        lookup(&pairs, "k")?.parse().map_err(|_| FormatError::Other("bad k".into()))?;
    let mut rows = Vec::new();
    if let Some((_, body)) = secs.iter().find(|(name, _)| name == "lambda") {
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
                        rule.state_of(tok)
                            .map(PatternTok::Literal)
                            .map_err(|_| FormatError::UnknownLabel(tok.to_string()))
                    }
                })
                .collect::<Result<Vec<_>, FormatError>>()?;
            let value: u32 = rhs
                .trim()
                .parse()
                .map_err(|_| FormatError::Syntax(*n, "bad energy value".into()))?;
            rows.push((pattern, value));
        }
    }
    Ok(EnergyMap::new(neighborhood, k, rows)?)
}

pub fn emit_energy(energy: &EnergyMap, rule: &RuleTable) -> String {
    let mut out = String::new();
    out.push_str("[energy]\n");
    let offs: Vec<String> = energy.neighborhood().iter().map(|c| fmt_offset(c)).collect();
    out.push_str(&format!("neighborhood = {}\n", offs.join(" ")));
    out.push_str(&format!("k = {}\n", energy.bound()));
    out.push_str("[lambda]\n");
    for (pattern, value) in energy.rows() {
        let lhs: Vec<String> = pattern
            .iter()
            .map(|p| match p {
                PatternTok::Any => "*".to_string(),
                PatternTok::Literal(s) => rule.label(*s),
            })
            .collect();
        out.push_str(&format!("{} -> {}\n", lhs.join(" "), value));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;

    #[test]
    fn counter_energy_roundtrips() {
        let f = fixture("f_iota(2)").unwrap();
        let e = f.energy.unwrap();
        let text = emit_energy(&e, &f.rule);
        let back = parse_energy(&text, &f.rule).unwrap();
        assert_eq!(back.bound(), e.bound());
        assert_eq!(back.neighborhood(), e.neighborhood());
        for a in 0..4u32 {
            for b in 0..4u32 {
                let w = [crate::core::State(a), crate::core::State(b)];
                assert_eq!(back.eval(&w), e.eval(&w));
            }
        }
    }
}
