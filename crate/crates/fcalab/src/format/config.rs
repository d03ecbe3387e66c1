//! Configuration files: a short header and row-major state labels, the
//! first axis varying fastest within a line.

use crate::core::{Configuration, GridBox, RuleTable, State};

use super::{kv, lookup, sections, FormatError};

pub fn parse_config(text: &str, rule: &RuleTable) -> Result<Configuration, FormatError> {
    let secs = sections(text);
    let body: Vec<(usize, String)> =
        secs.into_iter().flat_map(|(_, body)| body).collect();
    let header: Vec<(usize, String, String)> = kv(&body);
    let dim: usize = lookup(&header, "dim")?
        .parse()
        .map_err(|_| FormatError::Other("bad dim".into()))?;
    if dim != rule.dim() {
        return Err(FormatError::Other(format!(
            "configuration is {dim}-dimensional, rule is {}-dimensional",
            rule.dim()
        )));
    }
    let ranges: Vec<(i64, i64)> = lookup(&header, "box")?
        .split_whitespace()
        .map(|r| {
            let (lo, hi) = r
                .split_once("..")
                .ok_or_else(|| FormatError::Other(format!("bad range `{r}`")))?;
            Ok((
                lo.parse::<i64>().map_err(|_| FormatError::Other(format!("bad range `{r}`")))?,
                hi.parse::<i64>().map_err(|_| FormatError::Other(format!("bad range `{r}`")))?,
            ))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    if ranges.len() != dim {
        return Err(FormatError::Other("box ranges do not match dim".into()));
    }
    let background = rule
        .state_of(lookup(&header, "background")?)
        .map_err(|_| FormatError::UnknownLabel(lookup(&header, "background").unwrap().into()))?;
    let bbox = GridBox::new(
        ranges.iter().map(|r| r.0).collect(),
        ranges.iter().map(|r| r.1).collect(),
    );
    let mut cells: Vec<State> = Vec::with_capacity(bbox.cell_count());
    for (n, line) in &body {
        if line.contains('=') {
            continue;
        }
        for tok in line.split_whitespace() {
            let s = rule
                .state_of(tok)
                .map_err(|_| FormatError::Syntax(*n, format!("unknown label `{tok}`")))?;
            cells.push(s);
        }
    }
    if cells.len() != bbox.cell_count() {
        return Err(FormatError::Other(format!(
            "{} cells for a box of {}",
            cells.len(),
            bbox.cell_count()
        )));
    }
    Ok(Configuration::from_cells(bbox, background, cells))
}

pub fn emit_config(config: &Configuration, rule: &RuleTable) -> String {
    let bbox = config.bbox();
    let mut out = String::new();
    out.push_str(&format!("dim = {}\n", config.dim()));
    let ranges: Vec<String> =
        (0..config.dim()).map(|a| format!("{}..{}", bbox.lo[a], bbox.hi[a])).collect();
    out.push_str(&format!("box = {}\n", ranges.join(" ")));
    out.push_str(&format!("background = {}\n", rule.label(config.background())));
    let row = bbox.extent(0);
    for (i, &s) in config.cells().iter().enumerate() {
        out.push_str(&rule.label(s));
        if (i + 1) % row == 0 {
            out.push('\n');
        } else {
            out.push(' ');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;

    #[test]
    fn roundtrip_2d() {
        let f = fixture("f_arrows").unwrap();
        let mut c = Configuration::filled(GridBox::new(vec![-1, 0], vec![2, 2]), State(0));
        c.set(&[0, 1], State(1));
        c.set(&[2, 2], State(3));
        let text = emit_config(&c, &f.rule);
        let back = parse_config(&text, &f.rule).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.bbox(), c.bbox());
    }

    #[test]
    fn cell_count_mismatch_rejected() {
        let f = fixture("f_min(1)").unwrap();
        let text = "dim = 1\nbox = 0..2\nbackground = 0\n1 2\n";
        assert!(parse_config(text, &f.rule).is_err());
    }
}
