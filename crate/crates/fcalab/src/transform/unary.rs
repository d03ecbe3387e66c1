//! Unary representation: states become the words `1^i 0^(L-i)`, so state
//! decrease is monotone bit clearing.

use crate::analysis::StateOrder;
use crate::core::{LocalRule, PatternTok, RuleTable, Transition};

use super::{Recoding, TransformError};

/// Conjugates a freezing rule by the unary recoding `q ↦ 1^{ι(q)} 0^{L-ι(q)}`
/// for a fixed linearization `ι` of the order. State `i` of the result is
/// the word with `i` ones; the rule is freezing for the index chain, which
/// is coordinatewise `≤` on the words.
pub fn to_unary(rule: &RuleTable, order: &StateOrder) -> Result<(RuleTable, Recoding), TransformError> {
    let labels = rule.explicit_labels().ok_or(TransformError::ImplicitStates)?;
    if order.state_count() != rule.state_count() {
        return Err(crate::analysis::AnalysisError::OrderSizeMismatch {
            order: order.state_count(),
            rule: rule.state_count(),
        }
        .into());
    }
    let ranks = order.ranks().ok_or(TransformError::NoFreezingOrder)?;
    let l = labels.len();
    let recode = Recoding::new(ranks.iter().map(|&r| crate::core::State(r)).collect());

    let words: Vec<String> = (0..l)
        .map(|i| {
            let mut w = String::with_capacity(l);
            for b in 0..l {
                w.push(if b < i { '1' } else { '0' });
            }
            w
        })
        .collect();

    let transitions = match rule.local() {
        LocalRule::Table(ts) => ts
            .iter()
            .map(|t| Transition {
                pattern: t
                    .pattern
                    .iter()
                    .map(|p| match p {
                        PatternTok::Literal(s) => PatternTok::Literal(recode.forward(*s)),
                        PatternTok::Any => PatternTok::Any,
                    })
                    .collect(),
                output: recode.forward(t.output),
            })
            .collect(),
        LocalRule::Computed(_) => return Err(TransformError::ImplicitStates),
    };
    let background = words[recode.forward(rule.background()).idx()].clone();
    let unary = RuleTable::new(
        format!("{}_unary", rule.name),
        rule.dim(),
        words,
        &background,
        rule.neighborhood().to_vec(),
        transitions,
    )?;
    Ok((unary, recode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::check_freezing;
    use crate::core::{fixture, Limits, State};

    #[test]
    fn three_state_chain_words() {
        let f = fixture("f_min(1)").unwrap();
        let (u, recode) = to_unary(&f.rule, &f.order.unwrap()).unwrap();
        let labels = u.explicit_labels().unwrap();
        assert_eq!(labels, &["000".to_string(), "100".to_string(), "110".to_string()]);
        assert_eq!(recode.forward(State(0)), State(0));
        assert_eq!(recode.forward(State(2)), State(2));
    }

    #[test]
    fn unary_rule_is_chain_freezing() {
        let f = fixture("f_arrows").unwrap();
        let (u, _) = to_unary(&f.rule, &f.order.unwrap()).unwrap();
        let out = check_freezing(&u, &StateOrder::chain(u.state_count()), &Limits::default())
            .unwrap();
        assert!(out.is_ok() && out.mode().is_exhaustive());
    }

    #[test]
    fn order_compatibility_of_words() {
        // q ⪯ q' iff the words compare coordinatewise
        let f = fixture("f_arrows").unwrap();
        let order = f.order.unwrap();
        let (_, recode) = to_unary(&f.rule, &order).unwrap();
        let n = f.rule.state_count() as u32;
        for a in 0..n {
            for b in 0..n {
                let wa = recode.forward(State(a)).0;
                let wb = recode.forward(State(b)).0;
                if order.le(State(a), State(b)) {
                    assert!(wa <= wb, "rank order must extend the partial order");
                }
                if order.lt(State(a), State(b)) {
                    assert!(wa < wb);
                }
            }
        }
    }

    #[test]
    fn single_state_rule() {
        let rule = RuleTable::new("one", 1, vec!["x".into()], "x", vec![vec![0]], vec![]).unwrap();
        let (u, _) = to_unary(&rule, &StateOrder::antichain(1)).unwrap();
        assert_eq!(u.explicit_labels().unwrap(), &["0".to_string()]);
    }
}
