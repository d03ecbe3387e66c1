//! Freezing verification and freezing-order inference.

use std::collections::BTreeSet;

use crate::core::{decode_window, Limits, RuleTable};

use super::{
    scan_windows, AnalysisError, CheckOutcome, StateOrder, Witness, WitnessKind,
};

/// Checks that every local transition weakly decreases the center state:
/// for all windows `p`, `f(p) ⪯ p(center)`. Exhaustive when the pattern
/// space fits the budget, sampled otherwise.
pub fn check_freezing(
    rule: &RuleTable,
    order: &StateOrder,
    limits: &Limits,
) -> Result<CheckOutcome, AnalysisError> {
    if order.state_count() != rule.state_count() {
        return Err(AnalysisError::OrderSizeMismatch {
            order: order.state_count(),
            rule: rule.state_count(),
        });
    }
    let center = rule.center_index();
    let outcome = scan_windows(rule.state_count(), rule.neighborhood().len(), limits, |w| {
        let out = rule.apply(w);
        if order.le(out, w[center]) {
            None
        } else {
            Some(Witness {
                kind: WitnessKind::FreezingViolation,
                window: rule.neighborhood().to_vec(),
                patterns: vec![w.to_vec()],
                detail: format!(
                    "f maps center `{}` to `{}`, which is not below it",
                    rule.label(w[center]),
                    rule.label(out)
                ),
            })
        }
    });
    Ok(outcome)
}

/// Builds the change relation `q -> f(p)` over all windows with center `q`
/// and `f(p) != q`, and returns a freezing order exactly when that relation
/// is acyclic. The full pattern space must fit the exhaustiveness budget;
/// beyond it the answer would be unreliable, so this errors out instead.
pub fn infer_order(rule: &RuleTable, limits: &Limits) -> Result<Option<StateOrder>, AnalysisError> {
    let q = rule.state_count();
    let len = rule.neighborhood().len();
    let total = q
        .checked_pow(len as u32)
        .filter(|&t| t <= limits.max_exhaustive)
        .ok_or(crate::core::CoreError::PatternSpaceExceeded(u64::MAX, limits.max_exhaustive))?;
    if q > 4096 {
        return Err(AnalysisError::OrderTooLarge(q));
    }
    let center = rule.center_index();
    let edge_lists = crate::parallel::map_collect(rayon_chunks(total), |chunk| {
        let mut edges = BTreeSet::new();
        let lo = chunk as u64 * CHUNK;
        let hi = (lo + CHUNK).min(total);
        for i in lo..hi {
            let w = decode_window(i, q, len);
            let out = rule.apply(&w);
            if out != w[center] {
                edges.insert((w[center], out));
            }
        }
        edges
    });
    let mut edges: BTreeSet<(crate::core::State, crate::core::State)> = BTreeSet::new();
    for list in edge_lists {
        edges.extend(list);
    }
    // covers: (higher, lower) = (old, new)
    let covers: Vec<_> = edges.into_iter().collect();
    match StateOrder::from_covers(q as usize, &covers) {
        Ok(order) => Ok(Some(order)),
        Err(AnalysisError::OrderCycle(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

const CHUNK: u64 = 4096;

fn rayon_chunks(total: u64) -> usize {
    total.div_ceil(CHUNK) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{fixture, PatternTok, RuleTable, State, Transition};

    #[test]
    fn identity_rule_is_freezing_for_any_order() {
        let rule = RuleTable::new(
            "id",
            1,
            vec!["a".into(), "b".into()],
            "a",
            vec![vec![0]],
            vec![],
        )
        .unwrap();
        let order = StateOrder::antichain(2);
        let out = check_freezing(&rule, &order, &Limits::default()).unwrap();
        assert!(out.is_ok());
        assert!(out.mode().is_exhaustive());
    }

    #[test]
    fn inferred_order_for_arrows() {
        let f = fixture("f_arrows").unwrap();
        let order = infer_order(&f.rule, &Limits::default()).unwrap().unwrap();
        let (q0, qd, ql, qld) = (State(0), State(1), State(2), State(3));
        assert!(order.lt(qd, q0));
        assert!(order.lt(ql, q0));
        assert!(order.lt(qld, qd));
        // the left signal never changes, so the inferred relation keeps it
        // incomparable to the merged state; the shipped fixture order adds
        // that cover on top
        assert!(!order.lt(ql, qld));
        // and it certifies the rule
        let out = check_freezing(&f.rule, &order, &Limits::default()).unwrap();
        assert!(out.is_ok() && out.mode().is_exhaustive());
    }

    #[test]
    fn xor_rule_has_no_order() {
        let rule = RuleTable::new(
            "xor",
            1,
            vec!["0".into(), "1".into()],
            "0",
            vec![vec![0], vec![1]],
            vec![
                Transition {
                    pattern: vec![PatternTok::Literal(State(0)), PatternTok::Literal(State(1))],
                    output: State(1),
                },
                Transition {
                    pattern: vec![PatternTok::Literal(State(1)), PatternTok::Literal(State(1))],
                    output: State(0),
                },
            ],
        )
        .unwrap();
        assert!(infer_order(&rule, &Limits::default()).unwrap().is_none());
    }

    #[test]
    fn one_state_rule_trivial_order() {
        let rule = RuleTable::new("one", 1, vec!["x".into()], "x", vec![vec![0]], vec![]).unwrap();
        let order = infer_order(&rule, &Limits::default()).unwrap().unwrap();
        assert_eq!(order.depth(), 0);
    }

    #[test]
    fn violation_witness_replays() {
        // A rule that raises 0 to 1 next to a 1: not freezing for the chain.
        let rule = RuleTable::new(
            "grow",
            1,
            vec!["0".into(), "1".into()],
            "0",
            vec![vec![0], vec![1]],
            vec![Transition {
                pattern: vec![PatternTok::Literal(State(0)), PatternTok::Literal(State(1))],
                output: State(1),
            }],
        )
        .unwrap();
        let order = StateOrder::chain(2);
        let out = check_freezing(&rule, &order, &Limits::default()).unwrap();
        let w = out.witness().expect("violation expected");
        let replay = rule.apply(&w.patterns[0]);
        assert!(!order.le(replay, w.patterns[0][rule.center_index()]));
    }
}
