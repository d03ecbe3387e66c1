//! Monotonicity of the local rule with respect to a freezing order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{decode_window, Limits, RuleTable, State};
use crate::parallel;

use super::{
    check_freezing, AnalysisError, CheckOutcome, ScanMode, StateOrder, Witness, WitnessKind,
};

/// Checks the local form of monotonicity: for all window pairs `p ⪯ p'`
/// pointwise, `f(p) ⪯ f(p')`. This implies the configuration-level
/// property. Exhaustive when `|Q|^(2|N|)` fits the budget, else sampled.
///
/// The rule must already be freezing for `order`.
pub fn check_monotone(
    rule: &RuleTable,
    order: &StateOrder,
    limits: &Limits,
) -> Result<CheckOutcome, AnalysisError> {
    match check_freezing(rule, order, limits)? {
        CheckOutcome::Ok { .. } => {}
        CheckOutcome::Violation { witness, .. } => {
            return Err(AnalysisError::NotFreezing(witness.detail));
        }
    }
    let q = rule.state_count();
    let len = rule.neighborhood().len();
    let make_witness = |lo: &[State], hi: &[State]| {
        let (a, b) = (rule.apply(lo), rule.apply(hi));
        if order.le(a, b) {
            None
        } else {
            Some(Witness {
                kind: WitnessKind::MonotonicityViolation,
                window: rule.neighborhood().to_vec(),
                patterns: vec![lo.to_vec(), hi.to_vec()],
                detail: format!(
                    "ordered windows map to `{}` and `{}`, which are not ordered",
                    rule.label(a),
                    rule.label(b)
                ),
            })
        }
    };
    let total_pairs = q.checked_pow(2 * len as u32);
    match total_pairs {
        Some(total) if total <= limits.max_exhaustive => {
            let found = parallel::find_first_map(total, |i| {
                let w = decode_window(i, q, 2 * len);
                let (lo, hi) = w.split_at(len);
                if !lo.iter().zip(hi).all(|(&a, &b)| order.le(a, b)) {
                    return None;
                }
                make_witness(lo, hi)
            });
            let mode = ScanMode::Exhaustive { patterns: total };
            Ok(match found {
                None => CheckOutcome::Ok { mode },
                Some(witness) => CheckOutcome::Violation { witness, mode },
            })
        }
        _ => {
            let samples = limits.scan_samples;
            let seed = limits.seed;
            // Sample a lower window, then bump each slot to something above it.
            let ups: Option<Vec<Vec<State>>> = if q <= 4096 {
                Some(
                    (0..q)
                        .map(|a| {
                            (0..q)
                                .filter(|&b| order.le(State(a as u32), State(b as u32)))
                                .map(|b| State(b as u32))
                                .collect()
                        })
                        .collect(),
                )
            } else {
                None
            };
            let found = parallel::find_first_map(samples, |i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0xD6E8_FEB8_6659_FD93));
                let lo: Vec<State> =
                    (0..len).map(|_| State(rng.gen_range(0..q) as u32)).collect();
                let hi: Vec<State> = lo
                    .iter()
                    .map(|&a| match &ups {
                        Some(u) => {
                            let choices = &u[a.idx()];
                            choices[rng.gen_range(0..choices.len())]
                        }
                        None => a,
                    })
                    .collect();
                make_witness(&lo, &hi)
            });
            let mode = ScanMode::Sampled { samples, seed };
            Ok(match found {
                None => CheckOutcome::Ok { mode },
                Some(witness) => CheckOutcome::Violation { witness, mode },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;

    #[test]
    fn bootstrap_erosion_is_monotone() {
        let f = fixture("bootstrap2").unwrap();
        let out = check_monotone(&f.rule, &f.order.unwrap(), &Limits::default()).unwrap();
        assert!(out.is_ok());
        assert!(out.mode().is_exhaustive());
    }

    #[test]
    fn gadget_is_not_monotone() {
        let f = fixture("monotone_gadget").unwrap();
        let order = f.order.unwrap();
        let out = check_monotone(&f.rule, &order, &Limits::default()).unwrap();
        let w = out.witness().expect("gadget must violate monotonicity");
        // the witness replays
        let (lo, hi) = (&w.patterns[0], &w.patterns[1]);
        assert!(lo.iter().zip(hi).all(|(&a, &b)| order.le(a, b)));
        assert!(!order.le(f.rule.apply(lo), f.rule.apply(hi)));
    }

    #[test]
    fn paper_pair_violates() {
        // (△, s1, s1) ⪯ (△, s1, w) map to s1 and s2, which are not ordered
        // upward.
        let f = fixture("monotone_gadget").unwrap();
        let rule = &f.rule;
        let order = f.order.unwrap();
        let tri = rule.state_of("△").unwrap();
        let s1 = rule.state_of("s1").unwrap();
        let s2 = rule.state_of("s2").unwrap();
        let w = rule.state_of("w").unwrap();
        let p = vec![tri, s1, s1];
        let p2 = vec![tri, s1, w];
        assert!(p.iter().zip(&p2).all(|(&a, &b)| order.le(a, b)));
        assert_eq!(rule.apply(&p), s1);
        assert_eq!(rule.apply(&p2), s2);
        assert!(!order.le(s1, s2));
    }

    #[test]
    fn identity_rule_is_monotone() {
        let rule = RuleTable::new("id", 1, vec!["a".into(), "b".into()], "a", vec![vec![0]], vec![])
            .unwrap();
        let out = check_monotone(&rule, &StateOrder::chain(2), &Limits::default()).unwrap();
        assert!(out.is_ok());
    }
}
