//! Macro-cell planning: one row per unary threshold, holding a matcher for
//! every neighborhood pattern that maps at or below that threshold.

use crate::analysis::{check_freezing, StateOrder};
use crate::core::{decode_window, Limits, RuleTable, State};

use super::UniversalError;

/// One matcher of a row: the neighborhood pattern it recognizes and its
/// bit-word over the concatenated unary neighbor states.
#[derive(Debug, Clone)]
pub struct MatcherPlan {
    /// The recognized neighborhood pattern, in neighborhood order.
    pub pattern: Vec<State>,
    /// `m * L` bits: bit `i*L + b` is bit `b` of the `i`-th neighbor word.
    pub word: Vec<bool>,
    /// Whether the layout materializes this matcher. Matchers whose center
    /// is already at or below the row threshold can never fire a fresh
    /// signal (their row is fired whenever they match), and the top
    /// threshold row is constantly fired; both stay plan-only.
    pub materialized: bool,
}

/// All matchers of one unary threshold.
#[derive(Debug, Clone)]
pub struct RowPlan {
    /// The threshold state (its index is its rank).
    pub threshold: State,
    pub matchers: Vec<MatcherPlan>,
}

/// The complete macro-cell plan for a unary rule.
#[derive(Debug, Clone)]
pub struct MacroCellPlan {
    pub rows: Vec<RowPlan>,
    /// Unary word length `L = |Q|`.
    pub bits: usize,
    /// Neighborhood arity `m`.
    pub arity: usize,
}

impl MacroCellPlan {
    pub fn materialized_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.matchers.iter().filter(|m| m.materialized).count())
            .sum()
    }
}

/// Checks that a rule's states are the unary words `1^i 0^(L-i)` in rank
/// order.
pub(crate) fn check_unary(rule: &RuleTable) -> Result<(), UniversalError> {
    let labels = rule.explicit_labels().ok_or(UniversalError::NotUnary)?;
    let l = labels.len();
    for (i, label) in labels.iter().enumerate() {
        let want: String =
            (0..l).map(|b| if b < i { '1' } else { '0' }).collect();
        if label != &want {
            return Err(UniversalError::NotUnary);
        }
    }
    Ok(())
}

/// Builds the macro-cell plan of a unary rule on a planar neighborhood
/// inside the symmetric von Neumann set. The rule must be freezing for the
/// rank chain, checked exhaustively.
pub fn build_macrocell(rule: &RuleTable) -> Result<MacroCellPlan, UniversalError> {
    if rule.dim() != 2 {
        return Err(UniversalError::NotPlanar(rule.dim()));
    }
    check_unary(rule)?;
    if rule
        .neighborhood()
        .iter()
        .any(|n| n.iter().map(|v| v.abs()).sum::<i64>() > 1)
    {
        return Err(UniversalError::NotVonNeumann);
    }
    let order = StateOrder::chain(rule.state_count());
    match check_freezing(rule, &order, &Limits::default())? {
        out if out.is_ok() && out.mode().is_exhaustive() => {}
        _ => return Err(UniversalError::NotFreezing),
    }

    let l = rule.state_count() as usize;
    let m = rule.neighborhood().len();
    let center = rule.center_index();
    let patterns = (l as u64).pow(m as u32);
    let mut rows: Vec<RowPlan> = (0..l)
        .map(|j| RowPlan { threshold: State(j as u32), matchers: Vec::new() })
        .collect();
    for i in 0..patterns {
        let w = decode_window(i, l as u64, m);
        let out = rule.apply(&w).idx();
        let center_rank = w[center].idx();
        for (j, row) in rows.iter_mut().enumerate().skip(out) {
            let word: Vec<bool> = w
                .iter()
                .flat_map(|&s| (0..l).map(move |b| b < s.idx()))
                .collect();
            let materialized = j < l - 1 && center_rank > j;
            row.matchers.push(MatcherPlan { pattern: w.clone(), word, materialized });
        }
    }
    Ok(MacroCellPlan { rows, bits: l, arity: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;
    use crate::transform::to_unary;

    #[test]
    fn arrow_plan_counts() {
        let f = fixture("f_arrows").unwrap();
        let (unary, _) = to_unary(&f.rule, f.order.as_ref().unwrap()).unwrap();
        let plan = build_macrocell(&unary).unwrap();
        assert_eq!(plan.bits, 4);
        assert_eq!(plan.rows.len(), 4);
        // the full preimage counts per threshold, unchanged patterns included
        let counts: Vec<usize> = plan.rows.iter().map(|r| r.matchers.len()).collect();
        assert_eq!(counts, vec![20, 33, 54, 64]);
        // materialized: patterns that newly fire a row
        let mats: Vec<usize> = plan
            .rows
            .iter()
            .map(|r| r.matchers.iter().filter(|m| m.materialized).count())
            .collect();
        assert_eq!(mats, vec![4, 1, 6, 0]);
    }

    #[test]
    fn erosion_plan_counts() {
        let f = fixture("bootstrap2").unwrap();
        let (unary, _) = to_unary(&f.rule, f.order.as_ref().unwrap()).unwrap();
        let plan = build_macrocell(&unary).unwrap();
        assert_eq!(plan.bits, 2);
        let counts: Vec<usize> = plan.rows.iter().map(|r| r.matchers.len()).collect();
        assert_eq!(counts, vec![27, 32]);
        assert_eq!(plan.materialized_count(), 11);
    }

    #[test]
    fn materialized_matchers_genuinely_fire() {
        let f = fixture("f_arrows").unwrap();
        let (unary, _) = to_unary(&f.rule, f.order.as_ref().unwrap()).unwrap();
        let plan = build_macrocell(&unary).unwrap();
        for row in &plan.rows {
            for m in &row.matchers {
                if m.materialized {
                    // every materialized matcher genuinely lowers its center
                    // past the row threshold
                    let out = unary.apply(&m.pattern);
                    assert!(out.idx() <= row.threshold.idx());
                    assert!(m.pattern[unary.center_index()].idx() > row.threshold.idx());
                }
            }
        }
    }
}
