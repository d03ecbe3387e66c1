//! Energy constructions for freezing and nilpotent rules.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{check_freezing, StateOrder};
use crate::core::{
    decode_window, iterate, Configuration, Coord, GridBox, Limits, PatternTok, RuleTable, State,
};

use super::{EnergyError, EnergyMap};

/// Rank energy for a freezing rule: radius zero, `λ(q) = ι(q)` for a fixed
/// linearization of the order, `k = |Q| - 1`. The freezing check must pass
/// exhaustively, otherwise the construction is unsound and is refused.
pub fn energy_from_order(
    rule: &RuleTable,
    order: &StateOrder,
    limits: &Limits,
) -> Result<EnergyMap, EnergyError> {
    let outcome = check_freezing(rule, order, limits)?;
    match &outcome {
        crate::analysis::CheckOutcome::Ok { mode } if mode.is_exhaustive() => {}
        crate::analysis::CheckOutcome::Ok { .. } => {
            return Err(EnergyError::Precondition(
                "freezing check was only sampled; raise the budget for the rank energy".into(),
            ));
        }
        crate::analysis::CheckOutcome::Violation { witness, .. } => {
            return Err(EnergyError::Precondition(format!(
                "rule is not freezing for the order: {}",
                witness.detail
            )));
        }
    }
    let ranks = order
        .ranks()
        .ok_or_else(|| EnergyError::Precondition("order has no materializable linearization".into()))?;
    let k = (rule.state_count() - 1) as u32;
    let rows = (0..rule.state_count())
        .map(|s| (vec![PatternTok::Literal(State(s as u32))], ranks[s as usize]))
        .collect();
    EnergyMap::new(vec![vec![0; rule.dim()]], k, rows)
}

/// Energy for an (asserted) nilpotent rule with `F^n` constant: `λ` counts
/// the future changes of the origin along the local orbit of the window,
/// `k = n`. The assertion is sanity-checked on the uniform dynamics and on
/// sampled finite configurations before anything is built.
pub fn energy_from_nilpotent(
    rule: &RuleTable,
    n: u32,
    limits: &Limits,
) -> Result<EnergyMap, EnergyError> {
    if n == 0 {
        return Err(EnergyError::Precondition("nilpotency index must be positive".into()));
    }
    // Uniform configurations evolve uniformly; all must collapse onto the
    // background within n steps (the background is the only possible
    // constant image, being quiescent).
    let arity = rule.neighborhood().len();
    for q in 0..rule.state_count() {
        let mut x = State(q as u32);
        for _ in 0..n {
            x = rule.apply(&vec![x; arity]);
        }
        if x != rule.background() {
            return Err(EnergyError::NotNilpotent(format!(
                "uniform configuration of `{}` reaches `{}` after {n} steps, not the background",
                rule.label(State(q as u32)),
                rule.label(x)
            )));
        }
    }
    // Sampled finite-support configurations must die out too.
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    for _ in 0..24 {
        let extent = rng.gen_range(2..5i64);
        let bbox = GridBox::new(vec![0; rule.dim()], vec![extent - 1; rule.dim()]);
        let cells: Vec<State> = (0..bbox.cell_count())
            .map(|_| State(rng.gen_range(0..rule.state_count()) as u32))
            .collect();
        let c = Configuration::from_cells(bbox, rule.background(), cells);
        let end = iterate(rule, &c, u64::from(n))?;
        if !end.is_uniform_background() {
            return Err(EnergyError::NotNilpotent(format!(
                "a sampled configuration survives {n} steps"
            )));
        }
    }

    // Window: n-fold Minkowski sum of the neighborhood.
    let mut window: Vec<Coord> = vec![vec![0; rule.dim()]];
    for _ in 0..n {
        window = crate::core::minkowski_sum(&window, rule.neighborhood());
    }
    let q = rule.state_count();
    let patterns = q
        .checked_pow(window.len() as u32)
        .filter(|&p| p <= limits.max_table_patterns)
        .ok_or(crate::core::CoreError::PatternSpaceExceeded(u64::MAX, limits.max_table_patterns))?;

    let index_of: HashMap<Coord, usize> =
        window.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut rows = Vec::with_capacity(patterns as usize);
    for i in 0..patterns {
        let w = decode_window(i, q, window.len());
        let changes = origin_changes(rule, &window, &index_of, &w, n);
        rows.push((w.iter().map(|&s| PatternTok::Literal(s)).collect(), changes));
    }
    EnergyMap::new(window, n, rows)
}

/// Number of times the origin changes along `n` exact steps of the local
/// orbit determined by a window valuation.
fn origin_changes(
    rule: &RuleTable,
    window: &[Coord],
    index_of: &HashMap<Coord, usize>,
    values: &[State],
    n: u32,
) -> u32 {
    let mut level: HashMap<Coord, State> =
        window.iter().cloned().zip(values.iter().copied()).collect();
    let _ = index_of;
    let origin = vec![0i64; rule.dim()];
    let mut changes = 0u32;
    for _ in 0..n {
        let mut next: HashMap<Coord, State> = HashMap::new();
        for z in level.keys() {
            let mut w = Vec::with_capacity(rule.neighborhood().len());
            let mut ok = true;
            for nb in rule.neighborhood() {
                let y: Coord = z.iter().zip(nb).map(|(a, b)| a + b).collect();
                match level.get(&y) {
                    Some(&s) => w.push(s),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                next.insert(z.clone(), rule.apply(&w));
            }
        }
        let before = level[&origin];
        let after = next[&origin];
        if after != before {
            changes += 1;
        }
        level = next;
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{fixture, Transition};
    use crate::energy::verify_energy;

    #[test]
    fn one_state_rule_rank_energy() {
        let rule = RuleTable::new("one", 1, vec!["x".into()], "x", vec![vec![0]], vec![]).unwrap();
        let order = StateOrder::antichain(1);
        let e = energy_from_order(&rule, &order, &Limits::default()).unwrap();
        assert_eq!(e.bound(), 0);
        assert_eq!(e.eval(&[State(0)]), Some(0));
    }

    #[test]
    fn arrows_rank_energy_verifies() {
        let f = fixture("f_arrows").unwrap();
        let order = f.order.unwrap();
        let e = energy_from_order(&f.rule, &order, &Limits::default()).unwrap();
        let zero = f.rule.state_of("0").unwrap();
        let both = f.rule.state_of("←↓").unwrap();
        assert_eq!(e.eval(&[zero]), Some(3));
        assert_eq!(e.eval(&[both]), Some(0));
        let out = verify_energy(&f.rule, &e, &Limits::default()).unwrap();
        assert!(out.is_ok() && out.mode().is_exhaustive());
    }

    #[test]
    fn constant_rule_change_count_energy() {
        // f ≡ background: nilpotent with n = 1.
        let rule = RuleTable::new(
            "const0",
            1,
            vec!["0".into(), "1".into()],
            "0",
            vec![vec![0]],
            vec![Transition { pattern: vec![PatternTok::Literal(State(1))], output: State(0) }],
        )
        .unwrap();
        let e = energy_from_nilpotent(&rule, 1, &Limits::default()).unwrap();
        assert_eq!(e.eval(&[State(1)]), Some(1));
        assert_eq!(e.eval(&[State(0)]), Some(0));
        let out = verify_energy(&rule, &e, &Limits::default()).unwrap();
        assert!(out.is_ok());
    }

    #[test]
    fn min_rule_is_not_nilpotent() {
        let f = fixture("f_min(2)").unwrap();
        let err = energy_from_nilpotent(&f.rule, 4, &Limits::default());
        assert!(matches!(err, Err(EnergyError::NotNilpotent(_))));
    }
}
