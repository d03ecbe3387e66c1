//! Verification of the two energy conditions over a finite window.

use crate::analysis::{scan_windows, CheckOutcome, Witness, WitnessKind};
use crate::core::{minkowski_sum, Coord, Limits, RuleTable, State};

use super::{EnergyError, EnergyMap};

/// The window needed to evaluate both energy conditions at the origin:
/// `N_e ∪ N_f ∪ (N_e ⊕ N_f)`.
pub(crate) fn energy_window(rule: &RuleTable, energy: &EnergyMap) -> Vec<Coord> {
    let mut w = energy.neighborhood().to_vec();
    w.extend(rule.neighborhood().iter().cloned());
    w.extend(minkowski_sum(energy.neighborhood(), rule.neighborhood()));
    w.sort();
    w.dedup();
    w
}

/// Checks `e(F(c))_0 <= e(c)_0`, strictly when the origin changes, over all
/// windows (budgeted). Locality makes an exhaustive pass a proof for every
/// configuration and cell.
pub fn verify_energy(
    rule: &RuleTable,
    energy: &EnergyMap,
    limits: &Limits,
) -> Result<CheckOutcome, EnergyError> {
    let window = energy_window(rule, energy);
    let index_of = |target: &Coord| window.iter().position(|c| c == target).expect("window closed");
    // Positions of the rule window around each energy offset, and around 0.
    let f_at: Vec<Vec<usize>> = energy
        .neighborhood()
        .iter()
        .map(|x| {
            rule.neighborhood()
                .iter()
                .map(|n| {
                    let y: Coord = x.iter().zip(n).map(|(a, b)| a + b).collect();
                    index_of(&y)
                })
                .collect()
        })
        .collect();
    let e_now: Vec<usize> = energy.neighborhood().iter().map(index_of).collect();
    let f_origin: Vec<usize> = rule.neighborhood().iter().map(|n| index_of(n)).collect();
    let origin = index_of(&vec![0; rule.dim()]);

    let outcome = scan_windows(rule.state_count(), window.len(), limits, |w| {
        let before = match energy.eval(&gather(w, &e_now)) {
            Some(v) => v,
            None => {
                return Some(violation(&window, w, "no energy row matches the current window"));
            }
        };
        let image: Vec<State> = f_at.iter().map(|idx| rule.apply(&gather(w, idx))).collect();
        let after = match energy.eval(&image) {
            Some(v) => v,
            None => {
                return Some(violation(&window, w, "no energy row matches the stepped window"));
            }
        };
        let changed = rule.apply(&gather(w, &f_origin)) != w[origin];
        if after > before {
            return Some(violation(
                &window,
                w,
                &format!("energy rises {before} -> {after} at the origin"),
            ));
        }
        if changed && after == before {
            return Some(violation(
                &window,
                w,
                &format!("origin changes but energy stays at {before}"),
            ));
        }
        None
    });
    Ok(outcome)
}

fn gather(w: &[State], idx: &[usize]) -> Vec<State> {
    idx.iter().map(|&i| w[i]).collect()
}

fn violation(window: &[Coord], w: &[State], detail: &str) -> Witness {
    Witness {
        kind: WitnessKind::EnergyViolation,
        window: window.to_vec(),
        patterns: vec![w.to_vec()],
        detail: detail.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{fixture, PatternTok, RuleTable};

    #[test]
    fn identity_rule_constant_energy() {
        let rule = RuleTable::new("id", 1, vec!["a".into(), "b".into()], "a", vec![vec![0]], vec![])
            .unwrap();
        let e = EnergyMap::new(vec![vec![0]], 0, vec![(vec![PatternTok::Any], 0)]).unwrap();
        let out = verify_energy(&rule, &e, &Limits::default()).unwrap();
        assert!(out.is_ok() && out.mode().is_exhaustive());
    }

    #[test]
    fn iota_counter_energy_verifies_exhaustively() {
        let f = fixture("f_iota(2)").unwrap();
        let e = f.energy.unwrap();
        let w = energy_window(&f.rule, &e);
        assert_eq!(w.len(), 3, "window is the three cells 0,1,2");
        let out = verify_energy(&f.rule, &e, &Limits::default()).unwrap();
        assert!(out.is_ok(), "{:?}", out.witness());
        assert!(out.mode().is_exhaustive());
    }

    #[test]
    fn constant_zero_energy_fails_strict_decrease() {
        let f = fixture("f_iota(2)").unwrap();
        let zero = EnergyMap::new(
            vec![vec![0], vec![1]],
            0,
            vec![(vec![PatternTok::Any, PatternTok::Any], 0)],
        )
        .unwrap();
        let out = verify_energy(&f.rule, &zero, &Limits::default()).unwrap();
        assert!(!out.is_ok());
    }
}
