//! The shipped rules: small automata used throughout the tests and the
//! compiler pipeline, each with its natural freezing order and, for the
//! up/down counter, its explicit local energy.

use crate::analysis::StateOrder;
use crate::energy::EnergyMap;

use super::geometry::von_neumann;
use super::rule::{CoreError, PatternTok, RuleTable, State, Transition};

/// A fixture: the rule plus whatever static companions it has.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub rule: RuleTable,
    pub order: Option<StateOrder>,
    pub energy: Option<EnergyMap>,
}

/// Canonical fixture names, parameterized ones shown with their argument.
pub fn fixture_names() -> &'static [&'static str] {
    &[
        "f_arrows",
        "monotone_gadget",
        "f_iota(k)",
        "f_min(M)",
        "f_descend(n)",
        "bootstrap2",
        "u5",
        "life3d2",
    ]
}

/// Builds a fixture by name; parameterized names take an integer argument,
/// as in `f_min(3)`.
pub fn fixture(name: &str) -> Result<Fixture, CoreError> {
    let (base, arg) = parse_name(name)?;
    match (base, arg) {
        ("f_arrows", None) => f_arrows(),
        ("monotone_gadget", None) => monotone_gadget(),
        ("f_iota", Some(k)) => f_iota(k),
        ("f_min", Some(m)) => f_min(m),
        ("f_descend", Some(n)) => f_descend(n),
        ("bootstrap2", None) => bootstrap2(),
        ("u5", None) => {
            let (rule, order) = crate::universal::u5_rule();
            Ok(Fixture { rule, order: Some(order), energy: None })
        }
        ("life3d2", None) => {
            let (rule, order) = crate::universal::life3d2_rule();
            Ok(Fixture { rule, order: Some(order), energy: None })
        }
        _ => Err(CoreError::UnknownFixture(name.to_string())),
    }
}

fn parse_name(name: &str) -> Result<(&str, Option<u32>), CoreError> {
    match name.find('(') {
        None => Ok((name, None)),
        Some(i) => {
            let base = &name[..i];
            let rest = &name[i + 1..];
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| CoreError::UnknownFixture(name.to_string()))?;
            let arg: u32 = inner
                .trim()
                .parse()
                .map_err(|_| CoreError::UnknownFixture(name.to_string()))?;
            Ok((base, Some(arg)))
        }
    }
}

fn lit(s: State) -> PatternTok {
    PatternTok::Literal(s)
}

const ANY: PatternTok = PatternTok::Any;

/// The 4-state arrow rule on the L-neighborhood (center, north, east):
/// a down signal falls, a left signal runs west, and they merge into a
/// combined state when they meet. 2-change.
fn f_arrows() -> Result<Fixture, CoreError> {
    let labels: Vec<String> = ["0", "↓", "←", "←↓"].iter().map(|s| s.to_string()).collect();
    let (q0, qd, ql, qld) = (State(0), State(1), State(2), State(3));
    let neighborhood = vec![vec![0, 0], vec![0, 1], vec![1, 0]];
    let transitions = vec![
        Transition { pattern: vec![lit(q0), lit(qd), lit(q0)], output: qd },
        Transition { pattern: vec![lit(q0), lit(q0), lit(ql)], output: ql },
        Transition { pattern: vec![lit(q0), ANY, lit(qld)], output: ql },
        Transition { pattern: vec![lit(qd), ANY, lit(ql)], output: qld },
    ];
    let rule = RuleTable::new("f_arrows", 2, labels, "0", neighborhood, transitions)?;
    let order = StateOrder::from_covers(4, &[(q0, qd), (q0, ql), (qd, qld), (ql, qld)])
        .map_err(|e| CoreError::Invalid(e.to_string()))?;
    Ok(Fixture { rule, order: Some(order), energy: None })
}

/// The 5-state wire gadget whose junction state emits a lower signal on
/// simultaneous arrival than on solo arrival, so no monotone rule can
/// simulate it.
fn monotone_gadget() -> Result<Fixture, CoreError> {
    let labels: Vec<String> = ["0", "s1", "s2", "w", "△"].iter().map(|s| s.to_string()).collect();
    let (q0, s1, s2, w, tri) = (State(0), State(1), State(2), State(3), State(4));
    let neighborhood = vec![vec![0, 0], vec![0, 1], vec![1, 0]];
    let transitions = vec![
        Transition { pattern: vec![lit(w), lit(s1), lit(q0)], output: s1 },
        Transition { pattern: vec![lit(w), lit(s2), lit(q0)], output: s2 },
        Transition { pattern: vec![lit(w), lit(q0), lit(s1)], output: s1 },
        Transition { pattern: vec![lit(w), lit(q0), lit(s2)], output: s2 },
        Transition { pattern: vec![lit(s1), lit(s2), lit(q0)], output: s2 },
        Transition { pattern: vec![lit(s1), lit(s2), lit(w)], output: s2 },
        Transition { pattern: vec![lit(tri), lit(s1), lit(s1)], output: s1 },
        Transition { pattern: vec![lit(tri), lit(s1), lit(w)], output: s2 },
    ];
    let rule = RuleTable::new("monotone_gadget", 2, labels, "0", neighborhood, transitions)?;
    let order = StateOrder::from_covers(5, &[(q0, s1), (w, s1), (tri, s1), (s1, s2)])
        .map_err(|e| CoreError::Invalid(e.to_string()))?;
    Ok(Fixture { rule, order: Some(order), energy: None })
}

/// The non-freezing counter over `{0..k} ∪ {ι}`: a cell increments (capped
/// at `k`) while an `ι` sits to its right and decrements (floored at 0)
/// otherwise; `ι` is absorbing. Ships with its explicit local energy.
fn f_iota(k: u32) -> Result<Fixture, CoreError> {
    let mut labels: Vec<String> = (0..=k).map(|v| v.to_string()).collect();
    labels.push("ι".to_string());
    let iota = State(k + 1);
    let neighborhood = vec![vec![0], vec![1]];
    let mut transitions = Vec::new();
    for a in 0..=k {
        let up = (a + 1).min(k);
        if up != a {
            transitions.push(Transition {
                pattern: vec![lit(State(a)), lit(iota)],
                output: State(up),
            });
        }
        let down = a.saturating_sub(1);
        if down != a {
            for b in 0..=k {
                transitions.push(Transition {
                    pattern: vec![lit(State(a)), lit(State(b))],
                    output: State(down),
                });
            }
        }
    }
    let rule = RuleTable::new(format!("f_iota({k})"), 1, labels, "0", neighborhood, transitions)?;
    let energy = EnergyMap::for_iota_counter(k);
    Ok(Fixture { rule, order: None, energy: Some(energy) })
}

/// The 1D minimum rule `F(c)_i = min(c_i, c_{i+1})` over `{0..M+1}`.
fn f_min(m: u32) -> Result<Fixture, CoreError> {
    let top = m + 1;
    let labels: Vec<String> = (0..=top).map(|v| v.to_string()).collect();
    let neighborhood = vec![vec![0], vec![1]];
    let mut transitions = Vec::new();
    for a in 0..=top {
        for b in 0..a {
            transitions.push(Transition {
                pattern: vec![lit(State(a)), lit(State(b))],
                output: State(b),
            });
        }
    }
    let rule = RuleTable::new(format!("f_min({m})"), 1, labels, "0", neighborhood, transitions)?;
    let covers: Vec<(State, State)> = (0..top).map(|v| (State(v + 1), State(v))).collect();
    let order = StateOrder::from_covers(top as usize + 1, &covers)
        .map_err(|e| CoreError::Invalid(e.to_string()))?;
    Ok(Fixture { rule, order: Some(order), energy: None })
}

/// The descending family: a cell drops to a lower state exactly when all
/// four von Neumann neighbors already sit at that state.
fn f_descend(n: u32) -> Result<Fixture, CoreError> {
    if n == 0 {
        return Err(CoreError::UnknownFixture(format!("f_descend({n})")));
    }
    let labels: Vec<String> = (1..=n).map(|v| format!("-{v}")).collect();
    let neighborhood = von_neumann(2);
    let mut transitions = Vec::new();
    for q in 0..n {
        for r in (q + 1)..n {
            transitions.push(Transition {
                pattern: vec![lit(State(q)), lit(State(r)), lit(State(r)), lit(State(r)), lit(State(r))],
                output: State(r),
            });
        }
    }
    let rule = RuleTable::new(format!("f_descend({n})"), 2, labels, "-1", neighborhood, transitions)?;
    let covers: Vec<(State, State)> = (0..n.saturating_sub(1)).map(|i| (State(i), State(i + 1))).collect();
    let order = StateOrder::from_covers(n as usize, &covers)
        .map_err(|e| CoreError::Invalid(e.to_string()))?;
    Ok(Fixture { rule, order: Some(order), energy: None })
}

/// Threshold-2 erosion on the symmetric von Neumann neighborhood: a live
/// cell dies once at least two of its four neighbors are dead. The classic
/// bootstrap-percolation complement, and monotone.
fn bootstrap2() -> Result<Fixture, CoreError> {
    let labels = vec!["0".to_string(), "1".to_string()];
    let neighborhood = von_neumann(2);
    let mut transitions = Vec::new();
    for mask in 0u32..16 {
        if mask.count_ones() >= 2 {
            let mut pattern = vec![lit(State(1))];
            for b in 0..4 {
                let dead = (mask >> b) & 1 == 1;
                pattern.push(lit(State(if dead { 0 } else { 1 })));
            }
            transitions.push(Transition { pattern, output: State(0) });
        }
    }
    let rule = RuleTable::new("bootstrap2", 2, labels, "0", neighborhood, transitions)?;
    let order = StateOrder::from_covers(2, &[(State(1), State(0))])
        .map_err(|e| CoreError::Invalid(e.to_string()))?;
    Ok(Fixture { rule, order: Some(order), energy: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{step, Configuration, GridBox};

    #[test]
    fn unknown_fixture_rejected() {
        assert!(fixture("nope").is_err());
        assert!(fixture("f_min").is_err());
        assert!(fixture("f_min(x)").is_err());
    }

    #[test]
    fn f_min_shape() {
        let f = fixture("f_min(3)").unwrap();
        assert_eq!(f.rule.state_count(), 5);
        assert_eq!(f.rule.neighborhood(), &[vec![0], vec![1]]);
    }

    #[test]
    fn f_arrows_down_signal_falls() {
        let f = fixture("f_arrows").unwrap();
        let rule = &f.rule;
        let down = rule.state_of("↓").unwrap();
        let mut c = Configuration::filled(GridBox::new(vec![0, 0], vec![0, 1]), State(0));
        c.set(&[0, 1], down);
        let out = step(rule, &c).unwrap();
        assert_eq!(out.get(&[0, 0]), down);
        assert_eq!(out.get(&[0, 1]), down);
    }

    #[test]
    fn f_iota_counts_and_caps() {
        let f = fixture("f_iota(2)").unwrap();
        let rule = &f.rule;
        let iota = rule.state_of("ι").unwrap();
        // increment next to ι, capped at k
        assert_eq!(rule.apply(&[State(0), iota]), State(1));
        assert_eq!(rule.apply(&[State(2), iota]), State(2));
        // decrement otherwise, floored at 0
        assert_eq!(rule.apply(&[State(2), State(1)]), State(1));
        assert_eq!(rule.apply(&[State(0), State(1)]), State(0));
        // ι absorbs
        assert_eq!(rule.apply(&[iota, State(0)]), iota);
        assert!(f.energy.is_some());
    }

    #[test]
    fn bootstrap2_threshold() {
        let f = fixture("bootstrap2").unwrap();
        let rule = &f.rule;
        assert_eq!(rule.apply(&[State(1), State(0), State(0), State(1), State(1)]), State(0));
        assert_eq!(rule.apply(&[State(1), State(0), State(1), State(1), State(1)]), State(1));
        assert_eq!(rule.apply(&[State(0), State(1), State(1), State(1), State(1)]), State(0));
    }

    #[test]
    fn descend_needs_unanimity() {
        let f = fixture("f_descend(3)").unwrap();
        let rule = &f.rule;
        let (m1, m2, m3) = (State(0), State(1), State(2));
        assert_eq!(rule.apply(&[m1, m3, m3, m3, m3]), m3);
        assert_eq!(rule.apply(&[m1, m3, m3, m2, m3]), m1);
        assert_eq!(rule.apply(&[m3, m1, m1, m1, m1]), m3);
    }
}
