//! The 5-state universal wire rule and the 2-state 3D rule.

use crate::analysis::StateOrder;
use crate::core::{von_neumann, PatternTok, RuleTable, State, Transition};

/// The five wire states. `B` is quiescent background, `W` an unfired fuse,
/// `F` fire, and `H`/`V` the intermediate crossing states recording that a
/// signal already passed horizontally (resp. vertically).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum U5 {
    B = 0,
    W = 1,
    F = 2,
    H = 3,
    V = 4,
}

impl U5 {
    pub const ALL: [U5; 5] = [U5::B, U5::W, U5::F, U5::H, U5::V];

    pub fn state(self) -> State {
        State(self as u32)
    }

    pub fn from_state(s: State) -> U5 {
        U5::ALL[s.idx()]
    }

    pub fn label(self) -> &'static str {
        match self {
            U5::B => "B",
            U5::W => "W",
            U5::F => "F",
            U5::H => "H",
            U5::V => "V",
        }
    }
}

fn wireish(s: U5) -> bool {
    matches!(s, U5::W | U5::F)
}

/// One local step of the wire rule. Window order: center, east, west,
/// north, south (the canonical symmetric von Neumann order on `+x, -x,
/// +y, -y`).
///
/// `alpha` enables the two one-shot gate transitions keyed by a background
/// south tag: the trigger (west fire with the east still waiting) and the
/// retrigger of a gate whose output wire already carries fire. Encoding
/// settles run with them disabled so rows cannot fire during encoding.
fn u5_next(c: U5, e: U5, w: U5, n: U5, s: U5, alpha: bool) -> U5 {
    let nbrs = [n, e, s, w];
    let all_wireish = nbrs.iter().all(|&x| wireish(x));
    let has_fire = nbrs.contains(&U5::F);
    match c {
        U5::W => {
            if nbrs.contains(&U5::B) {
                // normal wire: fire spreads; crossing exits and triggered
                // gates (V) also ignite adjacent wire
                if has_fire || e == U5::H || w == U5::H || n == U5::V || s == U5::V {
                    U5::F
                } else {
                    U5::W
                }
            } else if all_wireish {
                // crossing cell
                let horiz = e == U5::F || w == U5::F;
                let vert = n == U5::F || s == U5::F;
                match (horiz, vert) {
                    (true, true) => U5::F,
                    (true, false) => U5::H,
                    (false, true) => U5::V,
                    (false, false) => U5::W,
                }
            } else {
                U5::W
            }
        }
        U5::H => {
            if all_wireish && (n == U5::F || s == U5::F) {
                U5::F
            } else {
                U5::H
            }
        }
        U5::V => {
            if all_wireish && (e == U5::F || w == U5::F) {
                U5::F
            } else {
                U5::V
            }
        }
        U5::B => {
            if [n, e, w].iter().all(|&x| wireish(x)) {
                match s {
                    U5::B if alpha => {
                        if (w == U5::F && e == U5::W) || n == U5::F {
                            U5::V
                        } else {
                            U5::B
                        }
                    }
                    U5::H => {
                        if e == U5::F || w == U5::F {
                            U5::V
                        } else {
                            U5::B
                        }
                    }
                    U5::V => {
                        if e == U5::F && w == U5::F {
                            U5::V
                        } else {
                            U5::B
                        }
                    }
                    _ => U5::B,
                }
            } else {
                U5::B
            }
        }
        U5::F => U5::F,
    }
}

fn u5_table(alpha: bool) -> Vec<Transition> {
    let mut transitions = Vec::new();
    // window order [center, +x, -x, +y, -y] = [c, e, w, n, s]
    for idx in 0..5u32.pow(5) {
        let mut digits = [0u32; 5];
        let mut rest = idx;
        for d in digits.iter_mut() {
            *d = rest % 5;
            rest /= 5;
        }
        let [c, e, w, n, s] = digits.map(|d| U5::ALL[d as usize]);
        let out = u5_next(c, e, w, n, s, alpha);
        if out != c {
            transitions.push(Transition {
                pattern: digits.map(|d| PatternTok::Literal(State(d))).to_vec(),
                output: out.state(),
            });
        }
    }
    transitions
}

fn u5_build(name: &str, alpha: bool) -> RuleTable {
    let labels = U5::ALL.iter().map(|u| u.label().to_string()).collect();
    RuleTable::new(name, 2, labels, "B", von_neumann(2), u5_table(alpha))
        .expect("wire rule is well formed")
}

/// The 5-state universal rule with its freezing order
/// `{B, W} above {H, V} above {F}`.
pub fn u5_rule() -> (RuleTable, StateOrder) {
    let rule = u5_build("u5", true);
    let order = u5_order();
    (rule, order)
}

/// The wire rule with the gate transitions keyed by a background south tag
/// removed; used to settle encodings without firing any matcher.
pub fn u5_settle_rule() -> RuleTable {
    u5_build("u5_settle", false)
}

pub(crate) fn u5_order() -> StateOrder {
    let (b, w, f, h, v) =
        (U5::B.state(), U5::W.state(), U5::F.state(), U5::H.state(), U5::V.state());
    StateOrder::from_covers(5, &[(b, h), (b, v), (w, h), (w, v), (h, f), (v, f)])
        .expect("wire order is a DAG")
}

/// The 3D 2-state rule: a live cell dies exactly when two of its six
/// neighbors are dead; dead cells stay dead. 1-change for `0 ≺ 1`.
pub fn life3d2_rule() -> (RuleTable, StateOrder) {
    let mut transitions = Vec::new();
    for mask in 0u32..64 {
        if mask.count_ones() == 2 {
            let mut pattern = vec![PatternTok::Literal(State(1))];
            for b in 0..6 {
                let dead = (mask >> b) & 1 == 1;
                pattern.push(PatternTok::Literal(State(if dead { 0 } else { 1 })));
            }
            transitions.push(Transition { pattern, output: State(0) });
        }
    }
    let rule = RuleTable::new(
        "life3d2",
        3,
        vec!["0".into(), "1".into()],
        "0",
        von_neumann(3),
        transitions,
    )
    .expect("3d rule is well formed");
    let order = StateOrder::from_covers(2, &[(State(1), State(0))]).expect("chain");
    (rule, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_freezing, order_depth};
    use crate::core::Limits;

    fn s(u: U5) -> State {
        u.state()
    }

    #[test]
    fn wire_fires_next_to_signal() {
        // center W, north B, west F -> F
        let (rule, _) = u5_rule();
        assert_eq!(
            rule.apply(&[s(U5::W), s(U5::W), s(U5::F), s(U5::B), s(U5::B)]),
            s(U5::F)
        );
    }

    #[test]
    fn quiet_crossing_stays() {
        let (rule, _) = u5_rule();
        assert_eq!(
            rule.apply(&[s(U5::W), s(U5::W), s(U5::W), s(U5::W), s(U5::W)]),
            s(U5::W)
        );
    }

    #[test]
    fn alpha_triggers() {
        // center B, north W, east W, south B, west F -> V
        let (rule, _) = u5_rule();
        assert_eq!(
            rule.apply(&[s(U5::B), s(U5::W), s(U5::F), s(U5::W), s(U5::B)]),
            s(U5::V)
        );
    }

    #[test]
    fn crossing_records_first_passage() {
        let (rule, _) = u5_rule();
        // fire from the west only: W -> H
        assert_eq!(
            rule.apply(&[s(U5::W), s(U5::W), s(U5::F), s(U5::W), s(U5::W)]),
            s(U5::H)
        );
        // fire from the south only: W -> V
        assert_eq!(
            rule.apply(&[s(U5::W), s(U5::W), s(U5::W), s(U5::W), s(U5::F)]),
            s(U5::V)
        );
        // both at once
        assert_eq!(
            rule.apply(&[s(U5::W), s(U5::F), s(U5::W), s(U5::F), s(U5::W)]),
            s(U5::F)
        );
        // second signal unlocks the intermediate state
        assert_eq!(
            rule.apply(&[s(U5::H), s(U5::W), s(U5::W), s(U5::F), s(U5::W)]),
            s(U5::F)
        );
        assert_eq!(
            rule.apply(&[s(U5::V), s(U5::F), s(U5::W), s(U5::W), s(U5::W)]),
            s(U5::F)
        );
    }

    #[test]
    fn freezing_exhaustively_with_depth_two() {
        let (rule, order) = u5_rule();
        let out = check_freezing(&rule, &order, &Limits::default()).unwrap();
        assert!(out.is_ok());
        assert!(matches!(
            out.mode(),
            crate::analysis::ScanMode::Exhaustive { patterns: 3125 }
        ));
        assert_eq!(order_depth(&order), 2);
    }

    #[test]
    fn life3d2_rule_shape() {
        let (rule, order) = life3d2_rule();
        // a 1 with exactly two dead neighbors dies
        assert_eq!(
            rule.apply(&[State(1), State(0), State(0), State(1), State(1), State(1), State(1)]),
            State(0)
        );
        // zero dead neighbors: survives
        assert_eq!(
            rule.apply(&[State(1), State(1), State(1), State(1), State(1), State(1), State(1)]),
            State(1)
        );
        // dead stays dead
        assert_eq!(
            rule.apply(&[State(0), State(1), State(1), State(1), State(1), State(1), State(1)]),
            State(0)
        );
        assert_eq!(order_depth(&order), 1);
    }
}
