//! Neighborhood matchers: one-shot circuits that fire their output exactly
//! when the input bit-vector equals a fixed word.
//!
//! Zero positions of the word feed a ladder of fan-in-2 for-all gates
//! producing wire `y`; one positions feed a ladder of exists gates
//! producing wire `x`; the alpha gate on top fires the output once `y`
//! carries fire while `x` does not. Everything is a fuse, so the gadget is
//! one-shot by construction.

use std::collections::HashMap;

use crate::core::{Configuration, GridBox};

use super::grid::{poly_len, Canvas, CellSpec, GateKind, NetValue, Pt};
use super::u5::{u5_rule, U5};
use super::UniversalError;

const GATE_PITCH: i64 = 6;
/// Edges from a gate's output cell to the next gate's link-side input.
const LINK_EDGES: usize = 8;

/// A matcher gadget with measured internal delays. Local frame: leaf drop
/// columns enter from the south at `y = 0`; the output leaves the alpha
/// gate heading north.
pub struct MatcherFootprint {
    pub word: Vec<bool>,
    pub canvas: Canvas,
    /// Drop column per leaf; the leaf wire starts at `(drops[t], 0)`.
    pub drops: Vec<i64>,
    pub alpha: Pt,
    /// The cell north of the alpha gate; fire here is the match signal.
    pub output: Pt,
    /// Per leaf: edges from the drop entry cell event to the event at the
    /// alpha-side end of its ladder (west cell for zeros, east for ones).
    pub delay: Vec<usize>,
    pub width: i64,
    pub height: i64,
}

struct Ladder {
    column: i64,
    base: i64,
    gates: usize,
    /// Risers approach gate inputs from this side (+1 east, -1 west); the
    /// inter-gate links climb on the opposite side.
    side: i64,
    kind: GateKind,
}

impl Ladder {
    fn row(&self, r: usize) -> i64 {
        self.base + GATE_PITCH * r as i64
    }

    /// Draws gates, tags, output stubs and links. The link turns away two
    /// rows below the next tag: a wire directly under a V tag would ignite.
    fn build(&self, canvas: &mut Canvas) {
        for r in 0..self.gates {
            let out = canvas.derived();
            canvas.gate((self.column, self.row(r)), self.kind, 0, out);
            if r + 1 < self.gates {
                let (x, y) = (self.column, self.row(r));
                let s = self.side;
                canvas.wire_path(
                    &[
                        (x, y + 1),
                        (x, y + 3),
                        (x - 2 * s, y + 3),
                        (x - 2 * s, y + 6),
                        (x - s, y + 6),
                    ],
                    out,
                );
            }
        }
    }
}

/// Builds the matcher gadget for `word`. Leaf nets are
/// `Bit { owner: 0, bit: t }` placeholders that the caller rebinds when
/// instantiating.
pub fn build_matcher(word: &[bool]) -> MatcherFootprint {
    assert!(!word.is_empty(), "matcher word must be nonempty");
    let n = word.len() as i64;
    let zeros: Vec<usize> = (0..word.len()).filter(|&t| !word[t]).collect();
    let ones: Vec<usize> = (0..word.len()).filter(|&t| word[t]).collect();
    let (n0, n1) = (zeros.len() as i64, ones.len() as i64);

    let track0 = 2i64;
    let ladder_base = track0 + 2 * n + 2;
    let y_col = 8i64;
    let drop0 = y_col + 4 + 4 * (n0 - 1).max(1) + 4;
    let riser0 = drop0 + 4 * n + 2;
    let x_col = riser0 + 4 * (n1 - 1).max(1) + 4;
    let alpha_x = {
        let mid = drop0 + n - 1;
        mid + mid.rem_euclid(2)
    };
    let alpha_y = ladder_base + GATE_PITCH * n0.max(n1).max(1) + 2;

    let mut canvas = Canvas::new();
    let mut delay = vec![0usize; word.len()];
    let drops: Vec<i64> = (0..n).map(|t| drop0 + 4 * t).collect();

    let alpha = (alpha_x, alpha_y);
    canvas.put(alpha, CellSpec::Gate { kind: GateKind::Alpha, row: 0 });
    let output = (alpha_x, alpha_y + 1);
    let out_net = canvas.derived();
    canvas.put(output, CellSpec::Wire(out_net));

    build_side(
        &mut canvas,
        &zeros,
        Ladder { column: y_col, base: ladder_base, gates: (n0 - 1).max(0) as usize, side: 1, kind: GateKind::Forall },
        &drops,
        track0,
        (alpha_x - 1, alpha_y),
        true,
        &mut delay,
    );
    build_side(
        &mut canvas,
        &ones,
        Ladder { column: x_col, base: ladder_base, gates: (n1 - 1).max(0) as usize, side: -1, kind: GateKind::Exists },
        &drops,
        track0,
        (alpha_x + 1, alpha_y),
        false,
        &mut delay,
    );

    let (_, hi) = canvas.bounds();
    MatcherFootprint {
        word: word.to_vec(),
        canvas,
        drops,
        alpha,
        output,
        delay,
        width: hi.0 + 2,
        height: hi.1 + 2,
    }
}

/// Builds one side of the matcher: leaf tracks, risers, the ladder and the
/// root route into the alpha input cell at `alpha_in`. Empty sides place a
/// constant stub: pre-fired for the for-all side (an all-ones word is
/// satisfied from the start), never-fired for the exists side.
#[allow(clippy::too_many_arguments)]
fn build_side(
    canvas: &mut Canvas,
    leaves: &[usize],
    ladder: Ladder,
    drops: &[i64],
    track0: i64,
    alpha_in: Pt,
    is_forall: bool,
    delay: &mut [usize],
) {
    if leaves.is_empty() {
        let stub = if is_forall { NetValue::ConstFired } else { NetValue::ConstUnfired };
        canvas.put(alpha_in, CellSpec::Wire(stub));
        return;
    }
    let net = |t: usize| NetValue::Bit { owner: 0, bit: t as u8, leg: 0 };
    if leaves.len() == 1 {
        let t = leaves[0];
        let track_y = track0 + 2 * t as i64;
        // approach the alpha input through a via column clear of every
        // drop column (a via brushing a drop would short the two nets)
        let via = if is_forall {
            drops.iter().min().unwrap() - 4
        } else {
            drops.iter().max().unwrap() + 4
        };
        let edges = canvas.wire_path(
            &dedup(&[
                (drops[t], 0),
                (drops[t], track_y),
                (via, track_y),
                (via, alpha_in.1),
                alpha_in,
            ]),
            net(t),
        );
        delay[t] = edges;
        return;
    }

    let root = ladder.gates - 1;
    // root route: out cell of the top gate up and across to the alpha input
    let (rx, ry) = (ladder.column, ladder.row(root));
    let root_corners = dedup(&[(rx, ry + 1), (rx, alpha_in.1), alpha_in]);
    let root_edges = poly_len(&root_corners);
    ladder.build(canvas);
    {
        // the root output continues along the root route; reuse its net
        let out_net = match canvas.get((rx, ry + 1)) {
            Some(CellSpec::Wire(v)) => *v,
            other => panic!("missing root output: {other:?}"),
        };
        canvas.wire_path(&root_corners, out_net);
    }
    // rest[r]: edges from gate r's input event to the alpha_in event
    let mut rest = vec![0usize; ladder.gates];
    rest[root] = 2 + root_edges;
    for r in (0..root).rev() {
        rest[r] = 2 + LINK_EDGES + rest[r + 1];
    }

    for (k, &t) in leaves.iter().enumerate() {
        let g = k.saturating_sub(1);
        let track_y = track0 + 2 * t as i64;
        let gate_row = ladder.row(g);
        let corners = if k == 0 {
            // the link-side input of gate 0, approached via the outer column
            let outer = ladder.column - 4 * ladder.side;
            let input = (ladder.column - ladder.side, ladder.row(0));
            dedup(&[(drops[t], 0), (drops[t], track_y), (outer, track_y), (outer, ladder.row(0)), input])
        } else {
            let riser = ladder.column + ladder.side * (4 + 4 * g as i64);
            let input = (ladder.column + ladder.side, gate_row);
            dedup(&[(drops[t], 0), (drops[t], track_y), (riser, track_y), (riser, gate_row), input])
        };
        let edges = canvas.wire_path(&corners, net(t));
        delay[t] = edges + rest[g];
    }
}

fn dedup(corners: &[Pt]) -> Vec<Pt> {
    let mut v: Vec<Pt> = Vec::with_capacity(corners.len());
    for &p in corners {
        if v.last() != Some(&p) {
            v.push(p);
        }
    }
    v
}

/// Instantiates a standalone matcher over an input bit vector, settles the
/// trees with the gate transitions disabled (the same discipline an
/// encoding uses), then runs the full wire rule to quiescence and reports
/// whether the output fired.
pub fn trace_matcher(word: &[bool], input: &[bool]) -> Result<bool, UniversalError> {
    assert_eq!(word.len(), input.len());
    let fp = build_matcher(word);
    let cells: HashMap<Pt, CellSpec> = fp.canvas.cells.clone();

    let mut lo = (i64::MAX, i64::MAX);
    let mut hi = (i64::MIN, i64::MIN);
    for p in cells.keys() {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    let bbox = GridBox::new(vec![lo.0 - 1, lo.1 - 1], vec![hi.0 + 1, hi.1 + 1]);
    let mut config = Configuration::filled(bbox, U5::B.state());
    for (p, spec) in &cells {
        let v = match spec {
            CellSpec::Wire(NetValue::Bit { bit, .. }) => {
                if input[*bit as usize] {
                    U5::W
                } else {
                    U5::F
                }
            }
            CellSpec::Wire(NetValue::ConstFired) => U5::F,
            CellSpec::Wire(_) | CellSpec::Cross { .. } => U5::W,
            CellSpec::Gate { .. } => U5::B,
            CellSpec::Tag(t) => *t,
        };
        config.set(&[p.0, p.1], v.state());
    }
    let bound = 16 * (fp.width + fp.height) as u64 + 64;
    // settle the trees without letting any gate with a background tag fire
    let settle_rule = super::u5::u5_settle_rule();
    let mut settle = crate::core::Engine::new(&settle_rule, &config)?;
    settle
        .run_to_fixpoint(bound)
        .ok_or_else(|| UniversalError::Layout("matcher settle did not terminate".into()))?;
    let settled = settle.snapshot().reboxed(config.bbox().clone());
    // now run the real rule
    let (rule, _) = u5_rule();
    let mut engine = crate::core::Engine::new(&rule, &settled)?;
    engine
        .run_to_fixpoint(bound)
        .ok_or_else(|| UniversalError::Layout("matcher did not quiesce".into()))?;
    Ok(engine.get(&[fp.output.0, fp.output.1]) == U5::F.state())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_10_cases() {
        // true = bit 1 (unfired), false = bit 0 (fired)
        let w = [true, false];
        assert!(!trace_matcher(&w, &[false, false]).unwrap());
        assert!(trace_matcher(&w, &[true, false]).unwrap());
        assert!(!trace_matcher(&w, &[true, true]).unwrap());
        assert!(!trace_matcher(&w, &[false, true]).unwrap());
    }

    #[test]
    fn all_ones_matches_only_untouched_input() {
        let w = [true, true, true];
        assert!(trace_matcher(&w, &[true, true, true]).unwrap());
        assert!(!trace_matcher(&w, &[true, false, true]).unwrap());
    }

    #[test]
    fn all_zeros_waits_for_everything() {
        let w = [false, false, false];
        assert!(trace_matcher(&w, &[false, false, false]).unwrap());
        assert!(!trace_matcher(&w, &[false, true, false]).unwrap());
    }

    #[test]
    fn exhaustive_words_up_to_four() {
        for len in 1..=4usize {
            for wbits in 0..(1u32 << len) {
                let word: Vec<bool> = (0..len).map(|i| wbits >> i & 1 == 1).collect();
                for vbits in 0..(1u32 << len) {
                    let input: Vec<bool> = (0..len).map(|i| vbits >> i & 1 == 1).collect();
                    let fired = trace_matcher(&word, &input).unwrap();
                    assert_eq!(fired, word == input, "word {word:?} input {input:?}");
                }
            }
        }
    }
}
