//! Build-time canvas for circuit layouts: sparse cell placement with
//! collision checks, polyline wire tracing and crossing bookkeeping.

use std::collections::HashMap;

use super::u5::U5;

pub type Pt = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Alpha,
    Exists,
    Forall,
}

/// What a wire cell carries at instantiation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetValue {
    /// Bit `bit` of the unary word of the source cell `owners[owner]`:
    /// `W` while the bit is 1, `F` once it is 0. Wires carrying the same
    /// bit but belonging to different trees get distinct `leg` ids, so a
    /// pad winding across a sibling wire stays a crossing instead of
    /// merging; signals hop between touching legs like any wire pair.
    Bit { owner: u8, bit: u8, leg: u16 },
    /// Gate-output side wires; `W` in the template, settled by fire
    /// propagation. The id keeps distinct output nets distinguishable so
    /// the validator can detect accidental shorts.
    Derived(u32),
    /// Pre-fired stub (the for-all side of an all-ones word).
    ConstFired,
    /// A stub that never fires (the exists side of an all-zeros word).
    ConstUnfired,
}

impl NetValue {
    fn rebase(self, offset: u32) -> NetValue {
        match self {
            NetValue::Derived(i) => NetValue::Derived(i + offset),
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellSpec {
    Wire(NetValue),
    Cross { h: NetValue, v: NetValue },
    /// Gate cell (background in the template). Alpha gates instantiate as
    /// triggered once their row is already fired; `row` records which row
    /// bit governs that.
    Gate { kind: GateKind, row: u8 },
    /// Fixed tag cell south of a gate: `H` for exists, `V` for for-all.
    Tag(U5),
}

/// Sparse layout canvas. Placement collisions panic immediately: every
/// overlap in the generator is a bug, except a wire landing on a wire of a
/// different net while moving straight, which becomes a crossing.
#[derive(Debug, Default)]
pub struct Canvas {
    pub cells: HashMap<Pt, CellSpec>,
    next_derived: u32,
}

impl Canvas {
    pub fn new() -> Canvas {
        Canvas::default()
    }

    /// A fresh derived-net id.
    pub fn derived(&mut self) -> NetValue {
        let id = self.next_derived;
        self.next_derived += 1;
        NetValue::Derived(id)
    }

    pub fn put(&mut self, p: Pt, spec: CellSpec) {
        match self.cells.insert(p, spec) {
            None => {}
            Some(old) if old == spec => {}
            Some(old) => panic!("layout collision at {p:?}: {old:?} vs {spec:?}"),
        }
    }

    pub fn get(&self, p: Pt) -> Option<&CellSpec> {
        self.cells.get(&p)
    }

    /// Lays wire cells along an axis-aligned polyline given by its corner
    /// points. Returns the number of edges (steps) along the path.
    ///
    /// A cell already holding a wire of the same net is shared (junction);
    /// a wire of a different net becomes a crossing provided both runs go
    /// straight through the cell.
    pub fn wire_path(&mut self, corners: &[Pt], net: NetValue) -> usize {
        let cells = expand(corners);
        let mut edges = 0usize;
        for (k, &p) in cells.iter().enumerate() {
            if k > 0 {
                edges += 1;
            }
            match self.cells.get(&p).copied() {
                None => self.put(p, CellSpec::Wire(net)),
                Some(CellSpec::Wire(existing)) if existing == net => {}
                Some(CellSpec::Wire(existing)) => {
                    // crossing: this path must pass straight through
                    let (prev, next) = (
                        cells.get(k.wrapping_sub(1)).copied(),
                        cells.get(k + 1).copied(),
                    );
                    let (prev, next) = match (prev, next) {
                        (Some(a), Some(b)) => (a, b),
                        _ => panic!("path of net {net:?} ends on foreign wire at {p:?}"),
                    };
                    assert!(
                        prev.0 == next.0 || prev.1 == next.1,
                        "bent path over foreign wire at {p:?}"
                    );
                    let horizontal = prev.1 == next.1;
                    let spec = if horizontal {
                        CellSpec::Cross { h: net, v: existing }
                    } else {
                        CellSpec::Cross { h: existing, v: net }
                    };
                    self.cells.insert(p, spec);
                }
                Some(CellSpec::Cross { h, v }) => {
                    assert!(
                        h == net || v == net,
                        "triple crossing at {p:?}: {h:?}/{v:?} vs {net:?}"
                    );
                }
                Some(other) => panic!("wire of {net:?} collides with {other:?} at {p:?}"),
            }
        }
        edges
    }

    /// Places a gate with its tag and output cell. The caller wires inputs
    /// to `(at.0 - 1, at.1)` and `(at.0 + 1, at.1)` and continues the
    /// output net from `(at.0, at.1 + 1)`.
    pub fn gate(&mut self, at: Pt, kind: GateKind, row: u8, out_net: NetValue) {
        self.put(at, CellSpec::Gate { kind, row });
        let tag = match kind {
            GateKind::Alpha => None,
            GateKind::Exists => Some(U5::H),
            GateKind::Forall => Some(U5::V),
        };
        if let Some(t) = tag {
            self.put((at.0, at.1 - 1), CellSpec::Tag(t));
        }
        self.put((at.0, at.1 + 1), CellSpec::Wire(out_net));
    }

    /// Bounding box `(min, max)` inclusive over all placed cells.
    pub fn bounds(&self) -> (Pt, Pt) {
        let mut lo = (i64::MAX, i64::MAX);
        let mut hi = (i64::MIN, i64::MIN);
        for p in self.cells.keys() {
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        (lo, hi)
    }

    /// Translates every cell.
    pub fn translate(&mut self, dx: i64, dy: i64) {
        let moved: HashMap<Pt, CellSpec> =
            self.cells.drain().map(|((x, y), c)| ((x + dx, y + dy), c)).collect();
        self.cells = moved;
    }

    /// Merges another canvas, rebasing its derived-net ids so they stay
    /// distinct from this canvas's.
    pub fn merge(&mut self, other: Canvas) {
        let offset = self.next_derived;
        for (p, c) in other.cells {
            let c = match c {
                CellSpec::Wire(v) => CellSpec::Wire(v.rebase(offset)),
                CellSpec::Cross { h, v } => {
                    CellSpec::Cross { h: h.rebase(offset), v: v.rebase(offset) }
                }
                other => other,
            };
            self.put(p, c);
        }
        self.next_derived += other.next_derived;
    }
}

/// Expands axis-aligned corners into the full cell list.
pub fn expand(corners: &[Pt]) -> Vec<Pt> {
    assert!(!corners.is_empty());
    let mut out = vec![corners[0]];
    for seg in corners.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        assert!(a.0 == b.0 || a.1 == b.1, "segment {a:?} -> {b:?} not axis-aligned");
        let d = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
        let mut cur = a;
        while cur != b {
            cur = (cur.0 + d.0, cur.1 + d.1);
            out.push(cur);
        }
    }
    out
}

/// Edge length of an axis-aligned polyline.
pub fn poly_len(corners: &[Pt]) -> usize {
    corners
        .windows(2)
        .map(|seg| ((seg[1].0 - seg[0].0).abs() + (seg[1].1 - seg[0].1).abs()) as usize)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const NET_A: NetValue = NetValue::Bit { owner: 0, bit: 0, leg: 0 };
    const NET_B: NetValue = NetValue::Bit { owner: 0, bit: 1, leg: 0 };

    #[test]
    fn paths_expand_and_measure() {
        let pts = expand(&[(0, 0), (3, 0), (3, 2)]);
        assert_eq!(pts.len(), 6);
        assert_eq!(poly_len(&[(0, 0), (3, 0), (3, 2)]), 5);
    }

    #[test]
    fn straight_overlap_becomes_crossing() {
        let mut c = Canvas::new();
        c.wire_path(&[(0, 1), (4, 1)], NET_A);
        c.wire_path(&[(2, -1), (2, 3)], NET_B);
        match c.get((2, 1)) {
            Some(CellSpec::Cross { h, v }) => {
                assert_eq!(*h, NET_A);
                assert_eq!(*v, NET_B);
            }
            other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    #[should_panic(expected = "collision")]
    fn collisions_panic() {
        let mut c = Canvas::new();
        c.put((0, 0), CellSpec::Wire(NET_A));
        c.put((0, 0), CellSpec::Tag(U5::H));
    }
}
