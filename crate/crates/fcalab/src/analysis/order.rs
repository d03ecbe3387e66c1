//! Partial orders on states: the freezing order machinery.

use std::sync::Arc;

use crate::core::State;

use super::AnalysisError;

const CLOSURE_CAP: u64 = 4096;

/// A partial order on `0..n` states, given by cover pairs `(higher, lower)`.
/// Reflexivity is implicit. Product rules carry the componentwise extension
/// of their base order without materializing anything.
#[derive(Debug, Clone)]
pub struct StateOrder {
    n: u64,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// Closure bitmatrix: row `a` holds the set `{b : a ⪯ b}`.
    Explicit { covers: Vec<(State, State)>, up: Vec<Vec<u64>>, depth: u32 },
    /// Total order by state index: `a ⪯ b` iff `a <= b`.
    Chain,
    /// Digits base `base.n`, compared pointwise.
    Componentwise { base: Arc<StateOrder>, count: u32 },
}

impl StateOrder {
    /// Builds an order from cover pairs, verifying the relation is a DAG.
    pub fn from_covers(n: usize, covers: &[(State, State)]) -> Result<StateOrder, AnalysisError> {
        if n as u64 > CLOSURE_CAP {
            return Err(AnalysisError::OrderTooLarge(n as u64));
        }
        for &(a, b) in covers {
            if a.idx() >= n || b.idx() >= n {
                return Err(AnalysisError::OrderSizeMismatch { order: n as u64, rule: a.0.max(b.0) as u64 + 1 });
            }
        }
        let words = n.div_ceil(64);
        // up[a] = reachable-or-equal set walking from higher to lower? We
        // store "a ⪯ b": edges go lower -> higher.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n]; // lower -> higher
        let mut indeg = vec![0usize; n];
        for &(hi, lo) in covers {
            adj[lo.idx()].push(hi.idx());
            indeg[hi.idx()] += 1;
        }
        // Topological sort (Kahn, smallest index first) to detect cycles and
        // compute the closure bottom-up.
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
            .filter(|&v| indeg[v] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut topo = Vec::with_capacity(n);
        let mut indeg_work = indeg.clone();
        while let Some(std::cmp::Reverse(v)) = ready.pop() {
            topo.push(v);
            for &w in &adj[v] {
                indeg_work[w] -= 1;
                if indeg_work[w] == 0 {
                    ready.push(std::cmp::Reverse(w));
                }
            }
        }
        if topo.len() != n {
            let stuck = (0..n).find(|&v| indeg_work[v] > 0).unwrap_or(0);
            return Err(AnalysisError::OrderCycle(State(stuck as u32)));
        }
        let mut up = vec![vec![0u64; words]; n];
        for &v in topo.iter().rev() {
            up[v][v / 64] |= 1 << (v % 64);
            let succs: Vec<usize> = adj[v].clone();
            for w in succs {
                let (row_w, row_v) = if v < w {
                    let (a, b) = up.split_at_mut(w);
                    (&b[0], &mut a[v])
                } else {
                    let (a, b) = up.split_at_mut(v);
                    (&a[w], &mut b[0])
                };
                for (dst, src) in row_v.iter_mut().zip(row_w) {
                    *dst |= src;
                }
            }
        }
        // Antisymmetry beyond acyclicity is automatic for a DAG closure.
        let depth = {
            let mut d = vec![0u32; n];
            for &v in topo.iter().rev() {
                for &w in &adj[v] {
                    d[v] = d[v].max(d[w] + 1);
                }
            }
            d.iter().copied().max().unwrap_or(0)
        };
        Ok(StateOrder { n: n as u64, kind: Kind::Explicit { covers: covers.to_vec(), up, depth } })
    }

    /// The total order `0 ≺ 1 ≺ … ≺ n-1`.
    pub fn chain(n: u64) -> StateOrder {
        StateOrder { n, kind: Kind::Chain }
    }

    /// The antichain (only reflexive pairs).
    pub fn antichain(n: u64) -> StateOrder {
        StateOrder { n, kind: Kind::Explicit { covers: Vec::new(), up: identity_rows(n as usize), depth: 0 } }
    }

    /// The componentwise order over `base.state_count()^count` product
    /// states encoded as digit vectors, digit 0 fastest.
    pub fn componentwise(base: StateOrder, count: u32) -> StateOrder {
        let n = (base.state_count() as u128).pow(count) as u64;
        StateOrder { n, kind: Kind::Componentwise { base: Arc::new(base), count } }
    }

    pub fn state_count(&self) -> u64 {
        self.n
    }

    /// `a ⪯ b` (reflexive).
    pub fn le(&self, a: State, b: State) -> bool {
        match &self.kind {
            Kind::Explicit { up, .. } => up[a.idx()][b.idx() / 64] >> (b.idx() % 64) & 1 == 1,
            Kind::Chain => a.0 <= b.0,
            Kind::Componentwise { base, count } => {
                let q = base.state_count();
                let (mut x, mut y) = (u64::from(a.0), u64::from(b.0));
                for _ in 0..*count {
                    if !base.le(State((x % q) as u32), State((y % q) as u32)) {
                        return false;
                    }
                    x /= q;
                    y /= q;
                }
                true
            }
        }
    }

    /// `a ≺ b` (strict).
    pub fn lt(&self, a: State, b: State) -> bool {
        a != b && self.le(a, b)
    }

    /// Length in edges of the longest descending chain.
    pub fn depth(&self) -> u32 {
        match &self.kind {
            Kind::Explicit { depth, .. } => *depth,
            Kind::Chain => (self.n - 1) as u32,
            Kind::Componentwise { base, count } => base.depth() * count,
        }
    }

    /// Cover pairs, for orders that carry them explicitly.
    pub fn covers(&self) -> Option<Vec<(State, State)>> {
        match &self.kind {
            Kind::Explicit { covers, .. } => Some(covers.clone()),
            Kind::Chain => Some((1..self.n).map(|v| (State(v as u32), State(v as u32 - 1))).collect()),
            Kind::Componentwise { .. } => None,
        }
    }

    /// A linearization `q_0 ⪯ q_1 ⪯ …` as a bottom-to-top state list,
    /// deterministic (smallest index first among the ready states).
    pub fn linearize(&self) -> Option<Vec<State>> {
        match &self.kind {
            Kind::Chain => Some((0..self.n).map(|v| State(v as u32)).collect()),
            Kind::Explicit { covers, .. } => {
                let n = self.n as usize;
                let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
                let mut indeg = vec![0usize; n];
                for &(hi, lo) in covers {
                    adj[lo.idx()].push(hi.idx());
                    indeg[hi.idx()] += 1;
                }
                let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
                    (0..n).filter(|&v| indeg[v] == 0).map(std::cmp::Reverse).collect();
                let mut out = Vec::with_capacity(n);
                while let Some(std::cmp::Reverse(v)) = ready.pop() {
                    out.push(State(v as u32));
                    for &w in &adj[v] {
                        indeg[w] -= 1;
                        if indeg[w] == 0 {
                            ready.push(std::cmp::Reverse(w));
                        }
                    }
                }
                Some(out)
            }
            Kind::Componentwise { .. } => None,
        }
    }

    /// Ranks `ι(q)` for a fixed linearization, when one is available.
    pub fn ranks(&self) -> Option<Vec<u32>> {
        let lin = self.linearize()?;
        let mut rank = vec![0u32; self.n as usize];
        for (i, s) in lin.iter().enumerate() {
            rank[s.idx()] = i as u32;
        }
        Some(rank)
    }
}

fn identity_rows(n: usize) -> Vec<Vec<u64>> {
    let words = n.div_ceil(64);
    (0..n)
        .map(|v| {
            let mut row = vec![0u64; words];
            row[v / 64] |= 1 << (v % 64);
            row
        })
        .collect()
}

/// Longest descending chain length minus one, i.e. the depth in edges.
pub fn order_depth(order: &StateOrder) -> u32 {
    order.depth()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_depth_and_le() {
        let o = StateOrder::chain(3);
        assert_eq!(order_depth(&o), 2);
        assert!(o.le(State(0), State(2)));
        assert!(!o.le(State(2), State(0)));
    }

    #[test]
    fn antichain_depth_zero() {
        let o = StateOrder::antichain(5);
        assert_eq!(order_depth(&o), 0);
        assert!(o.le(State(2), State(2)));
        assert!(!o.le(State(1), State(2)));
    }

    #[test]
    fn covers_close_transitively() {
        // 0 above 1 and 2, both above 3.
        let o = StateOrder::from_covers(
            4,
            &[(State(0), State(1)), (State(0), State(2)), (State(1), State(3)), (State(2), State(3))],
        )
        .unwrap();
        assert!(o.le(State(3), State(0)));
        assert!(!o.le(State(1), State(2)));
        assert_eq!(o.depth(), 2);
    }

    #[test]
    fn cycles_rejected() {
        let err = StateOrder::from_covers(2, &[(State(0), State(1)), (State(1), State(0))]);
        assert!(err.is_err());
    }

    #[test]
    fn componentwise_pairs() {
        let base = StateOrder::chain(3);
        let o = StateOrder::componentwise(base, 2);
        // digits (a0, a1): index a0 + 3*a1
        let s = |a0: u32, a1: u32| State(a0 + 3 * a1);
        assert!(o.le(s(0, 1), s(2, 1)));
        assert!(!o.le(s(1, 0), s(0, 2)));
        assert_eq!(o.depth(), 4);
    }

    #[test]
    fn linearization_respects_order() {
        let o = StateOrder::from_covers(3, &[(State(2), State(0)), (State(1), State(0))]).unwrap();
        let lin = o.linearize().unwrap();
        let rank = o.ranks().unwrap();
        for a in 0..3u32 {
            for b in 0..3u32 {
                if o.lt(State(a), State(b)) {
                    assert!(rank[a as usize] < rank[b as usize]);
                }
            }
        }
        assert_eq!(lin.len(), 3);
    }
}
