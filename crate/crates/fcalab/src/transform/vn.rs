//! Von Neumann neighborhood reduction: any finite-neighborhood freezing
//! rule becomes a product-state rule over the symmetric von Neumann
//! neighborhood that pipelines each neighbor's state to the center along a
//! unit-step path, applying the base rule at the pipeline ends.

use std::sync::Arc;

use crate::analysis::{check_freezing, infer_order, CheckOutcome, StateOrder};
use crate::core::{
    von_neumann, Coord, Limits, RuleKernel, RuleTable, State,
};
use crate::simcheck::{BlockCoder, Coder, Encoding};

use super::TransformError;

/// The outcome of a reduction: the wrapped rule, its componentwise freezing
/// order, the encoding realizing the simulation at slowdown `m + 1`, and
/// the path geometry.
#[derive(Clone)]
pub struct VnReduction {
    pub rule: RuleTable,
    pub order: StateOrder,
    pub encoding: Encoding,
    /// Number of points on each (padded) propagation path.
    pub m: usize,
    /// Path points per original neighbor, each from the neighbor to zero.
    pub paths: Vec<Vec<Coord>>,
}

struct VnKernel {
    base: Arc<RuleTable>,
    order: Arc<StateOrder>,
    q: u64,
    k: usize,
    m: usize,
    /// Window index (into the symmetric von Neumann list) of each step
    /// delta, `deltas[i][j]` for `π_{i+1, j+2} ← π_{i+1, j+1}`.
    deltas: Vec<Vec<usize>>,
    components: u32,
}

impl VnKernel {
    fn digit(&self, s: State, c: usize) -> State {
        let mut v = u64::from(s.0);
        for _ in 0..c {
            v /= self.q;
        }
        State((v % self.q) as u32)
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        // i in 1..=k, j in 1..=m
        1 + (i - 1) * self.m + (j - 1)
    }
}

impl RuleKernel for VnKernel {
    fn apply(&self, window: &[State]) -> State {
        let center = window[0];
        let mut digits: Vec<State> =
            (0..self.components as usize).map(|c| self.digit(center, c)).collect();
        let guarded = |new: State, old: State| if self.order.lt(new, old) { new } else { old };
        // π_0 from the pipeline ends at the center cell.
        let ends: Vec<State> = (1..=self.k).map(|i| digits[self.slot(i, self.m)]).collect();
        let delta = self.base.apply(&ends);
        let mut out = digits.clone();
        out[0] = guarded(delta, digits[0]);
        // π_{i,1} from the center's π_0.
        for i in 1..=self.k {
            out[self.slot(i, 1)] = guarded(digits[0], digits[self.slot(i, 1)]);
        }
        // π_{i,j+1} from π_{i,j} of the step neighbor.
        for i in 1..=self.k {
            for j in 1..self.m {
                let src_cell = window[self.deltas[i - 1][j - 1]];
                let src = self.digit(src_cell, self.slot(i, j));
                let dst = self.slot(i, j + 1);
                out[dst] = guarded(src, digits[dst]);
            }
        }
        let mut acc = 0u64;
        for &d in out.iter().rev() {
            acc = acc * self.q + u64::from(d.0);
        }
        let _ = &mut digits;
        State(acc as u32)
    }

    fn state_count(&self) -> u64 {
        self.q.pow(self.components)
    }

    fn label(&self, s: State) -> String {
        (0..self.components as usize)
            .map(|c| self.base.label(self.digit(s, c)))
            .collect::<Vec<_>>()
            .join("|")
    }
}

struct VnCoder {
    q: u64,
    /// For each component, the context index its value comes from.
    sources: Vec<usize>,
}

impl BlockCoder for VnCoder {
    fn encode_block(&self, window: &[State]) -> Vec<State> {
        let mut acc = 0u64;
        for &src in self.sources.iter().rev() {
            acc = acc * self.q + u64::from(window[src].0);
        }
        vec![State(acc as u32)]
    }
}

/// Axis-by-axis unit-step path from `from` to the origin, padded nowhere;
/// the caller pads with trailing zero-steps.
fn manhattan_path(from: &Coord) -> Vec<Coord> {
    let mut pts = vec![from.clone()];
    let mut cur = from.clone();
    for a in 0..from.len() {
        while cur[a] != 0 {
            cur[a] -= cur[a].signum();
            pts.push(cur.clone());
        }
    }
    pts
}

/// Wraps `rule` into a symmetric von Neumann rule simulating it with
/// slowdown `m + 1`, where `m` is the common padded path length in points.
/// The rule must be freezing; without an explicit order one is inferred.
pub fn reduce_to_vn(
    rule: &RuleTable,
    order: Option<&StateOrder>,
    limits: &Limits,
) -> Result<VnReduction, TransformError> {
    let order = match order {
        Some(o) => o.clone(),
        None => infer_order(rule, limits)?.ok_or(TransformError::NoFreezingOrder)?,
    };
    match check_freezing(rule, &order, limits)? {
        CheckOutcome::Ok { .. } => {}
        CheckOutcome::Violation { .. } => return Err(TransformError::NoFreezingOrder),
    }
    let d = rule.dim();
    let k = rule.neighborhood().len();
    let mut paths: Vec<Vec<Coord>> = rule.neighborhood().iter().map(manhattan_path).collect();
    let m = paths.iter().map(|p| p.len()).max().unwrap_or(1);
    for p in paths.iter_mut() {
        while p.len() < m {
            p.push(vec![0; d]);
        }
    }
    let components = (m * k + 1) as u32;
    let q = rule.state_count();
    let states = (0..components).try_fold(1u64, |acc, _| {
        acc.checked_mul(q).filter(|&v| v <= limits.max_states)
    });
    let states = states.ok_or(crate::core::CoreError::StateCountExceeded(u64::MAX, limits.max_states))?;
    if states > u64::from(u32::MAX) {
        return Err(crate::core::CoreError::StateCountExceeded(states, u64::from(u32::MAX)).into());
    }

    let vn = von_neumann(d);
    let vn_index = |c: &Coord| -> usize {
        vn.iter().position(|v| v == c).expect("unit step stays in the von Neumann set")
    };
    // deltas[i-1][j-1] = window index of p_{i,j} - p_{i,j+1}
    let deltas: Vec<Vec<usize>> = paths
        .iter()
        .map(|p| {
            (0..m - 1)
                .map(|j| {
                    let step: Coord =
                        p[j].iter().zip(&p[j + 1]).map(|(a, b)| a - b).collect();
                    vn_index(&step)
                })
                .collect()
        })
        .collect();

    let kernel = VnKernel {
        base: Arc::new(rule.clone()),
        order: Arc::new(order.clone()),
        q,
        k,
        m,
        deltas,
        components,
    };
    // background: all components at the base background
    let mut bg = 0u64;
    for _ in 0..components {
        bg = bg * q + u64::from(rule.background().0);
    }
    let kernel = Arc::new(kernel);
    let vn_rule = RuleTable::with_kernel(
        format!("{}_vn", rule.name),
        d,
        kernel.clone(),
        State(bg as u32),
        vn,
    )?;
    let vn_order = StateOrder::componentwise(order, components);

    // Encoding: component (i, j) of the block at z reads source cell
    // z + (n_i - p_{i,j}); component 0 reads the center.
    let mut context: Vec<Coord> = vec![vec![0; d]];
    let mut comp_offsets: Vec<Coord> = vec![vec![0; d]];
    for (i, p) in paths.iter().enumerate() {
        let n_i = &rule.neighborhood()[i];
        for pt in p.iter() {
            let off: Coord = n_i.iter().zip(pt).map(|(a, b)| a - b).collect();
            comp_offsets.push(off);
        }
    }
    for off in &comp_offsets {
        if !context.contains(off) {
            context.push(off.clone());
        }
    }
    context.sort();
    context.dedup();
    // keep zero first for readability
    context.sort_by_key(|c| (c.iter().any(|&v| v != 0), c.clone()));
    let sources: Vec<usize> = comp_offsets
        .iter()
        .map(|off| context.iter().position(|c| c == off).unwrap())
        .collect();
    let coder = VnCoder { q, sources };
    let encoding = Encoding::new(
        vec![1; d],
        context,
        (m + 1) as u64,
        Coder::Fn(Arc::new(coder)),
        State(bg as u32),
    );
    Ok(VnReduction { rule: vn_rule, order: vn_order, encoding, m, paths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;
    use crate::simcheck::{verify_simulation, Sampler};

    #[test]
    fn paths_are_axis_by_axis() {
        let p = manhattan_path(&vec![2, -1]);
        assert_eq!(p, vec![vec![2, -1], vec![1, -1], vec![0, -1], vec![0, 0]]);
    }

    #[test]
    fn arrows_reduce_and_simulate_exactly() {
        let f = fixture("f_arrows").unwrap();
        let red = reduce_to_vn(&f.rule, f.order.as_ref(), &Limits::default()).unwrap();
        assert_eq!(red.m, 2);
        assert_eq!(red.encoding.slowdown, 3);
        // 4 states, 3 offsets, m=2: 4^(2*3+1) product states
        assert_eq!(red.rule.state_count(), 4u64.pow(7));
        let sampler = Sampler::new(21, 12, vec![4, 4]);
        let report = verify_simulation(&f.rule, &red.rule, &red.encoding, &sampler).unwrap();
        assert!(report.ok(), "{} failures", report.failures.len());
    }

    #[test]
    fn vn_rule_stays_freezing_componentwise() {
        let f = fixture("f_min(1)").unwrap();
        let red = reduce_to_vn(&f.rule, f.order.as_ref(), &Limits::default()).unwrap();
        let out = check_freezing(&red.rule, &red.order, &Limits::default()).unwrap();
        assert!(out.is_ok(), "witness: {:?}", out.witness().map(|w| &w.detail));
    }

    #[test]
    fn already_von_neumann_still_wraps() {
        let f = fixture("bootstrap2").unwrap();
        let red = reduce_to_vn(&f.rule, f.order.as_ref(), &Limits::default()).unwrap();
        assert_eq!(red.m, 2);
        let sampler = Sampler::new(5, 6, vec![3, 3]);
        let report = verify_simulation(&f.rule, &red.rule, &red.encoding, &sampler).unwrap();
        assert!(report.ok(), "{} failures", report.failures.len());
    }
}
