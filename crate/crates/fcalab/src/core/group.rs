//! Grouping (bulking): recode `b`-blocks of cells and `T` steps of time as
//! one super-cell step.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::sync::Arc;

use crate::simcheck::{BlockCoder, Coder, Encoding};

use super::geometry::{minkowski_sum, Coord, GridBox};
use super::rule::{CoreError, PatternTok, RuleTable, State, Transition};
use super::Limits;

/// Decodes a grouped state into its block cells, slot 0 fastest.
pub fn unpack_block(s: State, q: u64, cells: usize) -> Vec<State> {
    let mut v = Vec::with_capacity(cells);
    let mut rest = u64::from(s.0);
    for _ in 0..cells {
        v.push(State((rest % q) as u32));
        rest /= q;
    }
    v
}

fn pack_block(cells: &[State], q: u64) -> State {
    let mut acc = 0u64;
    for &s in cells.iter().rev() {
        acc = acc * q + u64::from(s.0);
    }
    State(acc as u32)
}

struct UnpackCoder {
    q: u64,
    cells: usize,
}

impl BlockCoder for UnpackCoder {
    fn encode_block(&self, window: &[State]) -> Vec<State> {
        unpack_block(window[0], self.q, self.cells)
    }
}

/// Groups `rule` into blocks of size `block` evolving `steps` source steps
/// per grouped step. The returned encoding unpacks grouped configurations
/// back to source configurations: one grouped step then unpacking equals
/// `steps` source steps on the unpacked configuration.
pub fn group(
    rule: &RuleTable,
    block: &[i64],
    steps: u64,
    limits: &Limits,
) -> Result<(RuleTable, Encoding), CoreError> {
    let d = rule.dim();
    if block.len() != d {
        return Err(CoreError::DimensionMismatch { rule: d, other: block.len() });
    }
    if block.iter().any(|&b| b < 1) || steps < 1 {
        return Err(CoreError::Invalid("block components and steps must be >= 1".into()));
    }
    let q = rule.state_count();
    let block_cells: u64 = block.iter().map(|&b| b as u64).product();
    let grouped_states = q
        .checked_pow(block_cells as u32)
        .filter(|&n| n <= limits.max_states && n <= u64::from(u32::MAX))
        .ok_or(CoreError::StateCountExceeded(u64::MAX, limits.max_states))?;
    if grouped_states > limits.max_states {
        return Err(CoreError::StateCountExceeded(grouped_states, limits.max_states));
    }

    // Source cells the block at the origin reads across `steps` steps.
    let block_box = GridBox::new(vec![0; d], block.iter().map(|&b| b - 1).collect());
    let block_coords: Vec<Coord> = block_box.iter_coords().collect();
    let mut window_t: Vec<Coord> = block_coords.clone();
    for _ in 0..steps {
        window_t = minkowski_sum(&window_t, rule.neighborhood());
    }

    // Grouped neighborhood: every block touching the dependency window.
    let mut grouped_neigh: BTreeSet<Coord> = BTreeSet::new();
    for y in &window_t {
        let zb: Coord = y
            .iter()
            .zip(block)
            .map(|(v, b)| v.div_euclid(*b))
            .collect();
        grouped_neigh.insert(zb);
    }
    grouped_neigh.insert(vec![0; d]);
    let mut grouped_neigh: Vec<Coord> = grouped_neigh.into_iter().collect();
    // Zero offset first, to match the convention used everywhere else.
    grouped_neigh.sort_by_key(|n| (n.iter().any(|&v| v != 0), n.clone()));

    let pattern_count = grouped_states
        .checked_pow(grouped_neigh.len() as u32)
        .ok_or(CoreError::PatternSpaceExceeded(u64::MAX, limits.max_table_patterns))?;
    if pattern_count > limits.max_table_patterns {
        return Err(CoreError::PatternSpaceExceeded(pattern_count, limits.max_table_patterns));
    }

    // Evaluate `steps` exact steps on the materialized dependency window.
    let mut transitions = Vec::new();
    let mut window_levels: Vec<Vec<Coord>> = vec![window_t.clone()];
    for _ in 0..steps {
        let prev = window_levels.last().unwrap();
        // cells computable at the next level: those whose whole window is known
        let prev_set: BTreeSet<&Coord> = prev.iter().collect();
        let next: Vec<Coord> = prev
            .iter()
            .filter(|z| {
                rule.neighborhood().iter().all(|n| {
                    let y: Coord = z.iter().zip(n).map(|(a, b)| a + b).collect();
                    prev_set.contains(&y)
                })
            })
            .cloned()
            .collect();
        window_levels.push(next);
    }

    let mut assignment = vec![State(0); grouped_neigh.len()];
    for mut pat in 0..pattern_count {
        for slot in assignment.iter_mut() {
            *slot = State((pat % grouped_states) as u32);
            pat /= grouped_states;
        }
        // Lay the blocks out.
        let mut values: HashMap<Coord, State> = HashMap::new();
        for (zb, &gs) in grouped_neigh.iter().zip(&assignment) {
            let cells = unpack_block(gs, q, block_cells as usize);
            for (r, &s) in block_coords.iter().zip(&cells) {
                let abs: Coord = zb.iter().zip(block).zip(r).map(|((z, b), r)| z * b + r).collect();
                values.insert(abs, s);
            }
        }
        for t in 0..steps as usize {
            let sources = &window_levels[t];
            let targets = &window_levels[t + 1];
            let _ = sources;
            let mut next: HashMap<Coord, State> = HashMap::new();
            for z in targets {
                let mut w = Vec::with_capacity(rule.neighborhood().len());
                for n in rule.neighborhood() {
                    let y: Coord = z.iter().zip(n).map(|(a, b)| a + b).collect();
                    w.push(*values.get(&y).expect("dependency window covers the step"));
                }
                next.insert(z.clone(), rule.apply(&w));
            }
            for (z, s) in next {
                values.insert(z, s);
            }
        }
        let out_cells: Vec<State> =
            block_coords.iter().map(|r| *values.get(r).expect("block cell computed")).collect();
        let out = pack_block(&out_cells, q);
        if out != assignment[0] {
            transitions.push(Transition {
                pattern: assignment.iter().map(|&s| PatternTok::Literal(s)).collect(),
                output: out,
            });
        }
    }

    let labels: Vec<String> = (0..grouped_states)
        .map(|gs| {
            let cells = unpack_block(State(gs as u32), q, block_cells as usize);
            cells
                .iter()
                .map(|&s| rule.label(s))
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    let bg_block = vec![rule.background(); block_cells as usize];
    let bg_label = labels[pack_block(&bg_block, q).idx()].clone();
    let grouped = RuleTable::new(
        format!("{}_b{:?}_t{}", rule.name, block, steps),
        d,
        labels,
        &bg_label,
        grouped_neigh,
        transitions,
    )?;

    let coder = Coder::Fn(Arc::new(UnpackCoder { q, cells: block_cells as usize }));
    let encoding = Encoding::new(
        block.to_vec(),
        vec![vec![0; d]],
        steps,
        coder,
        rule.background(),
    );
    Ok((grouped, encoding))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixtures::fixture;
    use crate::core::{iterate, Configuration};
    use crate::simcheck::apply_encoding;

    #[test]
    fn trivial_grouping_is_isomorphic() {
        let f = fixture("f_min(2)").unwrap();
        let (g, enc) = group(&f.rule, &[1], 1, &Limits::default()).unwrap();
        assert_eq!(g.state_count(), f.rule.state_count());
        assert_eq!(enc.block, vec![1]);
        assert_eq!(enc.slowdown, 1);
        for a in 0..4u32 {
            for b in 0..4u32 {
                assert_eq!(g.apply(&[State(a), State(b)]), f.rule.apply(&[State(a), State(b)]));
            }
        }
    }

    #[test]
    fn pair_blocks_compute_min_componentwise() {
        // f_min with M=1, blocks of two: (q1,q2) next to (q3,q4) becomes
        // (min(q1,q2), min(q2,q3)).
        let f = fixture("f_min(1)").unwrap();
        let (g, _) = group(&f.rule, &[2], 1, &Limits::default()).unwrap();
        let q = 3u64;
        for a in 0..(q * q) as u32 {
            for b in 0..(q * q) as u32 {
                let av = unpack_block(State(a), q, 2);
                let bv = unpack_block(State(b), q, 2);
                let expect = pack_block(
                    &[
                        State(av[0].0.min(av[1].0)),
                        State(av[1].0.min(bv[0].0)),
                    ],
                    q,
                );
                assert_eq!(g.apply(&[State(a), State(b)]), expect, "blocks {av:?} {bv:?}");
            }
        }
    }

    #[test]
    fn grouped_orbit_matches_ungrouped_through_unpacking() {
        let f = fixture("f_min(2)").unwrap();
        let (g, enc) = group(&f.rule, &[2], 2, &Limits::default()).unwrap();
        let q = f.rule.state_count();
        // a grouped row of three blocks
        let packed: Vec<State> = [(3u32, 1u32), (2, 0), (1, 3)]
            .iter()
            .map(|&(a, b)| pack_block(&[State(a), State(b)], q))
            .collect();
        let gc = Configuration::row(0, &packed, g.background());
        for k in 0..3u64 {
            let lhs = apply_encoding(&enc, &iterate(&g, &gc, k).unwrap()).unwrap();
            let rhs = iterate(&f.rule, &apply_encoding(&enc, &gc).unwrap(), enc.slowdown * k).unwrap();
            assert_eq!(lhs, rhs, "k={k}");
        }
    }
}
