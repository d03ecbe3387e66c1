//! Composition of block encodings along a simulation pipeline.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::core::{Coord, GridBox, State};
use crate::simcheck::{BlockCoder, Coder, Encoding};

use super::TransformError;

struct ComposedCoder {
    first: Encoding,
    second: Encoding,
    /// Context of the composition, in order.
    context: Vec<Coord>,
    /// Distinct first-stage block shifts needed, with the context indices
    /// feeding each shifted first-stage window.
    shifts: Vec<(Coord, Vec<usize>)>,
    /// For every intermediate cell the second stage reads (relative to the
    /// first-stage block of the composed position): which shift and which
    /// in-block index it comes from.
    mid_sources: Vec<Vec<(usize, usize)>>,
    /// Intermediate cells per second-stage application, one list per
    /// first-stage block cell.
    out_box: GridBox,
}

impl BlockCoder for ComposedCoder {
    fn encode_block(&self, window: &[State]) -> Vec<State> {
        // First stage: encode every needed shifted block.
        let mid_blocks: Vec<Vec<State>> = self
            .shifts
            .iter()
            .map(|(_, idx)| {
                let w: Vec<State> = idx.iter().map(|&i| window[i]).collect();
                self.first.encode_block(&w).expect("first coder total")
            })
            .collect();
        // Second stage: one application per first-stage block cell.
        let b2 = &self.second.block;
        let first_cells = self.first.block_box().cell_count();
        let mut out = vec![State(0); self.out_box.cell_count()];
        let first_box = self.first.block_box();
        let second_box = self.second.block_box();
        for r1 in 0..first_cells {
            let mid_window: Vec<State> = self.mid_sources[r1]
                .iter()
                .map(|&(shift, cell)| mid_blocks[shift][cell])
                .collect();
            let chunk = self.second.encode_block(&mid_window).expect("second coder total");
            let r1c = first_box.coord_of(r1);
            for (s_idx, &v) in chunk.iter().enumerate() {
                let sc = second_box.coord_of(s_idx);
                let abs: Coord =
                    r1c.iter().zip(b2).zip(&sc).map(|((r, b), s)| r * b + s).collect();
                out[self.out_box.index_of(&abs)] = v;
            }
        }
        let _ = &self.context;
        out
    }
}

/// Composes `first : A -> B` with `second : B -> C` into `A -> C`. Block
/// vectors and slowdowns multiply; the context expands so every
/// second-stage read is covered.
pub fn compose_encodings(
    first: &Encoding,
    second: &Encoding,
) -> Result<Encoding, TransformError> {
    let d = first.dim();
    if second.dim() != d {
        return Err(TransformError::NotComposable(format!(
            "dimension {} vs {}",
            d,
            second.dim()
        )));
    }
    let block: Vec<i64> = first.block.iter().zip(&second.block).map(|(a, b)| a * b).collect();
    let first_box = first.block_box();

    // Intermediate cells read by the second stage, relative to the
    // first-stage block at the composed position: r' + u for r' in the
    // first block box and u in the second context.
    let mut shift_set: BTreeSet<Coord> = BTreeSet::new();
    let mut mid_cells: Vec<Vec<Coord>> = Vec::new();
    for r1 in first_box.iter_coords() {
        let cells: Vec<Coord> = second
            .context
            .iter()
            .map(|u| r1.iter().zip(u).map(|(a, b)| a + b).collect())
            .collect();
        for y in &cells {
            let shift: Coord =
                y.iter().zip(&first.block).map(|(v, b)| v.div_euclid(*b)).collect();
            shift_set.insert(shift);
        }
        mid_cells.push(cells);
    }
    let shift_list: Vec<Coord> = shift_set.into_iter().collect();

    // Composed context: every shifted first-stage context.
    let mut context: Vec<Coord> = Vec::new();
    for w in &shift_list {
        for v in &first.context {
            let c: Coord = w.iter().zip(v).map(|(a, b)| a + b).collect();
            if !context.contains(&c) {
                context.push(c);
            }
        }
    }
    if !context.iter().any(|c| c.iter().all(|&v| v == 0)) {
        context.push(vec![0; d]);
    }
    context.sort();
    context.dedup();

    let shifts: Vec<(Coord, Vec<usize>)> = shift_list
        .iter()
        .map(|w| {
            let idx = first
                .context
                .iter()
                .map(|v| {
                    let c: Coord = w.iter().zip(v).map(|(a, b)| a + b).collect();
                    context.iter().position(|x| x == &c).unwrap()
                })
                .collect();
            (w.clone(), idx)
        })
        .collect();

    let mid_sources: Vec<Vec<(usize, usize)>> = mid_cells
        .iter()
        .map(|cells| {
            cells
                .iter()
                .map(|y| {
                    let shift: Coord =
                        y.iter().zip(&first.block).map(|(v, b)| v.div_euclid(*b)).collect();
                    let rem: Coord =
                        y.iter().zip(&first.block).map(|(v, b)| v.rem_euclid(*b)).collect();
                    let s = shift_list.iter().position(|x| x == &shift).unwrap();
                    (s, first_box.index_of(&rem))
                })
                .collect()
        })
        .collect();

    let out_box = GridBox::new(vec![0; d], block.iter().map(|&b| b - 1).collect());
    let coder = ComposedCoder {
        first: first.clone(),
        second: second.clone(),
        context: context.clone(),
        shifts,
        mid_sources,
        out_box,
    };
    Ok(Encoding::new(
        block,
        context,
        first.slowdown * second.slowdown,
        Coder::Fn(Arc::new(coder)),
        second.target_background,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;
    use crate::simcheck::apply_encoding;

    #[test]
    fn identity_composition_is_identity() {
        let f = fixture("f_min(2)").unwrap();
        let id = Encoding::identity(1, f.rule.state_count(), f.rule.background());
        let composed = compose_encodings(&id, &id).unwrap();
        assert_eq!(composed.block, vec![1]);
        assert_eq!(composed.slowdown, 1);
        let c = crate::core::Configuration::row(
            0,
            &[State(3), State(0), State(1)],
            f.rule.background(),
        );
        assert_eq!(apply_encoding(&composed, &c).unwrap(), c);
    }

    #[test]
    fn composed_application_equals_nested_application() {
        // unary recode composed with the von Neumann wrap of the unary rule
        let f = fixture("f_min(1)").unwrap();
        let (unary, recode) = crate::transform::to_unary(&f.rule, f.order.as_ref().unwrap()).unwrap();
        let enc1 = recode.as_encoding(1, recode.forward(f.rule.background()));
        let red = crate::transform::reduce_to_vn(
            &unary,
            Some(&crate::analysis::StateOrder::chain(unary.state_count())),
            &crate::core::Limits::default(),
        )
        .unwrap();
        let composed = compose_encodings(&enc1, &red.encoding).unwrap();
        let c = crate::core::Configuration::row(0, &[State(2), State(1), State(0)], State(0));
        let nested = apply_encoding(&red.encoding, &apply_encoding(&enc1, &c).unwrap()).unwrap();
        let direct = apply_encoding(&composed, &c).unwrap();
        assert_eq!(nested, direct);
        assert_eq!(composed.slowdown, red.encoding.slowdown);
    }
}
