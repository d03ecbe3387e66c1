//! Block-encoding machinery: apply encodings, verify simulations, classify
//! context-free versus context-sensitive.

mod verify;

pub use verify::{apply_encoding, apply_encoding_over, verify_simulation, Sampler, SimReport};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::core::{Coord, CoreError, GridBox, State};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("encoding context must contain the zero offset")]
    MissingZeroContext,
    #[error("block components must be positive")]
    BadBlock,
    #[error("coder table has no entry for window {0:?}")]
    MissingCoderEntry(Vec<State>),
    #[error("encoding block size {got:?} does not fit dimension {dim}")]
    BlockDim { got: usize, dim: usize },
}

/// Computes one target block from a source window (context order).
pub trait BlockCoder: Send + Sync {
    /// Returns the block cells in block-box index order (axis 0 fastest).
    fn encode_block(&self, window: &[State]) -> Vec<State>;
}

/// The local coding map: an explicit table or a generated procedure.
#[derive(Clone)]
pub enum Coder {
    Table(BTreeMap<Vec<State>, Vec<State>>),
    Fn(Arc<dyn BlockCoder>),
}

impl std::fmt::Debug for Coder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coder::Table(t) => write!(f, "Table({} entries)", t.len()),
            Coder::Fn(_) => write!(f, "Fn"),
        }
    }
}

/// A context-sensitive block encoding: the target block at `z` is a local
/// function of the source cells `z + C`, scaled by the block vector, run
/// with the stated slowdown.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub block: Vec<i64>,
    pub context: Vec<Coord>,
    pub slowdown: u64,
    pub coder: Coder,
    pub target_background: State,
}

impl Encoding {
    pub fn new(
        block: Vec<i64>,
        context: Vec<Coord>,
        slowdown: u64,
        coder: Coder,
        target_background: State,
    ) -> Encoding {
        assert!(block.iter().all(|&b| b >= 1), "block components must be >= 1");
        assert!(
            context.iter().any(|c| c.iter().all(|&v| v == 0)),
            "context must contain the zero offset"
        );
        assert!(slowdown >= 1);
        Encoding { block, context, slowdown, coder, target_background }
    }

    pub fn dim(&self) -> usize {
        self.block.len()
    }

    /// The identity encoding over `dim` axes.
    pub fn identity(dim: usize, states: u64, background: State) -> Encoding {
        let table: BTreeMap<Vec<State>, Vec<State>> = (0..states)
            .map(|s| (vec![State(s as u32)], vec![State(s as u32)]))
            .collect();
        Encoding::new(vec![1; dim], vec![vec![0; dim]], 1, Coder::Table(table), background)
    }

    /// Encodes one block from its source window.
    pub fn encode_block(&self, window: &[State]) -> Result<Vec<State>, SimError> {
        match &self.coder {
            Coder::Table(t) => t
                .get(window)
                .cloned()
                .ok_or_else(|| SimError::MissingCoderEntry(window.to_vec())),
            Coder::Fn(f) => Ok(f.encode_block(window)),
        }
    }

    /// The box of block cells (relative offsets within one block).
    pub fn block_box(&self) -> GridBox {
        GridBox::new(vec![0; self.dim()], self.block.iter().map(|&b| b - 1).collect())
    }
}

/// True exactly when the context is the singleton `{0}`.
pub fn is_context_free(enc: &Encoding) -> bool {
    enc.context.len() == 1 && enc.context[0].iter().all(|&v| v == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_context_free() {
        let e = Encoding::identity(2, 3, State(0));
        assert!(is_context_free(&e));
    }

    #[test]
    fn wider_context_is_not() {
        let table = BTreeMap::new();
        let e = Encoding::new(
            vec![1],
            vec![vec![0], vec![1]],
            1,
            Coder::Table(table),
            State(0),
        );
        assert!(!is_context_free(&e));
    }
}
