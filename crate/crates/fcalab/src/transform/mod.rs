//! Rule transformations feeding the compiler: unary representation, von
//! Neumann neighborhood reduction and encoding composition.

mod compose;
mod unary;
mod vn;

pub use compose::compose_encodings;
pub use unary::to_unary;
pub use vn::{reduce_to_vn, VnReduction};

use crate::core::{CoreError, State};

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error("rule is not freezing and no order could be inferred")]
    NoFreezingOrder,
    #[error("rule has no materialized state labels; transform the base rule instead")]
    ImplicitStates,
    #[error("encodings are not composable: {0}")]
    NotComposable(String),
}

/// A bijective recoding between two state sets of equal size.
#[derive(Debug, Clone)]
pub struct Recoding {
    forward: Vec<State>,
    backward: Vec<State>,
}

impl Recoding {
    pub fn new(forward: Vec<State>) -> Recoding {
        let mut backward = vec![State(0); forward.len()];
        let mut seen = vec![false; forward.len()];
        for (src, &dst) in forward.iter().enumerate() {
            assert!(dst.idx() < forward.len() && !seen[dst.idx()], "recoding must be a bijection");
            seen[dst.idx()] = true;
            backward[dst.idx()] = State(src as u32);
        }
        Recoding { forward, backward }
    }

    pub fn forward(&self, s: State) -> State {
        self.forward[s.idx()]
    }

    pub fn backward(&self, s: State) -> State {
        self.backward[s.idx()]
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// The recoding as a block-1, slowdown-1 encoding.
    pub fn as_encoding(&self, dim: usize, target_background: State) -> crate::simcheck::Encoding {
        let table: std::collections::BTreeMap<Vec<State>, Vec<State>> = (0..self.len())
            .map(|s| (vec![State(s as u32)], vec![self.forward(State(s as u32))]))
            .collect();
        crate::simcheck::Encoding::new(
            vec![1; dim],
            vec![vec![0; dim]],
            1,
            crate::simcheck::Coder::Table(table),
            target_background,
        )
    }
}
