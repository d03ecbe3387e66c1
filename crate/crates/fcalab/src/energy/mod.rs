//! Explicit local energies: a sliding block map into `{0..k}` that never
//! increases under the rule and strictly drops at every state change.

mod construct;
mod theorem;
mod verify;

pub use construct::{energy_from_nilpotent, energy_from_order};
pub use theorem::{energy_from_simulation, normalize_simulation, simulator_from_energy};
pub use verify::verify_energy;

use crate::core::{Coord, CoreError, PatternTok, State};

#[derive(Debug, thiserror::Error)]
pub enum EnergyError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error("energy value {0} exceeds the bound {1}")]
    ValueOutOfRange(u32, u32),
    #[error("energy row has {got} tokens, neighborhood has {want}")]
    RowArity { got: usize, want: usize },
    #[error("no energy row matches window {0:?}")]
    NoMatchingRow(Vec<State>),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("rule is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("encoding is not change-faithful: a changing cell keeps its encoded value ({0})")]
    NotChangeFaithful(String),
}

/// A sliding block map `λ : Q^{N_e} -> {0..k}` stored as a first-match row
/// list (wildcards allowed), the same shape the text format uses.
#[derive(Debug, Clone)]
pub struct EnergyMap {
    neighborhood: Vec<Coord>,
    k: u32,
    rows: Vec<(Vec<PatternTok>, u32)>,
}

impl EnergyMap {
    pub fn new(
        neighborhood: Vec<Coord>,
        k: u32,
        rows: Vec<(Vec<PatternTok>, u32)>,
    ) -> Result<EnergyMap, EnergyError> {
        for (pat, v) in &rows {
            if pat.len() != neighborhood.len() {
                return Err(EnergyError::RowArity { got: pat.len(), want: neighborhood.len() });
            }
            if *v > k {
                return Err(EnergyError::ValueOutOfRange(*v, k));
            }
        }
        Ok(EnergyMap { neighborhood, k, rows })
    }

    pub fn neighborhood(&self) -> &[Coord] {
        &self.neighborhood
    }

    pub fn bound(&self) -> u32 {
        self.k
    }

    pub fn rows(&self) -> &[(Vec<PatternTok>, u32)] {
        &self.rows
    }

    /// First-match evaluation; `None` when no row matches.
    pub fn eval(&self, window: &[State]) -> Option<u32> {
        debug_assert_eq!(window.len(), self.neighborhood.len());
        self.rows
            .iter()
            .find(|(pat, _)| pat.iter().zip(window).all(|(p, &s)| p.matches(s)))
            .map(|&(_, v)| v)
    }

    /// The energy shipped with the `f_iota` counter: 0 on the absorbing
    /// state, the counter value while no `ι` sits to the right, and the
    /// mirrored value `k - c` while one does. States are `0..=k` with `ι`
    /// as index `k+1`.
    pub fn for_iota_counter(k: u32) -> EnergyMap {
        let iota = State(k + 1);
        let mut rows = Vec::new();
        rows.push((vec![PatternTok::Literal(iota), PatternTok::Any], 0));
        for a in 0..=k {
            rows.push((
                vec![PatternTok::Literal(State(a)), PatternTok::Literal(iota)],
                k - a,
            ));
        }
        for a in 0..=k {
            rows.push((vec![PatternTok::Literal(State(a)), PatternTok::Any], a));
        }
        EnergyMap::new(vec![vec![0], vec![1]], k, rows).expect("counter energy is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iota_energy_table() {
        let e = EnergyMap::for_iota_counter(2);
        let iota = State(3);
        assert_eq!(e.eval(&[iota, State(0)]), Some(0));
        assert_eq!(e.eval(&[State(1), State(2)]), Some(1));
        assert_eq!(e.eval(&[State(1), iota]), Some(1));
        assert_eq!(e.eval(&[State(0), iota]), Some(2));
        assert_eq!(e.eval(&[State(2), State(0)]), Some(2));
    }

    #[test]
    fn arity_and_range_checked() {
        assert!(EnergyMap::new(vec![vec![0]], 1, vec![(vec![], 0)]).is_err());
        assert!(EnergyMap::new(vec![vec![0]], 1, vec![(vec![PatternTok::Any], 2)]).is_err());
    }
}
