//! Rule tables: states, neighborhoods and local transition functions.

use std::fmt;
use std::sync::Arc;

use super::geometry::Coord;

/// Index into a rule's state list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub u32);

impl State {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("dimension mismatch: rule is {rule}-dimensional, argument is {other}-dimensional")]
    DimensionMismatch { rule: usize, other: usize },
    #[error("unknown state label `{0}`")]
    UnknownLabel(String),
    #[error("state {0} out of range for rule with {1} states")]
    StateOutOfRange(u32, u64),
    #[error("state count {0} exceeds the configured cap {1}")]
    StateCountExceeded(u64, u64),
    #[error("pattern space {0} exceeds the configured cap {1}")]
    PatternSpaceExceeded(u64, u64),
    #[error("rule `{0}` is not freezing: {1}")]
    NotFreezing(String, String),
    #[error("unknown fixture name `{0}`")]
    UnknownFixture(String),
    #[error("{0}")]
    Invalid(String),
}

/// One entry of a transition pattern: a literal state or the wildcard `*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternTok {
    Literal(State),
    Any,
}

impl PatternTok {
    pub fn matches(self, s: State) -> bool {
        match self {
            PatternTok::Literal(l) => l == s,
            PatternTok::Any => true,
        }
    }
}

/// A transition: per-offset matchers and the produced state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub pattern: Vec<PatternTok>,
    pub output: State,
}

/// A computed local function for derived rules whose state space is too
/// large to tabulate (products from the von Neumann reduction, grouped
/// blocks past the table cap).
pub trait RuleKernel: Send + Sync {
    /// Applies the local function to a window given in neighborhood order.
    fn apply(&self, window: &[State]) -> State;
    /// Number of states of the rule this kernel belongs to.
    fn state_count(&self) -> u64;
    /// Label for a state, built on demand.
    fn label(&self, s: State) -> String;
}

/// The local function: an ordered first-match transition list with
/// default-unchanged semantics, or a computed kernel.
#[derive(Clone)]
pub enum LocalRule {
    Table(Vec<Transition>),
    Computed(Arc<dyn RuleKernel>),
}

impl fmt::Debug for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalRule::Table(t) => write!(f, "Table({} transitions)", t.len()),
            LocalRule::Computed(_) => write!(f, "Computed"),
        }
    }
}

/// A d-dimensional cellular automaton rule.
///
/// Invariants: the zero offset is in the neighborhood, every transition
/// pattern has exactly one matcher per offset, the first matching transition
/// applies and unmatched windows leave the cell unchanged, and the
/// background state is quiescent.
#[derive(Debug, Clone)]
pub struct RuleTable {
    pub name: String,
    dim: usize,
    labels: StateLabels,
    background: State,
    neighborhood: Vec<Coord>,
    center: usize,
    local: LocalRule,
}

/// State labels: explicit strings, or an implicit product space whose
/// labels are assembled on demand from the kernel.
#[derive(Debug, Clone)]
enum StateLabels {
    Explicit(Vec<String>),
    Implicit(u64),
}

impl RuleTable {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        labels: Vec<String>,
        background: &str,
        neighborhood: Vec<Coord>,
        transitions: Vec<Transition>,
    ) -> Result<RuleTable, CoreError> {
        let name = name.into();
        if labels.is_empty() {
            return Err(CoreError::Invalid(format!("rule `{name}` has no states")));
        }
        {
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != labels.len() {
                return Err(CoreError::Invalid(format!("rule `{name}` has duplicate state labels")));
            }
        }
        let bg = labels
            .iter()
            .position(|l| l == background)
            .map(|i| State(i as u32))
            .ok_or_else(|| CoreError::UnknownLabel(background.to_string()))?;
        let center = neighborhood
            .iter()
            .position(|n| n.iter().all(|&v| v == 0))
            .ok_or_else(|| CoreError::Invalid(format!("rule `{name}` lacks the zero offset")))?;
        if neighborhood.iter().any(|n| n.len() != dim) {
            return Err(CoreError::DimensionMismatch { rule: dim, other: 0 });
        }
        {
            let mut sorted = neighborhood.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != neighborhood.len() {
                return Err(CoreError::Invalid(format!("rule `{name}` has duplicate offsets")));
            }
        }
        for t in &transitions {
            if t.pattern.len() != neighborhood.len() {
                return Err(CoreError::Invalid(format!(
                    "rule `{name}`: transition pattern length {} != neighborhood size {}",
                    t.pattern.len(),
                    neighborhood.len()
                )));
            }
            if t.output.idx() >= labels.len() {
                return Err(CoreError::StateOutOfRange(t.output.0, labels.len() as u64));
            }
        }
        let rule = RuleTable {
            name,
            dim,
            labels: StateLabels::Explicit(labels),
            background: bg,
            neighborhood,
            center,
            local: LocalRule::Table(transitions),
        };
        rule.check_quiescent()?;
        Ok(rule)
    }

    /// A rule backed by a computed kernel (product state spaces).
    pub fn with_kernel(
        name: impl Into<String>,
        dim: usize,
        kernel: Arc<dyn RuleKernel>,
        background: State,
        neighborhood: Vec<Coord>,
    ) -> Result<RuleTable, CoreError> {
        let name = name.into();
        let center = neighborhood
            .iter()
            .position(|n| n.iter().all(|&v| v == 0))
            .ok_or_else(|| CoreError::Invalid(format!("rule `{name}` lacks the zero offset")))?;
        let count = kernel.state_count();
        if u64::from(background.0) >= count {
            return Err(CoreError::StateOutOfRange(background.0, count));
        }
        let rule = RuleTable {
            name,
            dim,
            labels: StateLabels::Implicit(count),
            background,
            neighborhood,
            center,
            local: LocalRule::Computed(kernel),
        };
        rule.check_quiescent()?;
        Ok(rule)
    }

    fn check_quiescent(&self) -> Result<(), CoreError> {
        let window = vec![self.background; self.neighborhood.len()];
        if self.apply(&window) != self.background {
            return Err(CoreError::Invalid(format!(
                "rule `{}`: background `{}` is not quiescent",
                self.name,
                self.label(self.background)
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state_count(&self) -> u64 {
        match &self.labels {
            StateLabels::Explicit(l) => l.len() as u64,
            StateLabels::Implicit(n) => *n,
        }
    }

    /// Explicit labels, when the state space is materialized.
    pub fn explicit_labels(&self) -> Option<&[String]> {
        match &self.labels {
            StateLabels::Explicit(l) => Some(l),
            StateLabels::Implicit(_) => None,
        }
    }

    pub fn label(&self, s: State) -> String {
        match &self.labels {
            StateLabels::Explicit(l) => l[s.idx()].clone(),
            StateLabels::Implicit(_) => match &self.local {
                LocalRule::Computed(k) => k.label(s),
                LocalRule::Table(_) => s.to_string(),
            },
        }
    }

    pub fn state_of(&self, label: &str) -> Result<State, CoreError> {
        match &self.labels {
            StateLabels::Explicit(l) => l
                .iter()
                .position(|x| x == label)
                .map(|i| State(i as u32))
                .ok_or_else(|| CoreError::UnknownLabel(label.to_string())),
            StateLabels::Implicit(_) => Err(CoreError::UnknownLabel(label.to_string())),
        }
    }

    pub fn background(&self) -> State {
        self.background
    }

    pub fn neighborhood(&self) -> &[Coord] {
        &self.neighborhood
    }

    /// Position of the zero offset within the neighborhood list.
    pub fn center_index(&self) -> usize {
        self.center
    }

    pub fn local(&self) -> &LocalRule {
        &self.local
    }

    /// Applies the local function to a window in neighborhood order.
    pub fn apply(&self, window: &[State]) -> State {
        debug_assert_eq!(window.len(), self.neighborhood.len());
        match &self.local {
            LocalRule::Table(transitions) => {
                for t in transitions {
                    if t.pattern.iter().zip(window).all(|(p, &s)| p.matches(s)) {
                        return t.output;
                    }
                }
                window[self.center]
            }
            LocalRule::Computed(k) => k.apply(window),
        }
    }

    /// Dense evaluator over all `|Q|^|N|` windows, when that fits `cap`.
    pub fn dense_table(&self, cap: u64) -> Option<Vec<State>> {
        let q = self.state_count();
        let n = self.neighborhood.len() as u32;
        let total = q.checked_pow(n)?;
        if total > cap {
            return None;
        }
        let mut window = vec![State(0); n as usize];
        let table = (0..total)
            .map(|mut i| {
                for slot in window.iter_mut() {
                    *slot = State((i % q) as u32);
                    i /= q;
                }
                self.apply(&window)
            })
            .collect();
        Some(table)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> RuleTable {
        self.name = name.into();
        self
    }
}

/// Decodes `i` into a window over `Q = 0..q`, slot 0 fastest.
pub fn decode_window(mut i: u64, q: u64, len: usize) -> Vec<State> {
    let mut w = Vec::with_capacity(len);
    for _ in 0..len {
        w.push(State((i % q) as u32));
        i /= q;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> RuleTable {
        // 1D: a 1 with a 0 on its right becomes 0.
        RuleTable::new(
            "toy",
            1,
            vec!["0".into(), "1".into()],
            "0",
            vec![vec![0], vec![1]],
            vec![Transition {
                pattern: vec![PatternTok::Literal(State(1)), PatternTok::Literal(State(0))],
                output: State(0),
            }],
        )
        .unwrap()
    }

    #[test]
    fn first_match_and_default() {
        let r = toy();
        assert_eq!(r.apply(&[State(1), State(0)]), State(0));
        assert_eq!(r.apply(&[State(1), State(1)]), State(1));
        assert_eq!(r.apply(&[State(0), State(1)]), State(0));
    }

    #[test]
    fn nonquiescent_background_rejected() {
        let err = RuleTable::new(
            "bad",
            1,
            vec!["a".into(), "b".into()],
            "a",
            vec![vec![0]],
            vec![Transition { pattern: vec![PatternTok::Literal(State(0))], output: State(1) }],
        );
        assert!(err.is_err());
    }

    #[test]
    fn dense_table_matches_apply() {
        let r = toy();
        let t = r.dense_table(1 << 20).unwrap();
        for i in 0..4u64 {
            let w = decode_window(i, 2, 2);
            assert_eq!(t[i as usize], r.apply(&w));
        }
    }
}
