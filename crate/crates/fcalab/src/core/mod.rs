//! Rule and configuration model, the exact stepping engine, orbits,
//! grouping and the shipped fixture rules.

mod config;
mod engine;
mod fixtures;
mod geometry;
mod group;
mod rule;

pub use config::Configuration;
pub use engine::{fixpoint, iterate, step, step_seq, Engine, Orbit};
pub use fixtures::{fixture, fixture_names, Fixture};
pub use geometry::{dilate_box, minkowski_sum, neighborhood_hull, von_neumann, Coord, GridBox};
pub use group::{group, unpack_block};
pub use rule::{
    decode_window, CoreError, LocalRule, PatternTok, RuleKernel, RuleTable, State, Transition,
};

/// Caps for derived-rule construction and exhaustive scans.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Largest admissible state count for a derived rule.
    pub max_states: u64,
    /// Largest pattern space tabulated into an explicit transition list.
    pub max_table_patterns: u64,
    /// Largest pattern space scanned exhaustively by checkers.
    pub max_exhaustive: u64,
    /// Sample count used when a scan falls back to random sampling.
    pub scan_samples: u64,
    /// Seed for sampled scans.
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1 << 30,
            max_table_patterns: 2_000_000,
            max_exhaustive: 10_000_000,
            scan_samples: 200_000,
            seed: 0xFCA1AB,
        }
    }
}

impl Limits {
    /// Same limits with a different exhaustiveness budget.
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.max_exhaustive = budget;
        self
    }
}
