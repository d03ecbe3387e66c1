//! A laboratory for freezing cellular automata.
//!
//! A freezing CA die-hard fact: under a fixed partial order on states, every
//! transition weakly decreases the cell state, so each cell changes only a
//! bounded number of times. This crate provides:
//!
//! * an exact rule/configuration model with a stepping engine ([`core`]),
//! * static and empirical analyzers: freezing verification, order inference,
//!   change bounds, monotonicity, changing paths ([`analysis`]),
//! * explicit local energies: verification, construction and the two-way
//!   bridge between energies and freezing simulators ([`energy`]),
//! * rule transformations: unary representation, von Neumann neighborhood
//!   reduction, encoding composition ([`transform`]),
//! * simulation checking machinery for block encodings ([`simcheck`]),
//! * the fixed 5-state universal freezing rule and a compiler that lays out
//!   arbitrary freezing rules as circuits over it ([`universal`]),
//! * text formats for rules, configurations, energies, encodings and
//!   compiled layouts ([`format`]).
//!
//! Heavy scans (pattern enumeration, sample batches, cell sweeps) go through
//! [`parallel`], which uses rayon when the `parallel` feature is enabled and
//! plain iterators otherwise. Results are schedule-independent either way.

pub mod analysis;
pub mod core;
pub mod energy;
pub mod format;
pub mod parallel;
pub mod simcheck;
pub mod transform;
pub mod universal;

pub use crate::core::{Configuration, GridBox, RuleTable, State};
pub use analysis::StateOrder;
