//! The fixed universal freezing rules and the circuit compiler onto the
//! 5-state wire alphabet: neighborhood matchers, macro-cells, routing with
//! crossings, delay equalization, encoding and decoding.

mod compile;
mod encode;
mod grid;
mod macrocell;
mod matcher;
mod tile;
mod u5;
mod validate;

pub use compile::{compile_pipeline, compile_u5, compile_u5_with_factor, UniversalCompilation};
pub use encode::{decode, encode, settling_time, target_encoding, CompiledCoder};
pub use grid::{CellSpec, GateKind, NetValue, Pt};
pub use macrocell::{build_macrocell, MacroCellPlan, MatcherPlan, RowPlan};
pub use matcher::{build_matcher, trace_matcher, MatcherFootprint};
pub use tile::{CompiledTarget, TileTemplate};
pub use u5::{life3d2_rule, u5_rule, u5_settle_rule, U5};

#[derive(Debug, thiserror::Error)]
pub enum UniversalError {
    #[error(transparent)]
    Core(#[from] crate::core::CoreError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error(transparent)]
    Transform(#[from] crate::transform::TransformError),
    #[error("compilation needs a 2-dimensional rule, got dimension {0}")]
    NotPlanar(usize),
    #[error("rule neighborhood is not contained in the symmetric von Neumann set")]
    NotVonNeumann,
    #[error("rule states are not unary words over the chain order")]
    NotUnary,
    #[error("rule is not freezing for the unary chain order")]
    NotFreezing,
    #[error("layout failure: {0}")]
    Layout(String),
    #[error("configuration is not aligned to the target blocks")]
    Misaligned,
}
