//! Static and empirical analyzers: freezing verification and inference,
//! change bounds, monotonicity, stability and changing paths.

mod freezing;
mod kchange;
mod monotone;
mod order;
mod paths;

pub use freezing::{check_freezing, infer_order};
pub use kchange::kchange_empirical;
pub use monotone::check_monotone;
pub use order::{order_depth, StateOrder};
pub use paths::{changing_path, is_stable, ChangingPath};

use crate::core::{Coord, CoreError, State};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("order covers {order} states but the rule has {rule}")]
    OrderSizeMismatch { order: u64, rule: u64 },
    #[error("cover relation has a cycle through state {0}")]
    OrderCycle(State),
    #[error("order with {0} states is too large for an explicit closure")]
    OrderTooLarge(u64),
    #[error("rule is not freezing for the given order: {0}")]
    NotFreezing(String),
    #[error("orbit too short: need {need} snapshots, have {have}")]
    OrbitTooShort { need: u64, have: u64 },
    #[error("neighborhood not contained in the symmetric von Neumann set")]
    NotVonNeumann,
    #[error("changed cell {0:?} reverted along the orbit; changing paths need a freezing rule")]
    PathBrokeDown(Coord),
}

/// How a scan covered its pattern space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive { patterns: u64 },
    Sampled { samples: u64, seed: u64 },
}

impl ScanMode {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self, ScanMode::Exhaustive { .. })
    }
}

impl std::fmt::Display for ScanMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanMode::Exhaustive { patterns } => write!(f, "exhaustive, {patterns} patterns"),
            ScanMode::Sampled { samples, seed } => write!(f, "sampled, {samples} samples, seed {seed}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    FreezingViolation,
    MonotonicityViolation,
    EnergyViolation,
}

impl std::fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WitnessKind::FreezingViolation => "freezing-violation",
            WitnessKind::MonotonicityViolation => "monotonicity-violation",
            WitnessKind::EnergyViolation => "energy-violation",
        };
        f.write_str(s)
    }
}

/// A counterexample: one or two local patterns over an explicit window,
/// plus what went wrong at the center. Replaying the patterns through the
/// relevant checker reproduces the failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub window: Vec<Coord>,
    pub patterns: Vec<Vec<State>>,
    pub detail: String,
}

/// Result of a budgeted check.
#[derive(Debug, Clone)]
pub enum CheckOutcome {
    Ok { mode: ScanMode },
    Violation { witness: Witness, mode: ScanMode },
}

impl CheckOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, CheckOutcome::Ok { .. })
    }

    pub fn mode(&self) -> ScanMode {
        match self {
            CheckOutcome::Ok { mode } => *mode,
            CheckOutcome::Violation { mode, .. } => *mode,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            CheckOutcome::Violation { witness, .. } => Some(witness),
            CheckOutcome::Ok { .. } => None,
        }
    }
}

/// Budgeted scan over `q^len` windows: exhaustive when it fits the budget,
/// otherwise uniform seeded sampling. `check` returns a witness for a bad
/// window. The reported violation is the one with the smallest window
/// index, independent of parallel schedule.
pub(crate) fn scan_windows(
    q: u64,
    len: usize,
    limits: &crate::core::Limits,
    check: impl Fn(&[State]) -> Option<Witness> + Sync,
) -> CheckOutcome {
    use rand::{Rng, SeedableRng};
    let total = q.checked_pow(len as u32);
    match total {
        Some(total) if total <= limits.max_exhaustive => {
            let found = crate::parallel::find_first_map(total, |i| {
                let w = crate::core::decode_window(i, q, len);
                check(&w)
            });
            let mode = ScanMode::Exhaustive { patterns: total };
            match found {
                None => CheckOutcome::Ok { mode },
                Some(witness) => CheckOutcome::Violation { witness, mode },
            }
        }
        _ => {
            let samples = limits.scan_samples;
            let seed = limits.seed;
            let found = crate::parallel::find_first_map(samples, |i| {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (i.wrapping_mul(0x9E3779B97F4A7C15)));
                let w: Vec<State> =
                    (0..len).map(|_| State(rng.gen_range(0..q) as u32)).collect();
                check(&w)
            });
            let mode = ScanMode::Sampled { samples, seed };
            match found {
                None => CheckOutcome::Ok { mode },
                Some(witness) => CheckOutcome::Violation { witness, mode },
            }
        }
    }
}
