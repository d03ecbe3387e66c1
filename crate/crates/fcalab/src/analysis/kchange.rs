//! Empirical change-count bounds over random orbits.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{Configuration, Coord, CoreError, Engine, GridBox, RuleTable, State};
use crate::parallel;

/// Maximum number of state changes of any cell over `horizon` steps across
/// `samples` uniform random configurations on a box of the given extents.
/// A lower bound on the true change bound; deterministic in the seed.
pub fn kchange_empirical(
    rule: &RuleTable,
    samples: u64,
    extents: &[i64],
    horizon: u64,
    seed: u64,
) -> Result<u32, CoreError> {
    if extents.len() != rule.dim() {
        return Err(CoreError::DimensionMismatch { rule: rule.dim(), other: extents.len() });
    }
    if extents.iter().any(|&e| e < 1) {
        return Err(CoreError::Invalid("box extents must be positive".into()));
    }
    let q = rule.state_count();
    let bbox = GridBox::new(vec![0; extents.len()], extents.iter().map(|&e| e - 1).collect());
    let max = parallel::max_map(samples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0xA076_1D64_78BD_642F));
        let cells: Vec<State> =
            (0..bbox.cell_count()).map(|_| State(rng.gen_range(0..q) as u32)).collect();
        let config = Configuration::from_cells(bbox.clone(), rule.background(), cells);
        max_changes_in_orbit(rule, &config, horizon)
    });
    Ok(max)
}

fn max_changes_in_orbit(rule: &RuleTable, config: &Configuration, horizon: u64) -> u32 {
    let mut engine = Engine::new(rule, config).expect("compatible sample");
    let mut counts: HashMap<Coord, u32> = HashMap::new();
    let mut max = 0u32;
    for _ in 0..horizon {
        if engine.advance() == 0 {
            break;
        }
        for z in engine.last_changes() {
            let c = counts.entry(z).or_insert(0);
            *c += 1;
            max = max.max(*c);
        }
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;

    #[test]
    fn identity_rule_never_changes() {
        let rule = RuleTable::new("id", 1, vec!["a".into(), "b".into()], "a", vec![vec![0]], vec![])
            .unwrap();
        assert_eq!(kchange_empirical(&rule, 20, &[16], 10, 7).unwrap(), 0);
    }

    #[test]
    fn min_rule_changes_at_most_depth() {
        let f = fixture("f_min(2)").unwrap();
        let k = kchange_empirical(&f.rule, 30, &[12], 24, 11).unwrap();
        assert!(k <= f.order.unwrap().depth());
        assert!(k >= 1);
    }

    #[test]
    fn arrows_at_most_two_changes() {
        let f = fixture("f_arrows").unwrap();
        let k = kchange_empirical(&f.rule, 40, &[10, 10], 32, 3).unwrap();
        assert!(k <= 2, "f_arrows is 2-change, saw {k}");
    }
}
