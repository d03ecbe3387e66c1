//! Stability and changing paths along orbits.

use crate::core::{Configuration, Coord, Orbit, RuleTable};

use super::AnalysisError;

/// True when one step leaves the cell at `z` unchanged.
pub fn is_stable(rule: &RuleTable, config: &Configuration, z: &[i64]) -> Result<bool, AnalysisError> {
    if z.len() != rule.dim() {
        return Err(crate::core::CoreError::DimensionMismatch { rule: rule.dim(), other: z.len() }.into());
    }
    let mut window = Vec::with_capacity(rule.neighborhood().len());
    let mut at = vec![0i64; z.len()];
    for n in rule.neighborhood() {
        for a in 0..z.len() {
            at[a] = z[a] + n[a];
        }
        window.push(config.get(&at));
    }
    Ok(rule.apply(&window) == config.get(z))
}

/// A chain of von Neumann adjacent cells linking a changed cell back to a
/// cell that was already unstable at time zero. `cells[0]` is the unstable
/// end, the last entry is the queried cell; every cell on the path differs
/// between the initial configuration and the horizon configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangingPath {
    pub cells: Vec<Coord>,
    pub t: u64,
}

impl ChangingPath {
    /// Re-checks all path invariants against an orbit.
    pub fn validate(&self, orbit: &Orbit, z: &[i64]) -> Result<(), String> {
        if self.cells.is_empty() {
            return Err("empty path".into());
        }
        if self.cells.last().unwrap().as_slice() != z {
            return Err("path does not end at the queried cell".into());
        }
        if self.cells.len() as u64 > self.t + 1 {
            return Err(format!("path has {} cells for horizon {}", self.cells.len(), self.t));
        }
        let c0 = &orbit.snapshots[0];
        let ct = &orbit.snapshots[self.t as usize];
        for pair in self.cells.windows(2) {
            let dist: i64 = pair[0].iter().zip(&pair[1]).map(|(a, b)| (a - b).abs()).sum();
            if dist != 1 {
                return Err(format!("cells {:?} and {:?} are not adjacent", pair[0], pair[1]));
            }
        }
        for cell in &self.cells {
            if c0.get(cell) == ct.get(cell) {
                return Err(format!("cell {cell:?} did not change over the horizon"));
            }
        }
        match is_stable(&orbit.rule, c0, &self.cells[0]) {
            Ok(false) => Ok(()),
            Ok(true) => Err(format!("path head {:?} is stable initially", self.cells[0])),
            Err(e) => Err(e.to_string()),
        }
    }
}

/// Builds a changing path for a cell that differs between `c` and `F^t(c)`:
/// walk to the neighbor that changed earliest (ties broken by the
/// lexicographically smallest offset) until reaching a cell unstable in
/// `c`. Returns `None` exactly when the cell did not change by time `t`.
pub fn changing_path(
    orbit: &Orbit,
    z: &[i64],
    t: u64,
) -> Result<Option<ChangingPath>, AnalysisError> {
    let d = orbit.rule.dim();
    if orbit.horizon() < t {
        return Err(AnalysisError::OrbitTooShort { need: t + 1, have: orbit.horizon() + 1 });
    }
    let vn_ok = orbit.rule.neighborhood().iter().all(|n| n.iter().map(|v| v.abs()).sum::<i64>() <= 1);
    if !vn_ok {
        return Err(AnalysisError::NotVonNeumann);
    }
    let c0 = &orbit.snapshots[0];
    if c0.get(z) == orbit.snapshots[t as usize].get(z) {
        return Ok(None);
    }
    // Proper symmetric von Neumann offsets in lexicographic order.
    let mut offsets: Vec<Coord> = Vec::new();
    for axis in 0..d {
        for s in [-1i64, 1] {
            let mut v = vec![0i64; d];
            v[axis] = s;
            offsets.push(v);
        }
    }
    offsets.sort();

    let first_change = |cell: &[i64], within: u64| -> Option<u64> {
        (1..=within).find(|&tt| orbit.snapshots[tt as usize].get(cell) != c0.get(cell))
    };

    let mut rev = Vec::new();
    let mut cur: Coord = z.to_vec();
    let mut budget = t;
    loop {
        rev.push(cur.clone());
        if c0.get(&cur) == orbit.snapshots[t as usize].get(&cur) {
            return Err(AnalysisError::PathBrokeDown(cur));
        }
        let tc = first_change(&cur, budget).ok_or(AnalysisError::PathBrokeDown(cur.clone()))?;
        if tc == 1 {
            break;
        }
        // Some neighbor changed before the cell's own first change.
        let mut best: Option<(u64, &Coord)> = None;
        let mut candidates: Vec<(u64, Coord)> = Vec::new();
        for off in &offsets {
            let nb: Coord = cur.iter().zip(off).map(|(a, b)| a + b).collect();
            if let Some(tn) = first_change(&nb, tc - 1) {
                candidates.push((tn, nb));
            }
        }
        candidates.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some((_, nb)) = candidates.first() {
            best = Some((0, nb));
            cur = nb.clone();
            budget -= 1;
        }
        if best.is_none() {
            return Err(AnalysisError::PathBrokeDown(cur));
        }
    }
    rev.reverse();
    Ok(Some(ChangingPath { cells: rev, t }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{fixture, Configuration, GridBox, State};

    #[test]
    fn stable_background_cell() {
        let f = fixture("f_arrows").unwrap();
        let c = Configuration::filled(GridBox::new(vec![0, 0], vec![3, 3]), State(0));
        assert!(is_stable(&f.rule, &c, &[10, 10]).unwrap());
    }

    #[test]
    fn arrow_above_makes_unstable() {
        let f = fixture("f_arrows").unwrap();
        let down = f.rule.state_of("↓").unwrap();
        let mut c = Configuration::filled(GridBox::new(vec![0, 0], vec![0, 1]), State(0));
        c.set(&[0, 1], down);
        assert!(!is_stable(&f.rule, &c, &[0, 0]).unwrap());
        // an isolated left arrow with background east is stuck
        let left = f.rule.state_of("←").unwrap();
        let mut c2 = Configuration::filled(GridBox::new(vec![0, 0], vec![1, 0]), State(0));
        c2.set(&[0, 0], left);
        assert!(is_stable(&f.rule, &c2, &[0, 0]).unwrap());
    }

    #[test]
    fn unchanged_cell_has_no_path() {
        let f = fixture("f_arrows").unwrap();
        let c = Configuration::filled(GridBox::new(vec![0, 0], vec![2, 2]), State(0));
        let orbit = Orbit::run(&f.rule, &c, 3).unwrap();
        assert!(changing_path(&orbit, &[1, 1], 3).unwrap().is_none());
    }

    #[test]
    fn falling_arrow_yields_vertical_path() {
        let f = fixture("f_arrows").unwrap();
        let down = f.rule.state_of("↓").unwrap();
        let mut c = Configuration::filled(GridBox::new(vec![0, -1], vec![0, 3]), State(0));
        c.set(&[0, 3], down);
        let orbit = Orbit::run(&f.rule, &c, 3).unwrap();
        let path = changing_path(&orbit, &[0, 0], 3).unwrap().expect("cell changed");
        path.validate(&orbit, &[0, 0]).unwrap();
        assert_eq!(path.cells.len(), 3);
        assert_eq!(path.cells[0], vec![0, 2]);
        assert_eq!(path.cells[2], vec![0, 0]);
    }

    #[test]
    fn unstable_cell_is_its_own_path() {
        let f = fixture("f_arrows").unwrap();
        let down = f.rule.state_of("↓").unwrap();
        let mut c = Configuration::filled(GridBox::new(vec![0, 0], vec![0, 1]), State(0));
        c.set(&[0, 1], down);
        let orbit = Orbit::run(&f.rule, &c, 1).unwrap();
        let path = changing_path(&orbit, &[0, 0], 1).unwrap().unwrap();
        assert_eq!(path.cells, vec![vec![0, 0]]);
    }
}
