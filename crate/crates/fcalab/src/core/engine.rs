//! Exact stepping: one-shot steps, incremental evolution, orbits and
//! clamped fixpoints.

use crate::parallel;

use super::config::Configuration;
use super::geometry::{dilate_box, Coord, GridBox};
use super::rule::{CoreError, State};
use super::RuleTable;

/// Applies one synchronous step. The output box is the input box grown by
/// the reflected neighborhood hull, so cells that change just outside the
/// input box are captured; the background stays quiescent.
pub fn step(rule: &RuleTable, config: &Configuration) -> Result<Configuration, CoreError> {
    step_impl(rule, config, true)
}

/// Sequential twin of [`step`], independent of the `parallel` feature.
pub fn step_seq(rule: &RuleTable, config: &Configuration) -> Result<Configuration, CoreError> {
    step_impl(rule, config, false)
}

fn step_impl(
    rule: &RuleTable,
    config: &Configuration,
    par: bool,
) -> Result<Configuration, CoreError> {
    check_compat(rule, config)?;
    let out_box = dilate_box(config.bbox(), rule.neighborhood());
    let row_len = out_box.extent(0);
    let mut raw = vec![0u32; out_box.cell_count()];
    let neigh = rule.neighborhood();
    let dim = rule.dim();
    let fill_row = |r: usize, row: &mut [u32]| {
        let mut z = out_box.coord_of(r * row_len);
        let mut window = vec![State(0); neigh.len()];
        let mut at = vec![0i64; dim];
        for slot in row.iter_mut() {
            for (w, n) in window.iter_mut().zip(neigh) {
                for a in 0..dim {
                    at[a] = z[a] + n[a];
                }
                *w = config.get(&at);
            }
            *slot = rule.apply(&window).0;
            z[0] += 1;
        }
    };
    if par {
        parallel::fill_rows(&mut raw, row_len, fill_row);
    } else {
        parallel::fill_rows_seq(&mut raw, row_len, fill_row);
    }
    let cells = raw.into_iter().map(State).collect();
    Ok(Configuration::from_cells(out_box, config.background(), cells))
}

fn check_compat(rule: &RuleTable, config: &Configuration) -> Result<(), CoreError> {
    if rule.dim() != config.dim() {
        return Err(CoreError::DimensionMismatch { rule: rule.dim(), other: config.dim() });
    }
    let q = rule.state_count();
    if u64::from(config.background().0) >= q {
        return Err(CoreError::StateOutOfRange(config.background().0, q));
    }
    if let Some(&s) = config.cells().iter().find(|s| u64::from(s.0) >= q) {
        return Err(CoreError::StateOutOfRange(s.0, q));
    }
    Ok(())
}

/// `t`-fold composition of [`step`].
pub fn iterate(rule: &RuleTable, config: &Configuration, t: u64) -> Result<Configuration, CoreError> {
    let mut engine = Engine::new(rule, config)?;
    engine.run(t);
    Ok(engine.snapshot())
}

/// Runs the rule to a fixed point under a clamped boundary: cells outside
/// `max_box` read as background and are never updated. Returns the fixed
/// configuration and the first time it is reached. Refuses rules that do
/// not settle within the freezing bound `|max_box| * depth`.
pub fn fixpoint(
    rule: &RuleTable,
    order: &crate::analysis::StateOrder,
    config: &Configuration,
    max_box: &GridBox,
) -> Result<(Configuration, u64), CoreError> {
    check_compat(rule, config)?;
    if max_box.dim() != rule.dim() {
        return Err(CoreError::DimensionMismatch { rule: rule.dim(), other: max_box.dim() });
    }
    let bound = max_box.cell_count() as u64 * u64::from(order.depth());
    let clamped = config.reboxed(max_box.clone());
    let mut engine = Engine::new_clamped(rule, &clamped, max_box.clone())?;
    let mut t = 0u64;
    while engine.advance() > 0 {
        t += 1;
        if t > bound {
            return Err(CoreError::NotFreezing(
                rule.name.clone(),
                format!("no fixed point within the freezing bound {bound}"),
            ));
        }
    }
    Ok((engine.snapshot(), t))
}

/// A stored orbit `c, F(c), ..., F^t(c)` over background padding.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub rule: RuleTable,
    pub snapshots: Vec<Configuration>,
}

impl Orbit {
    pub fn run(rule: &RuleTable, config: &Configuration, t: u64) -> Result<Orbit, CoreError> {
        let mut engine = Engine::new(rule, config)?;
        let mut snapshots = Vec::with_capacity(t as usize + 1);
        snapshots.push(engine.snapshot());
        for _ in 0..t {
            engine.advance();
            snapshots.push(engine.snapshot());
        }
        Ok(Orbit { rule: rule.clone(), snapshots })
    }

    pub fn horizon(&self) -> u64 {
        (self.snapshots.len() - 1) as u64
    }
}

enum Eval {
    Dense { q: u64, table: Vec<State> },
    Direct,
}

/// Incremental engine: between steps it re-evaluates only cells whose
/// window could have changed, which by locality gives results identical to
/// repeated full [`step`]s. The cell buffer grows on demand so changes that
/// spill past the current box are captured, unless a clamp box is set.
pub struct Engine {
    rule: RuleTable,
    eval: Eval,
    bbox: GridBox,
    cells: Vec<State>,
    background: State,
    dirty: Vec<usize>,
    stamp_of: Vec<u64>,
    stamp: u64,
    /// Per-axis window width, governs buffer margins.
    width: Vec<i64>,
    clamp: Option<GridBox>,
    changes: Vec<usize>,
    time: u64,
}

const DENSE_CAP: u64 = 1 << 21;

impl Engine {
    pub fn new(rule: &RuleTable, config: &Configuration) -> Result<Engine, CoreError> {
        Engine::build(rule, config, None)
    }

    pub fn new_clamped(
        rule: &RuleTable,
        config: &Configuration,
        clamp: GridBox,
    ) -> Result<Engine, CoreError> {
        Engine::build(rule, &config.reboxed(clamp.clone()), Some(clamp))
    }

    fn build(
        rule: &RuleTable,
        config: &Configuration,
        clamp: Option<GridBox>,
    ) -> Result<Engine, CoreError> {
        check_compat(rule, config)?;
        let dim = rule.dim();
        let mut width = vec![0i64; dim];
        for a in 0..dim {
            let lo = rule.neighborhood().iter().map(|n| n[a]).min().unwrap();
            let hi = rule.neighborhood().iter().map(|n| n[a]).max().unwrap();
            width[a] = hi - lo;
        }
        let bbox = match &clamp {
            Some(c) => c.clone(),
            None => {
                let margin = width.iter().copied().max().unwrap_or(0) * 2 + 2;
                config.bbox().grown(margin)
            }
        };
        let base = config.reboxed(bbox.clone());
        let eval = match rule.dense_table(DENSE_CAP) {
            Some(table) => Eval::Dense { q: rule.state_count(), table },
            None => Eval::Direct,
        };
        let n = base.cells().len();
        let mut engine = Engine {
            rule: rule.clone(),
            eval,
            bbox,
            cells: base.cells().to_vec(),
            background: config.background(),
            dirty: Vec::new(),
            stamp_of: vec![0; n],
            stamp: 0,
            width,
            clamp,
            changes: Vec::new(),
            time: 0,
        };
        engine.seed_dirty(config.bbox());
        Ok(engine)
    }

    fn seed_dirty(&mut self, support_box: &GridBox) {
        let active = dilate_box(support_box, self.rule.neighborhood());
        self.stamp += 1;
        for z in active.iter_coords() {
            if self.in_scope(&z) {
                let i = self.bbox.index_of(&z);
                if self.stamp_of[i] != self.stamp {
                    self.stamp_of[i] = self.stamp;
                    self.dirty.push(i);
                }
            }
        }
    }

    fn in_scope(&self, z: &[i64]) -> bool {
        self.bbox.contains(z) && self.clamp.as_ref().map_or(true, |c| c.contains(z))
    }

    fn read(&self, z: &[i64]) -> State {
        if let Some(c) = &self.clamp {
            if !c.contains(z) {
                return self.background;
            }
        }
        if self.bbox.contains(z) {
            self.cells[self.bbox.index_of(z)]
        } else {
            self.background
        }
    }

    fn evaluate(&self, idx: usize) -> State {
        let z = self.bbox.coord_of(idx);
        let neigh = self.rule.neighborhood();
        let dim = z.len();
        let mut at = vec![0i64; dim];
        match &self.eval {
            Eval::Dense { q, table } => {
                let mut key = 0u64;
                let mut mul = 1u64;
                for n in neigh {
                    for a in 0..dim {
                        at[a] = z[a] + n[a];
                    }
                    key += u64::from(self.read(&at).0) * mul;
                    mul *= q;
                }
                table[key as usize]
            }
            Eval::Direct => {
                let mut window = vec![State(0); neigh.len()];
                for (w, n) in window.iter_mut().zip(neigh) {
                    for a in 0..dim {
                        at[a] = z[a] + n[a];
                    }
                    *w = self.read(&at);
                }
                self.rule.apply(&window)
            }
        }
    }

    /// Runs one step; returns the number of cells that changed.
    pub fn advance(&mut self) -> usize {
        let dirty = std::mem::take(&mut self.dirty);
        let updates: Vec<(usize, State)> = {
            let this = &*self;
            let mut ups: Vec<(usize, State)> =
                parallel::map_collect(dirty.len(), |k| {
                    let idx = dirty[k];
                    (idx, this.evaluate(idx))
                })
                .into_iter()
                .filter(|&(idx, s)| self.cells[idx] != s)
                .collect();
            ups.sort_unstable_by_key(|&(idx, _)| idx);
            ups
        };
        self.changes.clear();
        let mut needs_growth = false;
        for &(idx, s) in &updates {
            self.cells[idx] = s;
            self.changes.push(idx);
            if self.clamp.is_none() && self.near_edge(idx) {
                needs_growth = true;
            }
        }
        if needs_growth {
            self.grow();
        }
        // Next round: everything whose window sees a change.
        self.stamp += 1;
        let changed: Vec<Coord> = self.changes.iter().map(|&i| self.bbox.coord_of(i)).collect();
        let neigh: Vec<Coord> = self.rule.neighborhood().to_vec();
        let dim = self.bbox.dim();
        let mut at = vec![0i64; dim];
        for z in &changed {
            for n in &neigh {
                for a in 0..dim {
                    at[a] = z[a] - n[a];
                }
                if self.in_scope(&at) {
                    let i = self.bbox.index_of(&at);
                    if self.stamp_of[i] != self.stamp {
                        self.stamp_of[i] = self.stamp;
                        self.dirty.push(i);
                    }
                }
            }
        }
        self.time += 1;
        updates.len()
    }

    fn near_edge(&self, idx: usize) -> bool {
        let z = self.bbox.coord_of(idx);
        (0..z.len()).any(|a| {
            let m = self.width[a] + 1;
            z[a] - self.bbox.lo[a] < m || self.bbox.hi[a] - z[a] < m
        })
    }

    fn grow(&mut self) {
        let margin = self.width.iter().copied().max().unwrap_or(0) * 2 + 8;
        let nb = self.bbox.grown(margin);
        let mut cells = vec![self.background; nb.cell_count()];
        for (i, &s) in self.cells.iter().enumerate() {
            let z = self.bbox.coord_of(i);
            cells[nb.index_of(&z)] = s;
        }
        // Remap pending dirty indices into the new buffer.
        let dirty: Vec<usize> = self
            .dirty
            .iter()
            .map(|&i| nb.index_of(&self.bbox.coord_of(i)))
            .collect();
        let mut stamp_of = vec![0; nb.cell_count()];
        for &i in &dirty {
            stamp_of[i] = self.stamp;
        }
        let changes = self
            .changes
            .iter()
            .map(|&i| nb.index_of(&self.bbox.coord_of(i)))
            .collect();
        self.bbox = nb;
        self.cells = cells;
        self.dirty = dirty;
        self.stamp_of = stamp_of;
        self.changes = changes;
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.advance();
        }
    }

    /// Runs until no cell changes; returns the settle time. Panics are
    /// avoided by the caller-provided bound.
    pub fn run_to_fixpoint(&mut self, bound: u64) -> Option<u64> {
        let mut t = 0;
        while self.advance() > 0 {
            t += 1;
            if t > bound {
                return None;
            }
        }
        Some(t)
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Buffer coordinates of the cells changed by the last `advance`.
    pub fn last_changes(&self) -> Vec<Coord> {
        self.changes.iter().map(|&i| self.bbox.coord_of(i)).collect()
    }

    pub fn get(&self, z: &[i64]) -> State {
        self.read(z)
    }

    pub fn snapshot(&self) -> Configuration {
        Configuration::from_cells(self.bbox.clone(), self.background, self.cells.clone())
            .trimmed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixtures::{fixture, Fixture};

    fn f_min(m: u32) -> RuleTable {
        match fixture(&format!("f_min({m})")).unwrap() {
            Fixture { rule, .. } => rule,
        }
    }

    #[test]
    fn step_min_row() {
        let rule = f_min(3);
        let s = |v: u32| State(v);
        let c = Configuration::row(0, &[s(3), s(1), s(2)], s(0));
        let out = step(&rule, &c).unwrap();
        assert_eq!(out.get(&[0]), s(1));
        assert_eq!(out.get(&[1]), s(1));
        assert_eq!(out.get(&[2]), s(0));
        // Box grew by the reflected hull of {0, +1}.
        assert_eq!(out.bbox(), &GridBox::new(vec![-1], vec![2]));
    }

    #[test]
    fn iterate_matches_repeated_step() {
        let rule = f_min(3);
        let s = |v: u32| State(v);
        let c = Configuration::row(0, &[s(3), s(1), s(2)], s(0));
        let two = iterate(&rule, &c, 2).unwrap();
        assert_eq!(two.get(&[0]), s(1));
        assert_eq!(two.get(&[1]), s(0));
        assert_eq!(two.get(&[2]), s(0));
        let by_step = step(&rule, &step(&rule, &c).unwrap()).unwrap();
        assert_eq!(two, by_step);
    }

    #[test]
    fn iterate_zero_is_identity() {
        let rule = f_min(2);
        let c = Configuration::row(0, &[State(2), State(1)], State(0));
        assert_eq!(iterate(&rule, &c, 0).unwrap(), c);
    }

    #[test]
    fn all_background_is_fixed() {
        let rule = f_min(2);
        let c = Configuration::filled(GridBox::new(vec![0], vec![4]), State(0));
        assert_eq!(step(&rule, &c).unwrap(), c);
    }

    #[test]
    fn semigroup_law_on_samples() {
        let rule = f_min(3);
        let c = Configuration::row(0, &[State(4), State(2), State(3), State(1)], State(0));
        for (a, b) in [(1u64, 2u64), (2, 3), (0, 4)] {
            let lhs = iterate(&rule, &c, a + b).unwrap();
            let rhs = iterate(&rule, &iterate(&rule, &c, a).unwrap(), b).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
