//! Finite-support configurations over a bounded box.

use super::geometry::{Coord, GridBox};
use super::rule::State;

/// A configuration: a dense box of states with an implicit quiescent
/// background outside.
///
/// Equality is semantic: two configurations are equal when they have the
/// same dimension and background and agree on every cell of the plane,
/// regardless of how their boxes are placed.
#[derive(Debug, Clone)]
pub struct Configuration {
    dim: usize,
    bbox: GridBox,
    background: State,
    cells: Vec<State>,
}

impl Configuration {
    pub fn filled(bbox: GridBox, background: State) -> Configuration {
        let n = bbox.cell_count();
        Configuration { dim: bbox.dim(), bbox, background, cells: vec![background; n] }
    }

    pub fn from_cells(bbox: GridBox, background: State, cells: Vec<State>) -> Configuration {
        assert_eq!(cells.len(), bbox.cell_count());
        Configuration { dim: bbox.dim(), bbox, background, cells }
    }

    /// 1D convenience: `values` laid out from `lo`.
    pub fn row(lo: i64, values: &[State], background: State) -> Configuration {
        let bbox = GridBox::new(vec![lo], vec![lo + values.len() as i64 - 1]);
        Configuration::from_cells(bbox, background, values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bbox(&self) -> &GridBox {
        &self.bbox
    }

    pub fn background(&self) -> State {
        self.background
    }

    pub fn cells(&self) -> &[State] {
        &self.cells
    }

    pub fn get(&self, z: &[i64]) -> State {
        if self.bbox.contains(z) {
            self.cells[self.bbox.index_of(z)]
        } else {
            self.background
        }
    }

    pub fn set(&mut self, z: &[i64], s: State) {
        assert!(self.bbox.contains(z), "cell {z:?} outside box");
        let i = self.bbox.index_of(z);
        self.cells[i] = s;
    }

    /// True when every cell is background.
    pub fn is_uniform_background(&self) -> bool {
        self.cells.iter().all(|&s| s == self.background)
    }

    /// Shrinks the box to the support (non-background cells). An all
    /// background configuration collapses to a single background cell at
    /// the box low corner.
    pub fn trimmed(&self) -> Configuration {
        let d = self.dim;
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        let mut any = false;
        for (i, &s) in self.cells.iter().enumerate() {
            if s != self.background {
                any = true;
                let z = self.bbox.coord_of(i);
                for a in 0..d {
                    lo[a] = lo[a].min(z[a]);
                    hi[a] = hi[a].max(z[a]);
                }
            }
        }
        if !any {
            let at = self.bbox.lo.clone();
            return Configuration::filled(GridBox::new(at.clone(), at), self.background);
        }
        let nb = GridBox::new(lo, hi);
        let mut cells = Vec::with_capacity(nb.cell_count());
        for z in nb.iter_coords() {
            cells.push(self.get(&z));
        }
        Configuration::from_cells(nb, self.background, cells)
    }

    /// Copies the configuration into a different box (cells outside the box
    /// are lost; missing cells become background).
    pub fn reboxed(&self, bbox: GridBox) -> Configuration {
        let mut cells = Vec::with_capacity(bbox.cell_count());
        for z in bbox.iter_coords() {
            cells.push(self.get(&z));
        }
        Configuration::from_cells(bbox, self.background, cells)
    }

    /// Coordinates of all non-background cells.
    pub fn support(&self) -> Vec<Coord> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != self.background)
            .map(|(i, _)| self.bbox.coord_of(i))
            .collect()
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.background != other.background {
            return false;
        }
        let joint = self.bbox.union(&other.bbox);
        let same = joint.iter_coords().all(|z| self.get(&z) == other.get(&z));
        same
    }
}

impl Eq for Configuration {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semantic_equality_ignores_box_placement() {
        let a = Configuration::row(0, &[State(0), State(2), State(0)], State(0));
        let b = Configuration::row(1, &[State(2)], State(0));
        assert_eq!(a, b);
        assert_eq!(a.trimmed(), b);
    }

    #[test]
    fn outside_reads_background() {
        let a = Configuration::row(0, &[State(1)], State(0));
        assert_eq!(a.get(&[5]), State(0));
        assert_eq!(a.get(&[0]), State(1));
    }
}
