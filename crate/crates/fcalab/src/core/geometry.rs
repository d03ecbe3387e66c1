//! Integer lattice geometry: offsets, boxes, dilations.

/// A point or offset in `Z^d`.
pub type Coord = Vec<i64>;

/// An axis-aligned box with inclusive bounds on every axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridBox {
    pub lo: Coord,
    pub hi: Coord,
}

impl GridBox {
    pub fn new(lo: Coord, hi: Coord) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds must share a dimension");
        assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h), "box must be nonempty");
        GridBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn extent(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    pub fn cell_count(&self) -> usize {
        (0..self.dim()).map(|a| self.extent(a)).product()
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        z.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| l <= v && v <= h)
    }

    /// Linear index with axis 0 fastest.
    pub fn index_of(&self, z: &[i64]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for a in 0..self.dim() {
            idx += (z[a] - self.lo[a]) as usize * stride;
            stride *= self.extent(a);
        }
        idx
    }

    /// Inverse of [`GridBox::index_of`].
    pub fn coord_of(&self, mut idx: usize) -> Coord {
        let mut z = vec![0i64; self.dim()];
        for a in 0..self.dim() {
            let e = self.extent(a);
            z[a] = self.lo[a] + (idx % e) as i64;
            idx /= e;
        }
        z
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &GridBox) -> GridBox {
        let lo = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| *a.min(b))
            .collect();
        let hi = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| *a.max(b))
            .collect();
        GridBox::new(lo, hi)
    }

    /// Grows the box by `margin` on every side.
    pub fn grown(&self, margin: i64) -> GridBox {
        GridBox::new(
            self.lo.iter().map(|l| l - margin).collect(),
            self.hi.iter().map(|h| h + margin).collect(),
        )
    }

    /// Iterates all coordinates in index order.
    pub fn iter_coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.cell_count()).map(move |i| self.coord_of(i))
    }
}

/// Per-axis (min, max) of a set of offsets.
pub fn neighborhood_hull(offsets: &[Coord]) -> (Coord, Coord) {
    assert!(!offsets.is_empty());
    let d = offsets[0].len();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for n in offsets {
        for a in 0..d {
            lo[a] = lo[a].min(n[a]);
            hi[a] = hi[a].max(n[a]);
        }
    }
    (lo, hi)
}

/// Dilates `b` so that it contains every `z` whose window `z + offsets`
/// meets `b`: the box grows by the reflected hull of `offsets`.
pub fn dilate_box(b: &GridBox, offsets: &[Coord]) -> GridBox {
    let (nlo, nhi) = neighborhood_hull(offsets);
    GridBox::new(
        b.lo.iter().zip(&nhi).map(|(l, h)| l - h).collect(),
        b.hi.iter().zip(&nlo).map(|(h, l)| h - l).collect(),
    )
}

/// The Minkowski sum `{a + b}` of two offset sets, deduplicated and sorted.
pub fn minkowski_sum(a: &[Coord], b: &[Coord]) -> Vec<Coord> {
    let mut out: Vec<Coord> = Vec::new();
    for x in a {
        for y in b {
            let s: Coord = x.iter().zip(y).map(|(p, q)| p + q).collect();
            out.push(s);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The symmetric von Neumann neighborhood `{0, ±e_i}` in dimension `d`,
/// center first, then the axis pairs in order.
pub fn von_neumann(d: usize) -> Vec<Coord> {
    let mut out = vec![vec![0i64; d]];
    for a in 0..d {
        for s in [1i64, -1] {
            let mut v = vec![0i64; d];
            v[a] = s;
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let b = GridBox::new(vec![-2, 1], vec![3, 4]);
        for i in 0..b.cell_count() {
            assert_eq!(b.index_of(&b.coord_of(i)), i);
        }
    }

    #[test]
    fn dilation_reflects_offsets() {
        // 1D neighborhood {0, +1}: a cell left of the box sees into it.
        let b = GridBox::new(vec![0], vec![2]);
        let d = dilate_box(&b, &[vec![0], vec![1]]);
        assert_eq!(d, GridBox::new(vec![-1], vec![2]));
    }
}
