use super::grid::Grid;
use super::types::{Point, Vertex};

/// One of the 8 elements of the square's dihedral group.
///
/// Bit 2 transposes, then bit 0 flips rows and bit 1 flips columns. Index 0 is
/// the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry(u8);

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry(0);

    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..8).map(Symmetry)
    }

    pub fn from_index(i: usize) -> Symmetry {
        assert!(i < 8);
        Symmetry(i as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn apply_rc(self, row: usize, col: usize, n: usize) -> (usize, usize) {
        let (mut r, mut c) = if self.0 & 4 != 0 { (col, row) } else { (row, col) };
        if self.0 & 1 != 0 {
            r = n - 1 - r;
        }
        if self.0 & 2 != 0 {
            c = n - 1 - c;
        }
        (r, c)
    }

    pub fn apply_point(self, p: Point, n: usize) -> Point {
        let (r, c) = self.apply_rc(p.row as usize, p.col as usize, n);
        Point::new(r, c)
    }

    pub fn apply_vertex(self, v: Vertex, n: usize) -> Vertex {
        match v {
            Vertex::Pass => Vertex::Pass,
            Vertex::At(p) => Vertex::At(self.apply_point(p, n)),
        }
    }

    /// Image of a row-major index.
    #[inline]
    pub fn apply_index(self, idx: usize, n: usize) -> usize {
        let (r, c) = self.apply_rc(idx / n, idx % n, n);
        r * n + c
    }

    /// `self` after `first`: `(self ∘ first)(p) = self(first(p))`.
    pub fn compose(self, first: Symmetry) -> Symmetry {
        // Any board of size ≥ 3 separates the 8 group elements; probe two points.
        let n = 3;
        Symmetry::all()
            .find(|s| {
                [(0, 1), (0, 0)].iter().all(|&(r, c)| {
                    let (r1, c1) = first.apply_rc(r, c, n);
                    self.apply_rc(r1, c1, n) == s.apply_rc(r, c, n)
                })
            })
            .expect("dihedral group is closed")
    }

    pub fn inverse(self) -> Symmetry {
        Symmetry::all()
            .find(|s| s.compose(self) == Symmetry::IDENTITY)
            .expect("every element has an inverse")
    }

    pub fn apply_grid(self, grid: &Grid) -> Grid {
        let n = grid.size();
        let mut out = Grid::new(n);
        for idx in 0..n * n {
            out.set_index(self.apply_index(idx, n), grid.get_index(idx));
        }
        out
    }

    /// Map a per-move-index vector (`n^2` points, optionally followed by pass).
    pub fn apply_move_vector<T: Copy + Default>(self, v: &[T], n: usize) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        for idx in 0..n * n {
            out[self.apply_index(idx, n)] = v[idx];
        }
        if v.len() > n * n {
            out[n * n] = v[n * n];
        }
        out
    }
}

/// The 8 symmetric images of a grid, in [`Symmetry::all`] order.
pub fn symmetries(grid: &Grid) -> Vec<Grid> {
    Symmetry::all().map(|s| s.apply_grid(grid)).collect()
}
