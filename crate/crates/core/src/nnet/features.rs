use crate::go::{GameState, Symmetry, Vertex};

/// Spatial planes per position: own stones, opponent stones, empty,
/// last move, ones.
pub const SPATIAL_PLANES: usize = 5;
/// Scalar inputs, broadcast to constant planes inside the network:
/// komi / 15 from the side to move's view, consecutive passes.
pub const SCALAR_INPUTS: usize = 2;
pub const INPUT_PLANES: usize = SPATIAL_PLANES + SCALAR_INPUTS;

/// Network input for one position, from the side to move's perspective.
#[derive(Clone, Debug, PartialEq)]
pub struct FeaturePlanes {
    pub size: usize,
    /// `SPATIAL_PLANES` planes of `size²` values, plane-major.
    pub planes: Vec<f32>,
    pub komi: f32,
    pub passes: f32,
}

impl FeaturePlanes {
    pub fn plane(&self, k: usize) -> &[f32] {
        let p = self.size * self.size;
        &self.planes[k * p..(k + 1) * p]
    }

    /// Same features with every spatial plane mapped through `sym`.
    pub fn transformed(&self, sym: Symmetry) -> FeaturePlanes {
        let n = self.size;
        let p = n * n;
        let mut planes = vec![0.0; self.planes.len()];
        for k in 0..SPATIAL_PLANES {
            for idx in 0..p {
                planes[k * p + sym.apply_index(idx, n)] = self.planes[k * p + idx];
            }
        }
        FeaturePlanes { planes, ..self.clone() }
    }
}

pub fn encode(state: &GameState) -> FeaturePlanes {
    let n = state.size();
    let p = n * n;
    let me = state.to_move();
    let mut planes = vec![0.0f32; SPATIAL_PLANES * p];
    for (idx, cell) in state.grid().cells()[..p].iter().enumerate() {
        match cell {
            Some(c) if *c == me => planes[idx] = 1.0,
            Some(_) => planes[p + idx] = 1.0,
            None => planes[2 * p + idx] = 1.0,
        }
        planes[4 * p + idx] = 1.0;
    }
    if let Some((_, Vertex::At(pt))) = state.last_move() {
        planes[3 * p + pt.index(n)] = 1.0;
    }
    let komi = state.rules().komi as f32 / 15.0;
    FeaturePlanes {
        size: n,
        planes,
        komi: if me == crate::go::Color::White { komi } else { -komi },
        passes: state.consecutive_passes() as f32,
    }
}
