//! Pass-alive chains (Benson's unconditional life), pass-alive territory, and
//! the pass-hardening move filter.
//!
//! For a colour C, *chains* are maximal connected sets of C stones and
//! *regions* are maximal connected sets of non-C points (empty or opponent).
//! A region is vital to a bordering chain when every empty point of the region
//! is a liberty of that chain and every opponent stone in it touches the
//! chain. The second clause matters because multi-stone suicide is allowed:
//! an attacker could otherwise sacrifice stones deep inside an eye and
//! rebuild there with a liberty the chain cannot see.
//!
//! The fixed point repeatedly drops chains with fewer than two vital regions
//! and regions bordering a dropped chain.

use std::collections::BTreeSet;

use crate::go::{neighbors, Color, GameState, Grid, Vertex};

/// Connected components of a grid for one colour.
#[derive(Clone, Debug)]
pub struct Components {
    /// Chain id per point (`usize::MAX` where no C stone).
    pub chain_of: Vec<usize>,
    pub chains: Vec<Vec<usize>>,
    /// Region id per point (`usize::MAX` on C stones).
    pub region_of: Vec<usize>,
    pub regions: Vec<Vec<usize>>,
    /// Chains bordering each region.
    pub region_borders: Vec<BTreeSet<usize>>,
    /// `vital[r]` lists the chains region `r` is vital to.
    pub vital: Vec<BTreeSet<usize>>,
}

impl Components {
    pub fn new(grid: &Grid, color: Color) -> Components {
        let n = grid.size();
        let area = n * n;
        let mine = Some(color);
        let mut chain_of = vec![usize::MAX; area];
        let mut region_of = vec![usize::MAX; area];
        let mut chains = Vec::new();
        let mut regions = Vec::new();
        for start in 0..area {
            let is_mine = grid.get_index(start) == mine;
            let slot = if is_mine { &chain_of } else { &region_of };
            if slot[start] != usize::MAX {
                continue;
            }
            let id = if is_mine { chains.len() } else { regions.len() };
            let mut members = vec![start];
            let mut stack = vec![start];
            if is_mine {
                chain_of[start] = id;
            } else {
                region_of[start] = id;
            }
            while let Some(v) = stack.pop() {
                for nb in neighbors(v, n) {
                    let nb_mine = grid.get_index(nb) == mine;
                    if nb_mine != is_mine {
                        continue;
                    }
                    let slot = if is_mine { &mut chain_of } else { &mut region_of };
                    if slot[nb] == usize::MAX {
                        slot[nb] = id;
                        members.push(nb);
                        stack.push(nb);
                    }
                }
            }
            if is_mine {
                chains.push(members);
            } else {
                regions.push(members);
            }
        }

        let mut region_borders = vec![BTreeSet::new(); regions.len()];
        let mut vital = vec![BTreeSet::new(); regions.len()];
        for (r, points) in regions.iter().enumerate() {
            for &v in points {
                for nb in neighbors(v, n) {
                    if chain_of[nb] != usize::MAX {
                        region_borders[r].insert(chain_of[nb]);
                    }
                }
            }
            for &x in &region_borders[r] {
                let touches = |v: usize| neighbors(v, n).any(|nb| chain_of[nb] == x);
                if points.iter().all(|&v| touches(v)) {
                    vital[r].insert(x);
                }
            }
        }
        Components { chain_of, chains, region_of, regions, region_borders, vital }
    }
}

/// Benson fixed point. `order` may permute the chains examined in each pass;
/// the result does not depend on it.
pub fn benson_fixed_point(comp: &Components, mut order: impl FnMut(&mut Vec<usize>)) -> Vec<bool> {
    let mut chain_alive = vec![true; comp.chains.len()];
    let mut region_alive = vec![true; comp.regions.len()];
    loop {
        let mut changed = false;
        let mut candidates: Vec<usize> = (0..comp.chains.len()).filter(|&x| chain_alive[x]).collect();
        order(&mut candidates);
        for x in candidates {
            let vital_count = (0..comp.regions.len())
                .filter(|&r| region_alive[r] && comp.vital[r].contains(&x))
                .count();
            if vital_count < 2 {
                chain_alive[x] = false;
                changed = true;
                for r in 0..comp.regions.len() {
                    if region_alive[r] && comp.region_borders[r].contains(&x) {
                        region_alive[r] = false;
                    }
                }
            }
        }
        if !changed {
            return chain_alive;
        }
    }
}

/// Chains of `color` that survive any sequence of opponent moves while their
/// owner passes. Each chain is a sorted list of row-major indices.
pub fn pass_alive_groups(grid: &Grid, color: Color) -> Vec<Vec<usize>> {
    let comp = Components::new(grid, color);
    let alive = benson_fixed_point(&comp, |_| {});
    comp.chains
        .iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(c, _)| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Per-point flag: the point belongs to a pass-alive chain of `color`.
pub fn pass_alive_mask(grid: &Grid, color: Color) -> Vec<bool> {
    let mut mask = vec![false; grid.area()];
    for chain in pass_alive_groups(grid, color) {
        for v in chain {
            mask[v] = true;
        }
    }
    mask
}

/// Pass-alive territory of `color`: the union of maximal non-`color` regions
/// whose bordering `color` chains are all pass-alive and in which all, or all
/// but one, points touch a pass-alive `color` chain.
pub fn pass_alive_territory(grid: &Grid, color: Color) -> Vec<bool> {
    let n = grid.size();
    let comp = Components::new(grid, color);
    let alive = benson_fixed_point(&comp, |_| {});
    territory_from(grid, &comp, &alive, n)
}

fn territory_from(grid: &Grid, comp: &Components, alive: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; grid.area()];
    for (r, points) in comp.regions.iter().enumerate() {
        if !comp.region_borders[r].iter().all(|&x| alive[x]) {
            continue;
        }
        let far = points
            .iter()
            .filter(|&&v| !neighbors(v, n).any(|nb| comp.chain_of[nb] != usize::MAX && alive[comp.chain_of[nb]]))
            .count();
        if far <= 1 {
            for &v in points {
                out[v] = true;
            }
        }
    }
    out
}

/// Pass-alive chains and territory for both colours.
#[derive(Clone, Debug)]
pub struct RegionAnalysis {
    pub chains: [Vec<Vec<usize>>; 2],
    pub regions: [Vec<Vec<usize>>; 2],
    pub pass_alive_chains: [Vec<Vec<usize>>; 2],
    pub pass_alive_territory: [Vec<bool>; 2],
}

impl RegionAnalysis {
    pub fn new(grid: &Grid) -> RegionAnalysis {
        let n = grid.size();
        let mut chains: [Vec<Vec<usize>>; 2] = Default::default();
        let mut regions: [Vec<Vec<usize>>; 2] = Default::default();
        let mut pa: [Vec<Vec<usize>>; 2] = Default::default();
        let mut terr: [Vec<bool>; 2] = Default::default();
        for color in [Color::Black, Color::White] {
            let i = color.index();
            let comp = Components::new(grid, color);
            let alive = benson_fixed_point(&comp, |_| {});
            terr[i] = territory_from(grid, &comp, &alive, n);
            pa[i] = comp
                .chains
                .iter()
                .zip(&alive)
                .filter(|(_, a)| **a)
                .map(|(c, _)| c.clone())
                .collect();
            chains[i] = comp.chains;
            regions[i] = comp.regions;
        }
        RegionAnalysis { chains, regions, pass_alive_chains: pa, pass_alive_territory: terr }
    }

    /// Board diagram: pass-alive stones as `X`/`O`, other stones as `x`/`o`,
    /// territory as `b`/`w`, remaining points as `.`.
    pub fn diagram(&self, grid: &Grid) -> String {
        let mut alive = [vec![false; grid.area()], vec![false; grid.area()]];
        for i in 0..2 {
            for chain in &self.pass_alive_chains[i] {
                for &v in chain {
                    alive[i][v] = true;
                }
            }
        }
        grid.diagram_with(|idx| {
            Some(match grid.get_index(idx) {
                Some(Color::Black) if alive[0][idx] => 'X',
                Some(Color::Black) => 'x',
                Some(Color::White) if alive[1][idx] => 'O',
                Some(Color::White) => 'o',
                None if self.pass_alive_territory[0][idx] => 'b',
                None if self.pass_alive_territory[1][idx] => 'w',
                None => '.',
            })
        })
    }
}

/// True when the side to move has a legal placement outside its own
/// pass-alive territory, i.e. when a pass-hardened agent may not pass.
pub fn pass_forbidden(state: &GameState) -> bool {
    let Ok(legal) = state.legal_moves() else {
        return false;
    };
    let territory = pass_alive_territory(state.grid(), state.to_move());
    let n = state.size();
    legal
        .iter()
        .any(|v| matches!(v, Vertex::At(p) if !territory[p.index(n)]))
}

/// Remove Pass from a move distribution (indexed by move index, pass last)
/// whenever a legal placement exists outside the mover's pass-alive
/// territory. Relative probabilities of the other moves are preserved; if no
/// mass remains the result is uniform over legal placements.
pub fn pass_hardened_filter(state: &GameState, policy: &[f64]) -> Vec<f64> {
    if !pass_forbidden(state) {
        return policy.to_vec();
    }
    let n = state.size();
    let pass = n * n;
    let mut out = policy.to_vec();
    out[pass] = 0.0;
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        for p in out.iter_mut() {
            *p /= total;
        }
    } else {
        let legal: Vec<usize> = state
            .legal_moves()
            .expect("non-terminal")
            .iter()
            .filter(|v| !v.is_pass())
            .map(|v| v.index(n))
            .collect();
        let u = 1.0 / legal.len() as f64;
        out.iter_mut().for_each(|p| *p = 0.0);
        for i in legal {
            out[i] = u;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::go::Rules;

    fn grid(s: &str) -> Grid {
        Grid::from_diagram(s).unwrap()
    }

    #[test]
    fn two_eyed_group_is_pass_alive() {
        let g = grid(
            ".X.X.\n\
             XXXXX\n\
             .....\n\
             .....\n\
             .....",
        );
        let alive = pass_alive_groups(&g, Color::Black);
        assert_eq!(alive.len(), 1);
        assert_eq!(alive[0].len(), 7);
        let terr = pass_alive_territory(&g, Color::Black);
        assert!(terr[0] && terr[2] && terr[4]);
        assert!(!terr[12]);
    }

    #[test]
    fn lone_stone_is_not_pass_alive() {
        let g = grid(".....\n.....\n..X..\n.....\n.....");
        assert!(pass_alive_groups(&g, Color::Black).is_empty());
        assert!(pass_alive_territory(&g, Color::Black).iter().all(|t| !t));
    }

    #[test]
    fn one_eye_is_not_enough() {
        let g = grid(".X...\nXX...\n.....\n.....\n.....");
        assert!(pass_alive_groups(&g, Color::Black).is_empty());
    }

    #[test]
    fn empty_board_territory_is_empty() {
        let g = Grid::new(9);
        for c in [Color::Black, Color::White] {
            assert!(pass_alive_territory(&g, c).iter().all(|t| !t));
        }
    }

    #[test]
    fn filter_zeroes_pass_on_open_board() {
        let s = GameState::new(Rules::new(5)).unwrap();
        let mut policy = vec![0.0; 26];
        policy[25] = 0.5;
        policy[0] = 0.25;
        policy[1] = 0.25;
        let out = pass_hardened_filter(&s, &policy);
        assert_eq!(out[25], 0.0);
        assert!((out[0] - 0.5).abs() < 1e-12 && (out[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn filter_falls_back_to_uniform() {
        let s = GameState::new(Rules::new(3)).unwrap();
        let mut policy = vec![0.0; 10];
        policy[9] = 1.0;
        let out = pass_hardened_filter(&s, &policy);
        assert_eq!(out[9], 0.0);
        assert!(out[..9].iter().all(|&p| (p - 1.0 / 9.0).abs() < 1e-12));
    }

    #[test]
    fn filter_allows_pass_inside_own_territory() {
        // Black owns the whole 5x5 board with two eyes; only eye-filling
        // moves and pass remain.
        let g = grid(
            "X.XXX\n\
             XXXXX\n\
             XXX.X\n\
             XXXXX\n\
             XXXXX",
        );
        let s = GameState::from_setup(Rules::new(5), g, Color::Black).unwrap();
        assert!(!pass_forbidden(&s));
        let mut policy = vec![0.0; 26];
        policy[25] = 0.7;
        policy[1] = 0.3;
        assert_eq!(pass_hardened_filter(&s, &policy), policy);
    }
}
