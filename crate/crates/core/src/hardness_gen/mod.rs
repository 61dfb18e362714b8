//! Instance generators: grid tiling, the cycle-gadget reduction with an
//! arbitrary demand graph, and the labeled reduction whose demand graph is
//! a skew biclique.

mod gadgets;
mod matching;
mod skew;

use std::collections::BTreeSet;

use petgraph::graph::{NodeIndex, UnGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph_core::{Graph, Instance};

pub use gadgets::{
    build_general_gadget, build_main_gadget, build_selector_gadget, main_tuple, reduce_skew, selector_audit, Gadget, SelectorAudit,
    SkewReduction,
};
pub use matching::{iota, reduce_matching, MatchingReduction};
pub use skew::{skew_labeled_to_indexed, skew_to_demand_instance, skew_valid, IndexedSkew, SkewIndexing, SkewLabeled};

/// Sets `S_{i,j} ⊆ [n] x [n]` (1-based pairs) for `0 <= i, j < k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTiling {
    pub k: usize,
    pub n: usize,
    pub sets: Vec<Vec<BTreeSet<(usize, usize)>>>,
    /// Planted choice `s_{i,j}`, when generated with one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<Vec<Vec<(usize, usize)>>>,
}

impl GridTiling {
    /// Rows agree on the first coordinate, columns on the second, and every
    /// choice lies in its set.
    pub fn is_solution(&self, s: &[Vec<(usize, usize)>]) -> bool {
        let k = self.k;
        if s.len() != k || s.iter().any(|row| row.len() != k) {
            return false;
        }
        for i in 0..k {
            for j in 0..k {
                if !self.sets[i][j].contains(&s[i][j]) {
                    return false;
                }
                if j + 1 < k && s[i][j].0 != s[i][j + 1].0 {
                    return false;
                }
                if i + 1 < k && s[i][j].1 != s[i + 1][j].1 {
                    return false;
                }
            }
        }
        true
    }

    /// Exhaustive over row values and column values, `n^{2k}` candidates.
    pub fn brute_solve(&self) -> Option<Vec<Vec<(usize, usize)>>> {
        let k = self.k;
        if k == 0 {
            return Some(Vec::new());
        }
        let mut vals = vec![1usize; 2 * k];
        loop {
            let s: Vec<Vec<(usize, usize)>> = (0..k).map(|i| (0..k).map(|j| (vals[i], vals[k + j])).collect()).collect();
            if self.is_solution(&s) {
                return Some(s);
            }
            let mut p = 0;
            while p < 2 * k && vals[p] == self.n {
                vals[p] = 1;
                p += 1;
            }
            if p == 2 * k {
                return None;
            }
            vals[p] += 1;
        }
    }
}

/// Random grid tiling. A planted instance fixes a value per row and per
/// column, puts the induced pair into every set, then adds noise pairs.
pub fn gen_grid_tiling(k: usize, n: usize, seed: u64, planted: bool) -> GridTiling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = vec![vec![BTreeSet::new(); k]; k];
    for row in sets.iter_mut() {
        for set in row.iter_mut() {
            for x in 1..=n {
                for y in 1..=n {
                    if rng.gen_bool(0.3) {
                        set.insert((x, y));
                    }
                }
            }
        }
    }
    let solution = planted.then(|| {
        let xs: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=n)).collect();
        let ys: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=n)).collect();
        let s: Vec<Vec<(usize, usize)>> = (0..k).map(|i| (0..k).map(|j| (xs[i], ys[j])).collect()).collect();
        for i in 0..k {
            for j in 0..k {
                sets[i][j].insert(s[i][j]);
            }
        }
        s
    });
    GridTiling { k, n, sets, solution }
}

/// Left-right planarity test.
pub fn is_planar(g: &Graph) -> bool {
    let mut pg = UnGraph::<(), ()>::with_capacity(g.n(), g.m());
    for _ in 0..g.n() {
        pg.add_node(());
    }
    for (u, v) in g.edges() {
        pg.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    rustworkx_core::planar::is_planar(&pg)
}

/// Erdős–Rényi supply graph with a random terminal subset and random
/// demand edges among the terminals.
pub fn gen_random_instance(n: usize, k: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(0.15..0.45);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    let terminals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    let mut demand = Vec::new();
    for (i, &a) in terminals.iter().enumerate() {
        for &b in &terminals[i + 1..] {
            if rng.gen_bool(0.35) {
                demand.push((a, b));
            }
        }
    }
    Instance::new(g, terminals, &demand, k).expect("generated ids are in range")
}
