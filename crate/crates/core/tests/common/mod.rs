#![allow(dead_code)]

use dpath_core::graph_core::{Graph, Instance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random instance on `n` vertices with about `n / 2` terminals.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Instance {
    let p = rng.gen_range(0.15..0.45);
    let g = random_graph(rng, n, p);
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    let tcount = rng.gen_range(2..=n.min(2 + n / 2));
    let mut ts: Vec<usize> = vs[..tcount].to_vec();
    ts.sort_unstable();
    let dp = rng.gen_range(0.15..0.6);
    let mut d = Vec::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            if rng.gen_bool(dp) {
                d.push((ts[i], ts[j]));
            }
        }
    }
    Instance::new(g, ts, &d, k).unwrap()
}
