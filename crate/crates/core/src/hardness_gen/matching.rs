use std::collections::BTreeSet;

use super::GridTiling;
use crate::error::{DpathError, Result};
use crate::graph_core::{Graph, Instance, PathSet};

/// `(x - 1) n + y`.
pub fn iota(x: usize, y: usize, n: usize) -> usize {
    (x - 1) * n + y
}

#[derive(Clone, Debug)]
pub struct MatchingReduction {
    pub instance: Instance,
    pub k_prime: usize,
    pub cycle_len: usize,
    /// The four cycle separators of every gadget plus every connector; each
    /// valid path meets exactly one of them.
    pub separators: Vec<usize>,
    pub witness: Option<PathSet>,
    pub names: Vec<String>,
}

/// Cycle gadget per set, joined by horizontal and vertical connectors; the
/// instance has `4k^2 + 2k(k-1)` disjoint valid paths iff the tiling is
/// solvable.
pub fn reduce_matching(gt: &GridTiling) -> Result<MatchingReduction> {
    let (k, n) = (gt.k, gt.n);
    let nn = n * n;
    let side = 2 * nn + 2;
    let len = 4 * side;
    let gadget = |i: usize, j: usize| (i * k + j) * len;
    let a = |i: usize, j: usize, s: usize, t: usize| gadget(i, j) + (s % 4) * side + 2 * t;
    let b = |i: usize, j: usize, s: usize, t: usize| gadget(i, j) + (s % 4) * side + 2 * t - 1;
    let c = |i: usize, j: usize, s: usize| gadget(i, j) + s * side + 2 * nn + 1;
    let base = k * k * len;
    let h = |i: usize, j: usize| base + i * (k - 1) + j;
    let hcount = k * k.saturating_sub(1);
    let v = |i: usize, j: usize| base + hcount + i * k + j;
    let total = base + 2 * hcount;

    let mut g = Graph::new(total);
    let mut names = vec![String::new(); total];
    for i in 0..k {
        for j in 0..k {
            let o = gadget(i, j);
            for p in 0..len {
                g.add_edge(o + p, o + (p + 1) % len);
            }
            for s in 0..4 {
                names[c(i, j, s)] = format!("G{i},{j}.c{}", s + 1);
                for t in 0..=nn {
                    names[a(i, j, s, t)] = format!("G{i},{j}.a{},{t}", s + 1);
                    if t > 0 {
                        names[b(i, j, s, t)] = format!("G{i},{j}.b{},{t}", s + 1);
                    }
                }
            }
        }
    }
    for i in 0..k {
        for j in 0..k.saturating_sub(1) {
            names[h(i, j)] = format!("h{i},{j}");
            for t in 1..=nn {
                g.add_edge(h(i, j), b(i, j, 0, t));
                g.add_edge(h(i, j), b(i, j + 1, 2, t));
            }
        }
    }
    for i in 0..k.saturating_sub(1) {
        for j in 0..k {
            names[v(i, j)] = format!("v{i},{j}");
            for t in 1..=nn {
                g.add_edge(v(i, j), b(i, j, 1, t));
                g.add_edge(v(i, j), b(i + 1, j, 3, t));
            }
        }
    }

    let mut demand = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for &(x, y) in &gt.sets[i][j] {
                let t = iota(x, y, n);
                for s in 0..4 {
                    demand.push((a(i, j, s, t), a(i, j, s + 1, t - 1)));
                }
                if j + 1 < k {
                    for &(x2, y2) in gt.sets[i][j + 1].iter().filter(|p| p.0 == x) {
                        demand.push((b(i, j, 0, t), b(i, j + 1, 2, iota(x2, y2, n))));
                    }
                }
                if i + 1 < k {
                    for &(x2, y2) in gt.sets[i + 1][j].iter().filter(|p| p.1 == y) {
                        demand.push((b(i, j, 1, t), b(i + 1, j, 3, iota(x2, y2, n))));
                    }
                }
            }
        }
    }
    let terminals: Vec<usize> = demand.iter().flat_map(|&(s, t)| [s, t]).collect::<BTreeSet<_>>().into_iter().collect();
    let k_prime = 4 * k * k + 2 * k * k.saturating_sub(1);
    let mut separators: Vec<usize> = (0..k).flat_map(|i| (0..k).flat_map(move |j| (0..4).map(move |s| c(i, j, s)))).collect();
    separators.extend(base..total);
    if separators.len() != k_prime {
        return Err(DpathError::Internal(format!("{} separators for k' = {k_prime}", separators.len())));
    }

    let witness = match &gt.solution {
        Some(sol) if gt.is_solution(sol) => {
            let mut paths = Vec::new();
            for i in 0..k {
                for j in 0..k {
                    let t = iota(sol[i][j].0, sol[i][j].1, n);
                    for s in 0..4 {
                        let start = a(i, j, s, t) - gadget(i, j);
                        let end = a(i, j, s + 1, t - 1) - gadget(i, j);
                        let steps = (end + len - start) % len;
                        paths.push((0..=steps).map(|d| gadget(i, j) + (start + d) % len).collect());
                    }
                    if j + 1 < k {
                        let t2 = iota(sol[i][j + 1].0, sol[i][j + 1].1, n);
                        paths.push(vec![b(i, j, 0, t), h(i, j), b(i, j + 1, 2, t2)]);
                    }
                    if i + 1 < k {
                        let t2 = iota(sol[i + 1][j].0, sol[i + 1][j].1, n);
                        paths.push(vec![b(i, j, 1, t), v(i, j), b(i + 1, j, 3, t2)]);
                    }
                }
            }
            Some(PathSet::new(paths))
        }
        _ => None,
    };
    let instance = Instance::new(g, terminals, &demand, k_prime)?;
    Ok(MatchingReduction {
        instance,
        k_prime,
        cycle_len: len,
        separators,
        witness,
        names,
    })
}
