use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{DpathError, Result};
use crate::graph_core::{Graph, Instance, PathSet};

/// Endpoint labels `a`, `b` admit a path: opposite signs, sum at most zero.
pub fn skew_valid(a: i64, b: i64) -> bool {
    (a < 0) != (b < 0) && a != 0 && b != 0 && a + b <= 0
}

/// Supply graph with nonzero integer labels on its terminals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewLabeled {
    pub graph: Graph,
    pub labels: BTreeMap<usize, i64>,
}

impl SkewLabeled {
    pub fn new(graph: Graph, labels: BTreeMap<usize, i64>) -> Result<Self> {
        if let Some((&v, _)) = labels.iter().find(|&(&v, &l)| v >= graph.n() || l == 0) {
            return Err(DpathError::InvalidInstance(format!("terminal {v} is out of range or labeled 0")));
        }
        Ok(Self { graph, labels })
    }

    pub fn is_valid_path(&self, p: &[usize]) -> bool {
        if !self.graph.is_path(p) || p.len() < 2 {
            return false;
        }
        match (self.labels.get(&p[0]), self.labels.get(&p[p.len() - 1])) {
            (Some(&a), Some(&b)) => skew_valid(a, b),
            _ => false,
        }
    }

    /// At least `k` pairwise disjoint valid paths.
    pub fn verify_solution(&self, ps: &PathSet, k: usize) -> bool {
        ps.len() >= k && ps.pairwise_disjoint() && ps.paths.iter().all(|p| self.is_valid_path(p))
    }

    /// Same graph; demand joins every label-valid terminal pair.
    pub fn to_instance(&self, k: usize) -> Result<Instance> {
        let ts: Vec<usize> = self.labels.keys().copied().collect();
        let mut demand = Vec::new();
        for (i, &a) in ts.iter().enumerate() {
            for &b in &ts[i + 1..] {
                if skew_valid(self.labels[&a], self.labels[&b]) {
                    demand.push((a, b));
                }
            }
        }
        Instance::new(self.graph.clone(), ts, &demand, k)
    }
}

/// Terminals `s_1..s_n`, `t_1..t_n`; a path may join `s_i` and `t_j` when
/// `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedSkew {
    pub graph: Graph,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewIndexing {
    pub indexed: IndexedSkew,
    /// Vertices beyond the original count are added isolated fillers.
    pub original_n: usize,
    /// Final label of every terminal of the labeled form.
    pub relabel: BTreeMap<usize, i64>,
}

impl SkewIndexing {
    /// Drops filler vertices; original ids are unchanged.
    pub fn to_original(&self, v: usize) -> Option<usize> {
        (v < self.original_n).then_some(v)
    }
}

/// Injective, compact relabeling onto `[-m, -1] ∪ [1, m]`, then label `i`
/// becomes `s_i` and label `-i` becomes `t_i`.
pub fn skew_labeled_to_indexed(sli: &SkewLabeled) -> SkewIndexing {
    let count = sli.labels.len() as i64;
    let mut order: Vec<(i64, usize)> = sli.labels.iter().map(|(&v, &l)| (l, v)).collect();
    order.sort_unstable();
    let mut lab: BTreeMap<usize, i64> = order.iter().enumerate().map(|(i, &(l, v))| (v, 2 * l * count - i as i64)).collect();
    while lab.values().any(|l| l.abs() > 2 * count) {
        let image: BTreeSet<i64> = lab.values().copied().collect();
        let x = (1..=2 * count)
            .find(|x| !image.contains(x) && !image.contains(&-x))
            .expect("at most |T| values are blocked");
        for l in lab.values_mut() {
            if *l > x {
                *l -= 1;
            } else if *l < -x {
                *l += 1;
            }
        }
    }
    let m = lab.values().map(|l| l.abs()).max().unwrap_or(0);
    let mut graph = sli.graph.clone();
    let original_n = graph.n();
    let mut by_label: BTreeMap<i64, usize> = lab.iter().map(|(&v, &l)| (l, v)).collect();
    for x in (-m..=m).filter(|&x| x != 0) {
        by_label.entry(x).or_insert_with(|| graph.add_vertex());
    }
    let s = (1..=m).map(|i| by_label[&i]).collect();
    let t = (1..=m).map(|i| by_label[&-i]).collect();
    SkewIndexing {
        indexed: IndexedSkew { graph, s, t },
        original_n,
        relabel: lab,
    }
}

/// Demand graph `s_i t_j` for `i <= j`.
pub fn skew_to_demand_instance(idx: &IndexedSkew, k: usize) -> Result<Instance> {
    let mut terminals = idx.s.clone();
    terminals.extend(&idx.t);
    let mut demand = Vec::new();
    for i in 0..idx.s.len() {
        for j in i..idx.t.len() {
            demand.push((idx.s[i], idx.t[j]));
        }
    }
    Instance::new(idx.graph.clone(), terminals, &demand, k)
}
