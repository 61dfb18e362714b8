//! Unit vertex-capacity max flow on the split digraph (`v_in -> v_out`).

use std::collections::{BTreeSet, VecDeque};

use super::graph::Graph;
use super::instance::{Instance, PathSet};
use crate::error::{DpathError, Result};

const INF: u32 = u32::MAX / 4;

struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn arc(&mut self, u: usize, v: usize, c: u32) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut prev = vec![usize::MAX; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    prev[v] = e;
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let e = prev[v];
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            v = self.to[e ^ 1];
        }
        true
    }

    fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn reaching(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            for &e in &self.head[v] {
                // e is v -> u; the partner arc e^1 is u -> v.
                let u = self.to[e];
                if self.cap[e ^ 1] > 0 && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

/// Result of a vertex-capacitated flow computation.
#[derive(Clone, Debug)]
pub struct VertexFlow {
    pub value: usize,
    /// Disjoint source-to-sink paths realizing `value`.
    pub paths: Vec<Vec<usize>>,
    /// Minimum vertex cut closest to the sources.
    pub cut_near: BTreeSet<usize>,
    /// Minimum vertex cut closest to the sinks.
    pub cut_far: BTreeSet<usize>,
    /// Vertices on the source side of `cut_far` (excluding the cut).
    pub far_source_side: BTreeSet<usize>,
}

/// Maximum number of vertex-disjoint paths from `sources` to `sinks` inside
/// `active`, stopping once `limit` paths are found. Vertices flagged in
/// `undeletable` have unbounded capacity and never appear in a cut.
pub fn vertex_flow(
    g: &Graph,
    active: &[bool],
    sources: &[usize],
    sinks: &[usize],
    undeletable: &[bool],
    limit: usize,
) -> VertexFlow {
    let n = g.n();
    let s = 2 * n;
    let t = 2 * n + 1;
    let mut net = Network::new(2 * n + 2);
    for v in 0..n {
        if !active[v] {
            continue;
        }
        let c = if undeletable[v] { INF } else { 1 };
        net.arc(2 * v, 2 * v + 1, c);
        for &w in g.neighbors(v) {
            if active[w] {
                net.arc(2 * v + 1, 2 * w, INF);
            }
        }
    }
    for &v in sources {
        if active[v] {
            net.arc(s, 2 * v, INF);
        }
    }
    for &v in sinks {
        if active[v] {
            net.arc(2 * v + 1, t, INF);
        }
    }
    let mut value = 0;
    while value < limit && net.augment(s, t) {
        value += 1;
    }
    let near = net.reachable_from(s);
    let far = net.reaching(t);
    let mut cut_near = BTreeSet::new();
    let mut cut_far = BTreeSet::new();
    let mut far_source_side = BTreeSet::new();
    for v in 0..n {
        if !active[v] {
            continue;
        }
        if near[2 * v] && !near[2 * v + 1] {
            cut_near.insert(v);
        }
        if !far[2 * v] && far[2 * v + 1] {
            cut_far.insert(v);
        } else if !far[2 * v] && !far[2 * v + 1] {
            far_source_side.insert(v);
        }
    }
    let paths = decompose(&net, n, s, t, value);
    VertexFlow {
        value,
        paths,
        cut_near,
        cut_far,
        far_source_side,
    }
}

fn decompose(net: &Network, n: usize, s: usize, t: usize, value: usize) -> Vec<Vec<usize>> {
    // Flow on arc e equals the residual capacity of its partner e^1 for
    // forward arcs (even ids).
    let mut flow: Vec<u32> = (0..net.to.len())
        .map(|e| if e % 2 == 0 { net.cap[e ^ 1] } else { 0 })
        .collect();
    let mut paths = Vec::with_capacity(value);
    for _ in 0..value {
        let mut path = Vec::new();
        let mut u = s;
        while u != t {
            let e = *net.head[u]
                .iter()
                .find(|&&e| e % 2 == 0 && flow[e] > 0)
                .expect("flow conservation");
            flow[e] -= 1;
            let v = net.to[e];
            if v < 2 * n && v % 2 == 0 {
                path.push(v / 2);
            }
            u = v;
        }
        paths.push(simplify(path));
    }
    paths
}

/// Removes cycles a flow path may contain after decomposition.
fn simplify(path: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(path.len());
    for v in path {
        if let Some(pos) = out.iter().position(|&x| x == v) {
            out.truncate(pos + 1);
        } else {
            out.push(v);
        }
    }
    out
}

/// Maximum number of vertex-disjoint `S`–`T2` paths, unit capacity on every
/// vertex. The demand restricted to `S × T2` must be a complete biclique.
pub fn max_flow_biclique(inst: &Instance, s: &[usize], t2: &[usize]) -> Result<usize> {
    Ok(biclique_linkage(inst, s, t2, usize::MAX)?.value)
}

/// As [`max_flow_biclique`], returning the full flow (paths and cuts).
pub fn biclique_linkage(inst: &Instance, s: &[usize], t2: &[usize], limit: usize) -> Result<VertexFlow> {
    for &a in s {
        for &b in t2 {
            if !inst.demand_adjacent(a, b) {
                return Err(DpathError::NotBiclique(a, b));
            }
        }
    }
    let n = inst.n();
    Ok(vertex_flow(
        inst.graph(),
        &vec![true; n],
        s,
        t2,
        &vec![false; n],
        limit,
    ))
}

/// Flow paths as a path set, trimmed so each path starts in `S` and ends in
/// `T2` without touching either set in between.
pub fn trim_linkage(paths: &[Vec<usize>], s: &[usize], t2: &[usize]) -> PathSet {
    let in_s: BTreeSet<usize> = s.iter().copied().collect();
    let in_t: BTreeSet<usize> = t2.iter().copied().collect();
    PathSet::new(
        paths
            .iter()
            .map(|p| {
                let start = p.iter().rposition(|v| in_s.contains(v)).unwrap_or(0);
                let rest = &p[start..];
                let end = rest.iter().position(|v| in_t.contains(v)).unwrap_or(rest.len() - 1);
                rest[..=end].to_vec()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_path_gives_one() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(g, vec![0, 2], &[(0, 2)], 1).unwrap();
        assert_eq!(max_flow_biclique(&inst, &[0], &[2]).unwrap(), 1);
    }

    #[test]
    fn cut_vertex_limits_flow() {
        // s1=0, s2=1 -> c=2 -> t1=3, t2=4
        let g = Graph::from_edges(5, &[(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap();
        let d = [(0, 3), (0, 4), (1, 3), (1, 4)];
        let inst = Instance::new(g, vec![0, 1, 3, 4], &d, 1).unwrap();
        assert_eq!(max_flow_biclique(&inst, &[0, 1], &[3, 4]).unwrap(), 1);
        let f = biclique_linkage(&inst, &[0, 1], &[3, 4], 5).unwrap();
        assert_eq!(f.cut_near, [2].into());
    }

    #[test]
    fn parallel_paths() {
        let g = Graph::from_edges(9, &[(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)]).unwrap();
        let d = [(0, 2), (0, 5), (0, 8), (3, 2), (3, 5), (3, 8), (6, 2), (6, 5), (6, 8)];
        let inst = Instance::new(g, vec![0, 3, 6, 2, 5, 8], &d, 3).unwrap();
        assert_eq!(max_flow_biclique(&inst, &[0, 3, 6], &[2, 5, 8]).unwrap(), 3);
    }

    #[test]
    fn non_biclique_rejected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(g, vec![0, 1, 2], &[(0, 2)], 1).unwrap();
        assert_eq!(max_flow_biclique(&inst, &[0], &[1, 2]), Err(DpathError::NotBiclique(0, 1)));
    }

    #[test]
    fn undeletable_vertices_never_cut() {
        // x=0 - a=1 - y=3, x - b=2 - y
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let mut und = vec![false; 4];
        und[0] = true;
        und[3] = true;
        let f = vertex_flow(&g, &[true; 4], &[0], &[3], &und, 10);
        assert_eq!(f.value, 2);
        assert_eq!(f.cut_near, [1, 2].into());
        assert_eq!(f.cut_far, [1, 2].into());
    }
}
