use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{DpathError, Result};

/// Undirected simple graph on dense vertex ids `0..n`.
///
/// Adjacency lists are kept sorted, so iteration order (and everything
/// derived from it) is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(DpathError::InvalidInstance(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(DpathError::InvalidInstance(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Inserts `uv`; returns false for loops and duplicates.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                true
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        match self.adj[u].binary_search(&v) {
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("symmetric adjacency");
                self.adj[v].remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Component index per vertex of the subgraph induced by `active`
    /// (`usize::MAX` for inactive vertices). Components are numbered by
    /// their smallest vertex.
    pub fn component_ids(&self, active: &[bool]) -> Vec<usize> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if !active[s] || comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if active[w] && comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Vertex lists of the components of the subgraph induced by `active`,
    /// each sorted, ordered by smallest vertex.
    pub fn components(&self, active: &[bool]) -> Vec<Vec<usize>> {
        let comp = self.component_ids(active);
        let count = comp.iter().filter(|&&c| c != usize::MAX).max().map_or(0, |c| c + 1);
        let mut out = vec![Vec::new(); count];
        for (v, &c) in comp.iter().enumerate() {
            if c != usize::MAX {
                out[c].push(v);
            }
        }
        out
    }

    /// Vertices reachable from `s` inside `active` (`s` itself must be active).
    pub fn reach(&self, s: usize, active: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        if !active[s] {
            return seen;
        }
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if active[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Shortest `s`–`t` path inside `active`, smallest-id tie breaking.
    pub fn bfs_path(&self, s: usize, t: usize, active: &[bool]) -> Option<Vec<usize>> {
        if !active[s] || !active[t] {
            return None;
        }
        let mut prev = vec![usize::MAX; self.n()];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &w in &self.adj[u] {
                if active[w] && prev[w] == usize::MAX {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            return None;
        }
        let mut path = vec![t];
        let mut cur = t;
        while cur != s {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// True iff `seq` is a non-empty sequence of distinct vertices with
    /// consecutive ones adjacent.
    pub fn is_path(&self, seq: &[usize]) -> bool {
        if seq.is_empty() || seq.iter().any(|&v| v >= self.n()) {
            return false;
        }
        let mut seen = vec![false; self.n()];
        for &v in seq {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        seq.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// Subgraph induced by `keep` (in the given order); vertex `i` of the
    /// result is `keep[i]`.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

/// Boolean membership mask of length `n` for the listed vertices.
pub fn mask_of(n: usize, vertices: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut mask = vec![false; n];
    for v in vertices {
        mask[v] = true;
    }
    mask
}

/// Sorted list of the vertices set in `mask`.
pub fn members(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(v, &b)| b.then_some(v))
        .collect()
}
