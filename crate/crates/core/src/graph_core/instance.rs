use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::graph::{mask_of, Graph};
use crate::error::{DpathError, Result};

/// Supply graph, terminals, demand graph on the terminals, and target `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    terminals: Vec<usize>,
    is_terminal: Vec<bool>,
    demand: Graph,
    k: usize,
}

impl Instance {
    /// Builds an instance. The demand graph is given by its edges over
    /// supply-graph vertex ids; every demand endpoint must be a terminal.
    pub fn new(
        graph: Graph,
        terminals: Vec<usize>,
        demand_edges: &[(usize, usize)],
        k: usize,
    ) -> Result<Self> {
        let n = graph.n();
        let mut is_terminal = vec![false; n];
        for &t in &terminals {
            if t >= n {
                return Err(DpathError::InvalidInstance(format!(
                    "terminal {t} out of range for {n} vertices"
                )));
            }
            if is_terminal[t] {
                return Err(DpathError::InvalidInstance(format!("terminal {t} listed twice")));
            }
            is_terminal[t] = true;
        }
        let mut demand = Graph::new(n);
        for &(s, t) in demand_edges {
            if s >= n || t >= n || !is_terminal[s] || !is_terminal[t] {
                return Err(DpathError::InvalidInstance(format!(
                    "demand edge ({s},{t}) has a non-terminal endpoint"
                )));
            }
            if s == t {
                return Err(DpathError::InvalidInstance(format!("demand self-loop at {s}")));
            }
            demand.add_edge(s, t);
        }
        Ok(Instance {
            graph,
            terminals,
            is_terminal,
            demand,
            k,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.is_terminal[v]
    }

    /// Demand graph over supply vertex ids; non-terminals are isolated.
    pub fn demand(&self) -> &Graph {
        &self.demand
    }

    pub fn demand_edges(&self) -> Vec<(usize, usize)> {
        self.demand.edges()
    }

    pub fn demand_adjacent(&self, u: usize, v: usize) -> bool {
        self.demand.has_edge(u, v)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn with_k(&self, k: usize) -> Instance {
        Instance { k, ..self.clone() }
    }

    /// Same supply graph with `t` no longer a terminal.
    pub fn without_terminal(&self, t: usize) -> Instance {
        let terminals: Vec<usize> = self.terminals.iter().copied().filter(|&x| x != t).collect();
        let demand: Vec<(usize, usize)> = self
            .demand_edges()
            .into_iter()
            .filter(|&(a, b)| a != t && b != t)
            .collect();
        Instance::new(self.graph.clone(), terminals, &demand, self.k).expect("subset stays valid")
    }

    /// Same terminals and demand on a different supply graph with the same
    /// vertex count.
    pub fn with_graph(&self, graph: Graph) -> Result<Instance> {
        if graph.n() != self.n() {
            return Err(DpathError::InvalidInstance("vertex count changed".into()));
        }
        Instance::new(graph, self.terminals.clone(), &self.demand_edges(), self.k)
    }

    /// Sub-instance induced by `keep`: terminals and demand restricted to
    /// kept vertices. Vertex `i` of the result is `keep[i]`.
    pub fn induced(&self, keep: &[usize], k: usize) -> Instance {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let graph = self.graph.induced(keep);
        let terminals: Vec<usize> = self
            .terminals
            .iter()
            .filter(|&&t| index[t] != usize::MAX)
            .map(|&t| index[t])
            .collect();
        let demand: Vec<(usize, usize)> = self
            .demand_edges()
            .into_iter()
            .filter(|&(a, b)| index[a] != usize::MAX && index[b] != usize::MAX)
            .map(|(a, b)| (index[a], index[b]))
            .collect();
        Instance::new(graph, terminals, &demand, k).expect("induced instance stays valid")
    }

    /// Terminals form an independent set and each has degree at most one.
    pub fn has_pendant_terminals(&self) -> bool {
        self.terminals.iter().all(|&t| {
            self.graph.degree(t) <= 1 && self.graph.neighbors(t).iter().all(|&u| !self.is_terminal[u])
        })
    }

    pub fn terminal_mask(&self) -> Vec<bool> {
        self.is_terminal.clone()
    }
}

/// A list of vertex sequences claimed to be pairwise disjoint paths.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSet {
    pub paths: Vec<Vec<usize>>,
}

impl PathSet {
    pub fn new(paths: Vec<Vec<usize>>) -> Self {
        PathSet { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.paths.iter().flatten().copied().collect()
    }

    /// No vertex appears twice across all paths.
    pub fn pairwise_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.paths.iter().flatten().all(|&v| seen.insert(v))
    }
}

/// A separation `(A, B)`: the two vertex sets cover `V(G)` and no edge
/// joins `A \ B` to `B \ A`. Edges inside `A ∩ B` count as edges of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub side_a: BTreeSet<usize>,
    pub side_b: BTreeSet<usize>,
}

impl Separation {
    pub fn new(side_a: BTreeSet<usize>, side_b: BTreeSet<usize>) -> Self {
        Separation { side_a, side_b }
    }

    pub fn order(&self) -> usize {
        self.side_a.intersection(&self.side_b).count()
    }

    pub fn separator(&self) -> BTreeSet<usize> {
        self.side_a.intersection(&self.side_b).copied().collect()
    }

    pub fn a_only(&self) -> BTreeSet<usize> {
        self.side_a.difference(&self.side_b).copied().collect()
    }

    pub fn b_only(&self) -> BTreeSet<usize> {
        self.side_b.difference(&self.side_a).copied().collect()
    }

    /// Checks the separation invariants against `g` restricted to `active`
    /// (the whole graph when `active` is `None`).
    pub fn is_valid_in(&self, g: &Graph, active: Option<&[bool]>) -> bool {
        let n = g.n();
        let full = vec![true; n];
        let active = active.unwrap_or(&full);
        let a = mask_of(n, self.side_a.iter().copied());
        let b = mask_of(n, self.side_b.iter().copied());
        for v in 0..n {
            if active[v] != (a[v] || b[v]) {
                return false;
            }
        }
        for (u, v) in g.edges() {
            if !active[u] || !active[v] {
                continue;
            }
            let u_a = a[u] && !b[u];
            let u_b = b[u] && !a[u];
            let v_a = a[v] && !b[v];
            let v_b = b[v] && !a[v];
            if (u_a && v_b) || (u_b && v_a) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    /// Vertices listed as `x1, y1, x2, y2, ...`; exactly the pairs are edges.
    InducedMatching,
    /// `a_1..a_n` then `b_1..b_n`; `a_i ~ b_j` iff `i <= j`, sides independent.
    SkewBiclique,
    Clique,
    /// `a_1..a_n` then `b_1..b_n`; every `a_i ~ b_j`. Subgraph-level only.
    Biclique,
}

/// A demand-graph pattern with its vertex list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternWitness {
    pub kind: WitnessKind,
    pub vertices: Vec<usize>,
}

impl PatternWitness {
    pub fn new(kind: WitnessKind, vertices: Vec<usize>) -> Self {
        PatternWitness { kind, vertices }
    }

    /// Number of pattern units: matching edges, side length, or clique size.
    pub fn size(&self) -> usize {
        match self.kind {
            WitnessKind::Clique => self.vertices.len(),
            _ => self.vertices.len() / 2,
        }
    }
}

/// An instance whose terminals are fresh pendant copies of the original
/// terminals, with the demand moved onto the copies.
#[derive(Clone, Debug)]
pub struct AttachedInstance {
    pub instance: Instance,
    /// Vertex count of the original instance; ids below it are unchanged.
    pub original_n: usize,
    /// `copy_of[i]` is the original terminal behind vertex `original_n + i`.
    pub copy_of: Vec<usize>,
}

impl AttachedInstance {
    /// Maps a vertex of the attached graph to the original graph.
    pub fn to_original(&self, v: usize) -> usize {
        if v < self.original_n {
            v
        } else {
            self.copy_of[v - self.original_n]
        }
    }

    /// Copy vertex standing for original terminal `t`.
    pub fn copy_vertex(&self, t: usize) -> Option<usize> {
        self.copy_of.iter().position(|&x| x == t).map(|i| self.original_n + i)
    }

    /// Drops the pendant endpoints of every path.
    pub fn paths_to_original(&self, ps: &PathSet) -> PathSet {
        PathSet::new(
            ps.paths
                .iter()
                .map(|p| {
                    p.iter()
                        .copied()
                        .filter(|&v| v < self.original_n)
                        .collect::<Vec<_>>()
                })
                .collect(),
        )
    }

    /// `(Z \ T') ∪ {x : x' ∈ Z}`.
    pub fn set_to_original(&self, z: &BTreeSet<usize>) -> BTreeSet<usize> {
        z.iter().map(|&v| self.to_original(v)).collect()
    }
}

/// Adds a pendant copy `x'` for every terminal `x` and moves the demand onto
/// the copies. Valid paths correspond one-to-one (strip or add the copies),
/// so solvability is preserved for every `k`.
pub fn attach_degree_one_terminals(inst: &Instance) -> AttachedInstance {
    let n = inst.n();
    let mut graph = inst.graph().clone();
    let mut copy_of = Vec::with_capacity(inst.terminals().len());
    let mut copy = vec![usize::MAX; n];
    for &t in inst.terminals() {
        let c = graph.add_vertex();
        graph.add_edge(t, c);
        copy[t] = c;
        copy_of.push(t);
    }
    let terminals: Vec<usize> = inst.terminals().iter().map(|&t| copy[t]).collect();
    let demand: Vec<(usize, usize)> = inst
        .demand_edges()
        .into_iter()
        .map(|(a, b)| (copy[a], copy[b]))
        .collect();
    let instance = Instance::new(graph, terminals, &demand, inst.k()).expect("copies are valid");
    AttachedInstance {
        instance,
        original_n: n,
        copy_of,
    }
}
