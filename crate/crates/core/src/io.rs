//! JSON instance and witness files, plus a DIMACS edge-list importer.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{DpathError, Result};
use crate::graph_core::{verify_hitting_set, verify_solution, Graph, Instance, PathSet, PatternWitness};
use crate::hardness_gen::{skew_valid, SkewLabeled};
use crate::pattern_ramsey::verify_witness;

/// On-disk instance. Edge lists are kept sorted with `u < v`, so writing a
/// parsed file reproduces it byte for byte.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub terminals: Vec<usize>,
    pub demand_edges: Vec<[usize; 2]>,
    pub k: usize,
    /// Present iff the instance is in skew-labeled form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, i64>>,
}

fn sorted_edges(edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<[usize; 2]> {
    let set: BTreeSet<[usize; 2]> = edges.into_iter().map(|(u, v)| [u.min(v), u.max(v)]).collect();
    set.into_iter().collect()
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let mut terminals = inst.terminals().to_vec();
        terminals.sort_unstable();
        InstanceFile {
            vertices: inst.n(),
            edges: sorted_edges(inst.graph().edges()),
            terminals,
            demand_edges: sorted_edges(inst.demand_edges()),
            k: inst.k(),
            labels: None,
        }
    }

    /// Demand edges are the label-valid terminal pairs.
    pub fn from_labeled(sl: &SkewLabeled, k: usize) -> Result<Self> {
        let mut f = Self::from_instance(&sl.to_instance(k)?);
        f.labels = Some(sl.labels.clone());
        Ok(f)
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::from_edges(self.vertices, &edges)?;
        let demand: Vec<(usize, usize)> = self.demand_edges.iter().map(|e| (e[0], e[1])).collect();
        let inst = Instance::new(g, self.terminals.clone(), &demand, self.k)?;
        if let Some(labels) = &self.labels {
            let keys: BTreeSet<usize> = labels.keys().copied().collect();
            let ts: BTreeSet<usize> = self.terminals.iter().copied().collect();
            if keys != ts {
                return Err(DpathError::Parse("labels: keys must be exactly the terminals".into()));
            }
            for (i, &a) in self.terminals.iter().enumerate() {
                for &b in &self.terminals[i + 1..] {
                    if skew_valid(labels[&a], labels[&b]) != inst.demand_adjacent(a, b) {
                        return Err(DpathError::Parse(format!("demand_edges: pair ({a},{b}) disagrees with its labels")));
                    }
                }
            }
        }
        Ok(inst)
    }

    pub fn to_labeled(&self) -> Result<Option<SkewLabeled>> {
        let Some(labels) = &self.labels else { return Ok(None) };
        let inst = self.to_instance()?;
        Ok(Some(SkewLabeled::new(inst.graph().clone(), labels.clone())?))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| DpathError::Parse(e.to_string()))?;
        f.to_instance()?;
        Ok(f)
    }
}

/// `p edge n m` header and 1-based `e u v` lines; `c` lines are comments.
pub fn read_dimacs(text: &str) -> Result<Graph> {
    let mut g: Option<Graph> = None;
    for (no, line) in text.lines().enumerate() {
        let err = |msg: &str| DpathError::Parse(format!("line {}: {msg}", no + 1));
        let mut it = line.split_whitespace();
        match it.next() {
            None | Some("c") => {}
            Some("p") => {
                let n = it.nth(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("expected `p edge <n> <m>`"))?;
                g = Some(Graph::new(n));
            }
            Some("e") => {
                let graph = g.as_mut().ok_or_else(|| err("edge before `p` line"))?;
                let mut end = || -> Option<usize> { it.next()?.parse::<usize>().ok()?.checked_sub(1) };
                let (u, v) = end().zip(end()).ok_or_else(|| err("expected `e <u> <v>` with 1-based ids"))?;
                if u >= graph.n() || v >= graph.n() || u == v {
                    return Err(err("edge endpoint out of range or a loop"));
                }
                graph.add_edge(u, v);
            }
            Some(other) => return Err(err(&format!("unknown line type `{other}`"))),
        }
    }
    g.ok_or_else(|| DpathError::Parse("missing `p` line".into()))
}

/// Terminals, demand and target for a supply graph read from DIMACS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandFile {
    pub terminals: Vec<usize>,
    pub demand_edges: Vec<[usize; 2]>,
    pub k: usize,
}

/// Combines a DIMACS supply graph with a JSON demand file.
pub fn instance_from_dimacs(graph_text: &str, demand_json: &str) -> Result<InstanceFile> {
    let g = read_dimacs(graph_text)?;
    let d: DemandFile = serde_json::from_str(demand_json).map_err(|e| DpathError::Parse(e.to_string()))?;
    let demand: Vec<(usize, usize)> = d.demand_edges.iter().map(|e| (e[0], e[1])).collect();
    Ok(InstanceFile::from_instance(&Instance::new(g, d.terminals, &demand, d.k)?))
}

/// Certificate attached to a run: disjoint paths for a target, a hitting
/// set, or a demand-graph pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessFile {
    Paths { k: usize, paths: Vec<Vec<usize>> },
    HittingSet { vertices: BTreeSet<usize> },
    Pattern { pattern: PatternWitness },
}

impl WitnessFile {
    pub fn verify(&self, inst: &Instance) -> bool {
        match self {
            WitnessFile::Paths { k, paths } => paths.len() >= *k && verify_solution(&inst.with_k(*k), &PathSet::new(paths.clone())),
            WitnessFile::HittingSet { vertices } => vertices.iter().all(|&v| v < inst.n()) && verify_hitting_set(inst, vertices),
            WitnessFile::Pattern { pattern } => {
                pattern.vertices.iter().all(|&v| v < inst.n() && inst.is_terminal(v)) && verify_witness(inst.demand(), pattern)
            }
        }
    }
}
