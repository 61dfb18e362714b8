use std::collections::BTreeSet;

use super::graph::mask_of;
use super::instance::{Instance, PathSet};
use crate::error::{DpathError, Result};

/// True iff the endpoints of `path` are distinct demand-adjacent terminals.
/// A sequence that is not a path of the supply graph is an error.
pub fn is_valid_path(inst: &Instance, path: &[usize]) -> Result<bool> {
    if !inst.graph().is_path(path) {
        return Err(DpathError::NotAPath(path.to_vec()));
    }
    let (s, t) = (path[0], path[path.len() - 1]);
    Ok(s != t && inst.is_terminal(s) && inst.is_terminal(t) && inst.demand_adjacent(s, t))
}

/// At least `k` paths, pairwise vertex-disjoint, each valid.
pub fn verify_solution(inst: &Instance, sol: &PathSet) -> bool {
    sol.len() >= inst.k()
        && sol.pairwise_disjoint()
        && sol
            .paths
            .iter()
            .all(|p| matches!(is_valid_path(inst, p), Ok(true)))
}

/// No component of `G - Z` contains two demand-adjacent terminals.
pub fn verify_hitting_set(inst: &Instance, z: &BTreeSet<usize>) -> bool {
    first_valid_path_avoiding(inst, z).is_none()
}

/// Smallest demand edge (in sorted order) whose endpoints share a component
/// of `G - Z`, with a shortest connecting path.
pub fn first_valid_path_avoiding(inst: &Instance, z: &BTreeSet<usize>) -> Option<Vec<usize>> {
    let n = inst.n();
    let mut active = vec![true; n];
    for &v in z {
        if v < n {
            active[v] = false;
        }
    }
    let comp = inst.graph().component_ids(&active);
    inst.demand_edges()
        .into_iter()
        .find(|&(s, t)| comp[s] != usize::MAX && comp[s] == comp[t])
        .and_then(|(s, t)| inst.graph().bfs_path(s, t, &active))
}

/// Whether any valid path lies inside the vertex set `region`.
pub fn has_valid_path_within(inst: &Instance, region: &[bool]) -> bool {
    let comp = inst.graph().component_ids(region);
    inst.demand_edges()
        .into_iter()
        .any(|(s, t)| comp[s] != usize::MAX && comp[s] == comp[t])
}

/// Shortest valid path inside `region`, for the smallest eligible demand edge.
pub fn valid_path_within(inst: &Instance, region: &[bool]) -> Option<Vec<usize>> {
    let comp = inst.graph().component_ids(region);
    inst.demand_edges()
        .into_iter()
        .find(|&(s, t)| comp[s] != usize::MAX && comp[s] == comp[t])
        .and_then(|(s, t)| inst.graph().bfs_path(s, t, region))
}

/// Region mask helper for a vertex set.
pub fn region(inst: &Instance, vertices: &BTreeSet<usize>) -> Vec<bool> {
    mask_of(inst.n(), vertices.iter().copied())
}
