//! Representative sets of compatible vectors and of partial solutions at a
//! separation.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{DpathError, Result};
use crate::graph_core::{solve_disjoint_pairs, Graph, Instance, PathSet, PatternWitness, Separation};
use crate::pattern_ramsey::{saturating_pow, staircase_to_witness};

/// `(d+1)^{d·4^{4r}}`, saturating.
pub fn rep_vector_bound(d: usize, r: usize) -> u128 {
    let exp = (d as u128).saturating_mul(saturating_pow(4, (4 * r) as u32));
    if exp > u32::MAX as u128 {
        return if d == 0 { 1 } else { u128::MAX };
    }
    saturating_pow(d as u128 + 1, exp as u32)
}

/// Two vectors are compatible when every coordinate pair is an edge of `h`.
pub fn compatible(h: &Graph, a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| h.has_edge(x, y))
}

/// Returns some member of the family inside the box `A_1 × … × A_d`
/// (given as vertex masks) together with a payload, or `None`.
pub type VectorQuery<'a, P> = dyn FnMut(&[Vec<bool>]) -> Result<Option<(Vec<usize>, P)>> + 'a;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepOutcome<P> {
    Set(Vec<(Vec<usize>, P)>),
    Witness(PatternWitness),
}

struct Pending {
    boxes: Vec<Vec<bool>>,
    path: Vec<(usize, usize)>,
}

/// Representative subset of a family of `d`-vectors over `V(h)` given by
/// a box query. Builds the search tree breadth-first: every empty node whose
/// failure box `B_1 × … × B_d` admits a compatible pair is filled by a query
/// on the neighborhood box. Same-index runs along a root path form a
/// staircase, and a witness is extracted from it as soon as one exists.
pub fn representative_vectors<P>(h: &Graph, d: usize, query: &mut VectorQuery<'_, P>, r: usize) -> Result<RepOutcome<P>> {
    let n = h.n();
    if d == 0 {
        return Ok(RepOutcome::Set(query(&[])?.into_iter().collect()));
    }
    let mut nodes: Vec<(Vec<usize>, Vec<usize>, P)> = Vec::new();
    let mut queue = VecDeque::from([Pending {
        boxes: vec![vec![true; n]; d],
        path: Vec::new(),
    }]);
    while let Some(u) = queue.pop_front() {
        let areas: Vec<Vec<bool>> = u
            .boxes
            .iter()
            .map(|b| (0..n).map(|v| h.neighbors(v).iter().any(|&w| b[w])).collect())
            .collect();
        let Some((a, payload)) = query(&areas)? else {
            continue;
        };
        if a.len() != d || a.iter().enumerate().any(|(j, &x)| x >= n || !areas[j][x]) {
            return Err(DpathError::Internal(format!("query returned {a:?} outside its box")));
        }
        let b: Vec<usize> = (0..d)
            .map(|j| *h.neighbors(a[j]).iter().find(|&&w| u.boxes[j][w]).expect("a_j has a neighbor in B_j"))
            .collect();
        let id = nodes.len();
        for j in 0..d {
            let mut boxes = u.boxes.clone();
            for v in 0..n {
                if h.has_edge(a[j], v) {
                    boxes[j][v] = false;
                }
            }
            for (jj, bx) in boxes.iter_mut().enumerate().take(j) {
                for (v, slot) in bx.iter_mut().enumerate() {
                    if !h.has_edge(a[jj], v) {
                        *slot = false;
                    }
                }
            }
            let mut path = u.path.clone();
            path.push((id, j));
            let same: Vec<usize> = path.iter().filter(|&&(_, jj)| jj == j).map(|&(x, _)| x).collect();
            if same.len() >= r {
                let sa: Vec<usize> = same
                    .iter()
                    .map(|&x| if x == id { a[j] } else { nodes[x].0[j] })
                    .collect();
                let sb: Vec<usize> = same
                    .iter()
                    .map(|&x| if x == id { b[j] } else { nodes[x].1[j] })
                    .collect();
                if let Ok(w) = staircase_to_witness(h, &sa, &sb, r) {
                    return Ok(RepOutcome::Witness(w));
                }
            }
            queue.push_back(Pending { boxes, path });
        }
        nodes.push((a, b, payload));
    }
    Ok(RepOutcome::Set(nodes.into_iter().map(|(a, _, p)| (a, p)).collect()))
}

/// `(S_0, J, M)`: single-vertex paths, join vertices of terminal-to-separator
/// paths (ascending), and the separator pairing of separator-to-separator
/// paths.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartialType {
    pub s0: BTreeSet<usize>,
    pub join: Vec<usize>,
    pub matching: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classified {
    pub ty: PartialType,
    /// Terminal endpoints of the join paths, ordered like `ty.join`.
    pub inner: Vec<usize>,
}

fn check_side(inst: &Instance, sep: &Separation) -> Result<BTreeSet<usize>> {
    let s = sep.separator();
    if let Some(&t) = s.iter().find(|&&v| inst.is_terminal(v)) {
        return Err(DpathError::Precondition(format!("separator contains terminal {t}")));
    }
    for (a, b) in inst.demand_edges() {
        if sep.side_a.contains(&a) && sep.side_a.contains(&b) {
            return Err(DpathError::Precondition(format!("demand edge ({a},{b}) inside the first side")));
        }
    }
    Ok(s)
}

/// Type and inner vector of a partial solution living in the first side.
pub fn classify_partial_solution(inst: &Instance, sep: &Separation, ps: &PathSet) -> Result<Classified> {
    let s = check_side(inst, sep)?;
    let mut ty = PartialType::default();
    let mut joins: Vec<(usize, usize)> = Vec::new();
    for p in &ps.paths {
        if p.is_empty() || p.iter().any(|v| !sep.side_a.contains(v)) {
            return Err(DpathError::Precondition(format!("path {p:?} leaves the first side")));
        }
        let (x, y) = (p[0], p[p.len() - 1]);
        match (p.len(), s.contains(&x), s.contains(&y)) {
            (1, true, _) => {
                ty.s0.insert(x);
            }
            (l, true, true) if l > 1 => ty.matching.push((x.min(y), x.max(y))),
            (l, true, false) if l > 1 && inst.is_terminal(y) => joins.push((x, y)),
            (l, false, true) if l > 1 && inst.is_terminal(x) => joins.push((y, x)),
            _ => return Err(DpathError::Precondition(format!("path {p:?} fits no class"))),
        }
    }
    joins.sort_unstable();
    ty.matching.sort_unstable();
    ty.join = joins.iter().map(|&(v, _)| v).collect();
    Ok(Classified {
        ty,
        inner: joins.iter().map(|&(_, t)| t).collect(),
    })
}

/// Maximal runs of each solution path inside `side`.
pub fn partial_solution_of(solution: &PathSet, side: &BTreeSet<usize>) -> PathSet {
    let mut out = Vec::new();
    for p in &solution.paths {
        let mut run: Vec<usize> = Vec::new();
        for &v in p {
            if side.contains(&v) {
                run.push(v);
            } else if !run.is_empty() {
                out.push(std::mem::take(&mut run));
            }
        }
        if !run.is_empty() {
            out.push(run);
        }
    }
    PathSet::new(out)
}

/// Swaps the first-side runs of `solution` for the paths of `partial`,
/// matching runs by their separator endpoints.
pub fn replace_partial(sep: &Separation, solution: &PathSet, partial: &PathSet) -> Result<PathSet> {
    let s = sep.separator();
    let mut by_end: Vec<Vec<usize>> = partial.paths.clone();
    let mut out = Vec::new();
    for p in &solution.paths {
        let mut q: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < p.len() {
            if !sep.side_a.contains(&p[i]) {
                q.push(p[i]);
                i += 1;
                continue;
            }
            let start = i;
            while i < p.len() && sep.side_a.contains(&p[i]) {
                i += 1;
            }
            let run = &p[start..i];
            let (x, y) = (run[0], run[run.len() - 1]);
            // Separator ends stay fixed; a terminal end is free to change.
            let key: Vec<usize> = [x, y].into_iter().filter(|v| s.contains(v)).collect();
            let pos = by_end
                .iter()
                .position(|c| {
                    let ends: BTreeSet<usize> = [c[0], c[c.len() - 1]].into_iter().filter(|v| s.contains(v)).collect();
                    ends == key.iter().copied().collect::<BTreeSet<usize>>()
                })
                .ok_or_else(|| DpathError::Precondition(format!("no replacement run for {run:?}")))?;
            let mut c = by_end.remove(pos);
            let forward = if s.contains(&x) { c[0] == x } else { c[c.len() - 1] == y };
            if !forward {
                c.reverse();
            }
            q.extend(c);
        }
        out.push(q);
    }
    Ok(PathSet::new(out))
}

/// Every type over separator `s` with at most `max_join` join vertices.
pub fn enumerate_types(s: &[usize], max_join: usize) -> Vec<PartialType> {
    fn matchings(v: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if v.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for i in 1..v.len() {
            let mut rest: Vec<usize> = v[1..].to_vec();
            rest.remove(i - 1);
            for mut m in matchings(&rest) {
                m.insert(0, (v[0], v[i]));
                out.push(m);
            }
        }
        out
    }
    let z = s.len();
    let mut out = Vec::new();
    let mut roles = vec![0u8; z];
    loop {
        let s0: BTreeSet<usize> = (0..z).filter(|&i| roles[i] == 1).map(|i| s[i]).collect();
        let join: Vec<usize> = (0..z).filter(|&i| roles[i] == 2).map(|i| s[i]).collect();
        let ends: Vec<usize> = (0..z).filter(|&i| roles[i] == 3).map(|i| s[i]).collect();
        if join.len() <= max_join && ends.len() % 2 == 0 {
            for m in matchings(&ends) {
                out.push(PartialType {
                    s0: s0.clone(),
                    join: join.clone(),
                    matching: m,
                });
            }
        }
        let mut i = 0;
        while i < z && roles[i] == 3 {
            roles[i] = 0;
            i += 1;
        }
        if i == z {
            break;
        }
        roles[i] += 1;
    }
    out.sort();
    out
}

/// A partial solution of type `ty` whose inner vector lies in the box, via
/// one disjoint-paths instance on `A - S_0` with a hub `s_j` joined to the
/// allowed terminals of coordinate `j`.
pub fn type_query(
    inst: &Instance,
    sep: &Separation,
    ty: &PartialType,
    areas: &[Vec<bool>],
    budget: u64,
) -> Result<Option<(Vec<usize>, PathSet)>> {
    let keep: Vec<usize> = sep.side_a.iter().copied().filter(|v| !ty.s0.contains(v)).collect();
    let mut local = vec![usize::MAX; inst.n()];
    for (i, &v) in keep.iter().enumerate() {
        local[v] = i;
    }
    let s = sep.separator();
    let mut g = inst.graph().induced(&keep);
    let mut pairs = Vec::new();
    for (j, &v) in ty.join.iter().enumerate() {
        let hub = g.add_vertex();
        for &t in &keep {
            if inst.is_terminal(t) && !s.contains(&t) && areas[j][t] {
                g.add_edge(hub, local[t]);
            }
        }
        pairs.push((hub, local[v]));
    }
    for &(u, v) in &ty.matching {
        pairs.push((local[u], local[v]));
    }
    let Some(found) = solve_disjoint_pairs(&g, &pairs, budget)? else {
        return Ok(None);
    };
    let d = ty.join.len();
    let mut paths: Vec<Vec<usize>> = ty.s0.iter().map(|&v| vec![v]).collect();
    let mut inner = Vec::with_capacity(d);
    for (i, p) in found.paths.iter().enumerate() {
        let body: Vec<usize> = if i < d { p[1..].iter().map(|&x| keep[x]).collect() } else { p.iter().map(|&x| keep[x]).collect() };
        if i < d {
            inner.push(body[0]);
        }
        paths.push(body);
    }
    Ok(Some((inner, PathSet::new(paths))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartialRepOutcome {
    Set(Vec<(PartialType, Vec<usize>, PathSet)>),
    Witness(PatternWitness),
}

/// Representative partial solutions at `sep`: for every type, the
/// representative vectors of the inner vectors realized by a partial
/// solution of that type.
pub fn representative_partial_solutions(inst: &Instance, sep: &Separation, k: usize, r: usize, budget: u64) -> Result<PartialRepOutcome> {
    let s: Vec<usize> = check_side(inst, sep)?.into_iter().collect();
    let r_star = r.max(10 * k * k);
    let mut out = Vec::new();
    for ty in enumerate_types(&s, k) {
        let mut query = |areas: &[Vec<bool>]| type_query(inst, sep, &ty, areas, budget);
        match representative_vectors(inst.demand(), ty.join.len(), &mut query, r_star)? {
            RepOutcome::Witness(w) => return Ok(PartialRepOutcome::Witness(w)),
            RepOutcome::Set(v) => out.extend(v.into_iter().map(|(a, p)| (ty.clone(), a, p))),
        }
    }
    Ok(PartialRepOutcome::Set(out))
}
