use std::collections::{BTreeMap, BTreeSet};

use super::skew::{skew_valid, SkewLabeled};
use super::GridTiling;
use crate::error::{DpathError, Result};
use crate::graph_core::{exact_max_disjoint, max_disjoint_value, Graph, Instance, PathSet, DEFAULT_BUDGET};

/// Labeled planar piece with distinguished unlabeled boundary vertices.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub graph: Graph,
    pub boundary: Vec<usize>,
    pub labels: BTreeMap<usize, i64>,
    pub names: Vec<String>,
    /// One partial solution per state. Partial paths run from a terminal to
    /// a boundary vertex; the rest are complete valid paths.
    pub witnesses: Vec<PathSet>,
    /// Labels routed to `boundary[0..]` by the matching witness.
    pub represents: Vec<Vec<i64>>,
}

impl Gadget {
    pub fn labeled(&self) -> SkewLabeled {
        SkewLabeled {
            graph: self.graph.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Number of complete paths and the label routed to each boundary
    /// vertex, or `None` if `ps` is not a partial solution.
    pub fn classify(&self, ps: &PathSet) -> Option<(usize, Vec<Option<i64>>)> {
        if !ps.pairwise_disjoint() {
            return None;
        }
        let mut routed = vec![None; self.boundary.len()];
        let mut complete = 0;
        for p in &ps.paths {
            if !self.graph.is_path(p) || p.len() < 2 {
                return None;
            }
            let first = *self.labels.get(&p[0])?;
            let last = p[p.len() - 1];
            if let Some(pos) = self.boundary.iter().position(|&b| b == last) {
                routed[pos] = Some(first);
            } else if skew_valid(first, *self.labels.get(&last)?) {
                complete += 1;
            } else {
                return None;
            }
        }
        Some((complete, routed))
    }

    /// Vertex id for a debug name such as `sel.q` or `g0,9`.
    pub fn vertex_named(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }
}

#[derive(Default)]
struct Builder {
    g: Graph,
    labels: BTreeMap<usize, i64>,
    names: Vec<String>,
}

impl Builder {
    fn vertex(&mut self, name: String) -> usize {
        self.names.push(name);
        self.g.add_vertex()
    }

    fn labeled(&mut self, name: String, label: i64) -> usize {
        let v = self.vertex(name);
        self.labels.insert(v, label);
        v
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.g.add_edge(u, v);
    }

    fn absorb(&mut self, other: &Gadget, prefix: &str) -> usize {
        let off = self.g.n();
        for name in &other.names {
            self.vertex(format!("{prefix}{name}"));
        }
        for (u, v) in other.graph.edges() {
            self.edge(off + u, off + v);
        }
        for (&v, &l) in &other.labels {
            self.labels.insert(off + v, l);
        }
        off
    }

    fn finish(self, boundary: Vec<usize>, witnesses: Vec<PathSet>, represents: Vec<Vec<i64>>) -> Gadget {
        Gadget {
            graph: self.g,
            boundary,
            labels: self.labels,
            names: self.names,
            witnesses,
            represents,
        }
    }
}

/// Two rails `x_0..x_{m+1}`, `y_0..y_{m+1}` joined by rungs `x_j y_j`.
/// Terminal `p_i` (label `6m+i`) hangs off `x_{i+1}`, `r_i` (label `-m-i`)
/// off `y_{i-1}`, `q` (label `3m`) off `x_0`, `s` (label `-3m`) off
/// `y_{m+1}`; three isolated labeled edges make up the count. Boundary is
/// `[b+, b-]` attached to `x_{m+1}` and `y_0`. State `i` routes `p_i` to
/// `b+`, `r_i` to `b-`, and `q` to `s` across rung `i`.
pub fn build_selector_gadget(m: usize) -> Gadget {
    let mut b = Builder::default();
    let mi = m as i64;
    let unit = mi.max(1);
    let x: Vec<usize> = (0..=m + 1).map(|j| b.vertex(format!("x{j}"))).collect();
    let y: Vec<usize> = (0..=m + 1).map(|j| b.vertex(format!("y{j}"))).collect();
    for j in 0..=m {
        b.edge(x[j], x[j + 1]);
        b.edge(y[j], y[j + 1]);
    }
    for j in 1..=m {
        b.edge(x[j], y[j]);
    }
    let p: Vec<usize> = (1..=m)
        .map(|i| {
            let v = b.labeled(format!("p{i}"), 6 * mi + i as i64);
            b.edge(v, x[i + 1]);
            v
        })
        .collect();
    let r: Vec<usize> = (1..=m)
        .map(|i| {
            let v = b.labeled(format!("r{i}"), -mi - i as i64);
            b.edge(v, y[i - 1]);
            v
        })
        .collect();
    let q = b.labeled("q".into(), 3 * unit);
    b.edge(q, x[0]);
    let s = b.labeled("s".into(), -3 * unit);
    b.edge(s, y[m + 1]);
    let bp = b.vertex("b+".into());
    b.edge(bp, x[m + 1]);
    let bm = b.vertex("b-".into());
    b.edge(bm, y[0]);
    let dummies: Vec<[usize; 2]> = [1, 4, 5]
        .iter()
        .map(|&c| {
            let u = b.labeled(format!("d{c}+"), c * unit);
            let v = b.labeled(format!("d{c}-"), -c * unit);
            b.edge(u, v);
            [u, v]
        })
        .collect();

    let mut witnesses = Vec::new();
    let mut represents = Vec::new();
    for i in 1..=m {
        let mut plus = vec![p[i - 1]];
        plus.extend(&x[i + 1..]);
        plus.push(bp);
        let mut minus = vec![r[i - 1]];
        minus.extend(y[..i].iter().rev());
        minus.push(bm);
        let mut cross = vec![q];
        cross.extend(&x[..=i]);
        cross.extend(&y[i..]);
        cross.push(s);
        let mut paths = vec![plus, minus, cross];
        paths.extend(dummies.iter().map(|d| d.to_vec()));
        witnesses.push(PathSet::new(paths));
        represents.push(vec![6 * mi + i as i64, -mi - i as i64]);
    }
    b.finish(vec![bp, bm], witnesses, represents)
}

/// Result of auditing every boundary routing of a selector by exhaustive
/// search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectorAudit {
    pub max_complete: usize,
    /// Label pairs routed to `(b+, b-)` alongside four complete paths.
    pub routings: BTreeSet<(i64, i64)>,
}

impl SelectorAudit {
    /// Every routing has the form `(6m+i, -m-j)` with `j <= i`.
    pub fn routings_well_formed(&self, m: usize) -> bool {
        let mi = m as i64;
        self.routings.iter().all(|&(a, b)| {
            let (i, j) = (a - 6 * mi, -b - mi);
            (1..=mi).contains(&i) && (1..=mi).contains(&j) && j <= i
        })
    }
}

pub fn selector_audit(m: usize) -> Result<SelectorAudit> {
    let gad = build_selector_gadget(m);
    let sl = gad.labeled();
    let max_complete = max_disjoint_value(&sl.to_instance(0)?, DEFAULT_BUDGET)?;
    let (bp, bm) = (gad.boundary[0], gad.boundary[1]);
    let ts: Vec<usize> = gad.labels.keys().copied().collect();
    let mut terminals = ts.clone();
    terminals.extend([bp, bm]);
    let mut routings = BTreeSet::new();
    for &u in &ts {
        for &v in &ts {
            if u == v {
                continue;
            }
            let rest: Vec<usize> = ts.iter().copied().filter(|&t| t != u && t != v).collect();
            let mut demand = vec![(bp, u), (bm, v)];
            for (i, &a) in rest.iter().enumerate() {
                for &c in &rest[i + 1..] {
                    if skew_valid(gad.labels[&a], gad.labels[&c]) {
                        demand.push((a, c));
                    }
                }
            }
            let inst = Instance::new(gad.graph.clone(), terminals.clone(), &demand, 6)?;
            if exact_max_disjoint(&inst)?.is_some() {
                routings.insert((gad.labels[&u], gad.labels[&v]));
            }
        }
    }
    Ok(SelectorAudit { max_complete, routings })
}

/// Selector plus a 10-row grid whose top row carries, per tuple block,
/// `-6m-i`, the eight tuple labels, and `m+i`. Boundary is rows 1..=8 of
/// the first column. Tuple coordinates must exceed `7m`.
pub fn build_general_gadget(tuples: &[Vec<i64>]) -> Result<Gadget> {
    let m = tuples.len();
    let mi = m as i64;
    if let Some(t) = tuples.iter().find(|t| t.len() != 8 || t.iter().any(|&c| c <= 7 * mi)) {
        return Err(DpathError::Precondition(format!("tuple {t:?} needs eight coordinates above {}", 7 * mi)));
    }
    let sel = build_selector_gadget(m);
    let mut b = Builder::default();
    let off = b.absorb(&sel, "sel.");
    let cols = (10 * m).max(1);
    let grid: Vec<Vec<usize>> = (0..10).map(|r| (0..cols).map(|c| b.vertex(format!("g{r},{c}"))).collect()).collect();
    for r in 0..10 {
        for c in 0..cols {
            if c + 1 < cols {
                b.edge(grid[r][c], grid[r][c + 1]);
            }
            if r + 1 < 10 {
                b.edge(grid[r][c], grid[r + 1][c]);
            }
        }
    }
    for (bi, t) in tuples.iter().enumerate() {
        let c0 = 10 * bi;
        b.labels.insert(grid[0][c0], -6 * mi - bi as i64 - 1);
        for (d, &l) in t.iter().enumerate() {
            b.labels.insert(grid[0][c0 + 1 + d], l);
        }
        b.labels.insert(grid[0][c0 + 9], mi + bi as i64 + 1);
    }
    b.edge(off + sel.boundary[0], grid[0][0]);
    b.edge(off + sel.boundary[1], grid[9][0]);
    let boundary: Vec<usize> = (1..=8).map(|r| grid[r][0]).collect();

    let mut witnesses = Vec::new();
    for (bi, w) in sel.witnesses.iter().enumerate() {
        let c0 = 10 * bi;
        let mut paths: Vec<Vec<usize>> = w.paths.iter().map(|p| p.iter().map(|&v| off + v).collect()).collect();
        paths[0].extend((0..=c0).map(|c| grid[0][c]));
        paths[1].extend((0..=c0 + 9).map(|c| grid[9][c]));
        paths[1].extend((0..9).rev().map(|r| grid[r][c0 + 9]));
        for r in 1..=8 {
            let mut p: Vec<usize> = (0..=r).map(|rr| grid[rr][c0 + r]).collect();
            p.extend((0..c0 + r).rev().map(|c| grid[r][c]));
            paths.push(p);
        }
        witnesses.push(PathSet::new(paths));
    }
    Ok(b.finish(boundary, witnesses, tuples.to_vec()))
}

/// `(B+x, B-x, B+y, B-y, B+x, B-x, B+y, B-y)`.
pub fn main_tuple(base: i64, x: usize, y: usize) -> Vec<i64> {
    let (x, y) = (x as i64, y as i64);
    vec![base + x, base - x, base + y, base - y, base + x, base - x, base + y, base - y]
}

/// General gadget over the tuples of `set` in sorted order. Needs
/// `base > 8n^2` or `base < -n`; a negative base is realised by building
/// the positive gadget at `8n^2+1` and shifting every label toward the
/// opposite sign, which keeps the validity table.
pub fn build_main_gadget(n: usize, base: i64, set: &BTreeSet<(usize, usize)>) -> Result<Gadget> {
    let ni = n as i64;
    let pos_min = 8 * ni * ni;
    if base > pos_min {
        let tuples: Vec<Vec<i64>> = set.iter().map(|&(x, y)| main_tuple(base, x, y)).collect();
        return build_general_gadget(&tuples);
    }
    if base >= -ni {
        return Err(DpathError::Precondition(format!("base {base} must exceed {pos_min} or be below {}", -ni)));
    }
    let mut gad = build_main_gadget(n, pos_min + 1, set)?;
    let delta = pos_min + 1 - base;
    let shift = |l: i64| if l > 0 { l - delta } else { l + delta };
    let before = gad.labels.clone();
    for l in gad.labels.values_mut() {
        *l = shift(*l);
    }
    for (&u, &a) in &before {
        for (&v, &b) in &before {
            if skew_valid(a, b) != skew_valid(gad.labels[&u], gad.labels[&v]) {
                return Err(DpathError::Internal(format!("relabel by {delta} changed validity of ({u},{v})")));
            }
        }
    }
    for t in gad.represents.iter_mut() {
        for l in t.iter_mut() {
            *l = shift(*l);
        }
    }
    Ok(gad)
}

#[derive(Clone, Debug)]
pub struct SkewReduction {
    pub labeled: SkewLabeled,
    pub k_prime: usize,
    /// Boundary vertices after identification.
    pub boundary: Vec<usize>,
    pub witness: Option<PathSet>,
    pub names: Vec<String>,
}

fn find(parent: &mut [usize], v: usize) -> usize {
    let mut r = v;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = v;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Main gadgets in a checkerboard of signs, neighbours glued along their
/// boundaries; unglued boundary vertices become terminals. The result has
/// `4k(k+1) + 6k^2` disjoint valid paths iff the tiling is solvable.
pub fn reduce_skew(gt: &GridTiling) -> Result<SkewReduction> {
    let (k, n) = (gt.k, gt.n);
    if k == 0 || n == 0 {
        return Err(DpathError::Precondition("grid tiling needs k, n >= 1".into()));
    }
    let z = 10 * (n * n) as i64;
    let mut gadgets = Vec::with_capacity(k * k);
    let mut offsets = Vec::with_capacity(k * k);
    let mut total = 0;
    for i in 0..k {
        for j in 0..k {
            let base = if (i + j) % 2 == 0 { z } else { -z };
            let gad = build_main_gadget(n, base, &gt.sets[i][j])?;
            offsets.push(total);
            total += gad.graph.n();
            gadgets.push(gad);
        }
    }
    let at = |i: usize, j: usize| i * k + j;
    let bnd = |gi: usize, r: usize| offsets[gi] + gadgets[gi].boundary[r];
    let mut parent: Vec<usize> = (0..total).collect();
    let mut glue = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    };
    for i in 0..k {
        for j in 0..k {
            if j + 1 < k {
                glue(bnd(at(i, j), 0), bnd(at(i, j + 1), 5));
                glue(bnd(at(i, j), 1), bnd(at(i, j + 1), 4));
            }
            if i + 1 < k {
                glue(bnd(at(i, j), 2), bnd(at(i + 1, j), 7));
                glue(bnd(at(i, j), 3), bnd(at(i + 1, j), 6));
            }
        }
    }
    let mut id = vec![usize::MAX; total];
    let mut names: Vec<String> = Vec::new();
    for v in 0..total {
        let r = find(&mut parent, v);
        if id[r] == usize::MAX {
            id[r] = names.len();
            names.push(String::new());
        }
        id[v] = id[r];
    }
    let mut g = Graph::new(names.len());
    let mut labels = BTreeMap::new();
    for (gi, gad) in gadgets.iter().enumerate() {
        let o = offsets[gi];
        for (local, name) in gad.names.iter().enumerate() {
            let slot = &mut names[id[o + local]];
            if !slot.is_empty() {
                slot.push('=');
            }
            slot.push_str(&format!("G{},{}.{name}", gi / k, gi % k));
        }
        for (u, v) in gad.graph.edges() {
            g.add_edge(id[o + u], id[o + v]);
        }
        for (&v, &l) in &gad.labels {
            labels.insert(id[o + v], l);
        }
    }

    let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
    for gi in 0..k * k {
        for r in 0..8 {
            *class_size.entry(id[bnd(gi, r)]).or_default() += 1;
        }
    }
    let expected = 4 * k * (k + 1);
    if class_size.len() != expected {
        return Err(DpathError::Internal(format!("{} boundary vertices, expected {expected}", class_size.len())));
    }
    let ni = n as i64;
    for gi in 0..k * k {
        let positive = (gi / k + gi % k) % 2 == 0;
        for r in 0..8 {
            let v = id[bnd(gi, r)];
            if class_size[&v] == 1 {
                labels.insert(v, if positive { -z - ni } else { z - ni });
            }
        }
    }
    let k_prime = expected + 6 * k * k;

    let witness = match &gt.solution {
        Some(sol) if gt.is_solution(sol) => {
            let mut paths = Vec::new();
            let mut halves: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (gi, gad) in gadgets.iter().enumerate() {
                let (i, j) = (gi / k, gi % k);
                let state = gt.sets[i][j].iter().position(|&p| p == sol[i][j]).expect("solution lies in its set");
                for p in &gad.witnesses[state].paths {
                    let mapped: Vec<usize> = p.iter().map(|&v| id[offsets[gi] + v]).collect();
                    let end = *mapped.last().unwrap();
                    if !class_size.contains_key(&end) || class_size[&end] == 1 {
                        paths.push(mapped);
                    } else if let Some(mut first) = halves.remove(&end) {
                        first.extend(mapped.iter().rev().skip(1));
                        paths.push(first);
                    } else {
                        halves.insert(end, mapped);
                    }
                }
            }
            if !halves.is_empty() {
                return Err(DpathError::Internal("unpaired half path in planted witness".into()));
            }
            Some(PathSet::new(paths))
        }
        _ => None,
    };
    Ok(SkewReduction {
        labeled: SkewLabeled { graph: g, labels },
        k_prime,
        boundary: class_size.keys().copied().collect(),
        witness,
        names,
    })
}
