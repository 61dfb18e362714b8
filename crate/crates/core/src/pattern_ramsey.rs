//! Constructive Ramsey extractors and verifiers for demand-graph patterns.

use crate::error::{DpathError, Result};
use crate::graph_core::{Graph, PatternWitness, WitnessKind};

/// Adjacency oracle for a (possibly implicit) demand graph.
pub trait Adjacency {
    fn adjacent(&self, u: usize, v: usize) -> bool;
}

impl Adjacency for Graph {
    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
}

impl<A: Adjacency + ?Sized> Adjacency for &A {
    fn adjacent(&self, u: usize, v: usize) -> bool {
        (**self).adjacent(u, v)
    }
}

/// A `c`-coloring of the pairs of `{0, .., n-1}` with colors `1..=c`.
pub struct EdgeColoring<'a> {
    pub n: usize,
    pub c: usize,
    color_of: Box<dyn Fn(usize, usize) -> usize + 'a>,
}

impl<'a> EdgeColoring<'a> {
    /// `f(i, j)` is only called with `i < j`.
    pub fn from_fn(n: usize, c: usize, f: impl Fn(usize, usize) -> usize + 'a) -> Self {
        EdgeColoring {
            n,
            c,
            color_of: Box::new(f),
        }
    }

    pub fn color(&self, i: usize, j: usize) -> usize {
        if i < j {
            (self.color_of)(i, j)
        } else {
            (self.color_of)(j, i)
        }
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub fn saturating_pow(base: u128, exp: u32) -> u128 {
    base.saturating_pow(exp)
}

/// Vertex count `c^{rc}` guaranteeing a monochromatic `r`-clique.
pub fn ramsey_threshold(c: usize, r: usize) -> u128 {
    saturating_pow(c as u128, (r * c) as u32)
}

/// Monochromatic `r`-clique by iterated pigeonhole: take the first
/// candidate, keep its largest same-color class, record the color, repeat.
/// The recorded vertices sharing a color (plus the current one) form a
/// clique in that color. Below `c^{rc}` vertices the search still runs and
/// only reports an error if it comes up empty.
pub fn find_monochromatic_clique(col: &EdgeColoring<'_>, r: usize) -> Result<Vec<usize>> {
    if r == 0 {
        return Ok(Vec::new());
    }
    if col.n == 0 {
        return Err(DpathError::Precondition("empty coloring".into()));
    }
    if r == 1 {
        return Ok(vec![0]);
    }
    let check = |i: usize, j: usize| -> Result<usize> {
        let x = col.color(i, j);
        if x == 0 || x > col.c {
            Err(DpathError::Precondition(format!(
                "pair ({i},{j}) has color {x} outside 1..={}",
                col.c
            )))
        } else {
            Ok(x)
        }
    };
    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); col.c + 1];
    let mut cand: Vec<usize> = (0..col.n).collect();
    while let Some((&v, rest)) = cand.split_first() {
        for x in 1..=col.c {
            let have = by_color[x].len();
            if have + 1 >= r {
                let mut out = by_color[x].clone();
                out.push(v);
                return Ok(out);
            }
            if have + 2 >= r {
                for &u in rest {
                    if check(v, u)? == x {
                        let mut out = by_color[x].clone();
                        out.push(v);
                        out.push(u);
                        return Ok(out);
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); col.c + 1];
        for &u in rest {
            classes[check(v, u)?].push(u);
        }
        let best = (1..=col.c)
            .max_by(|&a, &b| classes[a].len().cmp(&classes[b].len()).then(b.cmp(&a)))
            .expect("at least one color");
        by_color[best].push(v);
        cand = std::mem::take(&mut classes[best]);
    }
    if col.n <= EXHAUSTIVE_LIMIT {
        for x in 1..=col.c {
            let mut cur = Vec::new();
            if mono_search(col, x, r, 0, &mut cur) {
                return Ok(cur);
            }
        }
    }
    Err(DpathError::Precondition(format!(
        "no monochromatic {r}-clique found among {} vertices (guarantee needs {})",
        col.n,
        ramsey_threshold(col.c, r)
    )))
}

/// Below this many vertices a failed pigeonhole pass is followed by an
/// exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 24;

fn mono_search(col: &EdgeColoring<'_>, x: usize, r: usize, from: usize, cur: &mut Vec<usize>) -> bool {
    if cur.len() == r {
        return true;
    }
    for v in from..col.n {
        if cur.len() + (col.n - v) < r {
            return false;
        }
        if cur.iter().all(|&u| col.color(u, v) == x) {
            cur.push(v);
            if mono_search(col, x, r, v + 1, cur) {
                return true;
            }
            cur.pop();
        }
    }
    false
}

/// Matching size `5^{10r}` at which [`matching_to_induced_or_biclique`] is
/// guaranteed to succeed.
pub fn matching_threshold(r: usize) -> u128 {
    saturating_pow(5, (10 * r) as u32)
}

/// Staircase length `4^{4r}` at which [`staircase_to_witness`] is
/// guaranteed to succeed.
pub fn staircase_threshold(r: usize) -> u128 {
    saturating_pow(4, (4 * r) as u32)
}

fn check_disjoint(pairs: &[(usize, usize)]) -> Result<()> {
    let max = pairs.iter().map(|&(x, y)| x.max(y)).max().unwrap_or(0);
    let mut seen = vec![false; max + 1];
    for &(x, y) in pairs {
        for v in [x, y] {
            if seen[v] {
                return Err(DpathError::Precondition(format!(
                    "matching edges are not disjoint at vertex {v}"
                )));
            }
            seen[v] = true;
        }
    }
    Ok(())
}

/// From a matching `{x_i y_i}` of `H`, an induced matching of size `2r`, a
/// clique of size `2r`, or a `K_{r,r}` subgraph. Pairs `i < j` are colored
/// by the `H`-edges between `{x_i, y_i}` and `{x_j, y_j}` and a
/// monochromatic `2r`-clique decides the outcome.
pub fn matching_to_induced_or_biclique<H: Adjacency + ?Sized>(
    h: &H,
    matching: &[(usize, usize)],
    r: usize,
) -> Result<PatternWitness> {
    check_disjoint(matching)?;
    if r == 0 {
        return Err(DpathError::Precondition("r must be positive".into()));
    }
    let color = |i: usize, j: usize| -> usize {
        let (xi, yi) = matching[i];
        let (xj, yj) = matching[j];
        if h.adjacent(xi, xj) {
            2
        } else if h.adjacent(yi, yj) {
            3
        } else if h.adjacent(xi, yj) {
            4
        } else if h.adjacent(yi, xj) {
            5
        } else {
            1
        }
    };
    let col = EdgeColoring::from_fn(matching.len(), 5, color);
    let idx = find_monochromatic_clique(&col, 2 * r)?;
    let c = if idx.len() >= 2 { col.color(idx[0], idx[1]) } else { 1 };
    let w = match c {
        1 => PatternWitness::new(
            WitnessKind::InducedMatching,
            idx.iter().flat_map(|&i| [matching[i].0, matching[i].1]).collect(),
        ),
        2 => PatternWitness::new(WitnessKind::Clique, idx.iter().map(|&i| matching[i].0).collect()),
        3 => PatternWitness::new(WitnessKind::Clique, idx.iter().map(|&i| matching[i].1).collect()),
        4 => {
            let mut v: Vec<usize> = idx[..r].iter().map(|&i| matching[i].0).collect();
            v.extend(idx[r..].iter().map(|&i| matching[i].1));
            PatternWitness::new(WitnessKind::Biclique, v)
        }
        _ => {
            let mut v: Vec<usize> = idx[..r].iter().map(|&i| matching[i].1).collect();
            v.extend(idx[r..].iter().map(|&i| matching[i].0));
            PatternWitness::new(WitnessKind::Biclique, v)
        }
    };
    if !verify_witness(h, &w) {
        return Err(DpathError::Internal(format!("extracted witness fails verification: {w:?}")));
    }
    Ok(w)
}

/// From a staircase (`a_i ~ b_i`, `a_i ≁ b_j` for `i < j`), an induced
/// matching of size `r`, an induced skew biclique on `r + r` vertices, or
/// a clique of size `r`.
pub fn staircase_to_witness<H: Adjacency + ?Sized>(
    h: &H,
    a: &[usize],
    b: &[usize],
    r: usize,
) -> Result<PatternWitness> {
    if a.len() != b.len() {
        return Err(DpathError::Precondition("staircase sides differ in length".into()));
    }
    if r == 0 {
        return Err(DpathError::Precondition("r must be positive".into()));
    }
    let all: Vec<(usize, usize)> = a.iter().copied().zip(b.iter().copied()).collect();
    check_disjoint(&all)?;
    for i in 0..a.len() {
        if !h.adjacent(a[i], b[i]) {
            return Err(DpathError::Precondition(format!(
                "a_{i}={} and b_{i}={} are not adjacent",
                a[i], b[i]
            )));
        }
        for j in i + 1..a.len() {
            if h.adjacent(a[i], b[j]) {
                return Err(DpathError::Precondition(format!(
                    "a_{i}={} and b_{j}={} are adjacent",
                    a[i], b[j]
                )));
            }
        }
    }
    let color = |i: usize, j: usize| -> usize {
        if h.adjacent(a[i], a[j]) {
            2
        } else if h.adjacent(b[i], b[j]) {
            3
        } else if h.adjacent(b[i], a[j]) {
            4
        } else {
            1
        }
    };
    let col = EdgeColoring::from_fn(a.len(), 4, color);
    let idx = find_monochromatic_clique(&col, r)?;
    let c = if idx.len() >= 2 { col.color(idx[0], idx[1]) } else { 1 };
    let w = match c {
        1 => PatternWitness::new(
            WitnessKind::InducedMatching,
            idx.iter().flat_map(|&i| [a[i], b[i]]).collect(),
        ),
        2 => PatternWitness::new(WitnessKind::Clique, idx.iter().map(|&i| a[i]).collect()),
        3 => PatternWitness::new(WitnessKind::Clique, idx.iter().map(|&i| b[i]).collect()),
        _ => {
            // b_i ~ a_j exactly for i <= j inside the selection, so the
            // b's form the first side and the a's the second.
            let mut v: Vec<usize> = idx.iter().map(|&i| b[i]).collect();
            v.extend(idx.iter().map(|&i| a[i]));
            PatternWitness::new(WitnessKind::SkewBiclique, v)
        }
    };
    if !verify_witness(h, &w) {
        return Err(DpathError::Internal(format!("extracted witness fails verification: {w:?}")));
    }
    Ok(w)
}

fn distinct(v: &[usize]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1])
}

/// Checks a witness against `H`. Induced matchings and skew bicliques are
/// checked as induced subgraphs; bicliques only across the two sides.
pub fn verify_witness<H: Adjacency + ?Sized>(h: &H, w: &PatternWitness) -> bool {
    let v = &w.vertices;
    if v.is_empty() || !distinct(v) {
        return false;
    }
    match w.kind {
        WitnessKind::Clique => (0..v.len()).all(|i| (i + 1..v.len()).all(|j| h.adjacent(v[i], v[j]))),
        WitnessKind::InducedMatching => {
            v.len() % 2 == 0
                && (0..v.len()).all(|i| {
                    (i + 1..v.len()).all(|j| h.adjacent(v[i], v[j]) == (i % 2 == 0 && j == i + 1))
                })
        }
        WitnessKind::SkewBiclique => {
            if v.len() % 2 != 0 {
                return false;
            }
            let n = v.len() / 2;
            let (sa, sb) = v.split_at(n);
            (0..n).all(|i| {
                (0..n).all(|j| h.adjacent(sa[i], sb[j]) == (i <= j))
                    && (i + 1..n).all(|j| !h.adjacent(sa[i], sa[j]) && !h.adjacent(sb[i], sb[j]))
            })
        }
        WitnessKind::Biclique => {
            if v.len() % 2 != 0 {
                return false;
            }
            let (sa, sb) = v.split_at(v.len() / 2);
            sa.iter().all(|&x| sb.iter().all(|&y| h.adjacent(x, y)))
        }
    }
}

/// Largest candidate count accepted by [`brute_find_pattern`].
pub const BRUTE_LIMIT: usize = 16;

/// Exhaustive search over all vertices of `h`.
pub fn brute_find_pattern(h: &Graph, kind: WitnessKind, size: usize) -> Result<Option<PatternWitness>> {
    let all: Vec<usize> = (0..h.n()).collect();
    brute_find_pattern_on(h, &all, kind, size)
}

/// Exhaustive search for a pattern of `size` units among `candidates`.
pub fn brute_find_pattern_on(
    h: &Graph,
    candidates: &[usize],
    kind: WitnessKind,
    size: usize,
) -> Result<Option<PatternWitness>> {
    if candidates.len() > BRUTE_LIMIT {
        return Err(DpathError::TooLarge(format!(
            "{} candidate vertices, limit {BRUTE_LIMIT}",
            candidates.len()
        )));
    }
    if size == 0 {
        return Ok(None);
    }
    let found = match kind {
        WitnessKind::Clique => {
            let mut cur = Vec::new();
            clique_search(h, candidates, 0, size, &mut cur).then_some(cur)
        }
        WitnessKind::InducedMatching => {
            let edges: Vec<(usize, usize)> = pairs_of(h, candidates);
            let mut cur = Vec::new();
            matching_search(h, &edges, 0, size, &mut cur).then_some(cur)
        }
        WitnessKind::SkewBiclique => {
            let mut sa = Vec::new();
            let mut sb = Vec::new();
            skew_search(h, candidates, size, &mut sa, &mut sb).then(|| {
                sa.extend(sb);
                sa
            })
        }
        WitnessKind::Biclique => biclique_search(h, candidates, size),
    };
    Ok(found.map(|v| PatternWitness::new(kind, v)))
}

fn pairs_of(h: &Graph, cand: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &u) in cand.iter().enumerate() {
        for &v in &cand[i + 1..] {
            if h.has_edge(u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

fn clique_search(h: &Graph, cand: &[usize], from: usize, size: usize, cur: &mut Vec<usize>) -> bool {
    if cur.len() == size {
        return true;
    }
    for i in from..cand.len() {
        let v = cand[i];
        if cur.iter().all(|&u| h.has_edge(u, v)) {
            cur.push(v);
            if clique_search(h, cand, i + 1, size, cur) {
                return true;
            }
            cur.pop();
        }
    }
    false
}

fn matching_search(
    h: &Graph,
    edges: &[(usize, usize)],
    from: usize,
    size: usize,
    cur: &mut Vec<usize>,
) -> bool {
    if cur.len() == 2 * size {
        return true;
    }
    for i in from..edges.len() {
        let (x, y) = edges[i];
        if cur.iter().any(|&u| u == x || u == y || h.has_edge(u, x) || h.has_edge(u, y)) {
            continue;
        }
        cur.push(x);
        cur.push(y);
        if matching_search(h, edges, i + 1, size, cur) {
            return true;
        }
        cur.truncate(cur.len() - 2);
    }
    false
}

fn skew_search(h: &Graph, cand: &[usize], size: usize, sa: &mut Vec<usize>, sb: &mut Vec<usize>) -> bool {
    if sa.len() == size {
        return true;
    }
    for &a in cand {
        if sa.contains(&a) || sb.contains(&a) {
            continue;
        }
        // a is a_i: no edges to earlier a's; adjacent to no earlier b.
        if sa.iter().any(|&x| h.has_edge(x, a)) || sb.iter().any(|&y| h.has_edge(y, a)) {
            continue;
        }
        for &b in cand {
            if b == a || sa.contains(&b) || sb.contains(&b) || !h.has_edge(a, b) {
                continue;
            }
            // b is b_i: adjacent to every earlier a, no edges to earlier b's.
            if !sa.iter().all(|&x| h.has_edge(x, b)) || sb.iter().any(|&y| h.has_edge(y, b)) {
                continue;
            }
            sa.push(a);
            sb.push(b);
            if skew_search(h, cand, size, sa, sb) {
                return true;
            }
            sa.pop();
            sb.pop();
        }
    }
    false
}

fn biclique_search(h: &Graph, cand: &[usize], size: usize) -> Option<Vec<usize>> {
    fn rec(h: &Graph, cand: &[usize], from: usize, size: usize, side: &mut Vec<usize>) -> Option<Vec<usize>> {
        if side.len() == size {
            let common: Vec<usize> = cand
                .iter()
                .copied()
                .filter(|v| !side.contains(v) && side.iter().all(|&u| h.has_edge(u, *v)))
                .collect();
            if common.len() >= size {
                let mut out = side.clone();
                out.extend(&common[..size]);
                return Some(out);
            }
            return None;
        }
        for i in from..cand.len() {
            side.push(cand[i]);
            if let Some(w) = rec(h, cand, i + 1, size, side) {
                return Some(w);
            }
            side.pop();
        }
        None
    }
    rec(h, cand, 0, size, &mut Vec::new())
}
