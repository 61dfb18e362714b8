//! Important separators and oracle-driven free/tight separations.
//!
//! Every routine works on the full graph restricted to an `active` mask so
//! that oracles always see original vertex ids.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use crate::error::{DpathError, Result};
use crate::graph_core::{members, vertex_flow, Graph, Instance, Separation};

/// Membership oracle for a family of connected subgraphs: does `G[X]`
/// contain some member? Must be monotone in `X`.
pub trait POracle: Sync {
    fn contains_element(&self, x: &[bool]) -> bool;
}

impl<F: Fn(&[bool]) -> bool + Sync> POracle for F {
    fn contains_element(&self, x: &[bool]) -> bool {
        self(x)
    }
}

/// Answers `query(X ∩ mask)`; the family shrinks to members inside `mask`.
pub struct Restricted<'a> {
    inner: &'a dyn POracle,
    mask: Vec<bool>,
}

impl<'a> Restricted<'a> {
    pub fn new(inner: &'a dyn POracle, mask: Vec<bool>) -> Self {
        Restricted { inner, mask }
    }
}

impl POracle for Restricted<'_> {
    fn contains_element(&self, x: &[bool]) -> bool {
        let y: Vec<bool> = x.iter().zip(&self.mask).map(|(&a, &b)| a && b).collect();
        self.inner.contains_element(&y)
    }
}

fn pack(x: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; x.len().div_ceil(64)];
    for (i, &b) in x.iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

/// The family of truncated valid paths `{P - T}` of an instance whose
/// terminals are independent and have degree at most one.
pub struct TruncatedPaths<'a> {
    inst: &'a Instance,
    /// Deduplicated `(nbr(t1), nbr(t2))` over demand edges `t1 t2`.
    ends: Vec<(usize, usize)>,
    memo: Mutex<HashMap<Vec<u64>, bool>>,
    queries: Mutex<u64>,
}

/// Oracle for truncated valid paths, memoized on the queried vertex set.
pub fn truncated_valid_path_oracle(inst: &Instance) -> Result<TruncatedPaths<'_>> {
    if !inst.has_pendant_terminals() {
        return Err(DpathError::Precondition(
            "terminals must be independent with degree at most one".into(),
        ));
    }
    let g = inst.graph();
    let mut ends: Vec<(usize, usize)> = inst
        .demand_edges()
        .into_iter()
        .filter_map(|(s, t)| match (g.neighbors(s).first(), g.neighbors(t).first()) {
            (Some(&a), Some(&b)) => Some((a.min(b), a.max(b))),
            _ => None,
        })
        .collect();
    ends.sort_unstable();
    ends.dedup();
    Ok(TruncatedPaths {
        inst,
        ends,
        memo: Mutex::new(HashMap::new()),
        queries: Mutex::new(0),
    })
}

impl TruncatedPaths<'_> {
    /// Number of distinct (non-memoized) evaluations so far.
    pub fn evaluations(&self) -> u64 {
        *self.queries.lock().expect("oracle lock")
    }

    fn evaluate(&self, x: &[bool]) -> bool {
        let region: Vec<bool> = (0..self.inst.n())
            .map(|v| x[v] && !self.inst.is_terminal(v))
            .collect();
        let comp = self.inst.graph().component_ids(&region);
        self.ends
            .iter()
            .any(|&(a, b)| comp[a] != usize::MAX && comp[a] == comp[b])
    }
}

impl POracle for TruncatedPaths<'_> {
    fn contains_element(&self, x: &[bool]) -> bool {
        let key = pack(x);
        if let Some(&hit) = self.memo.lock().expect("oracle lock").get(&key) {
            return hit;
        }
        let ans = self.evaluate(x);
        *self.queries.lock().expect("oracle lock") += 1;
        self.memo.lock().expect("oracle lock").insert(key, ans);
        ans
    }
}

/// An important `X–Y` separator and the union of the components of
/// `G - S` meeting `X`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ImportantSeparator {
    pub vertices: BTreeSet<usize>,
    pub reach: BTreeSet<usize>,
}

fn without(active: &[bool], s: &BTreeSet<usize>) -> Vec<bool> {
    let mut a = active.to_vec();
    for &v in s {
        a[v] = false;
    }
    a
}

fn reach_of(g: &Graph, active: &[bool], s: &BTreeSet<usize>, x: &BTreeSet<usize>) -> Vec<bool> {
    let a = without(active, s);
    let comp = g.component_ids(&a);
    let ids: BTreeSet<usize> = x.iter().map(|&v| comp[v]).filter(|&c| c != usize::MAX).collect();
    (0..g.n()).map(|v| comp[v] != usize::MAX && ids.contains(&comp[v])).collect()
}

fn is_separator(g: &Graph, active: &[bool], s: &BTreeSet<usize>, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> bool {
    s.iter().all(|v| !x.contains(v) && !y.contains(v)) && {
        let k = reach_of(g, active, s, x);
        y.iter().all(|&v| !k[v])
    }
}

fn is_important(g: &Graph, active: &[bool], x: &BTreeSet<usize>, y: &BTreeSet<usize>, s: &BTreeSet<usize>) -> bool {
    if !is_separator(g, active, s, x, y) {
        return false;
    }
    let k = reach_of(g, active, s, x);
    let ry = reach_of(g, active, s, y);
    // Minimal iff every separator vertex touches both sides.
    let minimal = s.iter().all(|&v| {
        let nb = g.neighbors(v);
        nb.iter().any(|&w| k[w]) && nb.iter().any(|&w| ry[w])
    });
    if !minimal {
        return false;
    }
    let ks: Vec<usize> = members(&k);
    let ys: Vec<usize> = y.iter().copied().collect();
    let mut und = k.clone();
    for &v in y {
        und[v] = true;
    }
    let f = vertex_flow(g, active, &ks, &ys, &und, s.len() + 1);
    f.value == s.len() && f.cut_far == *s
}

fn adjacent_sets(g: &Graph, active: &[bool], x: &[bool], y: &[bool]) -> bool {
    (0..g.n()).any(|u| x[u] && active[u] && (y[u] || g.neighbors(u).iter().any(|&w| active[w] && y[w])))
}

#[allow(clippy::too_many_arguments)]
fn branch(
    g: &Graph,
    active: &mut Vec<bool>,
    x: Vec<bool>,
    y: &[bool],
    ys: &[usize],
    p: usize,
    chosen: &mut BTreeSet<usize>,
    out: &mut BTreeSet<BTreeSet<usize>>,
) {
    if adjacent_sets(g, active, &x, y) {
        return;
    }
    let xs: Vec<usize> = (0..g.n()).filter(|&v| x[v] && active[v]).collect();
    let und: Vec<bool> = x.iter().zip(y).map(|(&a, &b)| a || b).collect();
    let f = vertex_flow(g, active, &xs, ys, &und, p + 1);
    if f.value > p {
        return;
    }
    if f.value == 0 {
        out.insert(chosen.clone());
        return;
    }
    let mut x2 = x;
    for &v in &f.far_source_side {
        x2[v] = true;
    }
    let v = *f.cut_far.iter().next().expect("positive flow has a cut");
    active[v] = false;
    chosen.insert(v);
    branch(g, active, x2.clone(), y, ys, p - 1, chosen, out);
    chosen.remove(&v);
    active[v] = true;
    x2[v] = true;
    branch(g, active, x2, y, ys, p, chosen, out);
}

/// All important `X–Y` separators of size at most `p` inside `active`,
/// sorted by vertex set.
pub fn enumerate_important_separators(
    g: &Graph,
    active: &[bool],
    x: &BTreeSet<usize>,
    y: &BTreeSet<usize>,
    p: usize,
) -> Vec<ImportantSeparator> {
    if x.iter().any(|v| y.contains(v)) {
        return Vec::new();
    }
    let n = g.n();
    let xm: Vec<bool> = (0..n).map(|v| x.contains(&v)).collect();
    let ym: Vec<bool> = (0..n).map(|v| y.contains(&v)).collect();
    let ys: Vec<usize> = y.iter().copied().filter(|&v| active[v]).collect();
    let mut found = BTreeSet::new();
    let mut act = active.to_vec();
    branch(g, &mut act, xm, &ym, &ys, p, &mut BTreeSet::new(), &mut found);
    found
        .into_iter()
        .filter(|s| is_important(g, active, x, y, s))
        .map(|s| {
            let reach = members(&reach_of(g, active, &s, x)).into_iter().collect();
            ImportantSeparator { vertices: s, reach }
        })
        .collect()
}

fn subsets_up_to(pool: &[usize], p: usize, f: &mut dyn FnMut(&BTreeSet<usize>)) {
    fn rec(pool: &[usize], from: usize, p: usize, cur: &mut BTreeSet<usize>, f: &mut dyn FnMut(&BTreeSet<usize>)) {
        f(cur);
        if cur.len() == p {
            return;
        }
        for i in from..pool.len() {
            cur.insert(pool[i]);
            rec(pool, i + 1, p, cur, f);
            cur.remove(&pool[i]);
        }
    }
    rec(pool, 0, p, &mut BTreeSet::new(), f);
}

/// Important separators straight from the definition, trying every vertex
/// subset of size at most `p`.
pub fn brute_important_separators(
    g: &Graph,
    active: &[bool],
    x: &BTreeSet<usize>,
    y: &BTreeSet<usize>,
    p: usize,
) -> Vec<ImportantSeparator> {
    let pool: Vec<usize> = (0..g.n())
        .filter(|&v| active[v] && !x.contains(&v) && !y.contains(&v))
        .collect();
    let mut seps: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
    subsets_up_to(&pool, p, &mut |s| {
        if is_separator(g, active, s, x, y) {
            let k = members(&reach_of(g, active, s, x)).into_iter().collect();
            seps.push((s.clone(), k));
        }
    });
    let mut out: Vec<ImportantSeparator> = seps
        .iter()
        .filter(|(s, k)| {
            let minimal = s.iter().all(|&v| {
                let mut t = s.clone();
                t.remove(&v);
                !is_separator(g, active, &t, x, y)
            });
            minimal
                && !seps
                    .iter()
                    .any(|(s2, k2)| s2.len() <= s.len() && k2.len() > k.len() && k.is_subset(k2))
        })
        .map(|(s, k)| ImportantSeparator {
            vertices: s.clone(),
            reach: k.clone(),
        })
        .collect();
    out.sort();
    out
}

/// Outcome of testing whether `T` is free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeTest {
    Free,
    /// Minimum-order separation of order `< |T|` with `T` on the first side
    /// and a family member strictly on the second side.
    Certificate(Separation),
}

/// Tests whether `T` is free: no separation of order below `|T|` keeps `T`
/// on one side and a family member strictly on the other. Among certificates
/// of minimum order the one with the lexicographically smallest first side
/// is returned.
pub fn test_p_free(g: &Graph, active: &[bool], t: &BTreeSet<usize>, oracle: &dyn POracle) -> FreeTest {
    if t.is_empty() {
        return FreeTest::Free;
    }
    let n = g.n();
    let mut aux = g.clone();
    let apex = aux.add_vertex();
    for &v in t {
        aux.add_edge(v, apex);
    }
    let mut act = active.to_vec();
    act.push(true);
    let apex_set: BTreeSet<usize> = [apex].into();
    let mut best: Option<(usize, BTreeSet<usize>, BTreeSet<usize>)> = None;
    for yv in (0..n).filter(|&v| active[v] && !t.contains(&v)) {
        for sep in enumerate_important_separators(&aux, &act, &[yv].into(), &apex_set, t.len() - 1) {
            if best.as_ref().is_some_and(|(o, _, _)| sep.vertices.len() > *o) {
                continue;
            }
            let comp = aux.reach(yv, &without(&act, &sep.vertices));
            let k: Vec<bool> = comp[..n].to_vec();
            if !oracle.contains_element(&k) {
                continue;
            }
            let u: BTreeSet<usize> = (0..n).filter(|&v| active[v] && !k[v]).collect();
            let better = match &best {
                None => true,
                Some((o, bu, _)) => sep.vertices.len() < *o || (sep.vertices.len() == *o && u < *bu),
            };
            if better {
                let w: BTreeSet<usize> = members(&k).into_iter().chain(sep.vertices.iter().copied()).collect();
                best = Some((sep.vertices.len(), u, w));
            }
        }
    }
    match best {
        None => FreeTest::Free,
        Some((_, u, w)) => FreeTest::Certificate(Separation { side_a: u, side_b: w }),
    }
}

/// A minimum-order separation `(U, W)` that is tight for `T`: `T ⊆ U`, a
/// family member lies in `W - U`, and no separation of at most the same
/// order with a strictly larger first side still traps a member.
pub fn find_p_tight(g: &Graph, active: &[bool], t: &BTreeSet<usize>, oracle: &dyn POracle) -> Result<Separation> {
    let n = g.n();
    let outside: Vec<bool> = (0..n).map(|v| active[v] && !t.contains(&v)).collect();
    if !oracle.contains_element(&outside) {
        return Err(DpathError::NoPElement);
    }
    let mut sep = match test_p_free(g, active, t, oracle) {
        FreeTest::Certificate(s) => s,
        FreeTest::Free => Separation {
            side_a: t.clone(),
            side_b: members(active).into_iter().collect(),
        },
    };
    'grow: loop {
        let inter = sep.separator();
        let y_only: Vec<bool> = (0..n).map(|v| sep.side_b.contains(&v) && !sep.side_a.contains(&v)).collect();
        let comps = g.components(&y_only);
        if comps.len() > 1 {
            let c = comps
                .into_iter()
                .find(|c| oracle.contains_element(&mask(n, c)))
                .ok_or_else(|| DpathError::Internal("tight loop lost its family member".into()))?;
            let cset: BTreeSet<usize> = c.into_iter().collect();
            sep = Separation {
                side_a: members(active).into_iter().filter(|v| !cset.contains(v)).collect(),
                side_b: cset.union(&inter).copied().collect(),
            };
            continue;
        }
        let y_mask = mask(n, &sep.side_b);
        for &x in &inter {
            let Some(&xp) = g.neighbors(x).iter().find(|&&w| y_only[w]) else {
                continue;
            };
            let mut t2 = inter.clone();
            t2.insert(xp);
            let mut allowed = y_only.clone();
            allowed[xp] = false;
            let sub = Restricted::new(oracle, allowed);
            if let FreeTest::Certificate(c) = test_p_free(g, &y_mask, &t2, &sub) {
                if c.order() <= inter.len() {
                    sep = Separation {
                        side_a: sep.side_a.union(&c.side_a).copied().collect(),
                        side_b: c.side_b,
                    };
                    continue 'grow;
                }
            }
        }
        return Ok(sep);
    }
}

fn mask<'a>(n: usize, it: impl IntoIterator<Item = &'a usize>) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in it {
        m[v] = true;
    }
    m
}

/// Smallest order of a certificate that `T` is not free, by trying every
/// vertex set of size below `|T|` as the separator.
pub fn brute_certificate_order(g: &Graph, active: &[bool], t: &BTreeSet<usize>, oracle: &dyn POracle) -> Option<usize> {
    if t.is_empty() {
        return None;
    }
    let pool = members(active);
    let mut best: Option<usize> = None;
    subsets_up_to(&pool, t.len() - 1, &mut |s| {
        if best.is_some_and(|b| b <= s.len()) {
            return;
        }
        if trapped_component(g, active, s, |c| c.iter().all(|v| !t.contains(v)), oracle) {
            best = Some(s.len());
        }
    });
    best
}

fn trapped_component(
    g: &Graph,
    active: &[bool],
    s: &BTreeSet<usize>,
    ok: impl Fn(&[usize]) -> bool,
    oracle: &dyn POracle,
) -> bool {
    let a = without(active, s);
    g.components(&a)
        .iter()
        .any(|c| ok(c) && oracle.contains_element(&mask(g.n(), c)))
}

/// Whether `(U, W)` violates tightness clause iii: some separation of at
/// most its order with a strictly larger first side traps a family member.
pub fn brute_tightness_violated(g: &Graph, active: &[bool], sep: &Separation, oracle: &dyn POracle) -> bool {
    let pool = members(active);
    let total = pool.len();
    let mut violated = false;
    subsets_up_to(&pool, sep.order(), &mut |s| {
        if violated {
            return;
        }
        violated = trapped_component(
            g,
            active,
            s,
            |c| c.iter().all(|v| !sep.side_a.contains(v)) && total - c.len() > sep.side_a.len(),
            oracle,
        );
    });
    violated
}
