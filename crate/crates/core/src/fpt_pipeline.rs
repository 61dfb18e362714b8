//! Exact solver: cover-or-pack bootstrap, irrelevant-terminal removal while
//! the terminal count exceeds the bound, then exhaustive pair enumeration.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

use crate::ep_cover::{ep_cover_or_pack, EpConfig, EpOutcome};
use crate::error::{DpathError, Result};
use crate::graph_core::verify::valid_path_within;
use crate::graph_core::{
    attach_degree_one_terminals, mask_of, solve_disjoint_pairs, verify_hitting_set, verify_solution, Graph, Instance, PathSet,
    PatternWitness, Separation, WitnessKind, DEFAULT_BUDGET,
};
use crate::pattern_ramsey::saturating_pow;
use crate::rep_sets::{representative_partial_solutions, PartialRepOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GallaiOutcome {
    Paths(PathSet),
    Cover(BTreeSet<usize>),
}

/// Maximum packing of vertex-disjoint paths with distinct ends in `a`.
///
/// Every vertex outside `a` gets a twin; twins copy the edges of their
/// originals towards `a` and towards other twins. A maximum matching `M`
/// of that graph, xored with the twin matching, falls apart into
/// alternating paths, and those starting and ending in `a` project to the
/// packing.
pub fn a_path_packing(g: &Graph, a: &BTreeSet<usize>) -> PathSet {
    let n = g.n();
    let mut twin = vec![usize::MAX; n];
    let mut next = n;
    for v in 0..n {
        if !a.contains(&v) {
            twin[v] = next;
            next += 1;
        }
    }
    let mut aux = UnGraph::<(), ()>::with_capacity(next, 0);
    for _ in 0..next {
        aux.add_node(());
    }
    let e = |aux: &mut UnGraph<(), ()>, x: usize, y: usize| {
        aux.add_edge(NodeIndex::new(x), NodeIndex::new(y), ());
    };
    for v in 0..n {
        if twin[v] != usize::MAX {
            e(&mut aux, v, twin[v]);
        }
    }
    for (u, v) in g.edges() {
        e(&mut aux, u, v);
        match (twin[u], twin[v]) {
            (usize::MAX, usize::MAX) => {}
            (usize::MAX, tv) => e(&mut aux, u, tv),
            (tu, usize::MAX) => e(&mut aux, tu, v),
            (tu, tv) => e(&mut aux, tu, tv),
        }
    }
    let matching = maximum_matching(&aux);
    let mate = |x: usize| matching.mate(NodeIndex::new(x)).map(|m| m.index());
    let mut original = vec![0; next];
    for v in 0..n {
        original[v] = v;
        if twin[v] != usize::MAX {
            original[twin[v]] = v;
        }
    }
    let other = |x: usize| if x < n { twin[x] } else { original[x] };
    let mut done = vec![false; n];
    let mut paths = Vec::new();
    for &s in a {
        if done[s] {
            continue;
        }
        let Some(mut x) = mate(s) else { continue };
        let mut path = vec![s];
        let end = loop {
            if x < n && a.contains(&x) {
                break Some(x);
            }
            path.push(original[x]);
            match mate(other(x)) {
                Some(y) => x = y,
                None => break None,
            }
        };
        if let Some(t) = end {
            done[s] = true;
            done[t] = true;
            path.push(t);
            paths.push(path);
        }
    }
    PathSet::new(paths)
}

/// Every component of `G - S` meets `A \ S` at most once.
pub fn is_gallai_cover(g: &Graph, a: &BTreeSet<usize>, s: &BTreeSet<usize>) -> bool {
    let active: Vec<bool> = (0..g.n()).map(|v| !s.contains(&v)).collect();
    let comp = g.component_ids(&active);
    let mut seen = BTreeSet::new();
    a.iter().filter(|v| !s.contains(v)).all(|&v| seen.insert(comp[v]))
}

fn shortest_a_path(g: &Graph, a: &BTreeSet<usize>, removed: &[bool]) -> Option<Vec<usize>> {
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    let mut label = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &v in a {
        if !removed[v] {
            dist[v] = 0;
            label[v] = v;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !removed[w] && dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                label[w] = label[u];
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut best: Option<(usize, usize, usize)> = None;
    for (u, w) in g.edges() {
        if removed[u] || removed[w] || label[u] == usize::MAX || label[u] == label[w] {
            continue;
        }
        let len = dist[u] + dist[w];
        if best.is_none_or(|(l, _, _)| len < l) {
            best = Some((len, u, w));
        }
    }
    let (_, u, w) = best?;
    let climb = |mut x: usize| {
        let mut out = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            out.push(x);
        }
        out
    };
    let mut path = climb(u);
    path.reverse();
    path.extend(climb(w));
    Some(path)
}

fn cover_search(g: &Graph, a: &BTreeSet<usize>, removed: &mut Vec<bool>, left: usize) -> bool {
    let Some(path) = shortest_a_path(g, a, removed) else {
        return true;
    };
    if left == 0 {
        return false;
    }
    for v in path {
        removed[v] = true;
        if cover_search(g, a, removed, left - 1) {
            return true;
        }
        removed[v] = false;
    }
    false
}

/// `k` disjoint paths with ends in `a`, or a smallest set of at most `2k - 2`
/// vertices after whose removal no component holds two vertices of `a`.
pub fn gallai_a_paths(g: &Graph, a: &BTreeSet<usize>, k: usize) -> Result<GallaiOutcome> {
    let packing = a_path_packing(g, a);
    if packing.len() >= k {
        return Ok(GallaiOutcome::Paths(PathSet::new(packing.paths.into_iter().take(k).collect())));
    }
    for size in 0..=2 * packing.len() {
        let mut removed = vec![false; g.n()];
        if cover_search(g, a, &mut removed, size) {
            return Ok(GallaiOutcome::Cover((0..g.n()).filter(|&v| removed[v]).collect()));
        }
    }
    Err(DpathError::Internal(format!("no cover of size {} beside a packing of {}", 2 * packing.len(), packing.len())))
}

/// Largest A-path packing by exhaustive search, for cross-checking.
pub fn brute_a_path_packing(g: &Graph, a: &BTreeSet<usize>) -> Result<usize> {
    let ends: Vec<usize> = a.iter().copied().collect();
    let mut demand = Vec::new();
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            demand.push((ends[i], ends[j]));
        }
    }
    let inst = Instance::new(g.clone(), ends, &demand, 1)?;
    crate::graph_core::max_disjoint_value(&inst, DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionRule {
    Clique,
    Separation,
    Components,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Irrelevant { terminal: usize, rule: ReductionRule },
    Paths(PathSet),
    Witness(PatternWitness),
}

/// Solution-preserving terminal drop or `k` disjoint valid paths, from a
/// demand clique `clique`.
pub fn reduce_clique(inst: &Instance, clique: &[usize], k: usize) -> Result<Reduction> {
    for (i, &u) in clique.iter().enumerate() {
        if !inst.is_terminal(u) {
            return Err(DpathError::Precondition(format!("{u} is not a terminal")));
        }
        if let Some(&v) = clique[i + 1..].iter().find(|&&v| !inst.demand_adjacent(u, v)) {
            return Err(DpathError::Precondition(format!("{u} and {v} are not demand-adjacent")));
        }
    }
    let kset: BTreeSet<usize> = clique.iter().copied().collect();
    let g = inst.graph();
    let s = match gallai_a_paths(g, &kset, k)? {
        GallaiOutcome::Paths(p) => {
            let p = PathSet::new(p.paths);
            if !verify_solution(&inst.with_k(k), &p) {
                return Err(DpathError::Internal("clique packing is not a solution".into()));
            }
            return Ok(Reduction::Paths(p));
        }
        GallaiOutcome::Cover(s) => s,
    };
    let active: Vec<bool> = (0..g.n()).map(|v| !s.contains(&v)).collect();
    let comps = g.components(&active);
    let single: Vec<(usize, &Vec<usize>)> = comps
        .iter()
        .filter_map(|c| {
            let hit: Vec<usize> = c.iter().copied().filter(|v| kset.contains(v)).collect();
            (hit.len() == 1).then(|| (hit[0], c))
        })
        .collect();
    let touches = |c: &Vec<usize>| -> BTreeSet<usize> { c.iter().flat_map(|&v| g.neighbors(v)).copied().filter(|v| s.contains(v)).collect() };
    let heavy: BTreeSet<usize> = s
        .iter()
        .copied()
        .filter(|&v| single.iter().filter(|(_, c)| touches(c).contains(&v)).count() > 5 * k)
        .collect();
    let mut chosen: Vec<(usize, &Vec<usize>)> = single.into_iter().filter(|(_, c)| touches(c).is_subset(&heavy)).collect();
    chosen.sort_unstable_by_key(|&(t, _)| t);
    if chosen.len() < k {
        if kset.len() >= 10 * k * k {
            return Err(DpathError::Internal(format!("only {} isolated clique components at clique size {}", chosen.len(), kset.len())));
        }
        return Err(DpathError::NotApplicable(format!("clique of size {} leaves {} isolated components", kset.len(), chosen.len())));
    }
    let mut paths = Vec::with_capacity(k);
    for &(t, c) in chosen.iter().take(k) {
        match valid_path_within(inst, &mask_of(g.n(), c.iter().copied())) {
            Some(p) => paths.push(p),
            None => {
                return Ok(Reduction::Irrelevant {
                    terminal: t,
                    rule: ReductionRule::Clique,
                })
            }
        }
    }
    Ok(Reduction::Paths(PathSet::new(paths)))
}

/// Threshold overrides; any override gives up the guarantee that a
/// reduction applies whenever the loop asks for one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FptConfig {
    pub smsep: Option<u128>,
    pub sm: Option<u128>,
    pub budget: u64,
    pub ep: EpConfig,
}

impl Default for FptConfig {
    fn default() -> Self {
        Self {
            smsep: None,
            sm: None,
            budget: DEFAULT_BUDGET,
            ep: EpConfig::default(),
        }
    }
}

impl FptConfig {
    pub fn overridden(&self) -> bool {
        self.smsep.is_some() || self.sm.is_some()
    }
}

/// Number of partial-solution types over a separator of order `z`, bounded
/// by `4^z z^z`.
pub fn type_count_bound(z: usize) -> u128 {
    saturating_pow(4, z as u32).saturating_mul(saturating_pow(z as u128, z as u32))
}

/// Terminal count on one side above which a separation reduction applies:
/// `k` times the representative-set size bound at `r* = max(r, 10k^2)`.
pub fn smsep_bound(k: usize, r: usize, z: usize) -> u128 {
    let d = k.min(z);
    let r_star = r.max(10 * k * k);
    (k as u128)
        .saturating_mul(type_count_bound(z))
        .saturating_mul(crate::rep_sets::rep_vector_bound(d, r_star))
}

/// `100 z^4 smsep^2`.
pub fn sm_bound(k: usize, r: usize, z: usize) -> u128 {
    let s = smsep_bound(k, r, z);
    100u128.saturating_mul(saturating_pow(z as u128, 4)).saturating_mul(s.saturating_mul(s))
}

/// Drops a terminal of the first side that no representative partial
/// solution uses.
pub fn irrelevant_from_separation(inst: &Instance, sep: &Separation, k: usize, r: usize, cfg: &FptConfig) -> Result<Reduction> {
    let s = sep.separator();
    let inside: Vec<usize> = sep.a_only().into_iter().filter(|&v| inst.is_terminal(v)).collect();
    let bound = cfg.smsep.unwrap_or_else(|| smsep_bound(k, r, s.len()));
    if inside.is_empty() || inside.len() as u128 <= bound {
        return Err(DpathError::NotApplicable(format!("{} terminals on the first side, bound {bound}", inside.len())));
    }
    match representative_partial_solutions(inst, sep, k, r, cfg.budget)? {
        PartialRepOutcome::Witness(w) if w.kind == WitnessKind::Clique => reduce_clique(inst, &w.vertices, k),
        PartialRepOutcome::Witness(w) => Ok(Reduction::Witness(w)),
        PartialRepOutcome::Set(rep) => {
            let used: BTreeSet<usize> = rep.iter().flat_map(|(_, inner, _)| inner.iter().copied()).collect();
            inside
                .into_iter()
                .find(|t| !used.contains(t))
                .map(|terminal| Reduction::Irrelevant {
                    terminal,
                    rule: ReductionRule::Separation,
                })
                .ok_or_else(|| DpathError::NotApplicable("every first-side terminal is used by a representative".into()))
        }
    }
}

fn check_hitting(inst: &Instance, z: &BTreeSet<usize>) -> Result<()> {
    if let Some(&t) = z.iter().find(|&&v| v >= inst.n() || inst.is_terminal(v)) {
        return Err(DpathError::Precondition(format!("hitting set vertex {t} is a terminal or out of range")));
    }
    Ok(())
}

fn outside(n: usize, z: &BTreeSet<usize>) -> Vec<bool> {
    (0..n).map(|v| !z.contains(&v)).collect()
}

/// Terminals kept by the pair-marking over `Z x Z`; every other terminal
/// is solution-preserving to drop.
pub fn marked_terminals(inst: &Instance, z: &BTreeSet<usize>, q: usize) -> Result<BTreeSet<usize>> {
    check_hitting(inst, z)?;
    let g = inst.graph();
    let comp = g.component_ids(&outside(inst.n(), z));
    let mut per: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &t in inst.terminals() {
        per.entry(comp[t]).or_default().push(t);
    }
    for ts in per.values() {
        if ts.len() > q {
            return Err(DpathError::NotApplicable(format!("component with {} terminals exceeds cap {q}", ts.len())));
        }
        for (i, &a) in ts.iter().enumerate() {
            if let Some(&b) = ts[i + 1..].iter().find(|&&b| inst.demand_adjacent(a, b)) {
                return Err(DpathError::Precondition(format!("demand edge ({a},{b}) inside one component")));
            }
        }
    }
    // Components touching each vertex of Z.
    let touching: BTreeMap<usize, BTreeSet<usize>> = z
        .iter()
        .map(|&x| (x, g.neighbors(x).iter().filter(|v| !z.contains(v)).map(|&v| comp[v]).collect()))
        .collect();
    let b = 2 * z.len() * q + 1;
    let mut marked = BTreeSet::new();
    let edges: Vec<(usize, usize)> = inst.demand_edges().into_iter().flat_map(|(u, v)| [(u, v), (v, u)]).collect();
    for &z1 in z {
        for &z2 in z {
            let pairs: Vec<(usize, usize)> = edges
                .iter()
                .copied()
                .filter(|&(t1, t2)| touching[&z1].contains(&comp[t1]) && touching[&z2].contains(&comp[t2]))
                .collect();
            let mut used = BTreeSet::new();
            let mut picked = Vec::new();
            for &(t1, t2) in &pairs {
                if picked.len() == b {
                    break;
                }
                if !used.contains(&t1) && !used.contains(&t2) {
                    used.insert(t1);
                    used.insert(t2);
                    picked.push((t1, t2));
                }
            }
            marked.extend(used.iter().copied());
            if picked.len() < b {
                for &u in &used {
                    marked.extend(pairs.iter().filter(|&&(_, t2)| t2 == u).map(|&(t1, _)| t1).take(b));
                }
            }
        }
    }
    Ok(marked)
}

/// An unmarked terminal once `|T| > 100 |Z|^4 q^2`.
pub fn reduce_components(inst: &Instance, z: &BTreeSet<usize>, q: usize) -> Result<usize> {
    let zz = z.len() as u128;
    let bound = 100 * zz.pow(4) * (q as u128).pow(2);
    if inst.terminals().len() as u128 <= bound {
        return Err(DpathError::NotApplicable(format!("{} terminals, bound {bound}", inst.terminals().len())));
    }
    unmarked_terminal(inst, z, q)?.ok_or_else(|| DpathError::Internal("every terminal marked above the bound".into()))
}

/// Smallest unmarked terminal, at any terminal count.
pub fn unmarked_terminal(inst: &Instance, z: &BTreeSet<usize>, q: usize) -> Result<Option<usize>> {
    let marked = marked_terminals(inst, z, q)?;
    Ok(inst.terminals().iter().copied().filter(|t| !marked.contains(t)).min())
}

/// Dispatches on the terminal distribution over the components of `G - Z`:
/// an overfull component goes through its separation, otherwise the pair
/// marking picks the terminal.
pub fn irrelevant_from_hitting_set(inst: &Instance, z: &BTreeSet<usize>, k: usize, r: usize, cfg: &FptConfig) -> Result<Reduction> {
    check_hitting(inst, z)?;
    if !verify_hitting_set(inst, z) {
        return Err(DpathError::Precondition("G - Z still has a valid path".into()));
    }
    let sm = cfg.sm.unwrap_or_else(|| sm_bound(k, r, z.len()));
    if inst.terminals().len() as u128 <= sm {
        return Err(DpathError::NotApplicable(format!("{} terminals, bound {sm}", inst.terminals().len())));
    }
    let smsep = cfg.smsep.unwrap_or_else(|| smsep_bound(k, r, z.len()));
    let g = inst.graph();
    let comps = g.components(&outside(inst.n(), z));
    let load = |c: &Vec<usize>| c.iter().filter(|&&v| inst.is_terminal(v)).count();
    if let Some(c) = comps.iter().find(|c| load(c) as u128 > smsep) {
        let inner: BTreeSet<usize> = c.iter().copied().collect();
        let mut side_a = inner.clone();
        side_a.extend(c.iter().flat_map(|&v| g.neighbors(v)).copied());
        let side_b = (0..inst.n()).filter(|v| !inner.contains(v)).collect();
        match irrelevant_from_separation(inst, &Separation::new(side_a, side_b), k, r, cfg) {
            Err(DpathError::NotApplicable(_)) if cfg.overridden() => {}
            other => return other,
        }
    }
    let q = comps.iter().map(load).max().unwrap_or(0);
    match unmarked_terminal(inst, z, q)? {
        Some(terminal) => Ok(Reduction::Irrelevant {
            terminal,
            rule: ReductionRule::Components,
        }),
        None => Err(DpathError::NotApplicable("every terminal is marked".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Paths(PathSet),
    No,
    MatchingWitness(PatternWitness),
    SkewWitness(PatternWitness),
}

impl SolveOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SolveOutcome::Paths(_) => "paths",
            SolveOutcome::No => "no",
            SolveOutcome::MatchingWitness(_) => "matching_witness",
            SolveOutcome::SkewWitness(_) => "skew_witness",
        }
    }
}

/// One terminal drop, on the pendant-copy instance the loop works on.
#[derive(Clone, Debug)]
pub struct RemovalEvent {
    pub before: Instance,
    pub removed: usize,
    pub rule: ReductionRule,
}

#[derive(Clone, Debug)]
pub struct FptReport {
    pub outcome: SolveOutcome,
    pub trace: Vec<RemovalEvent>,
    pub hitting_set: Option<BTreeSet<usize>>,
    pub overridden: bool,
}

/// `k` disjoint paths for some set of `k` terminal-disjoint demand pairs,
/// pairs taken in ascending order and every prefix checked for routability.
pub fn enumerate_pair_sequences(inst: &Instance, budget: u64) -> Result<Option<PathSet>> {
    fn go(g: &Graph, edges: &[(usize, usize)], from: usize, chosen: &mut Vec<(usize, usize)>, k: usize, budget: u64) -> Result<Option<PathSet>> {
        if chosen.len() == k {
            return solve_disjoint_pairs(g, chosen, budget);
        }
        for j in from..edges.len() {
            if edges.len() - j < k - chosen.len() {
                break;
            }
            let (s, t) = edges[j];
            if chosen.iter().any(|&(a, b)| a == s || a == t || b == s || b == t) {
                continue;
            }
            chosen.push((s, t));
            if chosen.len() == k || solve_disjoint_pairs(g, chosen, budget)?.is_some() {
                if let Some(p) = go(g, edges, j + 1, chosen, k, budget)? {
                    return Ok(Some(p));
                }
            }
            chosen.pop();
        }
        Ok(None)
    }
    if inst.k() == 0 {
        return Ok(Some(PathSet::default()));
    }
    go(inst.graph(), &inst.demand_edges(), 0, &mut Vec::new(), inst.k(), budget)
}

/// Exact answer for `inst.k()` unless the demand graph exhibits an induced
/// matching or skew biclique of size `r`.
pub fn solve_fpt(inst: &Instance, r: usize, cfg: &FptConfig) -> Result<FptReport> {
    let k = inst.k();
    let report = |outcome, trace, hitting_set| FptReport {
        outcome,
        trace,
        hitting_set,
        overridden: cfg.overridden(),
    };
    if k == 0 {
        return Ok(report(SolveOutcome::Paths(PathSet::default()), Vec::new(), None));
    }
    let att = attach_degree_one_terminals(inst);
    let back = |w: &PatternWitness| PatternWitness::new(w.kind, w.vertices.iter().map(|&v| att.to_original(v)).collect());
    let z = match ep_cover_or_pack(&att.instance, k, r, &cfg.ep)? {
        EpOutcome::Paths(p) => return Ok(report(SolveOutcome::Paths(att.paths_to_original(&p)), Vec::new(), None)),
        EpOutcome::MatchingWitness(w) => return Ok(report(SolveOutcome::MatchingWitness(back(&w)), Vec::new(), None)),
        EpOutcome::HittingSet(z) => att.set_to_original(&z),
    };
    let mut work = att.instance.clone();
    let mut trace = Vec::new();
    let sm = cfg.sm.unwrap_or_else(|| sm_bound(k, r, z.len()));
    while work.terminals().len() as u128 > sm {
        match irrelevant_from_hitting_set(&work, &z, k, r, cfg) {
            Ok(Reduction::Irrelevant { terminal, rule }) => {
                let next = work.without_terminal(terminal);
                trace.push(RemovalEvent {
                    before: std::mem::replace(&mut work, next),
                    removed: terminal,
                    rule,
                });
            }
            Ok(Reduction::Paths(p)) => {
                if !verify_solution(&work, &p) {
                    return Err(DpathError::Internal("reduction paths failed verification".into()));
                }
                return Ok(report(SolveOutcome::Paths(att.paths_to_original(&p)), trace, Some(z)));
            }
            Ok(Reduction::Witness(w)) => {
                let out = match w.kind {
                    WitnessKind::InducedMatching => SolveOutcome::MatchingWitness(back(&w)),
                    WitnessKind::SkewBiclique => SolveOutcome::SkewWitness(back(&w)),
                    other => return Err(DpathError::Internal(format!("unexpected {other:?} witness"))),
                };
                return Ok(report(out, trace, Some(z)));
            }
            Err(DpathError::NotApplicable(_)) if cfg.overridden() => break,
            Err(e) => return Err(e),
        }
    }
    let outcome = match enumerate_pair_sequences(&work, cfg.budget)? {
        Some(p) => SolveOutcome::Paths(att.paths_to_original(&p)),
        None => SolveOutcome::No,
    };
    Ok(report(outcome, trace, Some(z)))
}
