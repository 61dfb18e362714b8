//! Cover-or-pack: `k` disjoint valid paths, a hitting set, or an induced
//! matching in the demand graph.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{DpathError, Result};
use crate::graph_core::flow::{biclique_linkage, trim_linkage, vertex_flow};
use crate::graph_core::verify::{first_valid_path_avoiding, valid_path_within};
use crate::graph_core::{
    attach_degree_one_terminals, mask_of, verify_hitting_set, verify_solution, Instance, PathSet,
    PatternWitness, Separation, WitnessKind,
};
use crate::pattern_ramsey::{brute_find_pattern_on, matching_to_induced_or_biclique, verify_witness, BRUTE_LIMIT};
use crate::separators::{find_p_tight, test_p_free, truncated_valid_path_oracle, FreeTest, POracle, Restricted};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpOutcome {
    Paths(PathSet),
    HittingSet(BTreeSet<usize>),
    MatchingWitness(PatternWitness),
}

impl EpOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            EpOutcome::Paths(_) => "paths",
            EpOutcome::HittingSet(_) => "hitting-set",
            EpOutcome::MatchingWitness(_) => "matching-witness",
        }
    }
}

/// Checks an outcome against its verifier.
pub fn verify_outcome(inst: &Instance, out: &EpOutcome, r: usize) -> bool {
    match out {
        EpOutcome::Paths(p) => verify_solution(inst, p),
        EpOutcome::HittingSet(z) => verify_hitting_set(inst, z),
        EpOutcome::MatchingWitness(w) => {
            w.kind == WitnessKind::InducedMatching
                && w.vertices.len() >= 2 * r
                && w.vertices.iter().all(|&v| v < inst.n() && inst.is_terminal(v))
                && verify_witness(inst.demand(), w)
        }
    }
}

/// A free terminal set together with a perfect matching of its demand graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeMatchedSet {
    terminals: BTreeSet<usize>,
    matching: Vec<(usize, usize)>,
}

impl FreeMatchedSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates the matching and checks freeness.
    pub fn new(inst: &Instance, oracle: &dyn POracle, matching: Vec<(usize, usize)>) -> Result<Self> {
        let mut terminals = BTreeSet::new();
        for &(a, b) in &matching {
            if !inst.demand_adjacent(a, b) {
                return Err(DpathError::Precondition(format!("({a},{b}) is not a demand edge")));
            }
            if !terminals.insert(a) || !terminals.insert(b) {
                return Err(DpathError::Precondition("matching edges overlap".into()));
            }
        }
        let all = vec![true; inst.n()];
        if test_p_free(inst.graph(), &all, &terminals, oracle) != FreeTest::Free {
            return Err(DpathError::Precondition("terminal set is not free".into()));
        }
        Ok(FreeMatchedSet { terminals, matching })
    }

    pub fn terminals(&self) -> &BTreeSet<usize> {
        &self.terminals
    }

    pub fn matching(&self) -> &[(usize, usize)] {
        &self.matching
    }

    pub fn len(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminals.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrowOutcome {
    Hitting(BTreeSet<usize>),
    Split(Separation),
    Grown(FreeMatchedSet),
}

/// Largest hitting set a single growth step may return for `|T'| = t`.
pub fn grow_hitting_bound(t: usize) -> usize {
    t * (t + 3)
}

fn check_split(inst: &Instance, oracle: &dyn POracle, sep: &Separation, t: usize) -> Result<GrowOutcome> {
    let n = inst.n();
    if !sep.is_valid_in(inst.graph(), None)
        || sep.order() > t + 2
        || !oracle.contains_element(&mask_of(n, sep.side_a.iter().copied()))
        || !oracle.contains_element(&mask_of(n, sep.side_b.iter().copied()))
    {
        return Err(DpathError::Internal(format!("split failed verification: {sep:?}")));
    }
    Ok(GrowOutcome::Split(sep.clone()))
}

fn check_hitting(inst: &Instance, z: BTreeSet<usize>, bound: usize) -> Result<GrowOutcome> {
    if z.len() > bound || !verify_hitting_set(inst, &z) {
        return Err(DpathError::Internal(format!("hitting set failed verification: {z:?}")));
    }
    Ok(GrowOutcome::Hitting(z))
}

/// One growth step: a hitting set of at most `|T'|(|T'|+3)` vertices, a
/// separation of order at most `|T'|+2` with family members on both sides,
/// or a free set two terminals larger.
pub fn grow_free_set(inst: &Instance, oracle: &dyn POracle, tp: &FreeMatchedSet) -> Result<GrowOutcome> {
    let n = inst.n();
    let g = inst.graph();
    let all = vec![true; n];
    let t = tp.len();
    let bound = grow_hitting_bound(t);
    let sep = match find_p_tight(g, &all, &tp.terminals, oracle) {
        Err(DpathError::NoPElement) => return check_hitting(inst, BTreeSet::new(), bound),
        other => other?,
    };
    if oracle.contains_element(&mask_of(n, sep.side_a.iter().copied())) {
        return check_split(inst, oracle, &sep, t);
    }
    let inter = sep.separator();
    let y_only = mask_of(n, sep.b_only());
    let y_mask = mask_of(n, sep.side_b.iter().copied());
    let mut z: BTreeSet<usize> = inter.union(&tp.terminals).copied().collect();
    for &x in &inter {
        let Some(&xp) = g.neighbors(x).iter().find(|&&w| y_only[w]) else {
            continue;
        };
        let mut t2 = inter.clone();
        t2.insert(xp);
        let mut allowed = y_only.clone();
        allowed[xp] = false;
        let sub = Restricted::new(oracle, allowed);
        match find_p_tight(g, &y_mask, &t2, &sub) {
            Ok(s) => z.extend(s.separator()),
            Err(DpathError::NoPElement) => {
                z.insert(xp);
            }
            Err(e) => return Err(e),
        }
    }
    let Some(path) = first_valid_path_avoiding(inst, &z) else {
        return check_hitting(inst, z, bound);
    };
    let (s, e) = (path[0], path[path.len() - 1]);
    let mut bar = tp.clone();
    bar.terminals.insert(s);
    bar.terminals.insert(e);
    bar.matching.push((s.min(e), s.max(e)));
    match test_p_free(g, &all, &bar.terminals, oracle) {
        FreeTest::Free => Ok(GrowOutcome::Grown(bar)),
        FreeTest::Certificate(_) => {
            let cd = find_p_tight(g, &all, &bar.terminals, oracle)?;
            if oracle.contains_element(&mask_of(n, cd.side_a.iter().copied())) {
                return check_split(inst, oracle, &cd, t);
            }
            let z2: BTreeSet<usize> = cd.separator().union(&inter).copied().collect();
            if verify_hitting_set(inst, &z2) {
                return check_hitting(inst, z2, bound);
            }
            Err(DpathError::Internal("grown set is neither free nor resolvable".into()))
        }
    }
}

/// Knobs for the cover-or-pack loop.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpConfig {
    /// Growth iterations per level; `None` means `5^{10(k+r)}`.
    pub growth_cap: Option<u64>,
}

/// Default growth cap `5^{10(k+r)}`, saturating.
pub fn default_growth_cap(k: usize, r: usize) -> u64 {
    5u64.checked_pow(10 * (k + r) as u32).unwrap_or(u64::MAX)
}

/// Cover-or-pack on an instance whose terminals are independent with
/// degree at most one.
pub fn ep_cover_or_pack(inst: &Instance, k: usize, r: usize, cfg: &EpConfig) -> Result<EpOutcome> {
    let inst = inst.with_k(k);
    let out = cover_or_pack(&inst, k, r, cfg)?;
    if !verify_outcome(&inst, &out, r) {
        return Err(DpathError::Internal(format!("{} outcome failed verification", out.label())));
    }
    Ok(out)
}

fn cover_or_pack(inst: &Instance, k: usize, r: usize, cfg: &EpConfig) -> Result<EpOutcome> {
    if k == 0 {
        return Ok(EpOutcome::Paths(PathSet::default()));
    }
    let oracle = truncated_valid_path_oracle(inst)?;
    let cap = cfg.growth_cap.unwrap_or_else(|| default_growth_cap(k, r));
    let mut tp = FreeMatchedSet::empty();
    let mut iter = 0u64;
    while iter < cap {
        iter += 1;
        match grow_free_set(inst, &oracle, &tp)? {
            GrowOutcome::Hitting(z) => return Ok(EpOutcome::HittingSet(z)),
            GrowOutcome::Split(sep) => return split(inst, &sep, k, r, cfg),
            GrowOutcome::Grown(next) => {
                tp = next;
                if let Some(out) = finish(inst, &oracle, &tp, k, r)? {
                    return Ok(out);
                }
            }
        }
    }
    Err(DpathError::Internal(format!("growth cap {cap} exhausted")))
}

/// Moves every terminal whose neighbor lies in the separator into the
/// separator, so each side's family members extend to full valid paths
/// inside that side.
fn normalize(inst: &Instance, sep: &Separation) -> Separation {
    let inter = sep.separator();
    let mut out = sep.clone();
    for &t in inst.terminals() {
        if inst.graph().neighbors(t).iter().any(|u| inter.contains(u)) {
            out.side_a.insert(t);
            out.side_b.insert(t);
        }
    }
    out
}

fn map_paths(keep: &[usize], p: &PathSet) -> Vec<Vec<usize>> {
    p.paths.iter().map(|q| q.iter().map(|&v| keep[v]).collect()).collect()
}

fn split(inst: &Instance, sep: &Separation, k: usize, r: usize, cfg: &EpConfig) -> Result<EpOutcome> {
    let n = inst.n();
    let sep = normalize(inst, sep);
    let px = valid_path_within(inst, &mask_of(n, sep.side_a.iter().copied()))
        .ok_or_else(|| DpathError::Internal("split side without a valid path".into()))?;
    let py = valid_path_within(inst, &mask_of(n, sep.side_b.iter().copied()))
        .ok_or_else(|| DpathError::Internal("split side without a valid path".into()))?;
    let xa: Vec<usize> = sep.a_only().into_iter().collect();
    let yb: Vec<usize> = sep.b_only().into_iter().collect();
    let mut results = Vec::with_capacity(2);
    for (keep, other) in [(&xa, &py), (&yb, &px)] {
        let sub = inst.induced(keep, k - 1);
        let out = ep_cover_or_pack(&sub, k - 1, r, cfg)?;
        if let EpOutcome::Paths(p) = &out {
            let mut paths = map_paths(keep, p);
            paths.push(other.clone());
            return Ok(EpOutcome::Paths(PathSet::new(paths)));
        }
        results.push((keep, out));
    }
    for (keep, out) in &results {
        if let EpOutcome::MatchingWitness(w) = out {
            let v = w.vertices.iter().map(|&x| keep[x]).collect();
            return Ok(EpOutcome::MatchingWitness(PatternWitness::new(w.kind, v)));
        }
    }
    let mut z = sep.separator();
    for (keep, out) in &results {
        if let EpOutcome::HittingSet(zs) = out {
            z.extend(zs.iter().map(|&x| keep[x]));
        }
    }
    Ok(EpOutcome::HittingSet(z))
}

enum Extracted {
    Witness(PatternWitness),
    Sides(Vec<usize>, Vec<usize>),
}

/// An induced matching of size `max(k, r)` pairs or two `k`-sets that are
/// completely joined in the demand graph. The Ramsey extractor runs first;
/// small sets fall back to exhaustive search.
fn extract(inst: &Instance, tp: &FreeMatchedSet, k: usize, r: usize) -> Result<Option<Extracted>> {
    let h = inst.demand();
    let t = k.max(r);
    if let Ok(w) = matching_to_induced_or_biclique(h, tp.matching(), t) {
        return Ok(Some(match w.kind {
            WitnessKind::InducedMatching => Extracted::Witness(w),
            WitnessKind::Clique => Extracted::Sides(w.vertices[..k].to_vec(), w.vertices[k..2 * k].to_vec()),
            _ => Extracted::Sides(w.vertices[..k].to_vec(), w.vertices[t..t + k].to_vec()),
        }));
    }
    if tp.len() > BRUTE_LIMIT {
        return Ok(None);
    }
    let cand: Vec<usize> = tp.terminals().iter().copied().collect();
    if let Some(w) = brute_find_pattern_on(h, &cand, WitnessKind::Biclique, k)? {
        return Ok(Some(Extracted::Sides(w.vertices[..k].to_vec(), w.vertices[k..].to_vec())));
    }
    Ok(brute_find_pattern_on(h, &cand, WitnessKind::InducedMatching, r)?.map(Extracted::Witness))
}

/// After a successful growth step: link two joined `k`-sets, or certify a
/// hitting set from the failed linkage. `None` means keep growing.
fn finish(inst: &Instance, oracle: &dyn POracle, tp: &FreeMatchedSet, k: usize, r: usize) -> Result<Option<EpOutcome>> {
    if tp.len() < 2 * k && tp.len() < 2 * r {
        return Ok(None);
    }
    let (b1, b2) = match extract(inst, tp, k, r)? {
        None => return Ok(None),
        Some(Extracted::Witness(w)) => return Ok(Some(EpOutcome::MatchingWitness(w))),
        Some(Extracted::Sides(a, b)) => (a, b),
    };
    let link = biclique_linkage(inst, &b1, &b2, k)?;
    if link.value >= k {
        return Ok(Some(EpOutcome::Paths(trim_linkage(&link.paths, &b1, &b2))));
    }
    let n = inst.n();
    let rest: BTreeSet<usize> = tp
        .terminals()
        .iter()
        .copied()
        .filter(|v| !b1.contains(v) && !b2.contains(v))
        .collect();
    let mut active = vec![true; n];
    for &v in &rest {
        active[v] = false;
    }
    let f = vertex_flow(inst.graph(), &active, &b1, &b2, &vec![false; n], k);
    let mut blocked = active.clone();
    for &v in &f.cut_near {
        blocked[v] = false;
    }
    let mut near = vec![false; n];
    for &s in &b1 {
        if blocked[s] {
            for (v, hit) in inst.graph().reach(s, &blocked).into_iter().enumerate() {
                near[v] |= hit;
            }
        }
    }
    let far: Vec<bool> = (0..n).map(|v| blocked[v] && !near[v]).collect();
    let strip = |m: &[bool], b: &[usize]| -> Vec<bool> {
        let mut m = m.to_vec();
        for &v in b {
            m[v] = false;
        }
        m
    };
    if oracle.contains_element(&strip(&near, &b1)) || oracle.contains_element(&strip(&far, &b2)) {
        return Err(DpathError::Internal("failed linkage contradicts freeness".into()));
    }
    let mut z: BTreeSet<usize> = f.cut_near.union(&rest).copied().collect();
    z.extend(&b1);
    z.extend(&b2);
    Ok(Some(EpOutcome::HittingSet(z)))
}

/// Cover-or-pack on an arbitrary instance; pendant copies are attached
/// first and every outcome is reported on original vertex ids.
pub fn ep_cover_top(inst: &Instance, k: usize, r: usize, cfg: &EpConfig) -> Result<EpOutcome> {
    let att = attach_degree_one_terminals(inst);
    let out = match ep_cover_or_pack(&att.instance, k, r, cfg)? {
        EpOutcome::Paths(p) => EpOutcome::Paths(att.paths_to_original(&p)),
        EpOutcome::HittingSet(z) => EpOutcome::HittingSet(att.set_to_original(&z)),
        EpOutcome::MatchingWitness(w) => {
            EpOutcome::MatchingWitness(PatternWitness::new(w.kind, w.vertices.iter().map(|&v| att.to_original(v)).collect()))
        }
    };
    if !verify_outcome(&inst.with_k(k), &out, r) {
        return Err(DpathError::Internal(format!("{} outcome failed verification", out.label())));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub paths: PathSet,
    pub witness: Option<PatternWitness>,
    /// The `k` whose run ended the doubling.
    pub last_k: usize,
}

/// Doubles `k = 1, 2, 4, ...` while cover-or-pack keeps returning paths and
/// reports the largest packing found.
pub fn fpt_approx(inst: &Instance, r: usize, cfg: &EpConfig) -> Result<ApproxResult> {
    let mut best = PathSet::default();
    let mut k = 1;
    loop {
        if 2 * k > inst.terminals().len() {
            return Ok(ApproxResult { paths: best, witness: None, last_k: k });
        }
        match ep_cover_top(inst, k, r, cfg)? {
            EpOutcome::Paths(p) => {
                best = p;
                k *= 2;
            }
            EpOutcome::HittingSet(_) => return Ok(ApproxResult { paths: best, witness: None, last_k: k }),
            EpOutcome::MatchingWitness(w) => {
                return Ok(ApproxResult {
                    paths: best,
                    witness: Some(w),
                    last_k: k,
                })
            }
        }
    }
}
