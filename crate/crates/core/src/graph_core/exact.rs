//! Exact exponential disjoint-paths search for desk-scale instances.

use super::graph::Graph;
use super::instance::{Instance, PathSet};
use crate::error::{DpathError, Result};

/// Default search-node budget for the exact oracles.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

struct Counter {
    used: u64,
    budget: u64,
}

impl Counter {
    fn new(budget: u64) -> Self {
        Counter { used: 0, budget }
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            Err(DpathError::BudgetExhausted {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

/// Enumerates simple `s`–`t` paths avoiding `blocked`, calling `visit` for
/// each one (with the path's vertices marked in `blocked`). Stops early when
/// `visit` returns true.
fn for_each_path(
    g: &Graph,
    s: usize,
    t: usize,
    blocked: &mut [bool],
    counter: &mut Counter,
    visit: &mut dyn FnMut(&[usize], &mut [bool], &mut Counter) -> Result<bool>,
) -> Result<bool> {
    if blocked[s] || blocked[t] {
        return Ok(false);
    }
    let mut path = vec![s];
    blocked[s] = true;
    let found = extend(g, t, &mut path, blocked, counter, visit);
    blocked[s] = false;
    found
}

fn extend(
    g: &Graph,
    t: usize,
    path: &mut Vec<usize>,
    blocked: &mut [bool],
    counter: &mut Counter,
    visit: &mut dyn FnMut(&[usize], &mut [bool], &mut Counter) -> Result<bool>,
) -> Result<bool> {
    counter.tick()?;
    let cur = *path.last().expect("non-empty");
    if cur == t {
        return visit(path, blocked, counter);
    }
    // t must stay reachable from cur through unblocked vertices.
    let mut free: Vec<bool> = blocked.iter().map(|b| !b).collect();
    free[cur] = true;
    if !g.reach(cur, &free)[t] {
        return Ok(false);
    }
    for &w in g.neighbors(cur) {
        if w == t {
            blocked[t] = true;
            path.push(t);
            let r = visit(path, blocked, counter);
            path.pop();
            blocked[t] = false;
            if r? {
                return Ok(true);
            }
            continue;
        }
        if blocked[w] {
            continue;
        }
        blocked[w] = true;
        path.push(w);
        let r = extend(g, t, path, blocked, counter, visit);
        path.pop();
        blocked[w] = false;
        if r? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `k` pairwise vertex-disjoint valid paths, or `None` if there are none.
pub fn exact_max_disjoint(inst: &Instance) -> Result<Option<PathSet>> {
    exact_max_disjoint_with(inst, DEFAULT_BUDGET)
}

/// Branch search: paths are chosen in increasing demand-edge order (each
/// path set is found once), each path is grown vertex by vertex, and a
/// branch is cut when too few demand edges stay connected.
pub fn exact_max_disjoint_with(inst: &Instance, budget: u64) -> Result<Option<PathSet>> {
    let k = inst.k();
    if k == 0 {
        return Ok(Some(PathSet::default()));
    }
    let demand = inst.demand_edges();
    let mut counter = Counter::new(budget);
    let mut blocked = vec![false; inst.n()];
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    let found = pick(
        inst.graph(),
        &demand,
        0,
        k,
        &mut blocked,
        &mut chosen,
        &mut counter,
    )?;
    Ok(found.then(|| PathSet::new(chosen)))
}

fn enough_connected(
    g: &Graph,
    demand: &[(usize, usize)],
    from: usize,
    need: usize,
    blocked: &[bool],
) -> bool {
    let free: Vec<bool> = blocked.iter().map(|b| !b).collect();
    let comp = g.component_ids(&free);
    let mut ends = std::collections::BTreeSet::new();
    let mut count = 0;
    for &(s, t) in &demand[from..] {
        if comp[s] != usize::MAX && comp[s] == comp[t] {
            count += 1;
            ends.insert(s);
            ends.insert(t);
        }
    }
    count >= need && ends.len() >= 2 * need
}

fn pick(
    g: &Graph,
    demand: &[(usize, usize)],
    from: usize,
    remaining: usize,
    blocked: &mut [bool],
    chosen: &mut Vec<Vec<usize>>,
    counter: &mut Counter,
) -> Result<bool> {
    if remaining == 0 {
        return Ok(true);
    }
    counter.tick()?;
    if !enough_connected(g, demand, from, remaining, blocked) {
        return Ok(false);
    }
    for j in from..demand.len() {
        let (s, t) = demand[j];
        if blocked[s] || blocked[t] {
            continue;
        }
        let mut visit = |path: &[usize], blocked: &mut [bool], counter: &mut Counter| -> Result<bool> {
            chosen.push(path.to_vec());
            if pick(g, demand, j + 1, remaining - 1, blocked, chosen, counter)? {
                return Ok(true);
            }
            chosen.pop();
            Ok(false)
        };
        if for_each_path(g, s, t, blocked, counter, &mut visit)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Largest number of pairwise disjoint valid paths (ignores `inst.k()`).
pub fn max_disjoint_value(inst: &Instance, budget: u64) -> Result<usize> {
    let mut best = 0;
    loop {
        match exact_max_disjoint_with(&inst.with_k(best + 1), budget)? {
            Some(_) => best += 1,
            None => return Ok(best),
        }
    }
}

/// Vertex-disjoint paths joining each `(s_i, t_i)`, or `None`.
pub fn solve_disjoint_pairs(
    g: &Graph,
    pairs: &[(usize, usize)],
    budget: u64,
) -> Result<Option<PathSet>> {
    let n = g.n();
    let mut reserved = vec![0usize; n];
    for &(s, t) in pairs {
        if s >= n || t >= n {
            return Err(DpathError::Precondition(format!("pair ({s},{t}) out of range")));
        }
        reserved[s] += 1;
        if t != s {
            reserved[t] += 1;
        }
    }
    if reserved.iter().any(|&c| c > 1) {
        return Ok(None);
    }
    // Endpoints of later pairs are blocked until their own turn.
    let mut blocked: Vec<bool> = reserved.iter().map(|&c| c > 0).collect();
    let mut counter = Counter::new(budget);
    let mut chosen = Vec::new();
    let found = route(g, pairs, 0, &mut blocked, &mut chosen, &mut counter)?;
    Ok(found.then(|| PathSet::new(chosen)))
}

fn pairs_connected(g: &Graph, pairs: &[(usize, usize)], blocked: &[bool]) -> bool {
    let mut free: Vec<bool> = blocked.iter().map(|b| !b).collect();
    for &(s, t) in pairs {
        free[s] = true;
        free[t] = true;
    }
    let comp = g.component_ids(&free);
    pairs.iter().all(|&(s, t)| comp[s] == comp[t])
}

fn route(
    g: &Graph,
    pairs: &[(usize, usize)],
    i: usize,
    blocked: &mut [bool],
    chosen: &mut Vec<Vec<usize>>,
    counter: &mut Counter,
) -> Result<bool> {
    if i == pairs.len() {
        return Ok(true);
    }
    counter.tick()?;
    if !pairs_connected(g, &pairs[i..], blocked) {
        return Ok(false);
    }
    let (s, t) = pairs[i];
    blocked[s] = false;
    blocked[t] = false;
    let found = if s == t {
        blocked[s] = true;
        chosen.push(vec![s]);
        let r = route(g, pairs, i + 1, blocked, chosen, counter)?;
        if !r {
            chosen.pop();
        }
        blocked[s] = false;
        r
    } else {
        let mut visit = |path: &[usize], blocked: &mut [bool], counter: &mut Counter| -> Result<bool> {
            chosen.push(path.to_vec());
            if route(g, pairs, i + 1, blocked, chosen, counter)? {
                return Ok(true);
            }
            chosen.pop();
            Ok(false)
        };
        for_each_path(g, s, t, blocked, counter, &mut visit)?
    };
    if !found {
        blocked[s] = true;
        blocked[t] = true;
    }
    Ok(found)
}

/// Independent second search order: list every valid path first, then pick
/// `k` pairwise disjoint ones from the list (shortest paths first).
pub fn brute_force_disjoint(inst: &Instance, budget: u64) -> Result<Option<PathSet>> {
    let k = inst.k();
    if k == 0 {
        return Ok(Some(PathSet::default()));
    }
    let g = inst.graph();
    let mut counter = Counter::new(budget);
    let mut all: Vec<Vec<usize>> = Vec::new();
    for (s, t) in inst.demand_edges() {
        let mut blocked = vec![false; inst.n()];
        let mut visit = |p: &[usize], _: &mut [bool], _: &mut Counter| -> Result<bool> {
            all.push(p.to_vec());
            Ok(false)
        };
        for_each_path(g, s, t, &mut blocked, &mut counter, &mut visit)?;
    }
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut used = vec![false; inst.n()];
    let mut chosen = Vec::new();
    let found = choose(&all, 0, k, &mut used, &mut chosen, &mut counter)?;
    Ok(found.then(|| PathSet::new(chosen.into_iter().map(|i| all[i].clone()).collect())))
}

fn choose(
    all: &[Vec<usize>],
    from: usize,
    remaining: usize,
    used: &mut [bool],
    chosen: &mut Vec<usize>,
    counter: &mut Counter,
) -> Result<bool> {
    if remaining == 0 {
        return Ok(true);
    }
    for i in from..all.len() {
        counter.tick()?;
        if all[i].iter().any(|&v| used[v]) {
            continue;
        }
        for &v in &all[i] {
            used[v] = true;
        }
        chosen.push(i);
        if choose(all, i + 1, remaining - 1, used, chosen, counter)? {
            return Ok(true);
        }
        chosen.pop();
        for &v in &all[i] {
            used[v] = false;
        }
    }
    Ok(false)
}
