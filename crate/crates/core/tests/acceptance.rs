//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines always print.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use dpath_core::ep_cover::{ep_cover_top, verify_outcome, EpConfig};
use dpath_core::fpt_pipeline::{brute_a_path_packing, gallai_a_paths, is_gallai_cover, solve_fpt, FptConfig, GallaiOutcome, SolveOutcome};
use dpath_core::graph_core::{exact_max_disjoint, max_disjoint_value, verify_solution, Graph, DEFAULT_BUDGET};
use dpath_core::hardness_gen::{gen_grid_tiling, reduce_matching, reduce_skew, selector_audit, GridTiling};
use dpath_core::pattern_ramsey::{
    find_monochromatic_clique, matching_threshold, matching_to_induced_or_biclique, ramsey_threshold, staircase_to_witness, verify_witness, Adjacency,
    EdgeColoring,
};
use dpath_core::rep_sets::{compatible, rep_vector_bound, representative_vectors, RepOutcome};
use dpath_core::separators::{brute_important_separators, enumerate_important_separators};
use dpath_core::WitnessKind;
use rand::Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_fpt_matches_exact() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = common::rng(1001);
    let (mut yes, mut no, mut witnesses) = (0, 0, 0);
    for i in 0..500 {
        let n = rng.gen_range(4..=14);
        let k = rng.gen_range(1..=3);
        let inst = common::random_instance(&mut rng, n, k);
        let want = exact_max_disjoint(&inst).map_err(|e| e.to_string())?.is_some();
        let rep = solve_fpt(&inst, 3, &FptConfig::default()).map_err(|e| format!("instance {i}: {e}"))?;
        match rep.outcome {
            SolveOutcome::Paths(p) => {
                ensure(want && verify_solution(&inst, &p), || format!("instance {i}: paths disagree {inst:?}"))?;
                yes += 1;
            }
            SolveOutcome::No => {
                ensure(!want, || format!("instance {i}: No on a yes-instance {inst:?}"))?;
                no += 1;
            }
            SolveOutcome::MatchingWitness(w) | SolveOutcome::SkewWitness(w) => {
                ensure(verify_witness(inst.demand(), &w), || format!("instance {i}: bad witness"))?;
                witnesses += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(600), || format!("took {t:?}"))?;
    Ok(format!("500 instances, {yes} yes / {no} no / {witnesses} witnesses, 0 disagreements, {:.1}s", t.as_secs_f64()))
}

fn c2_ep_outcomes_verify() -> Result<String, String> {
    let mut rng = common::rng(1002);
    let mut counts = [0usize; 3];
    for i in 0..500 {
        let n = rng.gen_range(4..=30);
        let k = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=2);
        let inst = common::random_instance(&mut rng, n, k);
        let out = ep_cover_top(&inst, k, r, &EpConfig::default()).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(verify_outcome(&inst.with_k(k), &out, r), || format!("instance {i}: {} fails", out.label()))?;
        counts[match out.label() {
            "paths" => 0,
            "hitting-set" => 1,
            _ => 2,
        }] += 1;
    }
    Ok(format!("500 instances, {} paths / {} hitting sets / {} matchings, 0 failures", counts[0], counts[1], counts[2]))
}

fn connected(g: &Graph) -> bool {
    g.n() == 0 || g.reach(0, &vec![true; g.n()]).iter().all(|&b| b)
}

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut g = Graph::new(n);
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                g.add_edge(u, v);
            }
            bit += 1;
        }
    }
    g
}

fn compare_separators(g: &Graph, x: &BTreeSet<usize>, y: &BTreeSet<usize>, p: usize) -> Result<(), String> {
    let active = vec![true; g.n()];
    let fast = enumerate_important_separators(g, &active, x, y, p);
    let slow = brute_important_separators(g, &active, x, y, p);
    ensure(fast == slow, || format!("mismatch on {g:?} x={x:?} y={y:?} p={p}"))?;
    ensure(fast.len() <= 4usize.pow(p as u32), || format!("{} separators above 4^{p}", fast.len()))
}

fn c3_important_separators() -> Result<String, String> {
    let mut runs = 0;
    for n in 2..=6 {
        for mask in 0..1u64 << (n * (n - 1) / 2) {
            let g = graph_from_mask(n, mask);
            if !connected(&g) {
                continue;
            }
            for p in 0..=3 {
                compare_separators(&g, &[0].into(), &[n - 1].into(), p)?;
                runs += 1;
            }
        }
    }
    let exhaustive = runs;
    let mut rng = common::rng(1003);
    for n in 7..=8 {
        let mut sampled = 0;
        while sampled < 1500 {
            let mask = rng.gen_range(0..1u64 << (n * (n - 1) / 2));
            let g = graph_from_mask(n, mask);
            if !connected(&g) {
                continue;
            }
            let xs = rng.gen_range(1..=2);
            let ys = rng.gen_range(1..=2);
            let x: BTreeSet<usize> = (0..xs).collect();
            let y: BTreeSet<usize> = (n - ys..n).collect();
            compare_separators(&g, &x, &y, rng.gen_range(0..=3))?;
            sampled += 1;
            runs += 1;
        }
    }
    for _ in 0..50 {
        let n = rng.gen_range(3..=10);
        let p = rng.gen_range(0.2..0.6);
        let g = common::random_graph(&mut rng, n, p);
        compare_separators(&g, &[0].into(), &[n - 1].into(), rng.gen_range(0..=3))?;
        runs += 1;
    }
    Ok(format!(
        "{runs} comparisons: every connected graph on n<=6 ({exhaustive}), 3000 sampled at n=7,8, 50 random n<=10"
    ))
}

fn c4_gallai() -> Result<String, String> {
    let mut rng = common::rng(1004);
    let (mut paths, mut covers) = (0, 0);
    for i in 0..500 {
        let n = rng.gen_range(2..=12);
        let p = rng.gen_range(0.1..0.45);
        let g = common::random_graph(&mut rng, n, p);
        let a: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let k = rng.gen_range(1..=4);
        let best = brute_a_path_packing(&g, &a).map_err(|e| e.to_string())?;
        match gallai_a_paths(&g, &a, k).map_err(|e| e.to_string())? {
            GallaiOutcome::Paths(ps) => {
                let ok = best >= k
                    && ps.len() == k
                    && ps.pairwise_disjoint()
                    && ps.paths.iter().all(|p| g.is_path(p) && p.len() >= 2 && a.contains(&p[0]) && a.contains(&p[p.len() - 1]));
                ensure(ok, || format!("case {i}: bad paths"))?;
                paths += 1;
            }
            GallaiOutcome::Cover(s) => {
                ensure(best < k && s.len() + 2 <= 2 * k && is_gallai_cover(&g, &a, &s), || format!("case {i}: bad cover {s:?}"))?;
                covers += 1;
            }
        }
    }
    Ok(format!("500 graphs, {paths} packings / {covers} covers of size <= 2k-2"))
}

fn c5_representative_vectors() -> Result<String, String> {
    let arith = [
        (0, 3, 1u128),
        (1, 0, 2),
        (2, 0, 9),
        (3, 0, 64),
        (1, 1, u128::MAX),
    ];
    for (d, r, want) in arith {
        ensure(rep_vector_bound(d, r) == want, || format!("bound({d},{r}) = {}", rep_vector_bound(d, r)))?;
    }
    let mut rng = common::rng(1005);
    let (mut sets, mut witnesses, mut checks) = (0, 0, 0u64);
    for i in 0..500 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.1..0.9);
        let h = common::random_graph(&mut rng, n, p);
        let d = rng.gen_range(0..=3);
        let r = rng.gen_range(2..=5);
        let size = rng.gen_range(1..=40);
        let fam: Vec<Vec<usize>> = (0..size).map(|_| (0..d).map(|_| rng.gen_range(0..n)).collect()).collect();
        let mut q = |areas: &[Vec<bool>]| Ok(fam.iter().find(|a| a.iter().enumerate().all(|(j, &x)| areas[j][x])).map(|a| (a.clone(), ())));
        match representative_vectors(&h, d, &mut q, r).map_err(|e| e.to_string())? {
            RepOutcome::Witness(w) => {
                ensure(verify_witness(&h, &w), || format!("case {i}: bad witness"))?;
                witnesses += 1;
            }
            RepOutcome::Set(rep) => {
                sets += 1;
                ensure((rep.len() as u128) <= rep_vector_bound(d, r), || format!("case {i}: size"))?;
                ensure(rep.iter().all(|(a, _)| fam.contains(a)), || format!("case {i}: foreign member"))?;
                let mut b = vec![0; d];
                loop {
                    checks += 1;
                    let want = fam.iter().any(|a| compatible(&h, a, &b));
                    let got = rep.iter().any(|(a, _)| compatible(&h, a, &b));
                    ensure(want == got, || format!("case {i}: b={b:?} uncovered"))?;
                    let mut j = 0;
                    while j < d && b[j] == n - 1 {
                        b[j] = 0;
                        j += 1;
                    }
                    if j == d {
                        break;
                    }
                    b[j] += 1;
                }
            }
        }
    }
    Ok(format!("500 families, {sets} sets / {witnesses} witnesses, {checks} vectors b checked, bound arithmetic exact"))
}

fn c6_matching_reduction() -> Result<String, String> {
    for n in 1..=2 {
        let red = reduce_matching(&gen_grid_tiling(1, n, 7 + n as u64, true)).map_err(|e| e.to_string())?;
        ensure(red.k_prime == 4, || format!("k' = {}", red.k_prime))?;
        ensure(red.cycle_len == 4 * (2 * n * n + 2), || format!("cycle {}", red.cycle_len))?;
        let best = max_disjoint_value(&red.instance, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure(best == 4, || format!("n={n}: {best} disjoint valid paths"))?;
        ensure(verify_solution(&red.instance, red.witness.as_ref().unwrap()), || "planted witness fails".into())?;
    }
    let empty = GridTiling {
        k: 1,
        n: 1,
        sets: vec![vec![BTreeSet::new()]],
        solution: None,
    };
    let red = reduce_matching(&empty).map_err(|e| e.to_string())?;
    let best = max_disjoint_value(&red.instance, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(best < red.k_prime, || format!("empty set gives {best}"))?;
    let k2 = reduce_matching(&gen_grid_tiling(2, 1, 0, true)).map_err(|e| e.to_string())?;
    ensure(k2.k_prime == 20, || format!("k=2: k' = {}", k2.k_prime))?;
    Ok(format!("planted n=1,2 reach exactly 4 paths, empty set reaches {best}, cycles 16 and 40"))
}

fn c7_skew_reduction() -> Result<String, String> {
    let one = reduce_skew(&gen_grid_tiling(1, 1, 0, true)).map_err(|e| e.to_string())?;
    let two = reduce_skew(&gen_grid_tiling(2, 1, 0, true)).map_err(|e| e.to_string())?;
    ensure(one.k_prime == 14 && two.k_prime == 48, || format!("k' = {}, {}", one.k_prime, two.k_prime))?;
    let w = one.witness.as_ref().ok_or("no planted witness")?;
    ensure(w.len() == 14 && one.labeled.verify_solution(w, 14), || "k=1 witness fails the predicate".into())?;
    let w2 = two.witness.as_ref().ok_or("no planted witness")?;
    ensure(two.labeled.verify_solution(w2, 48), || "k=2 witness fails the predicate".into())?;
    for m in 1..=2 {
        let audit = selector_audit(m).map_err(|e| e.to_string())?;
        ensure(audit.max_complete == 4, || format!("m={m}: {} complete paths", audit.max_complete))?;
        ensure(audit.routings_well_formed(m), || format!("m={m}: routings {:?}", audit.routings))?;
        let mi = m as i64;
        let diagonal = (1..=mi).all(|i| audit.routings.contains(&(6 * mi + i, -mi - i)));
        ensure(diagonal, || format!("m={m}: diagonal routings missing from {:?}", audit.routings))?;
    }
    Ok("k'=14 and 48, 14-path witness valid, selector audit m=1,2 caps at 4 with well-formed routings covering the diagonal".into())
}

fn c8_removals() -> Result<String, String> {
    let mut rng = common::rng(1008);
    let configs = [
        FptConfig::default(),
        FptConfig {
            smsep: Some(2),
            sm: Some(3),
            ..Default::default()
        },
    ];
    let mut events = 0;
    for i in 0..600 {
        let n = rng.gen_range(4..=14);
        let k = rng.gen_range(1..=3);
        let inst = common::random_instance(&mut rng, n, k);
        let rep = solve_fpt(&inst, 3, &configs[i % 2]).map_err(|e| format!("instance {i}: {e}"))?;
        for ev in &rep.trace {
            let before = exact_max_disjoint(&ev.before).map_err(|e| e.to_string())?.is_some();
            let after = exact_max_disjoint(&ev.before.without_terminal(ev.removed)).map_err(|e| e.to_string())?.is_some();
            ensure(before == after, || format!("instance {i}: dropping {} by {:?} changed the answer", ev.removed, ev.rule))?;
            events += 1;
        }
    }
    ensure(events >= 200, || format!("only {events} removal events"))?;
    Ok(format!("{events} removal events audited, 0 changed the answer"))
}

fn mix(seed: u64, a: usize, b: usize) -> u64 {
    let mut z = seed ^ ((a as u64) << 32 | b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random demand graph on `x_i = 2i`, `y_i = 2i+1` containing the matching
/// `x_i y_i`, defined by hashing so huge matchings need no storage.
struct HashedMatchingGraph {
    seed: u64,
    density: u64,
}

impl Adjacency for HashedMatchingGraph {
    fn adjacent(&self, u: usize, v: usize) -> bool {
        let (a, b) = (u.min(v), u.max(v));
        (a / 2 == b / 2 && a != b) || (a != b && mix(self.seed, a, b) % 100 < self.density)
    }
}

/// Staircase on `a_i = i`, `b_i = len + i`: `a_i ~ b_i`, `a_i ≁ b_j` for
/// `i < j`, every other pair random.
struct HashedStaircase {
    seed: u64,
    len: usize,
}

impl Adjacency for HashedStaircase {
    fn adjacent(&self, u: usize, v: usize) -> bool {
        let (a, b) = (u.min(v), u.max(v));
        if a == b {
            return false;
        }
        if a < self.len && b >= self.len {
            let (i, j) = (a, b - self.len);
            if i == j {
                return true;
            }
            if i < j {
                return false;
            }
        }
        mix(self.seed, a, b) % 2 == 0
    }
}

fn c9_extractors() -> Result<String, String> {
    for (c, r) in [(2usize, 2usize), (4, 1), (5, 1)] {
        let n = ramsey_threshold(c, r) as usize;
        for seed in 0..1000u64 {
            let col = EdgeColoring::from_fn(n, c, |i, j| 1 + (mix(seed, i, j) % c as u64) as usize);
            let q = find_monochromatic_clique(&col, r).map_err(|e| format!("(c,r)=({c},{r}) seed {seed}: {e}"))?;
            let mono = q.len() == r && q.iter().all(|&u| q.iter().all(|&v| u == v || col.color(u, v) == col.color(q[0], q[1.min(q.len() - 1)])));
            ensure(mono, || format!("(c,r)=({c},{r}) seed {seed}: {q:?} not monochromatic"))?;
        }
    }
    let len = ramsey_threshold(4, 1) as usize;
    let a: Vec<usize> = (0..len).collect();
    let b: Vec<usize> = (len..2 * len).collect();
    for seed in 0..1000u64 {
        let h = HashedStaircase { seed, len };
        let w = staircase_to_witness(&h, &a, &b, 1).map_err(|e| format!("staircase seed {seed}: {e}"))?;
        ensure(verify_witness(&h, &w), || format!("staircase seed {seed}: {w:?}"))?;
    }
    let size = matching_threshold(1) as usize;
    let matching: Vec<(usize, usize)> = (0..size).map(|i| (2 * i, 2 * i + 1)).collect();
    let mut kinds = [0usize; 4];
    for seed in 0..1000u64 {
        let h = HashedMatchingGraph {
            seed,
            density: seed % 100,
        };
        let w = matching_to_induced_or_biclique(&h, &matching, 1).map_err(|e| format!("matching seed {seed}: {e}"))?;
        ensure(verify_witness(&h, &w), || format!("matching seed {seed}: {w:?}"))?;
        kinds[match w.kind {
            WitnessKind::InducedMatching => 0,
            WitnessKind::Clique => 1,
            WitnessKind::Biclique => 2,
            WitnessKind::SkewBiclique => 3,
        }] += 1;
    }
    Ok(format!(
        "3x1000 cliques at n=16/256/3125, 1000 staircases of 256, 1000 matchings of 5^10 ({} induced / {} clique / {} biclique), 0 failures",
        kinds[0], kinds[1], kinds[2]
    ))
}

fn main() {
    let checks: [(usize, Check); 9] = [
        (1, c1_fpt_matches_exact),
        (2, c2_ep_outcomes_verify),
        (3, c3_important_separators),
        (4, c4_gallai),
        (5, c5_representative_vectors),
        (6, c6_matching_reduction),
        (7, c7_skew_reduction),
        (8, c8_removals),
        (9, c9_extractors),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let results: Vec<(usize, Result<String, String>, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = checks
            .iter()
            .map(|&(id, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
                        let msg = e
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_default();
                        Err(format!("panicked: {msg}"))
                    });
                    (id, res, start.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("checks catch their panics")).collect()
    });
    let mut failed = 0;
    for (id, res, t) in &results {
        match res {
            Ok(detail) => println!("criterion {id}: PASS ({detail}) [{:.1}s]", t.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {id}: FAIL ({why}) [{:.1}s]", t.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
