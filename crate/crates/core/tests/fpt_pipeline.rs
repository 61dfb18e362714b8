mod common;

use std::collections::BTreeSet;

use dpath_core::fpt_pipeline::*;
use dpath_core::graph_core::{exact_max_disjoint, verify_solution, Graph, Instance};
use rand::Rng;

#[test]
fn gallai_matches_brute_packing() {
    let mut rng = common::rng(31);
    let (mut paths, mut covers) = (0, 0);
    for _ in 0..300 {
        let n = rng.gen_range(3..=12);
        let p = rng.gen_range(0.1..0.4);
        let g = common::random_graph(&mut rng, n, p);
        let a: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let k = rng.gen_range(1..=3);
        let best = brute_a_path_packing(&g, &a).unwrap();
        assert_eq!(a_path_packing(&g, &a).len(), best);
        match gallai_a_paths(&g, &a, k).unwrap() {
            GallaiOutcome::Paths(ps) => {
                paths += 1;
                assert!(best >= k && ps.len() == k && ps.pairwise_disjoint());
                for p in &ps.paths {
                    assert!(g.is_path(p) && p.len() >= 2);
                    assert!(a.contains(&p[0]) && a.contains(&p[p.len() - 1]));
                }
            }
            GallaiOutcome::Cover(s) => {
                covers += 1;
                assert!(best < k);
                assert!(s.len() <= 2 * k - 2);
                assert!(is_gallai_cover(&g, &a, &s));
            }
        }
    }
    assert!(paths > 50 && covers > 50, "{paths} {covers}");
}

#[test]
fn removals_preserve_solvability() {
    let mut rng = common::rng(32);
    let cfg = FptConfig {
        smsep: Some(1),
        sm: Some(0),
        ..Default::default()
    };
    let mut events = 0;
    for _ in 0..300 {
        let n = rng.gen_range(4..=12);
        let k = rng.gen_range(1..=3);
        let inst = common::random_instance(&mut rng, n, k);
        let rep = solve_fpt(&inst, 3, &cfg).unwrap();
        assert!(rep.overridden);
        for ev in &rep.trace {
            events += 1;
            let before = exact_max_disjoint(&ev.before).unwrap().is_some();
            let after = exact_max_disjoint(&ev.before.without_terminal(ev.removed)).unwrap().is_some();
            assert_eq!(before, after, "{:?} dropped {} by {:?}", ev.before, ev.removed, ev.rule);
            assert!(ev.before.is_terminal(ev.removed));
        }
        for w in rep.trace.windows(2) {
            assert!(w[1].before.terminals().len() < w[0].before.terminals().len());
        }
    }
    assert!(events > 100);
}

#[test]
fn solver_agrees_with_exact_oracle() {
    let mut rng = common::rng(33);
    for _ in 0..200 {
        let n = rng.gen_range(4..=12);
        let k = rng.gen_range(1..=3);
        let inst = common::random_instance(&mut rng, n, k);
        let want = exact_max_disjoint(&inst).unwrap().is_some();
        match solve_fpt(&inst, 3, &FptConfig::default()).unwrap().outcome {
            SolveOutcome::Paths(p) => assert!(want && verify_solution(&inst, &p)),
            SolveOutcome::No => assert!(!want),
            w => panic!("unexpected {w:?}"),
        }
    }
}

#[test]
fn clique_reduction_drops_pendant_terminal_or_routes() {
    // Two hubs joined by an edge; hub 0 carries 12 pendant terminals, hub 1
    // carries one. All 13 terminals are pairwise demanded, k = 1.
    let mut edges = vec![(0, 1)];
    edges.extend((2..14).map(|v| (0, v)));
    edges.push((1, 14));
    let g = Graph::from_edges(15, &edges).unwrap();
    let ts: Vec<usize> = (2..15).collect();
    let mut d = Vec::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            d.push((ts[i], ts[j]));
        }
    }
    let inst = Instance::new(g, ts.clone(), &d, 1).unwrap();
    match reduce_clique(&inst, &ts, 1).unwrap() {
        Reduction::Paths(p) => assert!(verify_solution(&inst, &p)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn components_rule_on_many_pendants() {
    // One center, 200 pendant terminals, demand K_{100,100}.
    let n = 201;
    let g = Graph::from_edges(n, &(1..n).map(|v| (0, v)).collect::<Vec<_>>()).unwrap();
    let mut d = Vec::new();
    for i in 1..101 {
        for j in 101..201 {
            d.push((i, j));
        }
    }
    let inst = Instance::new(g, (1..n).collect(), &d, 1).unwrap();
    let z: BTreeSet<usize> = [0].into();
    let t = reduce_components(&inst, &z, 1).unwrap();
    assert!(inst.is_terminal(t));
    let after = inst.without_terminal(t);
    assert!(exact_max_disjoint(&after).unwrap().is_some());
    let small = Instance::new(Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap(), vec![1, 2], &[(1, 2)], 1).unwrap();
    assert!(reduce_components(&small, &z, 1).is_err());
}
