mod common;

use std::collections::BTreeSet;

use dpath_core::graph_core::{exact_max_disjoint, verify_solution, Instance, Separation};
use rand_chacha::ChaCha8Rng;
use dpath_core::rep_sets::*;
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn vector_sets_are_complete_on_small_demand_graphs() {
    let mut rng = common::rng(21);
    let mut sets = 0;
    for _ in 0..300 {
        let n = rng.gen_range(2..=8);
        let p = rng.gen_range(0.2..0.8);
        let h = common::random_graph(&mut rng, n, p);
        let d = rng.gen_range(1..=3);
        let size = rng.gen_range(1..=40);
        let fam: Vec<Vec<usize>> = (0..size).map(|_| (0..d).map(|_| rng.gen_range(0..n)).collect()).collect();
        let mut q = |areas: &[Vec<bool>]| {
            Ok(fam
                .iter()
                .find(|a| a.iter().enumerate().all(|(j, &x)| areas[j][x]))
                .map(|a| (a.clone(), ())))
        };
        match representative_vectors(&h, d, &mut q, 5).unwrap() {
            RepOutcome::Witness(w) => assert!(dpath_core::pattern_ramsey::verify_witness(&h, &w)),
            RepOutcome::Set(rep) => {
                sets += 1;
                assert!(rep.iter().all(|(a, _)| fam.contains(a)));
                let mut b = vec![0; d];
                loop {
                    let want = fam.iter().any(|a| compatible(&h, a, &b));
                    let got = rep.iter().any(|(a, _)| compatible(&h, a, &b));
                    assert_eq!(want, got, "h={h:?} fam={fam:?} b={b:?}");
                    let mut i = 0;
                    while i < d && b[i] == n - 1 {
                        b[i] = 0;
                        i += 1;
                    }
                    if i == d {
                        break;
                    }
                    b[i] += 1;
                }
            }
        }
    }
    assert!(sets > 250);
}

/// `(C ∪ N(C), V - C)` for a component `C` of `G - Z` whose terminals are
/// pairwise non-demanded, `Z` a few random non-terminals.
fn component_separation(rng: &mut ChaCha8Rng, inst: &Instance) -> Option<Separation> {
    let n = inst.n();
    let mut free: Vec<usize> = (0..n).filter(|&v| !inst.is_terminal(v)).collect();
    free.shuffle(rng);
    free.truncate(rng.gen_range(0..=3));
    let z: BTreeSet<usize> = free.into_iter().collect();
    let active: Vec<bool> = (0..n).map(|v| !z.contains(&v)).collect();
    let g = inst.graph();
    let c = g.components(&active).into_iter().find(|c| {
        let ts: Vec<usize> = c.iter().copied().filter(|&v| inst.is_terminal(v)).collect();
        !ts.is_empty() && ts.iter().all(|&a| ts.iter().all(|&b| !inst.demand_adjacent(a, b)))
    })?;
    let inner: BTreeSet<usize> = c.iter().copied().collect();
    let mut side_a = inner.clone();
    side_a.extend(c.iter().flat_map(|&v| g.neighbors(v)).copied());
    Some(Separation::new(side_a, (0..n).filter(|v| !inner.contains(v)).collect()))
}

#[test]
fn swapping_in_a_representative_keeps_solutions_valid() {
    let mut rng = common::rng(22);
    let mut swaps = 0;
    for _ in 0..1200 {
        let n = rng.gen_range(5..=12);
        let k = rng.gen_range(1..=2);
        let inst = common::random_instance(&mut rng, n, k);
        let Some(sep) = component_separation(&mut rng, &inst) else {
            continue;
        };
        let side_a = sep.side_a.clone();
        let inner = sep.a_only();
        let Some(sol) = exact_max_disjoint(&inst).unwrap() else {
            continue;
        };
        let PartialRepOutcome::Set(rep) = representative_partial_solutions(&inst, &sep, k, 1, 1_000_000).unwrap() else {
            continue;
        };
        let s = sep.separator();
        let part = partial_solution_of(&sol, &side_a);
        let cls = classify_partial_solution(&inst, &sep, &part).unwrap();
        // Outer vector: far endpoint of each full path entering through a join vertex.
        let mut outer: Vec<(usize, usize)> = Vec::new();
        for p in &sol.paths {
            for (start, far) in [(p.clone(), p[p.len() - 1]), (p.iter().rev().copied().collect::<Vec<_>>(), p[0])] {
                if inner.contains(&start[0]) {
                    let join = *start.iter().take_while(|v| side_a.contains(v)).last().unwrap();
                    assert!(s.contains(&join));
                    outer.push((join, far));
                }
            }
        }
        outer.sort_unstable();
        let outer: Vec<usize> = outer.into_iter().map(|(_, t)| t).collect();
        let (_, _, member) = rep
            .iter()
            .find(|(ty, a, _)| *ty == cls.ty && compatible(inst.demand(), a, &outer))
            .expect("some member matches the outer vector");
        let swapped = replace_partial(&sep, &sol, member).unwrap();
        assert!(verify_solution(&inst, &swapped), "{inst:?} {sep:?} {sol:?} {member:?} {swapped:?}");
        swaps += 1;
    }
    assert!(swaps > 150, "{swaps}");
}

#[test]
fn size_bound_holds_per_type() {
    let mut rng = common::rng(23);
    for _ in 0..100 {
        let inst = common::random_instance(&mut rng, 10, 1);
        let Some(sep) = component_separation(&mut rng, &inst) else {
            continue;
        };
        assert!(sep.is_valid_in(inst.graph(), None));
        let Ok(PartialRepOutcome::Set(rep)) = representative_partial_solutions(&inst, &sep, 1, 1, 1_000_000) else {
            continue;
        };
        for ty in enumerate_types(&sep.separator().into_iter().collect::<Vec<_>>(), 1) {
            let count = rep.iter().filter(|(t, _, _)| *t == ty).count() as u128;
            assert!(count <= rep_vector_bound(ty.join.len(), 10));
        }
    }
}
