//! Cross-module scenarios: builders feeding checkers, booster iteration,
//! trace-and-verify round trips.

use adfam::checkers::{
    almost_disjoint_check, hidden_reduce, linkage_check, luzin_witness_check, tree_family_verify,
    tuple_system_boost,
};
use adfam::constructions::{
    build_luzin_basic, build_staged_family, hajnal_member, max_box_count, Enumeration,
    StagedFamilyConfig,
};
use adfam::encode::{binomial, BitStr};
use adfam::family::{FamilySnapshot, Member, MemberKind, SubsetAssignment};
use adfam::TreeOrder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn seeded_strings(n: usize, depth: u32, seed: u64) -> Vec<BitStr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: BTreeSet<BitStr> = BTreeSet::new();
    while out.len() < n {
        out.insert(BitStr::new(depth, rng.gen::<u64>() & ((1 << depth) - 1)));
    }
    out.into_iter().collect()
}

/// A family that passes the enumeration-witness check on the empty box at
/// budget L meets itself across every bipartition into parts of size at
/// least L + 2.
#[test]
fn witness_budget_forces_bipartition_meets() {
    let (fam, _) = build_luzin_basic(12, 3, 160).unwrap();
    let boxes = [0u64];
    let budget = max_box_count(&fam, &boxes);
    assert!(luzin_witness_check(&fam, &boxes, budget).unwrap().passed());
    let min_part = (budget + 2) as usize;
    let sets = fam.point_sets();
    let n = sets.len();
    let mut bipartitions = 0u64;
    for mask in (1u64..(1 << n) - 1).filter(|m| m & 1 == 1) {
        let left: Vec<usize> = (0..n).filter(|&b| mask & (1 << b) != 0).collect();
        if left.len() < min_part || n - left.len() < min_part {
            continue;
        }
        let mut left_union = BTreeSet::new();
        let mut right_union = BTreeSet::new();
        for (b, (_, s)) in sets.iter().enumerate() {
            if mask & (1 << b) != 0 {
                left_union.extend(s.iter().copied());
            } else {
                right_union.extend(s.iter().copied());
            }
        }
        bipartitions += 1;
        assert!(
            !left_union.is_disjoint(&right_union),
            "split {mask:#b} separates the family"
        );
    }
    assert!(bipartitions > 1000, "checked {bipartitions} bipartitions");
}

/// Booster iteration over a disjoint tuple system: after one pass through
/// every coordinate pair, all cross pairs share points above the floor.
#[test]
fn tuple_boost_links_all_cross_pairs() {
    let (fam, _) = build_luzin_basic(36, 2, 240).unwrap();
    let fam = fam.as_set_family();
    let tuples: Vec<Vec<u64>> = (0..10)
        .map(|t| (0..3).map(|i| 6 + 3 * t + i).collect())
        .collect();
    let keep = 3;
    let result = tuple_system_boost(&fam, &tuples, 0, keep).unwrap();
    assert_eq!(result.stage_points.len(), 9);
    assert!(result.stage_points.windows(2).all(|w| w[0] < w[1]));
    assert!(!result.left_tuples.is_empty() && !result.right_tuples.is_empty());
    // the conclusion, checked exhaustively over all cross pairs
    for &s in &result.left_tuples {
        for &t in &result.right_tuples {
            for &alpha in &tuples[s] {
                for &beta in &tuples[t] {
                    let a = fam.get(alpha).unwrap().point_set();
                    let b = fam.get(beta).unwrap().point_set();
                    let meet: BTreeSet<u64> = a.intersection(&b).copied().collect();
                    assert!(
                        meet.iter().any(|&p| p > 0),
                        "members {alpha} and {beta} lost their link"
                    );
                }
            }
        }
    }
}

/// A family that interleaves tree branches on even points with a
/// witness-style family on odd points is recovered by tracing through the
/// evens.
#[test]
fn trace_through_evens_recovers_the_tree_half() {
    let tree = TreeOrder::binary(2);
    let branches = tree.branches();
    // relabel tree nodes into even numbers
    let relabel = |n: u64| 2 * n;
    let even_tree = {
        let map: std::collections::BTreeMap<u64, u64> =
            tree.nodes().into_iter().map(|n| (n, relabel(n))).collect();
        tree.relabel(&map).unwrap()
    };
    let (luzin, _) = build_luzin_basic(4, 2, 60).unwrap();
    let odd_sets: Vec<BTreeSet<u64>> = luzin
        .point_sets()
        .into_iter()
        .map(|(_, s)| s.into_iter().map(|p| 2 * p + 1).collect())
        .collect();
    let mut combined = FamilySnapshot::new(MemberKind::Sets, 1 << 40);
    for (i, branch) in branches.iter().enumerate() {
        let mut member: BTreeSet<u64> = branch.iter().map(|&n| relabel(n)).collect();
        member.extend(odd_sets[i].iter().copied());
        combined.push(i as u64, Member::Set(member)).unwrap();
    }
    let evens: BTreeSet<u64> = even_tree.nodes();
    let reduced = hidden_reduce(&combined, &evens, 1);
    assert_eq!(reduced.len(), 4);
    let report = tree_family_verify(&reduced, &even_tree, 0).unwrap();
    assert!(report.passed());
    // tracing through nothing drops everything
    assert!(hidden_reduce(&combined, &BTreeSet::new(), 1).is_empty());
}

/// Level-set members from seeded strings satisfy the linkage bounds
/// computed from their splitting levels.
#[test]
fn linkage_bounds_follow_from_splitting_levels() {
    let depth = 12u32;
    let strings = seeded_strings(8, depth, 11);
    let members: Vec<BTreeSet<u64>> = strings
        .iter()
        .map(|f| hajnal_member(2, f, depth).unwrap())
        .collect();
    let max_split = strings
        .iter()
        .enumerate()
        .flat_map(|(i, f)| strings[i + 1..].iter().map(move |g| f.split_level(g)))
        .max()
        .unwrap();
    assert!(max_split < depth);
    let t_inf = (depth - max_split) as u64;
    let t_fin: u64 = (1..=max_split).map(|j| binomial(1 << j, 2)).sum();
    let report = linkage_check(&members, 2, t_inf, t_fin).unwrap();
    assert!(report.passed(), "{report:?}");

    // the exact pairwise size from the membership formula
    for (i, f) in strings.iter().enumerate() {
        for (j, g) in strings.iter().enumerate().skip(i + 1) {
            let split = f.split_level(g);
            let expect: u64 =
                (1..=split as u64).map(|n| (1u64 << n) - 1).sum::<u64>() + (depth - split) as u64;
            let meet = members[i].intersection(&members[j]).count() as u64;
            assert_eq!(meet, expect, "pair ({i}, {j}) splits at {split}");
        }
    }
}

/// A family on a huge code universe exceeds any desk-scale node budget:
/// the tree search reports the budget, not a guess.
#[test]
fn linked_luzin_family_overflows_the_tree_search_budget() {
    use adfam::constructions::{build_linked_luzin, LinkedLuzinConfig};
    let strings = seeded_strings(6, 10, 3);
    let cfg = LinkedLuzinConfig {
        depth: 10,
        value_horizon: 1000,
        pair_meet: 1,
        shuffle_seed: None,
    };
    let (family, _) = build_linked_luzin(&strings, &cfg).unwrap();
    match adfam::checkers::tree_family_search(&family, 12, 0) {
        Err(adfam::Error::NodeLimitExceeded { nodes, limit: 12 }) => {
            assert!(nodes > 1000);
        }
        other => panic!("expected a node-limit report, got {other:?}"),
    }
}

/// The recursive builder's report survives independent recomputation.
#[test]
fn staged_family_report_is_recomputable() {
    let mut assign = SubsetAssignment::new();
    assign.insert(2, [0, 1].into()).unwrap();
    assign.insert(4, [2, 3].into()).unwrap();
    let cfg = StagedFamilyConfig {
        count: 6,
        stages: 6,
        tau: 2,
        col_horizon: 300,
        enumeration: Enumeration::Increasing,
    };
    let out = build_staged_family(&cfg, &assign).unwrap();
    assert!(almost_disjoint_check(&out.family, out.report.ad_bound).passed());
    // meets recomputed from scratch match the report
    for m in &out.report.meets {
        let set = assign.get(m.beta).unwrap();
        let union = out.family.union_points(set).unwrap();
        let alpha_points = out.family.get(m.alpha).unwrap().point_set();
        let recount = union.intersection(&alpha_points).count() as u64;
        assert_eq!(recount, m.count, "meet ({}, {})", m.beta, m.alpha);
        // threshold from the stage budget: one designated point per stage
        // past the subfamily's slot
        let slot = m.beta as usize;
        assert!(
            m.count >= (cfg.stages - slot.min(cfg.stages)) as u64,
            "meet {m:?}"
        );
    }
    // every box witness carries at least one confined subfamily member
    for b in &out.report.boxes {
        assert!(b.count >= 1, "box {b:?}");
        let set = assign.get(b.beta).unwrap();
        let f = out.family.get(b.alpha).unwrap().as_fn().unwrap().clone();
        let confined = set
            .iter()
            .filter(|&&g| {
                out.family
                    .get(g)
                    .unwrap()
                    .as_fn()
                    .unwrap()
                    .agreement(&f)
                    .iter()
                    .all(|&(c, v)| c < b.box_bound && v < b.box_bound)
            })
            .count() as u64;
        assert!(confined >= b.count, "box {b:?} recount {confined}");
    }
}
