//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with its runtime. Every tolerance is pinned in code. Run with
//! `cargo test -p adfam-cli --test acceptance -- --nocapture` to see the
//! lines.

use adfam::checkers::{
    accumulation_split, almost_disjoint_check, k_near_luzin_check, linkage_check,
    luzin_witness_check,
};
use adfam::constructions::{
    build_linked_luzin, build_registry_family, build_staged_family, code_horizon,
    coherent_relations_hold, coherent_sequence, hajnal_member, max_box_count, prefix_class_parts,
    Enumeration, ExtendInstance, ExtendOptions, LinkedLuzinConfig, StagedFamilyConfig,
};
use adfam::encode::{binomial, BitStr};
use adfam::family::SubsetAssignment;
use adfam::forcing::{
    chain_order_sane, frozen_meets_hold, rs_run, tail_of_branch_check, HiddenTreePoset, LuzinPoset,
    PkPoset, Poset, Schedule,
};
use adfam::partial_fn::PartialFn;
use adfam::plane::PlaneSet;
use adfam::TreeOrder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

/// Run one criterion body, print its pass/fail line, enforce its time
/// budget, and re-panic on failure so the test suite reports it.
fn criterion(name: &str, limit: Duration, body: impl FnOnce() + std::panic::UnwindSafe) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(body);
    let elapsed = start.elapsed();
    let verdict = if outcome.is_ok() && elapsed <= limit {
        "PASS"
    } else {
        "FAIL"
    };
    println!("ACCEPTANCE criterion {name}: {verdict} ({elapsed:?} of {limit:?})");
    if let Err(e) = outcome {
        std::panic::resume_unwind(e);
    }
    assert!(
        elapsed <= limit,
        "criterion {name} exceeded its time budget: {elapsed:?} > {limit:?}"
    );
}

fn seeded_strings(n: usize, len: u32, seed: u64) -> Vec<BitStr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: BTreeSet<BitStr> = BTreeSet::new();
    while out.len() < n {
        out.insert(BitStr::new(len, rng.gen::<u64>() & ((1 << len) - 1)));
    }
    out.into_iter().collect()
}

/// Criterion 1: level-set family exactness at k = 2, 16 random strings,
/// depth 12 — linkage bounds from the splitting levels, and a certified
/// three-class split.
#[test]
fn c1_linked_family_exactness() {
    criterion(
        "1 (k-linked family exactness)",
        Duration::from_secs(10),
        || {
            let depth = 12u32;
            let strings = seeded_strings(16, depth, 0xC1);
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
            assert!(report.passed(), "linkage: {report:?}");

            let with_strings: Vec<(BitStr, BTreeSet<u64>)> = strings
                .iter()
                .copied()
                .zip(members.iter().cloned())
                .collect();
            let split = accumulation_split(&with_strings, 2).unwrap();
            assert_eq!(split.classes.len(), 3);
            let expect_bound: u64 = (0..split.level)
                .filter(|&j| (1u64 << j) >= 2)
                .map(|j| binomial(1 << j, 2))
                .sum();
            assert_eq!(split.bound, expect_bound);
            assert!(split.meet.len() as u64 <= split.bound);
            // the certified bound re-verified from scratch
            let mut meet: Option<BTreeSet<u64>> = None;
            for class in &split.classes {
                let mut union = BTreeSet::new();
                for &i in class {
                    union.extend(members[i].iter().copied());
                }
                meet = Some(match meet {
                    None => union,
                    Some(m) => m.intersection(&union).copied().collect(),
                });
            }
            assert_eq!(meet.unwrap(), split.meet);
        },
    );
}

/// Criterion 2: the staged extension engine on 20 random instances, with
/// the designated-point, confinement, and box properties read verbatim
/// off the function and its trace.
#[test]
fn c2_extension_engine_properties() {
    criterion(
        "2 (staged extension engine)",
        Duration::from_secs(30),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
            for instance in 0..20 {
                let count = rng.gen_range(10..=15usize);
                let stages = rng.gen_range(3..=5usize);
                let horizon = 200u64;
                let salt = rng.gen_range(0..7u64);
                // pairwise almost disjoint background: distinct affine tails
                let members: Vec<PartialFn> = (0..count)
                    .map(|i| {
                        let i = i as u64;
                        PartialFn::total(horizon, move |x| {
                            if x < salt % 3 {
                                x
                            } else {
                                (count as u64 + 2) * x + i
                            }
                        })
                    })
                    .collect();
                // nested subfamilies, largest first
                let mut order: Vec<usize> = (0..count).collect();
                for i in (1..order.len()).rev() {
                    order.swap(i, rng.gen_range(0..=i));
                }
                let subfams: Vec<Vec<usize>> = (0..stages)
                    .map(|n| {
                        let size = count - n.min(count.saturating_sub(stages + 2));
                        order[..size].to_vec()
                    })
                    .collect();
                let fats: Vec<PlaneSet> = (0..stages)
                    .map(|n| {
                        let width = (stages + 2 + n) as u64;
                        PlaneSet::from_points(
                            horizon,
                            (0..horizon).flat_map(move |c| (0..width).map(move |v| (c, v))),
                        )
                        .unwrap()
                    })
                    .collect();
                let inst = ExtendInstance {
                    members: &members,
                    subfams: &subfams,
                    fats: &fats,
                    stages,
                    tau: 2,
                    col_horizon: horizon,
                };
                let (f, trace) =
                    adfam::constructions::staged_extend(&inst, &ExtendOptions::default(), None)
                        .unwrap_or_else(|e| panic!("instance {instance}: {e}"));
                let marks = trace.marks();
                let j = stages as u64;

                // designated-point property: the function meets each fat set
                // at least J - n times
                for (n, fat) in fats.iter().enumerate() {
                    let hits = f.points().filter(|&(c, v)| fat.contains(c, v)).count() as u64;
                    assert!(
                        hits >= j - n as u64,
                        "instance {instance}: slot {n} hits {hits}"
                    );
                }
                // confinement: a used-up member's agreements stop at its entry
                // stage mark
                let last_used = &trace.stages.last().unwrap().used;
                for &p in last_used {
                    let entry = trace.entry_stage(p).unwrap();
                    let bound = marks[entry];
                    for (c, _) in f.agreement(&members[p]) {
                        assert!(
                        c <= bound,
                        "instance {instance}: member {p} agrees at {c} past its entry mark {bound}"
                    );
                    }
                }
                // box property: at least J - n subfamily members confined to
                // the stage-n box
                for (n, subfam) in subfams.iter().enumerate() {
                    let mark = marks[n];
                    let image: BTreeSet<u64> = (0..mark).filter_map(|i| f.get(i)).collect();
                    let confined = subfam
                        .iter()
                        .filter(|&&p| {
                            f.agreement(&members[p])
                                .iter()
                                .all(|&(c, v)| c < mark && image.contains(&v))
                        })
                        .count() as u64;
                    assert!(
                        confined >= j - n as u64,
                        "instance {instance}: slot {n} confined {confined}"
                    );
                }
            }
        },
    );
}

/// Criterion 3: both recursive builders at six members — almost disjoint
/// at the reported bound, designated meets at the stage thresholds, box
/// witnesses for every assigned pair, and a registry that re-verifies
/// from scratch.
#[test]
fn c3_recursive_builders() {
    criterion("3 (recursive builders)", Duration::from_secs(60), || {
        let cfg = StagedFamilyConfig {
            count: 6,
            stages: 8,
            tau: 2,
            col_horizon: 400,
            enumeration: Enumeration::Increasing,
        };
        let mut a07 = SubsetAssignment::new();
        a07.insert(2, [0, 1].into()).unwrap();
        a07.insert(3, [0, 1, 2].into()).unwrap();
        a07.insert(5, [1, 3, 4].into()).unwrap();
        let out = build_staged_family(&cfg, &a07).unwrap();
        assert!(almost_disjoint_check(&out.family, out.report.ad_bound).passed());
        assert!(!out.report.meets.is_empty());
        for m in &out.report.meets {
            assert!(
                m.count >= cfg.stages as u64 - m.beta,
                "meet threshold: {m:?}"
            );
            // the meet re-verified through the k-wise checker
            let parts = vec![a07.get(m.beta).unwrap().clone(), [m.alpha].into()];
            let r = k_near_luzin_check(&out.family, &parts, m.count).unwrap();
            assert!(r.passed(), "k-near recount for {m:?}");
        }
        for b in &out.report.boxes {
            assert!(b.count >= 1, "box witness: {b:?}");
        }

        let mut a32 = SubsetAssignment::new();
        a32.insert(2, [0, 1].into()).unwrap();
        a32.insert(5, [3, 4].into()).unwrap();
        let (out, registry) = build_registry_family(&cfg, &a32, 2).unwrap();
        assert!(almost_disjoint_check(&out.family, out.report.ad_bound).passed());
        for m in &out.report.meets {
            assert!(m.count >= cfg.stages as u64 - 2, "meet threshold: {m:?}");
        }
        for b in &out.report.boxes {
            assert!(b.count >= 1, "box witness: {b:?}");
        }
        assert!(!out.report.tuple_meets.is_empty());
        for t in &out.report.tuple_meets {
            assert!(t.count >= cfg.stages as u64 - 2, "tuple meet: {t:?}");
        }
        // every tracked set stays fat at its recorded budgets
        registry.reverify().unwrap();
        assert!(registry.len() >= 3);
    });
}

fn criterion4_family() -> (
    Vec<BitStr>,
    adfam::FamilySnapshot,
    adfam::constructions::LinkedLuzinLog,
) {
    let depth = 12u32;
    let strings = seeded_strings(10, depth, 0xC4);
    let cfg = LinkedLuzinConfig {
        depth,
        value_horizon: 1000,
        pair_meet: 2,
        shuffle_seed: None,
    };
    let (family, log) = build_linked_luzin(&strings, &cfg).unwrap();
    (strings, family, log)
}

/// Criterion 4: the Luzin family over linked domains passes the
/// enumeration-witness check at the builder-reported budget and fails the
/// three-wise meet check over its prefix classes.
#[test]
fn c4_linked_luzin_family() {
    criterion(
        "4 (Luzin family over linked domains)",
        Duration::from_secs(30),
        || {
            let (strings, family, log) = criterion4_family();
            assert_eq!(family.len(), 10);
            assert!(almost_disjoint_check(&family, log.pair_meet).passed());
            let boxes = [0u64, 1, 2, 3, 4, 5];
            let reported = max_box_count(&family, &boxes);
            assert_eq!(reported, 0, "designated points sit deep, no box fits");
            assert!(luzin_witness_check(&family, &boxes, reported)
                .unwrap()
                .passed());

            let parts = prefix_class_parts(&strings, 3).unwrap();
            let threshold = (log.depth / 2) as u64;
            let r = k_near_luzin_check(&family, &parts, threshold).unwrap();
            assert!(!r.passed(), "three-wise meet must stay under {threshold}");
            assert_eq!(r.budgets["size"], 0, "no point lies on three graphs");
        },
    );
}

/// Criterion 5: the criterion-4 family meets itself across every
/// bipartition, exhaustively over all splits of the ten members.
#[test]
fn c5_bipartition_meets() {
    criterion("5 (bipartition meets)", Duration::from_secs(30), || {
        let (_, family, _) = criterion4_family();
        let sets = family.point_sets();
        let n = sets.len();
        assert_eq!(n, 10);
        // two unions meet exactly when some cross pair meets, so the
        // exhaustive split scan runs over the pairwise meet matrix
        let meets: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| !sets[i].1.is_disjoint(&sets[j].1)).collect())
            .collect();
        let mut splits = 0u64;
        for mask in (1u64..(1 << n) - 1).filter(|m| m & 1 == 1) {
            let linked = (0..n).any(|i| {
                mask & (1 << i) != 0 && (0..n).any(|j| mask & (1 << j) == 0 && meets[i][j])
            });
            splits += 1;
            assert!(linked, "split {mask:#b} has disjoint unions");
        }
        assert_eq!(splits, (1 << (n - 1)) - 1);
    });
}

/// Criterion 6: the tree-growing poset covers a ten-member family and its
/// extraction passes the branch-tail check; the index poset satisfies the
/// top-extension law universally at this scale and the compatibility
/// biconditional on 100 generated instances.
#[test]
fn c6_forcing_engine() {
    criterion("6 (forcing engine)", Duration::from_secs(30), || {
        // ten pairwise disjoint blocks: an almost disjoint set family
        let mut fam = adfam::FamilySnapshot::new(adfam::MemberKind::Sets, 200);
        for i in 0..10u64 {
            fam.push(i, adfam::Member::Set((0..8).map(|j| 20 * i + j).collect()))
                .unwrap();
        }
        let poset = HiddenTreePoset::new(&fam);
        let mut rules = Vec::new();
        for i in 0..10 {
            rules.push(poset.cover_rule(i));
        }
        for i in 0..10 {
            for n in 0..5 {
                rules.push(poset.reach_rule(i, n));
            }
        }
        let chain = rs_run(
            &poset,
            &rules,
            poset.root(),
            Schedule::RoundRobin { rounds: 1 },
        )
        .unwrap_or_else(|e| panic!("rule {} exhausted: {}", e.rule, e.source));
        assert!(chain_order_sane(&poset, &chain));
        let last = chain.last();
        tail_of_branch_check(&fam, &last.tree, &last.floors).unwrap();
        for i in 0..10 {
            assert!(last.members.contains(&i));
        }

        // index poset laws over the diagonal family
        let (luzin, _) = adfam::constructions::build_luzin_basic(12, 4, 120).unwrap();
        let sets = luzin.as_set_family();
        let index_poset = LuzinPoset::new(&sets);
        // top-extension law: exhaustive over all conditions of size <= 3
        let indices: Vec<u64> = sets.indices();
        let mut conditions: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
        for size in 1..=3usize {
            combinations_into(&indices, size, &mut conditions);
        }
        let mut law_checks = 0u64;
        for p in &conditions {
            let sup = p.iter().next_back().copied().unwrap_or(0);
            let lo = if p.is_empty() { 0 } else { sup + 1 };
            for beta in lo..12 {
                let mut q = p.clone();
                q.insert(beta);
                assert!(
                    index_poset.leq(&q, p),
                    "top extension failed: {p:?} + {beta}"
                );
                law_checks += 1;
            }
        }
        assert!(law_checks > 500);

        // compatibility biconditional on 100 hypothesis-satisfying
        // instances: disjoint r, s, t with r wholly below s union t and
        // equal ceilings; both sides brute-forced. The family mixes the
        // diagonal part (rich meets) with a disjoint tail, so both truth
        // values occur.
        let mut mixed = adfam::FamilySnapshot::new(adfam::MemberKind::Sets, u64::MAX);
        for (i, m) in sets.members.iter().take(8) {
            mixed.push(*i, m.clone()).unwrap();
        }
        for i in 8..12u64 {
            let base = 1_000_000 + 100 * i;
            mixed
                .push(i, adfam::Member::Set((base..base + 10).collect()))
                .unwrap();
        }
        let index_poset = LuzinPoset::new(&mixed);
        let mut instances = 0;
        let mut truths = 0;
        let mut falsehoods = 0;
        let r_pool: Vec<u64> = (0..6).collect();
        let st_pool: Vec<u64> = (6..12).collect();
        'outer: for i in 0..r_pool.len() {
            for k in i + 1..r_pool.len() {
                let r: BTreeSet<u64> = [r_pool[i], r_pool[k]].into();
                for &s0 in &st_pool {
                    for &t0 in &st_pool {
                        if s0 == t0 {
                            continue;
                        }
                        let p: BTreeSet<u64> = r.iter().copied().chain([s0]).collect();
                        let q: BTreeSet<u64> = r.iter().copied().chain([t0]).collect();
                        let ceiling = index_poset.ceiling(&p);
                        if ceiling != index_poset.ceiling(&q) {
                            continue;
                        }
                        let lhs = index_poset.compatible(&p, &q);
                        // the cross condition, brute-forced
                        let a = mixed.get(s0).unwrap().point_set();
                        let b = mixed.get(t0).unwrap().point_set();
                        let rhs = a.intersection(&b).any(|&x| x >= ceiling);
                        assert_eq!(lhs, rhs, "biconditional broke at r={r:?}, s={s0}, t={t0}");
                        if lhs {
                            truths += 1;
                        } else {
                            falsehoods += 1;
                        }
                        instances += 1;
                        if instances >= 100 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert_eq!(instances, 100);
        assert!(
            truths > 0 && falsehoods > 0,
            "{truths} true, {falsehoods} false"
        );
    });
}

fn combinations_into(pool: &[u64], size: usize, out: &mut Vec<BTreeSet<u64>>) {
    fn rec(
        pool: &[u64],
        size: usize,
        start: usize,
        cur: &mut Vec<u64>,
        out: &mut Vec<BTreeSet<u64>>,
    ) {
        if cur.len() == size {
            out.push(cur.iter().copied().collect());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(pool, size, 0, &mut Vec::new(), out);
}

/// Criterion 7: the linked-domain function poset at k = 2, six members,
/// ten witness rounds — frozen pairwise meets, almost disjoint extraction,
/// and the ten-point two-wise meet.
#[test]
fn c7_pk_poset() {
    criterion(
        "7 (linked-domain function poset)",
        Duration::from_secs(10),
        || {
            let depth = 12u32;
            let strings = seeded_strings(6, depth, 0xC7);
            let domains: Vec<BTreeSet<u64>> = strings
                .iter()
                .map(|f| hajnal_member(2, f, depth).unwrap())
                .collect();
            let poset = PkPoset::new(domains, code_horizon(2, depth));
            let parts = vec![vec![0usize, 1, 2], vec![3, 4, 5]];
            let mut rules = Vec::new();
            for r in (1..=10).rev() {
                rules.push(poset.witness_rule(parts.clone(), r));
            }
            for e in 0..6 {
                rules.push(poset.domain_rule(e, 6));
            }
            let chain = rs_run(
                &poset,
                &rules,
                poset.root(),
                Schedule::RoundRobin { rounds: 1 },
            )
            .unwrap_or_else(|e| panic!("rule {} exhausted: {}", e.rule, e.source));
            frozen_meets_hold(&chain).unwrap();
            assert!(chain_order_sane(&poset, &chain));
            let fam = poset.extract(&chain).unwrap();
            assert_eq!(fam.len(), 6);
            // pairwise meets froze at no more than the witnessed ten points
            assert!(almost_disjoint_check(&fam, 10).passed());
            let index_parts: Vec<BTreeSet<u64>> = vec![[0, 1, 2].into(), [3, 4, 5].into()];
            let r = k_near_luzin_check(&fam, &index_parts, 10).unwrap();
            assert!(r.passed(), "two-wise meet under 10: {r:?}");
        },
    );
}

/// Criterion 8: coherent sequence on the depth-4 binary tree at horizon
/// 64 — the comparability dichotomy with zero exceptions, all pairs.
#[test]
fn c8_coherent_sequence() {
    criterion("8 (coherent sequence)", Duration::from_secs(1), || {
        let tree = TreeOrder::binary(4);
        let sets = coherent_sequence(&tree, 64).unwrap();
        assert_eq!(sets.len(), 31);
        coherent_relations_hold(&tree, &sets).unwrap();
        for node in tree.nodes() {
            assert!(!sets[&node].is_empty());
        }
    });
}

/// Criterion 9: byte-identical artifacts on re-runs with the same seed,
/// for every command family the suite exercises.
#[test]
fn c9_determinism() {
    criterion("9 (determinism)", Duration::from_secs(120), || {
        let bin = env!("CARGO_BIN_EXE_adfam");
        let base = std::env::temp_dir().join("adfam-acceptance-determinism");
        let _ = std::fs::remove_dir_all(&base);
        let commands: Vec<Vec<String>> = vec![
            vec![
                "construct",
                "hajnal",
                "--k",
                "2",
                "--strings",
                "16",
                "--depth",
                "12",
                "--seed",
                "7",
            ],
            vec![
                "construct",
                "thm59",
                "--strings",
                "10",
                "--depth",
                "12",
                "--seed",
                "7",
            ],
            vec![
                "construct",
                "luzin-basic",
                "--count",
                "12",
                "--meet-budget",
                "4",
                "--horizon",
                "120",
            ],
            vec![
                "construct",
                "thm07",
                "--count",
                "6",
                "--stages",
                "8",
                "--horizon",
                "400",
            ],
            vec![
                "construct",
                "thm32",
                "--count",
                "6",
                "--stages",
                "8",
                "--horizon",
                "400",
                "--tuple-depth",
                "2",
            ],
            vec![
                "construct",
                "coherent",
                "--tree-depth",
                "4",
                "--horizon",
                "64",
            ],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();

        for dir_name in ["first", "second"] {
            let dir = base.join(dir_name);
            std::fs::create_dir_all(&dir).unwrap();
            for (i, cmd) in commands.iter().enumerate() {
                let out = dir.join(format!("{i}.out.json"));
                let log = dir.join(format!("{i}.log.json"));
                let status = std::process::Command::new(bin)
                    .args(cmd)
                    .arg("--out")
                    .arg(&out)
                    .arg("--log")
                    .arg(&log)
                    .status()
                    .unwrap();
                assert!(status.success(), "command {cmd:?} failed");
            }
            // a check and a forcing run over the first artifact
            let status = std::process::Command::new(bin)
                .args([
                    "check", "linkage", "--k", "2", "--t-inf", "1", "--t-fin", "200",
                ])
                .arg("--family")
                .arg(dir.join("0.out.json"))
                .arg("--out")
                .arg(dir.join("linkage.json"))
                .status()
                .unwrap();
            assert!(status.success());
            let status = std::process::Command::new(bin)
                .args(["force", "hiddentree", "--max-n", "3"])
                .arg("--family")
                .arg(dir.join("0.out.json"))
                .arg("--chain-out")
                .arg(dir.join("chain.json"))
                .arg("--extract-out")
                .arg(dir.join("extract.json"))
                .status()
                .unwrap();
            assert!(status.success());
        }

        let first = base.join("first");
        let second = base.join("second");
        let mut compared = 0;
        for entry in std::fs::read_dir(&first).unwrap() {
            let name = entry.unwrap().file_name();
            let a = std::fs::read(first.join(&name)).unwrap();
            let b = std::fs::read(second.join(&name)).unwrap();
            assert_eq!(a, b, "artifact {name:?} differs between runs");
            compared += 1;
        }
        assert!(compared >= 15, "compared only {compared} artifacts");
    });
}
