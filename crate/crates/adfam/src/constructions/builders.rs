//! Recursive family builders on top of the staged extension engine.
//!
//! Each new member is produced by one engine run against all earlier
//! members, with subfamilies and fat sets derived from a subset
//! assignment. The registry variant additionally maintains fat meet sets
//! across assigned tuples and replays the restriction cascade after every
//! member.

use crate::constructions::registry::{FatEntry, FatRegistry};
use crate::constructions::stage::{staged_extend, ExtendInstance, ExtendOptions, StageTrace};
use crate::error::Error;
use crate::family::{FamilySnapshot, Member, MemberKind, SubsetAssignment};
use crate::partial_fn::PartialFn;
use crate::plane::PlaneSet;
use crate::Result;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// How a member's predecessors are enumerated across stage slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Enumeration {
    Increasing,
    Shuffled(u64),
}

#[derive(Clone, Debug)]
pub struct StagedFamilyConfig {
    pub count: u64,
    pub stages: usize,
    pub tau: u64,
    pub col_horizon: u64,
    pub enumeration: Enumeration,
}

/// Achieved meet count between a member and an assigned union.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeetRecord {
    pub beta: u64,
    pub alpha: u64,
    pub count: u64,
}

/// Achieved box witness: how many subfamily members confine their whole
/// agreement with the member to an `m x m` box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub beta: u64,
    pub alpha: u64,
    pub box_bound: u64,
    pub count: u64,
}

/// Achieved meet count between a member and a tracked tuple meet set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleMeetRecord {
    pub tuple: Vec<u64>,
    pub alpha: u64,
    pub count: u64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BuildReport {
    /// Largest pairwise agreement size over the finished family.
    pub ad_bound: u64,
    pub meets: Vec<MeetRecord>,
    pub boxes: Vec<BoxRecord>,
    pub tuple_meets: Vec<TupleMeetRecord>,
}

#[derive(Clone, Debug)]
pub struct StagedFamilyOutput {
    pub family: FamilySnapshot,
    pub traces: Vec<StageTrace>,
    pub report: BuildReport,
}

fn enumeration_of(alpha: u64, how: Enumeration) -> Vec<u64> {
    let mut order: Vec<u64> = (0..alpha).collect();
    if let Enumeration::Shuffled(seed) = how {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(alpha));
        order.shuffle(&mut rng);
    }
    order
}

fn union_plane(members: &[PartialFn], picks: &BTreeSet<u64>, horizon: u64) -> PlaneSet {
    let mut plane = PlaneSet::new(horizon);
    for &p in picks {
        for (c, v) in members[p as usize].points() {
            plane.insert(c, v).expect("members live under the horizon");
        }
    }
    plane
}

fn builder_options(
    alpha: u64,
    assign: &SubsetAssignment,
    total_to: u64,
    designated: &BTreeSet<(u64, u64)>,
) -> ExtendOptions {
    // gap fills dodge the whole background and designated points never
    // repeat, so almost disjointness needs no enrollment here; an empty
    // enrollment order keeps every subfamily's avoider pool alive. One
    // member inside every assigned set starts out protected; the choice
    // rotates with the run so designated points spread over the whole
    // subfamily, and sets already hit by the protection set are left
    // alone so no set ends up fully protected
    let mut pre_protected: BTreeSet<usize> = BTreeSet::new();
    let mut built_sets: Vec<Vec<u64>> = assign
        .assign
        .values()
        .map(|s| s.iter().copied().filter(|&g| g < alpha).collect())
        .collect();
    // small sets first: their protection choices are the most constrained
    built_sets.sort_by_key(|s| (s.len(), s.clone()));
    for members in &built_sets {
        if members.is_empty()
            || members
                .iter()
                .any(|&g| pre_protected.contains(&(g as usize)))
        {
            continue;
        }
        // rotated candidates; skip any that would swallow another set whole
        let start = alpha as usize % members.len();
        let chosen = (0..members.len())
            .map(|off| members[(start + off) % members.len()] as usize)
            .find(|&cand| {
                built_sets.iter().all(|other| {
                    other.is_empty()
                        || other
                            .iter()
                            .any(|&g| g as usize != cand && !pre_protected.contains(&(g as usize)))
                })
            })
            .unwrap_or(members[start] as usize);
        pre_protected.insert(chosen);
    }
    ExtendOptions {
        exclude_used_picks: false,
        strict: false,
        enroll_order: Some(Vec::new()),
        total_to: Some(total_to),
        fill_avoids_all: true,
        avoid_points: designated.clone(),
        pre_protected: pre_protected.into_iter().collect(),
    }
}

fn record_picks(trace: &StageTrace, designated: &mut BTreeSet<(u64, u64)>) {
    for rec in &trace.stages {
        designated.extend(rec.picks.iter().flatten().copied());
    }
}

/// Build a family of `count` functions where every member meets each
/// assigned union often and confines its agreements with many subfamily
/// members to small boxes.
pub fn build_staged_family(
    cfg: &StagedFamilyConfig,
    assign: &SubsetAssignment,
) -> Result<StagedFamilyOutput> {
    let mut members: Vec<PartialFn> = Vec::new();
    let mut traces: Vec<StageTrace> = Vec::new();
    let mut designated: BTreeSet<(u64, u64)> = BTreeSet::new();
    for alpha in 0..cfg.count {
        let order = enumeration_of(alpha, cfg.enumeration);
        let mut subfams: Vec<Vec<usize>> = Vec::new();
        let mut fats: Vec<PlaneSet> = Vec::new();
        for &beta in &order {
            let set = assign.get(beta).cloned().unwrap_or_default();
            subfams.push(set.iter().map(|&g| g as usize).collect());
            fats.push(union_plane(&members, &set, cfg.col_horizon));
        }
        let inst = ExtendInstance {
            members: &members,
            subfams: &subfams,
            fats: &fats,
            stages: cfg.stages,
            tau: cfg.tau,
            col_horizon: cfg.col_horizon,
        };
        let opts = builder_options(alpha, assign, cfg.col_horizon, &designated);
        let (f, trace) = staged_extend(&inst, &opts, None)?;
        record_picks(&trace, &mut designated);
        members.push(f);
        traces.push(trace);
    }
    let family = snapshot_of(&members, cfg.col_horizon)?;
    let report = build_report(&members, &traces, assign, cfg, &[], &family)?;
    Ok(StagedFamilyOutput {
        family,
        traces,
        report,
    })
}

/// A tracked tuple: assigned indices with the separation property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackedTuple {
    pub betas: Vec<u64>,
}

/// Consecutive separation: one block's indices and its own index all sit
/// strictly below the next block.
fn separated(assign: &SubsetAssignment, a: u64, b: u64) -> bool {
    let (sa, sb) = match (assign.get(a), assign.get(b)) {
        (Some(x), Some(y)) => (x, y),
        _ => return false,
    };
    let sup = sa.iter().copied().max().unwrap_or(0).max(a);
    let inf = sb.iter().copied().min().unwrap_or(0);
    sup < inf
}

/// All separated increasing tuples of assigned indices up to `max_len`.
pub fn tracked_tuples(assign: &SubsetAssignment, max_len: u32) -> Vec<TrackedTuple> {
    let keys: Vec<u64> = assign.assign.keys().copied().collect();
    let mut out: Vec<TrackedTuple> = keys
        .iter()
        .map(|&b| TrackedTuple { betas: vec![b] })
        .collect();
    let mut frontier: Vec<Vec<u64>> = keys.iter().map(|&b| vec![b]).collect();
    for _ in 2..=max_len.max(1) {
        let mut next = Vec::new();
        for tuple in &frontier {
            let last = *tuple.last().expect("tuples are nonempty");
            for &b in keys.iter().filter(|&&b| b > last) {
                if separated(assign, last, b) {
                    let mut grown = tuple.clone();
                    grown.push(b);
                    out.push(TrackedTuple {
                        betas: grown.clone(),
                    });
                    next.push(grown);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Largest column where two subfamily members agree, plus one; the fat
/// scan of their union starts there.
fn agreement_bound(members: &[PartialFn], set: &BTreeSet<u64>) -> u64 {
    let mut bound = 0;
    let picks: Vec<u64> = set.iter().copied().collect();
    for (i, &a) in picks.iter().enumerate() {
        for &b in &picks[i + 1..] {
            for (c, _) in members[a as usize].agreement(&members[b as usize]) {
                bound = bound.max(c + 1);
            }
        }
    }
    bound
}

/// The registry variant: maintains tracked unions and tuple meet sets,
/// replays the restriction cascade after each member, and drives every
/// member through the tracked sets.
pub fn build_registry_family(
    cfg: &StagedFamilyConfig,
    assign: &SubsetAssignment,
    tuple_depth: u32,
) -> Result<(StagedFamilyOutput, FatRegistry)> {
    let tuples = tracked_tuples(assign, tuple_depth);
    let mut members: Vec<PartialFn> = Vec::new();
    let mut traces: Vec<StageTrace> = Vec::new();
    // sets the engine is driven through, aligned with their budgets
    let mut picks_registry = FatRegistry::new();
    // everything ever asserted fat, cascades included
    let mut full_registry = FatRegistry::new();
    let mut registered: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut designated: BTreeSet<(u64, u64)> = BTreeSet::new();

    for alpha in 0..cfg.count {
        // register every tuple whose components are complete
        for tuple in &tuples {
            if registered.contains(&tuple.betas) {
                continue;
            }
            let complete = tuple.betas.iter().all(|&b| {
                assign
                    .get(b)
                    .map(|s| s.iter().all(|&g| g < alpha))
                    .unwrap_or(false)
            });
            if !complete {
                continue;
            }
            let mut meet: Option<PlaneSet> = None;
            let mut width = u64::MAX;
            let mut from = 0u64;
            for &b in &tuple.betas {
                let set = assign.get(b).expect("tuple components are assigned");
                let union = union_plane(&members, set, cfg.col_horizon);
                width = width.min(set.len() as u64);
                from = from.max(agreement_bound(&members, set));
                meet = Some(match meet {
                    None => union,
                    Some(m) => m.intersect_with(&union),
                });
            }
            let set = meet.expect("tuples are nonempty");
            let (width, from) = if tuple.betas.len() == 1 {
                (width, from)
            } else {
                (1, 0)
            };
            let provenance = format!("tuple{:?}", tuple.betas);
            let entry = FatEntry {
                set,
                width,
                from,
                depth: 0,
                provenance: provenance.clone(),
                lineage: vec![provenance],
            };
            full_registry.insert(entry.clone())?;
            picks_registry.insert(entry)?;
            registered.insert(tuple.betas.clone());
        }
        // scarce sets first: meet sets hold few points at small columns,
        // so they must fix their designated points before the floors rise
        picks_registry
            .entries
            .sort_by_key(|e| (e.set.len(), e.provenance.clone()));

        let order = enumeration_of(alpha, cfg.enumeration);
        let subfams: Vec<Vec<usize>> = order
            .iter()
            .map(|&beta| {
                assign
                    .get(beta)
                    .map(|s| s.iter().map(|&g| g as usize).collect())
                    .unwrap_or_default()
            })
            .collect();
        // every run sees the same slot count: registered sets cycle into
        // the remaining slots, so designated columns spread at the same
        // rate for suppliers and consumers of the meet sets
        let slot_count = tuples.len().max(picks_registry.len());
        let fats: Vec<PlaneSet> = if picks_registry.is_empty() {
            Vec::new()
        } else {
            (0..slot_count)
                .map(|k| picks_registry.entries[k % picks_registry.len()].set.clone())
                .collect()
        };
        let inst = ExtendInstance {
            members: &members,
            subfams: &subfams,
            fats: &fats,
            stages: cfg.stages,
            tau: cfg.tau,
            col_horizon: cfg.col_horizon,
        };
        let opts = builder_options(alpha, assign, cfg.col_horizon, &designated);
        let (f, trace) = staged_extend(&inst, &opts, Some(&picks_registry))?;
        record_picks(&trace, &mut designated);

        // restriction cascade: every tracked set the member was driven
        // through shrinks to the member's hit columns and must stay fat
        let snapshot: Vec<FatEntry> = full_registry
            .entries
            .iter()
            .filter(|e| e.depth < tuple_depth)
            .cloned()
            .collect();
        for parent in snapshot {
            let hits: BTreeSet<u64> = parent
                .set
                .columns()
                .into_iter()
                .filter(|&c| f.get(c).is_some_and(|v| parent.set.contains(c, v)))
                .collect();
            if hits.is_empty() {
                continue;
            }
            let restricted = parent.set.pi_restrict(&hits);
            let provenance = format!("{}|hit[{alpha}]", parent.provenance);
            let mut lineage = parent.lineage.clone();
            lineage.push(provenance.clone());
            full_registry.insert(FatEntry {
                set: restricted,
                width: parent.width.saturating_sub(1).max(1),
                from: parent.from,
                depth: parent.depth + 1,
                provenance,
                lineage,
            })?;
        }

        members.push(f);
        traces.push(trace);
    }

    let family = snapshot_of(&members, cfg.col_horizon)?;
    let report = build_report(&members, &traces, assign, cfg, &tuples, &family)?;
    Ok((
        StagedFamilyOutput {
            family,
            traces,
            report,
        },
        full_registry,
    ))
}

fn snapshot_of(members: &[PartialFn], horizon: u64) -> Result<FamilySnapshot> {
    let mut family = FamilySnapshot::new(MemberKind::Functions, horizon);
    for (i, f) in members.iter().enumerate() {
        family.push(i as u64, Member::Fn(f.clone()))?;
    }
    Ok(family)
}

fn build_report(
    members: &[PartialFn],
    traces: &[StageTrace],
    assign: &SubsetAssignment,
    cfg: &StagedFamilyConfig,
    tuples: &[TrackedTuple],
    _family: &FamilySnapshot,
) -> Result<BuildReport> {
    let mut report = BuildReport::default();
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            report.ad_bound = report.ad_bound.max(a.agreement(b).len() as u64);
        }
    }
    for (&beta, set) in &assign.assign {
        let union = union_plane(members, set, cfg.col_horizon);
        for alpha in (beta + 1)..members.len() as u64 {
            let f = &members[alpha as usize];
            let count = f.points().filter(|&(c, v)| union.contains(c, v)).count() as u64;
            report.meets.push(MeetRecord { beta, alpha, count });

            // box witness from the member's trace mark at this slot
            let order = enumeration_of(alpha, cfg.enumeration);
            let slot = order.iter().position(|&b| b == beta);
            let (box_bound, count) = match slot {
                Some(n) if n < traces[alpha as usize].stages.len() => {
                    let mark = traces[alpha as usize].stages[n].mark;
                    let value_cap = (0..mark)
                        .filter_map(|i| f.get(i))
                        .max()
                        .map_or(mark, |v| (v + 1).max(mark));
                    let m = value_cap.max(mark);
                    let count = set
                        .iter()
                        .filter(|&&g| {
                            members[g as usize]
                                .agreement(f)
                                .iter()
                                .all(|&(c, v)| c < mark && v < m)
                        })
                        .count() as u64;
                    (m, count)
                }
                _ => (0, 0),
            };
            report.boxes.push(BoxRecord {
                beta,
                alpha,
                box_bound,
                count,
            });
        }
    }
    for tuple in tuples.iter().filter(|t| t.betas.len() >= 2) {
        let mut meet: Option<PlaneSet> = None;
        for &b in &tuple.betas {
            let set = assign.get(b).ok_or_else(|| {
                Error::invalid("tracked tuple", format!("index {b} is not assigned"))
            })?;
            let union = union_plane(members, set, cfg.col_horizon);
            meet = Some(match meet {
                None => union,
                Some(m) => m.intersect_with(&union),
            });
        }
        let meet = meet.expect("tuples are nonempty");
        let complete_at = tuple
            .betas
            .iter()
            .filter_map(|&b| assign.get(b).and_then(|s| s.iter().max().copied()))
            .max()
            .unwrap_or(0)
            + 1;
        for alpha in complete_at..members.len() as u64 {
            let f = &members[alpha as usize];
            let count = f.points().filter(|&(c, v)| meet.contains(c, v)).count() as u64;
            report.tuple_meets.push(TupleMeetRecord {
                tuple: tuple.betas.clone(),
                alpha,
                count,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::almost_disjoint_check;

    fn small_cfg(count: u64, stages: usize) -> StagedFamilyConfig {
        StagedFamilyConfig {
            count,
            stages,
            tau: 2,
            col_horizon: 400,
            enumeration: Enumeration::Increasing,
        }
    }

    #[test]
    fn single_member_family() {
        let out = build_staged_family(&small_cfg(1, 4), &SubsetAssignment::new()).unwrap();
        assert_eq!(out.family.len(), 1);
        let f = out.family.members[0].1.as_fn().unwrap();
        assert!(f.is_total_below(400));
    }

    #[test]
    fn pair_with_one_assignment_meets_and_stays_ad() {
        let mut assign = SubsetAssignment::new();
        assign.insert(1, [0].into()).unwrap();
        let cfg = small_cfg(2, 6);
        let out = build_staged_family(&cfg, &assign).unwrap();
        let r = almost_disjoint_check(&out.family, out.report.ad_bound);
        assert!(r.passed());
        // the later member meets the assigned union at least J times
        let meet = out
            .report
            .meets
            .iter()
            .find(|m| m.beta == 1 && m.alpha == 1);
        assert!(meet.is_none());
        // assignment key 1 targets members alpha > 1: none here with count 2
        // so instead check via a three-member run
        let cfg = small_cfg(3, 6);
        let out = build_staged_family(&cfg, &assign).unwrap();
        let meet = out
            .report
            .meets
            .iter()
            .find(|m| m.beta == 1 && m.alpha == 2)
            .unwrap();
        assert!(meet.count >= (cfg.stages as u64) - 1);
    }

    #[test]
    fn prefix_assignment_family_is_ad_at_reported_bound() {
        let assign = SubsetAssignment::prefixes(5);
        let cfg = small_cfg(5, 8);
        let out = build_staged_family(&cfg, &assign).unwrap();
        assert!(almost_disjoint_check(&out.family, out.report.ad_bound).passed());
        // reported bound is honest: some pair attains it
        let attained = out.family.members.iter().enumerate().any(|(i, (_, a))| {
            out.family.members[i + 1..]
                .iter()
                .any(|(_, b)| crate::family::intersect(a, b).len() as u64 == out.report.ad_bound)
        });
        assert!(attained);
    }

    #[test]
    fn separated_tuples_are_detected() {
        let mut assign = SubsetAssignment::new();
        assign.insert(1, [0].into()).unwrap();
        assign.insert(4, [3].into()).unwrap();
        let tuples = tracked_tuples(&assign, 2);
        assert!(tuples.iter().any(|t| t.betas == vec![1, 4]));
        // not separated: sup {0} union {2} = 2, inf {3} = 3 holds, but the
        // reverse pair is not increasing
        assert!(!tuples.iter().any(|t| t.betas == vec![4, 1]));
    }

    #[test]
    fn registry_build_reverifies() {
        let mut assign = SubsetAssignment::new();
        assign.insert(1, [0].into()).unwrap();
        assign.insert(4, [3].into()).unwrap();
        let cfg = small_cfg(6, 6);
        let (out, registry) = build_registry_family(&cfg, &assign, 2).unwrap();
        registry.reverify().unwrap();
        assert!(almost_disjoint_check(&out.family, out.report.ad_bound).passed());
        // the pair meet set is seen by the last member
        let tm = out
            .report
            .tuple_meets
            .iter()
            .find(|t| t.tuple == vec![1, 4] && t.alpha == 5)
            .unwrap();
        assert!(tm.count >= 1, "tuple meet count {}", tm.count);
    }

    #[test]
    fn depth_one_tracking_degenerates_to_the_plain_builder() {
        // no meet sets are tracked, so the registry variant behaves like
        // the plain builder: singles only, no tuple records
        let mut assign = SubsetAssignment::new();
        assign.insert(2, [0, 1].into()).unwrap();
        assign.insert(4, [2, 3].into()).unwrap();
        let cfg = small_cfg(5, 5);
        let (out, registry) = build_registry_family(&cfg, &assign, 1).unwrap();
        assert!(out.report.tuple_meets.is_empty());
        assert!(almost_disjoint_check(&out.family, out.report.ad_bound).passed());
        registry.reverify().unwrap();
        for m in &out.report.meets {
            assert!(m.count >= 1, "meet {m:?}");
        }
    }

    #[test]
    fn shuffled_enumeration_keeps_postconditions() {
        let assign = SubsetAssignment::prefixes(4);
        let cfg = StagedFamilyConfig {
            enumeration: Enumeration::Shuffled(11),
            ..small_cfg(4, 6)
        };
        let out = build_staged_family(&cfg, &assign).unwrap();
        assert!(almost_disjoint_check(&out.family, out.report.ad_bound).passed());
        for m in &out.report.meets {
            assert!(m.count >= 1, "meet {m:?}");
        }
    }
}
