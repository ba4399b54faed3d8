//! The basic diagonal Luzin-style builder: every new function meets each
//! predecessor on a designated column block, and takes fresh values
//! everywhere else.

use crate::error::Error;
use crate::family::{FamilySnapshot, Member, MemberKind};
use crate::partial_fn::PartialFn;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Construction log: the designated column blocks and the achieved bounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LuzinBasicLog {
    pub count: u64,
    pub meet_budget: u64,
    pub horizon: u64,
    /// Column block reserved for meeting member `beta`.
    pub blocks: Vec<(u64, u64)>,
    /// Largest pairwise agreement size.
    pub ad_bound: u64,
}

/// Build `count` functions on `[0, horizon)` where each member agrees with
/// every predecessor on that predecessor's whole column block (one block
/// per predecessor, `meet_budget + 1` columns, all past `meet_budget`),
/// and dodges everything elsewhere.
pub fn build_luzin_basic(
    count: u64,
    meet_budget: u64,
    horizon: u64,
) -> Result<(FamilySnapshot, LuzinBasicLog)> {
    let width = meet_budget + 1;
    let need = width * (count + 1);
    if horizon < need.max(1) {
        return Err(Error::HorizonExhausted {
            horizon,
            need: format!("{need} columns for {count} members at meet budget {meet_budget}"),
        });
    }
    let block = |beta: u64| -> (u64, u64) { (width * (beta + 1), width * (beta + 2)) };
    let mut members: Vec<PartialFn> = Vec::new();
    for alpha in 0..count {
        let mut f = PartialFn::new(horizon);
        for beta in 0..alpha {
            let (lo, hi) = block(beta);
            for c in lo..hi {
                f.insert(c, members[beta as usize].get(c).expect("members are total"))?;
            }
        }
        for c in 0..horizon {
            if f.get(c).is_some() {
                continue;
            }
            let excluded: BTreeSet<u64> = members.iter().filter_map(|g| g.get(c)).collect();
            let v = (0..)
                .find(|v| !excluded.contains(v))
                .expect("values are unbounded");
            f.insert(c, v)?;
        }
        members.push(f);
    }
    let mut family = FamilySnapshot::new(MemberKind::Functions, horizon);
    let mut ad_bound = 0;
    for (i, f) in members.iter().enumerate() {
        for g in &members[i + 1..] {
            ad_bound = ad_bound.max(f.agreement(g).len() as u64);
        }
        family.push(i as u64, Member::Fn(f.clone()))?;
    }
    let log = LuzinBasicLog {
        count,
        meet_budget,
        horizon,
        blocks: (0..count).map(block).collect(),
        ad_bound,
    };
    Ok((family, log))
}

/// The smallest budget making the box-witness check pass: the largest
/// number of earlier members whose whole intersection with some member
/// fits one of the test boxes.
pub fn max_box_count(fam: &FamilySnapshot, box_sizes: &[u64]) -> u64 {
    let mut worst = 0u64;
    for later in 1..fam.len() {
        let (_, a) = &fam.members[later];
        for &size in box_sizes {
            let count = fam.members[..later]
                .iter()
                .filter(|(_, b)| match (a, b) {
                    (Member::Fn(f), Member::Fn(g)) => {
                        f.agreement(g).iter().all(|&(c, v)| c < size && v < size)
                    }
                    _ => crate::family::intersect(a, b).iter().all(|&p| p < size),
                })
                .count() as u64;
            worst = worst.max(count);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::{almost_disjoint_check, luzin_witness_check};

    #[test]
    fn single_member_is_total() {
        let (fam, _) = build_luzin_basic(1, 3, 20).unwrap();
        assert!(fam.members[0].1.as_fn().unwrap().is_total_below(20));
    }

    #[test]
    fn pair_meets_on_the_designated_block() {
        let (fam, log) = build_luzin_basic(2, 4, 40).unwrap();
        let f0 = fam.members[0].1.as_fn().unwrap();
        let f1 = fam.members[1].1.as_fn().unwrap();
        let agr = f1.agreement(f0);
        // meets the predecessor at meet_budget + 1 points, all past every
        // n <= meet_budget
        assert_eq!(agr.len() as u64, log.meet_budget + 1);
        for &(c, _) in &agr {
            assert!(c > log.meet_budget);
        }
        let (lo, hi) = log.blocks[0];
        assert!(agr.iter().all(|&(c, _)| (lo..hi).contains(&c)));
    }

    #[test]
    fn agreements_are_exactly_the_shared_blocks() {
        let (fam, log) = build_luzin_basic(6, 2, 60).unwrap();
        // for gamma < alpha the agreement is the union of blocks up to gamma
        for (gi, (_, g)) in fam.members.iter().enumerate() {
            for (_, f) in &fam.members[gi + 1..] {
                let agr = f.as_fn().unwrap().agreement(g.as_fn().unwrap());
                let expected: BTreeSet<u64> = (0..=gi as u64)
                    .flat_map(|b| log.blocks[b as usize].0..log.blocks[b as usize].1)
                    .collect();
                let cols: BTreeSet<u64> = agr.iter().map(|&(c, _)| c).collect();
                assert_eq!(cols, expected);
            }
        }
    }

    #[test]
    fn passes_checks_at_reported_budgets() {
        let (fam, log) = build_luzin_basic(12, 4, 120).unwrap();
        assert!(almost_disjoint_check(&fam, log.ad_bound).passed());
        let boxes = [0, 2, 4, 6];
        let budget = max_box_count(&fam, &boxes);
        assert!(luzin_witness_check(&fam, &boxes, budget).unwrap().passed());
        // blocks start past the small boxes, so the budget stays zero
        assert_eq!(budget, 0);
    }

    #[test]
    fn every_bipartition_of_the_family_meets() {
        let (fam, _) = build_luzin_basic(10, 3, 100).unwrap();
        let sets = fam.point_sets();
        let n = sets.len();
        for mask in (1u64..(1 << n) - 1).filter(|m| m & 1 == 1) {
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for (bit, (_, s)) in sets.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    left.extend(s.iter().copied());
                } else {
                    right.extend(s.iter().copied());
                }
            }
            assert!(!left.is_disjoint(&right));
        }
    }

    #[test]
    fn small_horizons_are_rejected() {
        assert!(matches!(
            build_luzin_basic(12, 4, 30),
            Err(Error::HorizonExhausted { .. })
        ));
    }
}
