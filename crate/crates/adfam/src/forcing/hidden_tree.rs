//! The finite-tree poset whose chains grow a tree order and a floor map
//! so that each covered member's tail trace becomes a branch tail.

use crate::error::Error;
use crate::family::FamilySnapshot;
use crate::forcing::{DenseRule, Poset};
use crate::tree::TreeOrder;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A condition: a finite tree, covered member indices, and per-member
/// floors below which the member's trace is ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenTreeCond {
    pub tree: TreeOrder,
    pub members: BTreeSet<u64>,
    pub floors: BTreeMap<u64, u64>,
}

impl HiddenTreeCond {
    pub fn empty() -> Self {
        HiddenTreeCond {
            tree: TreeOrder::new(),
            members: BTreeSet::new(),
            floors: BTreeMap::new(),
        }
    }
}

pub struct HiddenTreePoset {
    sets: BTreeMap<u64, BTreeSet<u64>>,
    universe_horizon: u64,
}

impl HiddenTreePoset {
    pub fn new(fam: &FamilySnapshot) -> Self {
        HiddenTreePoset {
            sets: fam
                .members
                .iter()
                .map(|(i, m)| (*i, m.point_set()))
                .collect(),
            universe_horizon: fam.universe_horizon,
        }
    }

    fn member_set(&self, index: u64) -> Result<&BTreeSet<u64>> {
        self.sets.get(&index).ok_or(Error::UnknownIndex { index })
    }

    /// The member's tail chain inside the condition's tree: trace points
    /// at or above the floor, sorted bottom to top by the tree order.
    fn tail_chain(&self, cond: &HiddenTreeCond, index: u64) -> Result<Vec<u64>> {
        let a = self.member_set(index)?;
        let floor = *cond.floors.get(&index).ok_or_else(|| {
            Error::invalid("tree condition", format!("member {index} has no floor"))
        })?;
        let mut chain: Vec<u64> = cond
            .tree
            .nodes()
            .into_iter()
            .filter(|&n| n >= floor && a.contains(&n))
            .collect();
        chain.sort_by_key(|&n| cond.tree.path_from_root(n).len());
        Ok(chain)
    }

    /// The dense set of conditions covering member `a`.
    pub fn cover_rule<'p>(&self, a: u64) -> DenseRule<'p, HiddenTreePoset> {
        DenseRule::new(
            format!("cover[{a}]"),
            move |_poset: &HiddenTreePoset, p: &HiddenTreeCond| p.members.contains(&a),
            move |poset: &HiddenTreePoset, p: &HiddenTreeCond| {
                poset.member_set(a)?;
                let mut q = p.clone();
                let floor = q
                    .tree
                    .nodes()
                    .iter()
                    .next_back()
                    .map(|&m| m + 1)
                    .unwrap_or(0);
                q.members.insert(a);
                q.floors.insert(a, floor);
                Ok(q)
            },
        )
    }

    /// The dense set of conditions where member `a`'s trace reaches past
    /// `n`: some tree node at or above `n` lies in the member.
    pub fn reach_rule<'p>(&self, a: u64, n: u64) -> DenseRule<'p, HiddenTreePoset> {
        let name = format!("reach[{a},{n}]");
        let cover = move |poset: &HiddenTreePoset, p: &HiddenTreeCond| -> Result<HiddenTreeCond> {
            if p.members.contains(&a) {
                Ok(p.clone())
            } else {
                poset.cover_rule(a).extend(poset, p)
            }
        };
        DenseRule::new(
            name.clone(),
            move |_poset: &HiddenTreePoset, p: &HiddenTreeCond| {
                p.members.contains(&a)
                    && p.tree.nodes().iter().any(|&k| k >= n)
                    && p.tree
                        .nodes()
                        .iter()
                        .any(|&k| k >= n && _poset.sets.get(&a).is_some_and(|s| s.contains(&k)))
            },
            move |poset: &HiddenTreePoset, p: &HiddenTreeCond| {
                let mut q = cover(poset, p)?;
                let a_set = poset.member_set(a)?.clone();
                let others: BTreeSet<u64> = q
                    .members
                    .iter()
                    .filter(|&&b| b != a)
                    .flat_map(|&b| poset.sets[&b].iter().copied())
                    .collect();
                let over = q
                    .tree
                    .nodes()
                    .iter()
                    .next_back()
                    .map(|&m| m + 1)
                    .unwrap_or(0)
                    .max(n + 1);
                let k = a_set
                    .iter()
                    .copied()
                    .find(|&k| k >= over && !others.contains(&k))
                    .ok_or(Error::RuleExhausted {
                        rule: format!("reach[{a},{n}]"),
                        reason: format!(
                            "no point of member {a} past {over} avoids the other covered members"
                        ),
                    })?;
                let chain = poset.tail_chain(&q, a)?;
                match chain.last() {
                    Some(&top) => q.tree.insert_child(k, top)?,
                    None => q.tree.insert_root(k),
                }
                Ok(q)
            },
        )
    }

    pub fn universe_horizon(&self) -> u64 {
        self.universe_horizon
    }
}

impl Poset for HiddenTreePoset {
    type Cond = HiddenTreeCond;

    fn root(&self) -> Self::Cond {
        HiddenTreeCond::empty()
    }

    fn leq(&self, lower: &Self::Cond, upper: &Self::Cond) -> bool {
        // initial subtree: parent links agree on the weaker tree
        upper
            .tree
            .parent
            .iter()
            .all(|(n, p)| lower.tree.parent.get(n) == Some(p))
            && upper.members.is_subset(&lower.members)
            && upper
                .floors
                .iter()
                .all(|(a, f)| lower.floors.get(a) == Some(f))
    }

    fn validate(&self, cond: &Self::Cond) -> Result<()> {
        for &a in &cond.members {
            self.member_set(a)?;
            if !cond.floors.contains_key(&a) {
                return Err(Error::invalid(
                    "tree condition",
                    format!("member {a} has no floor"),
                ));
            }
        }
        for &a in &cond.members {
            let chain = self.tail_chain(cond, a)?;
            // linearly ordered
            for (i, &x) in chain.iter().enumerate() {
                for &y in &chain[i + 1..] {
                    if !cond.tree.comparable(x, y) {
                        return Err(Error::BadCondition {
                            reason: format!("member {a}: tail nodes {x} and {y} are incomparable"),
                        });
                    }
                }
            }
            // downward closed above the floor
            let floor = cond.floors[&a];
            let a_set = &self.sets[&a];
            for &n in &chain {
                for &k in cond.tree.nodes().iter().filter(|&&k| k >= floor) {
                    if cond.tree.below(k, n) && !a_set.contains(&k) {
                        return Err(Error::BadCondition {
                            reason: format!(
                                "member {a}: node {k} sits below its tail node {n} but outside it"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The extracted witness must put every covered member's tail trace on a
/// branch tail: the trace at or above the floor equals a branch's part at
/// or above the floor.
pub fn tail_of_branch_check(
    fam: &FamilySnapshot,
    tree: &TreeOrder,
    floors: &BTreeMap<u64, u64>,
) -> std::result::Result<(), String> {
    let branches: Vec<BTreeSet<u64>> = tree
        .branches()
        .into_iter()
        .map(|b| b.into_iter().collect())
        .collect();
    for (i, m) in &fam.members {
        let Some(&floor) = floors.get(i) else {
            return Err(format!("member {i} was never covered"));
        };
        let trace: BTreeSet<u64> = m
            .point_set()
            .into_iter()
            .filter(|&p| p >= floor && tree.contains(p))
            .collect();
        if trace.is_empty() {
            continue;
        }
        let matched = branches.iter().any(|b| {
            let tail: BTreeSet<u64> = b.iter().copied().filter(|&x| x >= floor).collect();
            tail == trace
        });
        if !matched {
            return Err(format!(
                "member {i}: trace {trace:?} above floor {floor} is no branch tail"
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Member, MemberKind};
    use crate::forcing::{rs_run, Schedule};

    fn fam_of(sets: &[&[u64]]) -> FamilySnapshot {
        let horizon = sets
            .iter()
            .flat_map(|s| s.iter())
            .max()
            .map_or(1, |m| m + 1);
        let mut fam = FamilySnapshot::new(MemberKind::Sets, horizon);
        for (i, s) in sets.iter().enumerate() {
            fam.push(i as u64, Member::Set(s.iter().copied().collect()))
                .unwrap();
        }
        fam
    }

    #[test]
    fn cover_rule_is_identity_once_covered() {
        let fam = fam_of(&[&[0, 1, 2]]);
        let poset = HiddenTreePoset::new(&fam);
        let rule = poset.cover_rule(0);
        let p = rule.extend(&poset, &poset.root()).unwrap();
        assert!(rule.holds(&poset, &p));
        // the engine records the rule as met without extending again
        let chain = rs_run(
            &poset,
            &[rule],
            p.clone(),
            Schedule::RoundRobin { rounds: 1 },
        )
        .unwrap();
        assert_eq!(chain.last(), &p);
    }

    #[test]
    fn two_disjoint_members_grow_two_chains() {
        let fam = fam_of(&[&[0, 2, 4, 6, 8], &[1, 3, 5, 7, 9]]);
        let poset = HiddenTreePoset::new(&fam);
        let mut rules = Vec::new();
        for a in 0..2 {
            rules.push(poset.cover_rule(a));
        }
        for a in 0..2 {
            for n in 0..3 {
                rules.push(poset.reach_rule(a, n));
            }
        }
        let chain = rs_run(
            &poset,
            &rules,
            poset.root(),
            Schedule::RoundRobin { rounds: 1 },
        )
        .unwrap();
        let last = chain.last();
        tail_of_branch_check(&fam, &last.tree, &last.floors).unwrap();
        // two separate root chains
        assert_eq!(last.tree.roots().len(), 2);
    }

    #[test]
    fn ten_member_family_passes_the_tail_check() {
        let sets: Vec<Vec<u64>> = (0..10u64)
            .map(|i| (0..6).map(|j| 10 * i + j).collect())
            .collect();
        let fam = fam_of(&sets.iter().map(|s| s.as_slice()).collect::<Vec<_>>());
        let poset = HiddenTreePoset::new(&fam);
        let mut rules = Vec::new();
        for a in 0..10 {
            rules.push(poset.cover_rule(a));
        }
        for a in 0..10 {
            for n in 0..5 {
                rules.push(poset.reach_rule(a, n));
            }
        }
        let chain = rs_run(
            &poset,
            &rules,
            poset.root(),
            Schedule::RoundRobin { rounds: 1 },
        )
        .unwrap();
        let last = chain.last();
        tail_of_branch_check(&fam, &last.tree, &last.floors).unwrap();
        assert!(crate::forcing::chain_order_sane(&poset, &chain));
    }
}
