//! The partial-function poset over a k-linked domain family: conditions
//! carry one finite function per covered domain, and the order freezes
//! every pairwise graph intersection once both functions are present.

use crate::error::Error;
use crate::family::{FamilySnapshot, Member, MemberKind};
use crate::forcing::{DenseRule, FilterChain, Poset};
use crate::partial_fn::PartialFn;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A condition: finite partial functions, keyed by domain position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PkCond {
    pub parts: BTreeMap<usize, PartialFn>,
}

impl PkCond {
    pub fn empty() -> Self {
        PkCond {
            parts: BTreeMap::new(),
        }
    }

    fn max_dom_point(&self) -> Option<u64> {
        self.parts
            .values()
            .filter_map(|f| f.entries.keys().next_back().copied())
            .max()
    }
}

pub struct PkPoset {
    pub domains: Vec<BTreeSet<u64>>,
    pub horizon: u64,
}

impl PkPoset {
    pub fn new(domains: Vec<BTreeSet<u64>>, horizon: u64) -> Self {
        PkPoset { domains, horizon }
    }

    fn graph_meet(a: &PartialFn, b: &PartialFn) -> Vec<(u64, u64)> {
        a.agreement(b)
    }

    /// Dense: domain `e` is covered and its function has at least `n`
    /// points. Growth picks the smallest unused domain points with values
    /// that create no new cross agreements.
    pub fn domain_rule<'p>(&self, e: usize, n: usize) -> DenseRule<'p, PkPoset> {
        DenseRule::new(
            format!("domain[{e}>={n}]"),
            move |_poset: &PkPoset, p: &PkCond| p.parts.get(&e).is_some_and(|f| f.len() >= n),
            move |poset: &PkPoset, p: &PkCond| {
                let mut q = p.clone();
                let f = q
                    .parts
                    .entry(e)
                    .or_insert_with(|| PartialFn::new(poset.horizon));
                let dom = poset
                    .domains
                    .get(e)
                    .ok_or(Error::UnknownIndex { index: e as u64 })?;
                let fresh: Vec<u64> = dom
                    .iter()
                    .copied()
                    .filter(|m| f.get(*m).is_none())
                    .take(n.saturating_sub(f.len()))
                    .collect();
                if f.len() + fresh.len() < n {
                    return Err(Error::RuleExhausted {
                        rule: format!("domain[{e}>={n}]"),
                        reason: format!("domain {e} has only {} points", dom.len()),
                    });
                }
                for m in fresh {
                    let taken: BTreeSet<u64> = p
                        .parts
                        .iter()
                        .filter(|&(&e2, _)| e2 != e)
                        .filter_map(|(_, g)| g.get(m))
                        .collect();
                    let v = (0..)
                        .find(|v| !taken.contains(v))
                        .expect("values are unbounded");
                    f.insert(m, v)?;
                }
                Ok(q)
            },
        )
    }

    /// Points of the meet of the per-part graph unions.
    pub fn cross_meet(&self, cond: &PkCond, parts: &[Vec<usize>]) -> BTreeSet<(u64, u64)> {
        let mut meet: Option<BTreeSet<(u64, u64)>> = None;
        for part in parts {
            let mut union: BTreeSet<(u64, u64)> = BTreeSet::new();
            for e in part {
                if let Some(f) = cond.parts.get(e) {
                    union.extend(f.points());
                }
            }
            meet = Some(match meet {
                None => union,
                Some(acc) => acc.intersection(&union).copied().collect(),
            });
        }
        meet.unwrap_or_default()
    }

    /// Dense: the graph unions over the (disjoint) position parts meet in
    /// at least `target` points.
    ///
    /// The extension picks one domain tuple across the parts with at most
    /// one member already covered — pairs already present are frozen — and
    /// stamps a shared zero value on enough fresh common points beyond
    /// every current domain point.
    pub fn witness_rule<'p>(
        &self,
        parts: Vec<Vec<usize>>,
        target: usize,
    ) -> DenseRule<'p, PkPoset> {
        let name = format!("witness[{target}]");
        let parts_for_holds = parts.clone();
        let rule_name = name.clone();
        DenseRule::new(
            name,
            move |poset: &PkPoset, p: &PkCond| {
                poset.cross_meet(p, &parts_for_holds).len() >= target
            },
            move |poset: &PkPoset, p: &PkCond| {
                let mut q = p.clone();
                loop {
                    let have = poset.cross_meet(&q, &parts).len();
                    if have >= target {
                        return Ok(q);
                    }
                    let deficit = target - have;
                    // tuple selection: fewest covered members first, then
                    // lexicographic on positions
                    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
                    for part in &parts {
                        let mut grown = Vec::new();
                        for t in &tuples {
                            for &e in part {
                                let mut t2 = t.clone();
                                t2.push(e);
                                grown.push(t2);
                            }
                        }
                        tuples = grown;
                    }
                    let covered =
                        |t: &Vec<usize>| t.iter().filter(|e| q.parts.contains_key(e)).count();
                    tuples.sort_by_key(|t| (covered(t), t.clone()));
                    let tuple =
                        tuples
                            .into_iter()
                            .find(|t| covered(t) <= 1)
                            .ok_or(Error::RuleExhausted {
                            rule: rule_name.clone(),
                            reason:
                                "every cross tuple has two covered members; their meets are frozen"
                                    .into(),
                        })?;
                    let floor = q.max_dom_point().map(|m| m + 1).unwrap_or(0);
                    let mut shared: Option<BTreeSet<u64>> = None;
                    for &e in &tuple {
                        let dom = &poset.domains[e];
                        shared = Some(match shared {
                            None => dom.iter().copied().filter(|&m| m >= floor).collect(),
                            Some(acc) => acc.intersection(dom).copied().collect(),
                        });
                    }
                    let points: Vec<u64> = shared
                        .unwrap_or_default()
                        .into_iter()
                        .take(deficit)
                        .collect();
                    if points.len() < deficit {
                        return Err(Error::RuleExhausted {
                            rule: rule_name.clone(),
                            reason: format!(
                                "the tuple's common domain holds only {} fresh points past {floor}, {deficit} needed",
                                points.len()
                            ),
                        });
                    }
                    for &e in &tuple {
                        let f = q
                            .parts
                            .entry(e)
                            .or_insert_with(|| PartialFn::new(poset.horizon));
                        for &m in &points {
                            f.insert(m, 0)?;
                        }
                    }
                }
            },
        )
    }

    /// The covered functions as a family snapshot, indices being domain
    /// positions.
    pub fn extract(&self, chain: &FilterChain<PkCond>) -> Result<FamilySnapshot> {
        let last = chain.last();
        let mut fam = FamilySnapshot::new(MemberKind::Functions, self.horizon);
        for (&e, f) in &last.parts {
            fam.push(e as u64, Member::Fn(f.clone()))?;
        }
        Ok(fam)
    }
}

impl Poset for PkPoset {
    type Cond = PkCond;

    fn root(&self) -> Self::Cond {
        PkCond::empty()
    }

    fn leq(&self, lower: &Self::Cond, upper: &Self::Cond) -> bool {
        for (e, f_up) in &upper.parts {
            let Some(f_low) = lower.parts.get(e) else {
                return false;
            };
            if !f_up.entries.iter().all(|(m, v)| f_low.get(*m) == Some(*v)) {
                return false;
            }
        }
        // frozen meets: pairs covered by the weaker condition never grow
        let keys: Vec<usize> = upper.parts.keys().copied().collect();
        for (i, &e) in keys.iter().enumerate() {
            for &e2 in &keys[i + 1..] {
                let before = Self::graph_meet(&upper.parts[&e], &upper.parts[&e2]);
                let after = Self::graph_meet(&lower.parts[&e], &lower.parts[&e2]);
                if before != after {
                    return false;
                }
            }
        }
        true
    }

    fn validate(&self, cond: &Self::Cond) -> Result<()> {
        for (&e, f) in &cond.parts {
            let dom = self
                .domains
                .get(e)
                .ok_or(Error::UnknownIndex { index: e as u64 })?;
            if let Some(&m) = f.entries.keys().find(|m| !dom.contains(m)) {
                return Err(Error::BadCondition {
                    reason: format!("function {e} is defined at {m}, outside its domain"),
                });
            }
        }
        Ok(())
    }
}

/// Step invariance of pairwise meets: once two positions are both covered,
/// their graph intersection never changes along the chain.
pub fn frozen_meets_hold(chain: &FilterChain<PkCond>) -> std::result::Result<(), String> {
    let last = chain.last();
    let keys: Vec<usize> = last.parts.keys().copied().collect();
    for (i, &e) in keys.iter().enumerate() {
        for &e2 in &keys[i + 1..] {
            let mut first_meet: Option<Vec<(u64, u64)>> = None;
            for step in &chain.steps {
                if let (Some(f), Some(g)) = (step.cond.parts.get(&e), step.cond.parts.get(&e2)) {
                    let meet = f.agreement(g);
                    match &first_meet {
                        None => first_meet = Some(meet),
                        Some(frozen) if *frozen != meet => {
                            return Err(format!(
                                "pair ({e}, {e2}): meet changed after both were covered"
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(())
}
