//! The seed/branch poset: conditions pair a finite point set with a finite
//! piece of a fixed branch, and growth is confined to the meet of the
//! branch piece's coherent sets.

use crate::error::Error;
use crate::forcing::{DenseRule, Poset};
use crate::tree::TreeOrder;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A condition: the points committed so far and the branch nodes whose
/// coherent sets now confine all further points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCond {
    pub points: BTreeSet<u64>,
    pub nodes: BTreeSet<u64>,
}

impl BranchCond {
    pub fn empty() -> Self {
        BranchCond {
            points: BTreeSet::new(),
            nodes: BTreeSet::new(),
        }
    }
}

pub struct BranchPoset {
    /// Coherent set per tree node.
    pub coherent: BTreeMap<u64, BTreeSet<u64>>,
    /// The branch the conditions may commit to.
    pub branch: BTreeSet<u64>,
    /// Point universe bound.
    pub horizon: u64,
}

impl BranchPoset {
    pub fn new(
        coherent: BTreeMap<u64, BTreeSet<u64>>,
        branch: BTreeSet<u64>,
        horizon: u64,
    ) -> Result<Self> {
        if let Some(&s) = branch.iter().find(|s| !coherent.contains_key(s)) {
            return Err(Error::invalid(
                "branch poset",
                format!("branch node {s} has no coherent set"),
            ));
        }
        Ok(BranchPoset {
            coherent,
            branch,
            horizon,
        })
    }

    /// Meet of the coherent sets over the condition's nodes; the whole
    /// universe when no node is committed yet.
    pub fn core(&self, cond: &BranchCond) -> BTreeSet<u64> {
        let mut core: Option<BTreeSet<u64>> = None;
        for t in &cond.nodes {
            let c = &self.coherent[t];
            core = Some(match core {
                None => c.clone(),
                Some(acc) => acc.intersection(c).copied().collect(),
            });
        }
        core.unwrap_or_else(|| (0..self.horizon).collect())
    }

    /// Dense: at least `n + 1` committed points.
    pub fn size_rule<'p>(&self, n: usize) -> DenseRule<'p, BranchPoset> {
        DenseRule::new(
            format!("size>{n}"),
            move |_poset: &BranchPoset, p: &BranchCond| p.points.len() > n,
            move |poset: &BranchPoset, p: &BranchCond| {
                let core = poset.core(p);
                let mut q = p.clone();
                while q.points.len() <= n {
                    let x = core.iter().copied().find(|x| !q.points.contains(x)).ok_or(
                        Error::RuleExhausted {
                            rule: format!("size>{n}"),
                            reason: "the coherent core has no fresh point".into(),
                        },
                    )?;
                    q.points.insert(x);
                }
                Ok(q)
            },
        )
    }

    /// Dense: branch node `s` committed.
    pub fn node_rule<'p>(&self, s: u64) -> DenseRule<'p, BranchPoset> {
        DenseRule::new(
            format!("node[{s}]"),
            move |_poset: &BranchPoset, p: &BranchCond| p.nodes.contains(&s),
            move |poset: &BranchPoset, p: &BranchCond| {
                if !poset.branch.contains(&s) {
                    return Err(Error::BadCondition {
                        reason: format!("{s} is not on the branch"),
                    });
                }
                let mut q = p.clone();
                q.nodes.insert(s);
                Ok(q)
            },
        )
    }

    /// Dense: the committed points past `n` contain a pair of nodes of the
    /// foe tree that the foe order cannot compare.
    pub fn incomparable_rule<'p>(
        &self,
        foe: &'p TreeOrder,
        foe_name: &str,
        n: u64,
    ) -> DenseRule<'p, BranchPoset> {
        let name = format!("incomparable[{foe_name},{n}]");
        let has_pair = move |foe: &TreeOrder, points: &BTreeSet<u64>| -> bool {
            let onto: Vec<u64> = points
                .iter()
                .copied()
                .filter(|&x| x >= n && foe.contains(x))
                .collect();
            onto.iter()
                .enumerate()
                .any(|(i, &x)| onto[i + 1..].iter().any(|&y| !foe.comparable(x, y)))
        };
        let rule_name = name.clone();
        DenseRule::new(
            name,
            move |_poset: &BranchPoset, p: &BranchCond| has_pair(foe, &p.points),
            move |poset: &BranchPoset, p: &BranchCond| {
                let core = poset.core(p);
                let onto: Vec<u64> = core
                    .iter()
                    .copied()
                    .filter(|&x| x >= n && foe.contains(x))
                    .collect();
                for (i, &x) in onto.iter().enumerate() {
                    for &y in &onto[i + 1..] {
                        if !foe.comparable(x, y) {
                            let mut q = p.clone();
                            q.points.insert(x);
                            q.points.insert(y);
                            return Ok(q);
                        }
                    }
                }
                Err(Error::RuleExhausted {
                    rule: rule_name.clone(),
                    reason: format!(
                        "the coherent core meets the foe tree past {n} only inside a chain ({} candidate points)",
                        onto.len()
                    ),
                })
            },
        )
    }
}

impl Poset for BranchPoset {
    type Cond = BranchCond;

    fn root(&self) -> Self::Cond {
        BranchCond::empty()
    }

    fn leq(&self, lower: &Self::Cond, upper: &Self::Cond) -> bool {
        if !upper.points.is_subset(&lower.points) || !upper.nodes.is_subset(&lower.nodes) {
            return false;
        }
        let core = self.core(upper);
        lower
            .points
            .difference(&upper.points)
            .all(|x| core.contains(x))
    }

    fn validate(&self, cond: &Self::Cond) -> Result<()> {
        if let Some(&s) = cond.nodes.iter().find(|s| !self.branch.contains(s)) {
            return Err(Error::BadCondition {
                reason: format!("node {s} is not on the branch"),
            });
        }
        Ok(())
    }
}
