//! The index-set poset whose chains pick out enumeration-witness
//! subfamilies.
//!
//! Conditions are finite index sets. A condition strengthens a weaker one
//! when every newly added index that sits below an old one crosses it
//! above the weaker condition's intersection ceiling. Subset containment
//! reads as "every element is below the bound".

use crate::checkers::delta_system_refine;
use crate::error::Error;
use crate::family::FamilySnapshot;
use crate::forcing::{DenseRule, Poset};
use crate::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub struct LuzinPoset {
    sets: BTreeMap<u64, BTreeSet<u64>>,
}

impl LuzinPoset {
    pub fn new(fam: &FamilySnapshot) -> Self {
        LuzinPoset {
            sets: fam
                .members
                .iter()
                .map(|(i, m)| (*i, m.point_set()))
                .collect(),
        }
    }

    pub fn indices(&self) -> Vec<u64> {
        self.sets.keys().copied().collect()
    }

    fn meet(&self, a: u64, b: u64) -> BTreeSet<u64> {
        self.sets[&a]
            .intersection(&self.sets[&b])
            .copied()
            .collect()
    }

    /// The intersection ceiling of a condition: one past the largest point
    /// in any pairwise intersection; zero for empty and singleton
    /// conditions and when every intersection is empty.
    pub fn ceiling(&self, q: &BTreeSet<u64>) -> u64 {
        let idx: Vec<u64> = q.iter().copied().collect();
        let mut best = 0;
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[i + 1..] {
                if let Some(&m) = self.meet(a, b).iter().next_back() {
                    best = best.max(m + 1);
                }
            }
        }
        best
    }

    /// Two conditions are compatible exactly when their union is a common
    /// strengthening.
    pub fn compatible(&self, p: &BTreeSet<u64>, q: &BTreeSet<u64>) -> bool {
        let union: BTreeSet<u64> = p.union(q).copied().collect();
        self.leq(&union, p) && self.leq(&union, q)
    }

    /// The dense set of conditions reaching index `delta`: some member
    /// index at or above it.
    pub fn reach_rule<'p>(&self, delta: u64) -> DenseRule<'p, LuzinPoset> {
        DenseRule::new(
            format!("reach[{delta}]"),
            move |_poset: &LuzinPoset, p: &BTreeSet<u64>| p.iter().any(|&g| g >= delta),
            move |poset: &LuzinPoset, p: &BTreeSet<u64>| {
                let floor = p.iter().next_back().map(|&m| m + 1).unwrap_or(0).max(delta);
                let next = poset.indices().into_iter().find(|&i| i >= floor).ok_or(
                    Error::RuleExhausted {
                        rule: format!("reach[{delta}]"),
                        reason: format!("no family index at or above {floor}"),
                    },
                )?;
                let mut q = p.clone();
                q.insert(next);
                Ok(q)
            },
        )
    }
}

impl Poset for LuzinPoset {
    type Cond = BTreeSet<u64>;

    fn root(&self) -> Self::Cond {
        BTreeSet::new()
    }

    fn leq(&self, lower: &Self::Cond, upper: &Self::Cond) -> bool {
        if !upper.is_subset(lower) {
            return false;
        }
        let ceiling = self.ceiling(upper);
        lower.difference(upper).all(|&alpha| {
            upper
                .iter()
                .all(|&beta| alpha >= beta || self.meet(alpha, beta).iter().any(|&x| x >= ceiling))
        })
    }

    fn validate(&self, cond: &Self::Cond) -> Result<()> {
        match cond.iter().find(|i| !self.sets.contains_key(i)) {
            Some(&index) => Err(Error::UnknownIndex { index }),
            None => Ok(()),
        }
    }
}

/// Compatibility statistics over a sample of conditions: a report, never a
/// structural claim.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompatibilityProbe {
    pub samples: u64,
    pub condition_size: usize,
    /// Petal count of the refined sunflower over the sampled index sets.
    pub refined: u64,
    pub compatible_pairs: u64,
    pub pairs: u64,
}

/// Sample random fixed-size conditions, refine them into a sunflower, and
/// count compatible pairs among the refined ones.
pub fn compatibility_probe(
    poset: &LuzinPoset,
    samples: usize,
    condition_size: usize,
    seed: u64,
) -> Result<CompatibilityProbe> {
    let indices = poset.indices();
    if indices.len() < condition_size {
        return Err(Error::invalid(
            "compatibility probe",
            "family smaller than the condition size",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conds: Vec<BTreeSet<u64>> = Vec::with_capacity(samples);
    while conds.len() < samples {
        let mut cond = BTreeSet::new();
        while cond.len() < condition_size {
            cond.insert(indices[rng.gen_range(0..indices.len())]);
        }
        conds.push(cond);
    }
    let refined = match delta_system_refine(&conds, 2) {
        Ok(ds) => ds.positions,
        Err(_) => (0..conds.len()).collect(),
    };
    let mut compatible_pairs = 0u64;
    let mut pairs = 0u64;
    for (i, &p) in refined.iter().enumerate() {
        for &q in &refined[i + 1..] {
            pairs += 1;
            if poset.compatible(&conds[p], &conds[q]) {
                compatible_pairs += 1;
            }
        }
    }
    Ok(CompatibilityProbe {
        samples: samples as u64,
        condition_size,
        refined: refined.len() as u64,
        compatible_pairs,
        pairs,
    })
}
