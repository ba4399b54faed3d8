//! Sunflower extraction from a list of finite sets.

use crate::error::Error;
use crate::Result;
use std::collections::BTreeSet;

/// A sunflower: the common root and the positions of the chosen petals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSystem {
    pub root: BTreeSet<u64>,
    pub positions: Vec<usize>,
}

/// Extract at least `want` sets whose pairwise intersections all equal a
/// common root.
///
/// Kernel search is exhaustive over candidate roots (the empty set and all
/// pairwise intersections, in lexicographic order); petals are collected
/// greedily in input order for each candidate. The best candidate wins,
/// ties going to the lexicographically earlier root.
pub fn delta_system_refine(sets: &[BTreeSet<u64>], want: usize) -> Result<DeltaSystem> {
    if want == 0 {
        return Err(Error::invalid("sunflower", "want must be positive"));
    }
    if sets.len() < want {
        return Err(Error::TooFewSets {
            want,
            got: sets.len(),
        });
    }
    let mut candidates: BTreeSet<BTreeSet<u64>> = BTreeSet::new();
    candidates.insert(BTreeSet::new());
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            candidates.insert(a.intersection(b).copied().collect());
        }
    }
    let mut best: Option<DeltaSystem> = None;
    for root in &candidates {
        let mut positions: Vec<usize> = Vec::new();
        let mut petals: Vec<BTreeSet<u64>> = Vec::new();
        for (pos, s) in sets.iter().enumerate() {
            if !root.is_subset(s) {
                continue;
            }
            let petal: BTreeSet<u64> = s.difference(root).copied().collect();
            if petals.iter().all(|p| p.is_disjoint(&petal)) {
                positions.push(pos);
                petals.push(petal);
            }
        }
        if best
            .as_ref()
            .is_none_or(|b| positions.len() > b.positions.len())
        {
            best = Some(DeltaSystem {
                root: root.clone(),
                positions,
            });
        }
    }
    let best = best.expect("candidate list is never empty");
    if best.positions.len() < want {
        return Err(Error::NoSunflower {
            want,
            searched: candidates.len(),
        });
    }
    // literal re-check: every chosen pair meets exactly in the root
    for (i, &p) in best.positions.iter().enumerate() {
        for &q in &best.positions[i + 1..] {
            let meet: BTreeSet<u64> = sets[p].intersection(&sets[q]).copied().collect();
            assert_eq!(
                meet, best.root,
                "petals {p} and {q} do not meet in the root"
            );
        }
    }
    Ok(best)
}
