//! Cross-intersection boosting: common points above a threshold shared by
//! large index groups on both sides.

use crate::error::Error;
use crate::family::FamilySnapshot;
use crate::Result;
use std::collections::BTreeSet;

/// Result of one boost step: the common point and the surviving sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boost {
    pub point: u64,
    pub left: BTreeSet<u64>,
    pub right: BTreeSet<u64>,
}

/// Find the smallest universe point strictly above `above` that lies in at
/// least `keep` members of each side. Exhaustive over universe points.
pub fn intersection_booster(
    fam: &FamilySnapshot,
    left: &BTreeSet<u64>,
    right: &BTreeSet<u64>,
    above: u64,
    keep: usize,
) -> Result<Boost> {
    if let Some(&x) = left.intersection(right).next() {
        return Err(Error::OverlappingParts { index: x });
    }
    let left_sets: Vec<(u64, BTreeSet<u64>)> = side_sets(fam, left)?;
    let right_sets: Vec<(u64, BTreeSet<u64>)> = side_sets(fam, right)?;
    let mut candidates: BTreeSet<u64> = BTreeSet::new();
    for (_, s) in left_sets.iter() {
        candidates.extend(s.iter().copied().filter(|&p| p > above));
    }
    for p in candidates {
        let on_left: BTreeSet<u64> = left_sets
            .iter()
            .filter(|(_, s)| s.contains(&p))
            .map(|&(i, _)| i)
            .collect();
        if on_left.len() < keep {
            continue;
        }
        let on_right: BTreeSet<u64> = right_sets
            .iter()
            .filter(|(_, s)| s.contains(&p))
            .map(|&(i, _)| i)
            .collect();
        if on_right.len() >= keep {
            return Ok(Boost {
                point: p,
                left: on_left,
                right: on_right,
            });
        }
    }
    Err(Error::BoosterExhausted { above, keep })
}

fn side_sets(fam: &FamilySnapshot, side: &BTreeSet<u64>) -> Result<Vec<(u64, BTreeSet<u64>)>> {
    side.iter()
        .map(|&i| Ok((i, fam.get(i)?.point_set())))
        .collect()
}

/// Result of iterating the booster over a disjoint tuple system.
#[derive(Clone, Debug)]
pub struct TupleBoost {
    /// Positions (into the input tuple list) surviving on each side.
    pub left_tuples: Vec<usize>,
    pub right_tuples: Vec<usize>,
    /// The boost point found at each coordinate pair stage.
    pub stage_points: Vec<u64>,
}

/// Iterate the booster over every coordinate pair of a disjoint tuple
/// system, shrinking two tuple groups until all cross pairs share points
/// above `above`.
///
/// The tuple list splits into halves to seed the two sides. After the run,
/// for every tuple `s` on the left, `t` on the right, and coordinates
/// `i, j`, the members at `s[i]` and `t[j]` share one of the stage points.
pub fn tuple_system_boost(
    fam: &FamilySnapshot,
    tuples: &[Vec<u64>],
    above: u64,
    keep: usize,
) -> Result<TupleBoost> {
    let width = match tuples.first() {
        Some(t) => t.len(),
        None => return Err(Error::invalid("tuple system", "no tuples")),
    };
    if tuples.iter().any(|t| t.len() != width) {
        return Err(Error::invalid("tuple system", "tuples have mixed widths"));
    }
    let mut seen = BTreeSet::new();
    for t in tuples {
        for &i in t {
            if !seen.insert(i) {
                return Err(Error::OverlappingParts { index: i });
            }
        }
    }
    let half = tuples.len() / 2;
    if half == 0 || tuples.len() - half == 0 {
        return Err(Error::invalid("tuple system", "need at least two tuples"));
    }
    let mut left: Vec<usize> = (0..half).collect();
    let mut right: Vec<usize> = (half..tuples.len()).collect();
    let mut floor = above;
    let mut stage_points = Vec::new();
    for i in 0..width {
        for j in 0..width {
            let side_l: BTreeSet<u64> = left.iter().map(|&t| tuples[t][i]).collect();
            let side_r: BTreeSet<u64> = right.iter().map(|&t| tuples[t][j]).collect();
            let boost = intersection_booster(fam, &side_l, &side_r, floor, keep)?;
            left.retain(|&t| boost.left.contains(&tuples[t][i]));
            right.retain(|&t| boost.right.contains(&tuples[t][j]));
            floor = boost.point;
            stage_points.push(boost.point);
        }
    }
    Ok(TupleBoost {
        left_tuples: left,
        right_tuples: right,
        stage_points,
    })
}
