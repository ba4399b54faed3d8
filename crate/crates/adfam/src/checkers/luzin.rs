//! Luzin enumeration witnesses, k-wise union meets, and split searches.

use crate::error::Error;
use crate::family::{FamilySnapshot, Member};
use crate::report::{CheckReport, Verdict, Witness};
use crate::Result;
use std::collections::BTreeSet;

/// Per-pair summary of an intersection for fast box tests.
enum PairTrace {
    Empty,
    /// Largest element of the intersection (set families).
    MaxPoint(u64),
    /// Largest coordinate and largest value over the agreement set
    /// (function families).
    MaxCoordVal(u64, u64),
}

impl PairTrace {
    fn fits_box(&self, size: u64) -> bool {
        match *self {
            PairTrace::Empty => true,
            PairTrace::MaxPoint(m) => m < size,
            PairTrace::MaxCoordVal(c, v) => c < size && v < size,
        }
    }
}

fn pair_trace(a: &Member, b: &Member) -> PairTrace {
    match (a, b) {
        (Member::Fn(f), Member::Fn(g)) => {
            let agr = f.agreement(g);
            match (
                agr.iter().map(|&(i, _)| i).max(),
                agr.iter().map(|&(_, v)| v).max(),
            ) {
                (Some(c), Some(v)) => PairTrace::MaxCoordVal(c, v),
                _ => PairTrace::Empty,
            }
        }
        _ => match crate::family::intersect(a, b).into_iter().next_back() {
            Some(m) => PairTrace::MaxPoint(m),
            None => PairTrace::Empty,
        },
    }
}

/// Check the enumeration-witness property against a basis of test sets.
///
/// For each member index and each size in `box_sizes`, at most
/// `count_budget` strictly earlier members may have their whole
/// intersection with the member inside the test set. Test sets are initial
/// segments of the universe for set families and square boxes over the
/// agreement grid for function families.
pub fn luzin_witness_check(
    fam: &FamilySnapshot,
    box_sizes: &[u64],
    count_budget: u64,
) -> Result<CheckReport> {
    if fam.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = fam.len();
    let mut checked = 0u64;
    for later in 1..n {
        let (alpha, a) = &fam.members[later];
        let traces: Vec<(u64, PairTrace)> = fam.members[..later]
            .iter()
            .map(|(beta, b)| (*beta, pair_trace(a, b)))
            .collect();
        for &size in box_sizes {
            checked += 1;
            let offenders: Vec<u64> = traces
                .iter()
                .filter(|(_, t)| t.fits_box(size))
                .map(|&(beta, _)| beta)
                .collect();
            if offenders.len() as u64 > count_budget {
                return Ok(CheckReport::new(Verdict::Fail)
                    .budget("count_budget", count_budget)
                    .witness(Witness::Box {
                        index: *alpha,
                        box_size: size,
                        offenders,
                    }));
            }
        }
    }
    Ok(CheckReport::new(Verdict::Pass)
        .budget("count_budget", count_budget)
        .budget("boxes", box_sizes.len() as u64)
        .witness(Witness::note(format!(
            "exhaustive over {checked} (member, box) pairs"
        ))))
}

/// Pass iff the k unions indexed by `parts` meet in at least `threshold`
/// points. The report carries the exact meet.
pub fn k_near_luzin_check(
    fam: &FamilySnapshot,
    parts: &[BTreeSet<u64>],
    threshold: u64,
) -> Result<CheckReport> {
    for (pos, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::EmptyPart { position: pos });
        }
        for later in &parts[pos + 1..] {
            if let Some(&x) = part.intersection(later).next() {
                return Err(Error::OverlappingParts { index: x });
            }
        }
    }
    let mut meet: Option<BTreeSet<u64>> = None;
    for part in parts {
        let union = fam.union_points(part)?;
        meet = Some(match meet {
            None => union,
            Some(m) => m.intersection(&union).copied().collect(),
        });
    }
    let meet = meet.unwrap_or_default();
    let size = meet.len() as u64;
    let verdict = if size >= threshold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CheckReport::new(verdict)
        .budget("k", parts.len() as u64)
        .budget("threshold", threshold)
        .budget("size", size)
        .witness(Witness::points(&meet)))
}

/// Search for two disjoint member groups whose unions meet in at most
/// `bound` points.
///
/// Exhaustive over all bipartitions when the family has at most
/// `exhaustive_limit` members (a fruitless exhaustive scan is a definite
/// fail); otherwise prefix splits only, and a fruitless scan is
/// inconclusive.
pub fn anti_luzin_search(fam: &FamilySnapshot, bound: u64, exhaustive_limit: usize) -> CheckReport {
    let n = fam.len();
    if n < 2 {
        return CheckReport::new(Verdict::Inconclusive)
            .budget("bound", bound)
            .witness(Witness::note(
                "fewer than two members: no two nonempty disjoint groups exist",
            ));
    }
    let points: Vec<(u64, BTreeSet<u64>)> = fam.point_sets();
    let union_of = |mask: u64| -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for (bit, (_, set)) in points.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                out.extend(set.iter().copied());
            }
        }
        out
    };
    let split_witness = |left_mask: u64, meet: usize| -> Witness {
        let left = points
            .iter()
            .enumerate()
            .filter(|(b, _)| left_mask & (1 << b) != 0)
            .map(|(_, (i, _))| *i)
            .collect();
        let right = points
            .iter()
            .enumerate()
            .filter(|(b, _)| left_mask & (1 << b) == 0)
            .map(|(_, (i, _))| *i)
            .collect();
        Witness::Split {
            left,
            right,
            meet: meet as u64,
        }
    };

    if n <= exhaustive_limit {
        let full: u64 = (1 << n) - 1;
        // member 0 stays on the left, so each bipartition is seen once
        for mask in (1..full).filter(|m| m & 1 == 1) {
            let left = union_of(mask);
            let right = union_of(full & !mask);
            let meet = left.intersection(&right).count();
            if meet as u64 <= bound {
                return CheckReport::new(Verdict::Pass)
                    .budget("bound", bound)
                    .budget("splits", (1 << (n - 1)) as u64 - 1)
                    .witness(split_witness(mask, meet));
            }
        }
        CheckReport::new(Verdict::Fail)
            .budget("bound", bound)
            .budget("splits", (1 << (n - 1)) as u64 - 1)
            .witness(Witness::note(format!(
                "exhaustive over all {} bipartitions, none meets in at most {bound} points",
                (1u64 << (n - 1)) - 1
            )))
    } else {
        for cut in 1..n {
            let mask = (1u64 << cut) - 1;
            let left = union_of(mask);
            let right = union_of(((1u64 << n) - 1) & !mask);
            let meet = left.intersection(&right).count();
            if meet as u64 <= bound {
                return CheckReport::new(Verdict::Pass)
                    .budget("bound", bound)
                    .witness(split_witness(mask, meet));
            }
        }
        CheckReport::new(Verdict::Inconclusive)
            .budget("bound", bound)
            .witness(Witness::note(format!(
                "family larger than the exhaustive limit {exhaustive_limit}; {} prefix splits tried",
                n - 1
            )))
    }
}
