//! Exhaustive k-wise linkage bounds and prefix-class splits for families
//! on the level-set code universe.

use crate::checkers::combinations;
use crate::encode::{binomial, BitStr};
use crate::error::Error;
use crate::report::{CheckReport, Verdict, Witness};
use crate::Result;
use std::collections::{BTreeMap, BTreeSet};

/// Pass iff every k-subset meets in at least `t_inf` points and every
/// (k+1)-subset meets in at most `t_fin` points. Fully exhaustive.
pub fn linkage_check(
    members: &[BTreeSet<u64>],
    k: usize,
    t_inf: u64,
    t_fin: u64,
) -> Result<CheckReport> {
    if k == 0 {
        return Err(Error::invalid("linkage", "k must be positive"));
    }
    for (i, a) in members.iter().enumerate() {
        for (j, b) in members.iter().enumerate().skip(i + 1) {
            if a == b {
                return Err(Error::DuplicateMember {
                    first: i,
                    second: j,
                });
            }
        }
    }
    if members.len() < k + 1 {
        return Err(Error::TooFewMembers {
            size: k + 1,
            got: members.len(),
        });
    }
    let meet_size = |subset: &[usize]| -> u64 {
        let mut iter = subset.iter();
        let first = *iter.next().expect("nonempty subset");
        let mut meet = members[first].clone();
        for &i in iter {
            meet = meet.intersection(&members[i]).copied().collect();
        }
        meet.len() as u64
    };
    for subset in combinations(members.len(), k) {
        let size = meet_size(&subset);
        if size < t_inf {
            return Ok(CheckReport::new(Verdict::Fail)
                .budget("k", k as u64)
                .budget("t_inf", t_inf)
                .witness(Witness::indices(subset.iter().map(|&i| i as u64)))
                .witness(Witness::note(format!(
                    "{k}-wise intersection has only {size} points"
                ))));
        }
    }
    for subset in combinations(members.len(), k + 1) {
        let size = meet_size(&subset);
        if size > t_fin {
            return Ok(CheckReport::new(Verdict::Fail)
                .budget("k", k as u64)
                .budget("t_fin", t_fin)
                .witness(Witness::indices(subset.iter().map(|&i| i as u64)))
                .witness(Witness::note(format!(
                    "{}-wise intersection has {size} points",
                    k + 1
                ))));
        }
    }
    Ok(CheckReport::new(Verdict::Pass)
        .budget("k", k as u64)
        .budget("t_inf", t_inf)
        .budget("t_fin", t_fin)
        .witness(Witness::note(format!(
            "exhaustive over {} {k}-subsets and {} {}-subsets",
            binomial(members.len() as u64, k as u64),
            binomial(members.len() as u64, k as u64 + 1),
            k + 1
        ))))
}

/// A certified prefix-class split of a code family.
#[derive(Clone, Debug)]
pub struct AccumulationSplit {
    /// First level at which k+1 distinct source prefixes exist.
    pub level: u32,
    /// The chosen class prefixes, largest class first.
    pub prefixes: Vec<BitStr>,
    /// Member positions per class, parallel to `prefixes`.
    pub classes: Vec<Vec<usize>>,
    /// The exact meet of the class unions.
    pub meet: BTreeSet<u64>,
    /// The certified bound on the meet size.
    pub bound: u64,
}

/// Split a family of code sets into k+1 prefix classes at the first level
/// with that many distinct source prefixes, and certify that the meet of
/// the class unions is bounded by the level-set count below that level.
///
/// Classes are the k+1 most populated prefix classes, ties broken toward
/// the lexicographically smaller prefix.
pub fn accumulation_split(
    members: &[(BitStr, BTreeSet<u64>)],
    k: usize,
) -> Result<AccumulationSplit> {
    let depth = members.iter().map(|(f, _)| f.len).min().unwrap_or(0);
    let wanted = k + 1;
    let mut chosen: Option<(u32, Vec<BitStr>)> = None;
    for level in 0..=depth {
        let mut classes: BTreeMap<BitStr, usize> = BTreeMap::new();
        for (f, _) in members {
            *classes.entry(f.prefix(level)).or_insert(0) += 1;
        }
        if classes.len() >= wanted {
            let mut ranked: Vec<(BitStr, usize)> = classes.into_iter().collect();
            // most populated first; BitStr order settles ties
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            chosen = Some((
                level,
                ranked.into_iter().take(wanted).map(|(p, _)| p).collect(),
            ));
            break;
        }
    }
    let Some((level, prefixes)) = chosen else {
        return Err(Error::NoPrefixSplit { wanted, depth });
    };
    let classes: Vec<Vec<usize>> = prefixes
        .iter()
        .map(|p| {
            members
                .iter()
                .enumerate()
                .filter(|(_, (f, _))| f.prefix(level) == *p)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut meet: Option<BTreeSet<u64>> = None;
    for class in &classes {
        let mut union = BTreeSet::new();
        for &i in class {
            union.extend(members[i].1.iter().copied());
        }
        meet = Some(match meet {
            None => union,
            Some(m) => m.intersection(&union).copied().collect(),
        });
    }
    let meet = meet.unwrap_or_default();
    let bound: u64 = (0..level)
        .map(|j| {
            let strings = 1u64 << j;
            if strings >= k as u64 {
                binomial(strings, k as u64)
            } else {
                0
            }
        })
        .sum();
    if meet.len() as u64 > bound {
        return Err(Error::invalid(
            "accumulation split",
            format!(
                "meet has {} points, above the certified bound {bound}",
                meet.len()
            ),
        ));
    }
    Ok(AccumulationSplit {
        level,
        prefixes,
        classes,
        meet,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::hajnal_member;

    #[test]
    fn linkage_degenerate_k1_is_an_ad_check() {
        let members: Vec<BTreeSet<u64>> = vec![
            [0, 1, 2, 3].into(),
            [3, 4, 5, 6].into(),
            [6, 7, 8, 9].into(),
        ];
        // every member has >= 4 points, every pair meets in <= 1
        let r = linkage_check(&members, 1, 4, 1).unwrap();
        assert!(r.passed());
        let r = linkage_check(&members, 1, 5, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn linkage_rejects_duplicates_and_small_lists() {
        let members: Vec<BTreeSet<u64>> = vec![[0, 1].into(), [0, 1].into()];
        assert!(matches!(
            linkage_check(&members, 1, 0, 5),
            Err(Error::DuplicateMember { .. })
        ));
        let members: Vec<BTreeSet<u64>> = vec![[0].into(), [1].into()];
        assert!(matches!(
            linkage_check(&members, 2, 0, 5),
            Err(Error::TooFewMembers { .. })
        ));
    }

    #[test]
    fn pairwise_linked_triple_bounded() {
        // three depth-12 members from strings splitting at low levels
        let d = 12;
        let strings = [
            BitStr::new(d, 0b000000000000),
            BitStr::new(d, 0b010000000000),
            BitStr::new(d, 0b100000000000),
        ];
        let members: Vec<BTreeSet<u64>> = strings
            .iter()
            .map(|f| hajnal_member(2, f, d).unwrap())
            .collect();
        // max pairwise splitting level is 1 (00 vs 01), so pairwise meets
        // have at least d - 1 >= 10 points
        let r = linkage_check(&members, 2, (d - 1) as u64, 10).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn accumulation_split_three_prefix_classes() {
        let d = 6;
        let strings = [
            BitStr::parse("000000").unwrap(),
            BitStr::parse("010000").unwrap(),
            BitStr::parse("100000").unwrap(),
        ];
        let members: Vec<(BitStr, BTreeSet<u64>)> = strings
            .iter()
            .map(|f| (*f, hajnal_member(2, f, d).unwrap()))
            .collect();
        let split = accumulation_split(&members, 2).unwrap();
        assert_eq!(split.level, 2);
        // the meet sits inside the single level-1 code
        assert_eq!(split.bound, 1);
        assert!(split.meet.len() <= 1);
    }

    #[test]
    fn accumulation_split_many_random_strings() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let mut strings: BTreeSet<BitStr> = BTreeSet::new();
        while strings.len() < 50 {
            strings.insert(BitStr::new(8, rng.gen::<u64>() & 0xff));
        }
        let members: Vec<(BitStr, BTreeSet<u64>)> = strings
            .iter()
            .map(|&f| (f, hajnal_member(2, &f, 8).unwrap()))
            .collect();
        let split = accumulation_split(&members, 2).unwrap();
        // 50 distinct length-8 strings force three prefix classes early
        assert!(split.level <= 6, "split level {}", split.level);
        assert!(split.meet.len() as u64 <= split.bound);
        for class in &split.classes {
            assert!(!class.is_empty());
        }
    }

    #[test]
    fn accumulation_split_identical_strings_error() {
        let f = BitStr::parse("0101").unwrap();
        let members = vec![(f, BTreeSet::from([0])), (f, BTreeSet::from([1]))];
        assert!(matches!(
            accumulation_split(&members, 1),
            Err(Error::NoPrefixSplit { .. })
        ));
    }
}
