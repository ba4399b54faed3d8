//! Finite partial functions on the naturals and their frequency skeletons.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A finite partial function from naturals to naturals.
///
/// Coordinates all lie below `horizon`; the map structure keeps them
/// distinct. The graph view (`points`) treats the function as a set of
/// `(coordinate, value)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFn {
    pub entries: BTreeMap<u64, u64>,
    pub horizon: u64,
}

impl PartialFn {
    pub fn new(horizon: u64) -> Self {
        PartialFn {
            entries: BTreeMap::new(),
            horizon,
        }
    }

    pub fn from_entries(
        horizon: u64,
        entries: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<Self> {
        let mut f = PartialFn::new(horizon);
        for (i, v) in entries {
            f.insert(i, v)?;
        }
        Ok(f)
    }

    /// Total function `i -> value(i)` on `[0, horizon)`.
    pub fn total(horizon: u64, value: impl Fn(u64) -> u64) -> Self {
        PartialFn {
            entries: (0..horizon).map(|i| (i, value(i))).collect(),
            horizon,
        }
    }

    pub fn insert(&mut self, coord: u64, value: u64) -> Result<()> {
        if coord >= self.horizon {
            return Err(Error::CoordinateAboveHorizon {
                coord,
                horizon: self.horizon,
            });
        }
        self.entries.insert(coord, value);
        Ok(())
    }

    pub fn get(&self, coord: u64) -> Option<u64> {
        self.entries.get(&coord).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_total_below(&self, horizon: u64) -> bool {
        (0..horizon).all(|i| self.entries.contains_key(&i))
    }

    /// Graph points `(i, f(i))`.
    pub fn points(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    /// Coordinates where both functions are defined and agree.
    ///
    /// For function members this is the graph intersection, returned as
    /// `(coordinate, common value)` pairs.
    pub fn agreement(&self, other: &PartialFn) -> Vec<(u64, u64)> {
        self.entries
            .iter()
            .filter_map(|(&i, &v)| (other.get(i) == Some(v)).then_some((i, v)))
            .collect()
    }

    /// True when the two graphs share no point.
    pub fn disjoint_from(&self, other: &PartialFn) -> bool {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.entries.iter().all(|(&i, &v)| big.get(i) != Some(v))
    }

    /// Restriction to coordinates in `[lo, hi]`.
    pub fn restrict(&self, lo: u64, hi: u64) -> PartialFn {
        PartialFn {
            entries: self.entries.range(lo..=hi).map(|(&i, &v)| (i, v)).collect(),
            horizon: self.horizon,
        }
    }
}

/// Value of an [`ExtendedFn`] at a coordinate: a natural, or the top marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtValue {
    Num(u64),
    Top,
}

impl ExtValue {
    pub fn num(self) -> Option<u64> {
        match self {
            ExtValue::Num(v) => Some(v),
            ExtValue::Top => None,
        }
    }
}

/// A total function on `[0, horizon)` into the naturals extended by a top
/// point. The top marker is the value every finite partial function avoids
/// for free, so coordinates mapped to it impose no avoidance constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedFn {
    pub values: Vec<ExtValue>,
    pub horizon: u64,
}

impl ExtendedFn {
    pub fn all_top(horizon: u64) -> Self {
        ExtendedFn {
            values: vec![ExtValue::Top; horizon as usize],
            horizon,
        }
    }

    pub fn get(&self, coord: u64) -> ExtValue {
        self.values
            .get(coord as usize)
            .copied()
            .unwrap_or(ExtValue::Top)
    }
}

/// Frequency skeleton of a sample of functions.
///
/// At each coordinate below `horizon`, the result is the most frequent
/// value if its count reaches `tau` (ties broken by the smallest value),
/// and the top marker otherwise. Every sample member must be defined on
/// all of `[0, horizon)`.
pub fn tight_function(sample: &[PartialFn], horizon: u64, tau: u64) -> Result<ExtendedFn> {
    if tau < 2 {
        return Err(Error::BadTau { tau });
    }
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    for (idx, g) in sample.iter().enumerate() {
        if !g.is_total_below(horizon) {
            return Err(Error::MemberNotTotal {
                index: idx as u64,
                horizon,
            });
        }
    }
    let mut values = Vec::with_capacity(horizon as usize);
    for i in 0..horizon {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for g in sample {
            *counts.entry(g.get(i).unwrap()).or_insert(0) += 1;
        }
        // BTreeMap iteration is ascending, so the first maximum is the
        // smallest value among tied maxima.
        let best = counts
            .iter()
            .max_by_key(|&(&v, &c)| (c, std::cmp::Reverse(v)))
            .map(|(&v, &c)| (v, c));
        values.push(match best {
            Some((v, c)) if c >= tau => ExtValue::Num(v),
            _ => ExtValue::Top,
        });
    }
    Ok(ExtendedFn { values, horizon })
}

/// Exact count of sample members whose graph is disjoint from `sigma`.
pub fn free_count(sample: &[PartialFn], sigma: &PartialFn) -> usize {
    sample.iter().filter(|g| g.disjoint_from(sigma)).count()
}

/// Number of sample members taking `value` at `coord`.
pub fn column_count(sample: &[PartialFn], coord: u64, value: u64) -> usize {
    sample
        .iter()
        .filter(|g| g.get(coord) == Some(value))
        .count()
}

/// Graph of a function as an encoded point set on the shared universe.
pub fn graph_points(f: &PartialFn) -> BTreeSet<u64> {
    f.points()
        .map(|(i, v)| crate::encode::encode_pair(i, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_const(n: usize, horizon: u64, value: impl Fn(usize, u64) -> u64) -> Vec<PartialFn> {
        (0..n)
            .map(|k| PartialFn::total(horizon, |i| value(k, i)))
            .collect()
    }

    #[test]
    fn tight_forced_by_frequency() {
        // all members share g(0) = 7, tau = 2
        let sample = sample_const(4, 3, |k, i| if i == 0 { 7 } else { k as u64 + 10 * i });
        let s = tight_function(&sample, 3, 2).unwrap();
        assert_eq!(s.get(0), ExtValue::Num(7));
    }

    #[test]
    fn tight_top_when_no_repeat() {
        // g_k(1) = k, all distinct
        let sample = sample_const(5, 2, |k, i| if i == 1 { k as u64 } else { 0 });
        let s = tight_function(&sample, 2, 2).unwrap();
        assert_eq!(s.get(1), ExtValue::Top);
    }

    #[test]
    fn tight_tie_breaks_to_smallest() {
        // column 0 counts: value 5 three times, value 9 three times
        let sample = sample_const(6, 1, |k, _| if k < 3 { 5 } else { 9 });
        let s = tight_function(&sample, 1, 3).unwrap();
        assert_eq!(s.get(0), ExtValue::Num(5));
    }

    #[test]
    fn tight_rejects_bad_inputs() {
        let sample = sample_const(2, 2, |k, _| k as u64);
        assert!(matches!(
            tight_function(&sample, 2, 1),
            Err(Error::BadTau { .. })
        ));
        assert!(matches!(tight_function(&[], 2, 2), Err(Error::EmptySample)));
        let partial = PartialFn::from_entries(4, [(0, 1)]).unwrap();
        assert!(matches!(
            tight_function(&[partial], 4, 2),
            Err(Error::MemberNotTotal { .. })
        ));
    }

    #[test]
    fn free_count_empty_sigma() {
        let sample = sample_const(7, 3, |k, i| k as u64 + i);
        let sigma = PartialFn::new(3);
        assert_eq!(free_count(&sample, &sigma), 7);
    }

    #[test]
    fn free_count_single_hit() {
        // g_k(0) = k for k < 10, sigma = {(0, 5)}: exactly g_5 hits
        let sample = sample_const(10, 1, |k, _| k as u64);
        let sigma = PartialFn::from_entries(1, [(0, 5)]).unwrap();
        assert_eq!(free_count(&sample, &sigma), 9);
    }

    #[test]
    fn free_count_brute_force_oracle() {
        // sigma avoiding the tight function at rare values: direct enumeration
        let sample = sample_const(8, 4, |k, i| (k as u64 * (i + 1)) % 5);
        let s = tight_function(&sample, 4, 8).unwrap();
        let mut sigma = PartialFn::new(4);
        for i in 0..4 {
            let v = (0..)
                .find(|&v| ExtValue::Num(v) != s.get(i) && column_count(&sample, i, v) < 8)
                .unwrap();
            sigma.insert(i, v).unwrap();
        }
        let direct = sample.iter().filter(|g| g.disjoint_from(&sigma)).count();
        assert_eq!(free_count(&sample, &sigma), direct);
    }

    #[test]
    fn agreement_and_disjoint() {
        let f = PartialFn::total(10, |i| i);
        let g = PartialFn::total(10, |i| i + 1);
        assert!(f.disjoint_from(&g));
        assert_eq!(f.agreement(&f).len(), 10);
    }
}
