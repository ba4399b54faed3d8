//! Finite plane sets: subsets of a `[0, horizon) x naturals` grid.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A finite set of `(column, value)` points with all columns below `horizon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneSet {
    pub points: BTreeSet<(u64, u64)>,
    pub horizon: u64,
}

impl PlaneSet {
    pub fn new(horizon: u64) -> Self {
        PlaneSet {
            points: BTreeSet::new(),
            horizon,
        }
    }

    pub fn from_points(horizon: u64, points: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut set = PlaneSet::new(horizon);
        for (c, v) in points {
            set.insert(c, v)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, column: u64, value: u64) -> Result<()> {
        if column >= self.horizon {
            return Err(Error::ColumnAboveHorizon {
                column,
                horizon: self.horizon,
            });
        }
        self.points.insert((column, value));
        Ok(())
    }

    pub fn contains(&self, column: u64, value: u64) -> bool {
        self.points.contains(&(column, value))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Columns that carry at least one point.
    pub fn columns(&self) -> BTreeSet<u64> {
        self.points.iter().map(|&(c, _)| c).collect()
    }

    /// The fiber over one column: `{ v : (n, v) in F }`.
    pub fn fiber(&self, n: u64) -> BTreeSet<u64> {
        self.points
            .range((n, 0)..=(n, u64::MAX))
            .map(|&(_, v)| v)
            .collect()
    }

    /// Number of points on column `n`.
    pub fn fiber_size(&self, n: u64) -> u64 {
        self.points.range((n, 0)..=(n, u64::MAX)).count() as u64
    }

    /// Column fiber with the horizon enforced.
    pub fn pi_col(&self, n: u64) -> Result<BTreeSet<u64>> {
        if n >= self.horizon {
            return Err(Error::ColumnAboveHorizon {
                column: n,
                horizon: self.horizon,
            });
        }
        Ok(self.fiber(n))
    }

    /// Restriction to the columns in `cols`; the horizon is preserved.
    pub fn pi_restrict(&self, cols: &BTreeSet<u64>) -> PlaneSet {
        PlaneSet {
            points: self
                .points
                .iter()
                .filter(|&&(c, _)| cols.contains(&c))
                .copied()
                .collect(),
            horizon: self.horizon,
        }
    }

    /// Finite fatness probe: the first column in `[from, horizon)` whose
    /// fiber has at least `width` points, if any.
    ///
    /// `Some(column)` doubles as the witness; `None` means no column in the
    /// scanned range is that wide.
    pub fn is_fat(&self, width: u64, from: u64) -> Option<u64> {
        let mut col = None;
        let mut count = 0u64;
        for &(c, _) in self.points.iter() {
            if c < from {
                continue;
            }
            if Some(c) != col {
                col = Some(c);
                count = 0;
            }
            count += 1;
            if count >= width {
                return col;
            }
        }
        if width == 0 {
            Some(from)
        } else {
            None
        }
    }

    pub fn union_with(&self, other: &PlaneSet) -> PlaneSet {
        PlaneSet {
            points: self.points.union(&other.points).copied().collect(),
            horizon: self.horizon.max(other.horizon),
        }
    }

    pub fn intersect_with(&self, other: &PlaneSet) -> PlaneSet {
        PlaneSet {
            points: self.points.intersection(&other.points).copied().collect(),
            horizon: self.horizon.max(other.horizon),
        }
    }
}
