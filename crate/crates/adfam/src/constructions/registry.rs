//! A registry of plane sets that must stay fat at recorded budgets.
//!
//! Builders register the union sets and meet sets they rely on, together
//! with the width/from budgets those sets were verified at. A set entering
//! the registry is checked immediately; `reverify` re-checks everything
//! from scratch. Cascade entries produced by column restriction carry
//! their lineage so a violation reports the whole chain.

use crate::error::Error;
use crate::plane::PlaneSet;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FatEntry {
    pub set: PlaneSet,
    /// Fiber width this entry is budgeted to reach.
    pub width: u64,
    /// Column scan starts here.
    pub from: u64,
    /// Number of restriction steps this entry is away from a base set.
    pub depth: u32,
    pub provenance: String,
    /// Provenance chain from the base set down to this entry.
    pub lineage: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FatRegistry {
    pub entries: Vec<FatEntry>,
}

impl FatRegistry {
    pub fn new() -> Self {
        FatRegistry::default()
    }

    /// Insert after checking the budget; a failure names the full cascade.
    pub fn insert(&mut self, entry: FatEntry) -> Result<usize> {
        if entry.set.is_fat(entry.width, entry.from).is_none() {
            return Err(Error::RegistryViolation {
                provenance: entry.provenance.clone(),
                width: entry.width,
                from: entry.from,
                cascade: entry.lineage.clone(),
            });
        }
        self.entries.push(entry);
        Ok(self.entries.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fiber requirement cap for the fat-list slot `k`: the budgeted width
    /// of the matching entry, less one. Slots cycle when the registry is
    /// shorter than the fat list.
    pub fn width_cap(&self, slot: usize) -> Option<u64> {
        if self.entries.is_empty() {
            return None;
        }
        let e = &self.entries[slot % self.entries.len()];
        Some(e.width.saturating_sub(1))
    }

    /// Re-check every entry against its recorded budgets, from scratch.
    pub fn reverify(&self) -> Result<()> {
        for entry in &self.entries {
            if entry.set.is_fat(entry.width, entry.from).is_none() {
                return Err(Error::RegistryViolation {
                    provenance: entry.provenance.clone(),
                    width: entry.width,
                    from: entry.from,
                    cascade: entry.lineage.clone(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_checks_the_budget() {
        let mut reg = FatRegistry::new();
        let thin = PlaneSet::from_points(10, (0..10).map(|c| (c, 0))).unwrap();
        let err = reg.insert(FatEntry {
            set: thin.clone(),
            width: 2,
            from: 0,
            depth: 0,
            provenance: "thin".into(),
            lineage: vec!["thin".into()],
        });
        assert!(matches!(err, Err(Error::RegistryViolation { .. })));
        reg.insert(FatEntry {
            set: thin,
            width: 1,
            from: 0,
            depth: 0,
            provenance: "thin".into(),
            lineage: vec!["thin".into()],
        })
        .unwrap();
        reg.reverify().unwrap();
        assert_eq!(reg.width_cap(0), Some(0));
        assert_eq!(reg.width_cap(5), Some(0));
    }
}
