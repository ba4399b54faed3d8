//! Ordered snapshots of set and function families on a shared universe.

use crate::encode::encode_pair;
use crate::error::Error;
use crate::partial_fn::PartialFn;
use crate::plane::PlaneSet;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// What the members of a snapshot are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemberKind {
    #[serde(rename = "set")]
    Sets,
    #[serde(rename = "fn")]
    Functions,
}

/// One family member: a plain set of naturals or a partial function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Member {
    Set(BTreeSet<u64>),
    Fn(PartialFn),
}

impl Member {
    pub fn kind(&self) -> MemberKind {
        match self {
            Member::Set(_) => MemberKind::Sets,
            Member::Fn(_) => MemberKind::Functions,
        }
    }

    /// The member as a point set on the shared universe.
    ///
    /// Sets are themselves; function graphs are moved onto the universe
    /// through the pair encoding, so mixed unions and intersections are
    /// always plain set operations.
    pub fn point_set(&self) -> BTreeSet<u64> {
        match self {
            Member::Set(s) => s.clone(),
            Member::Fn(f) => f.points().map(|(i, v)| encode_pair(i, v)).collect(),
        }
    }

    pub fn as_fn(&self) -> Option<&PartialFn> {
        match self {
            Member::Fn(f) => Some(f),
            Member::Set(_) => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<u64>> {
        match self {
            Member::Set(s) => Some(s),
            Member::Fn(_) => None,
        }
    }

    pub fn max_point(&self) -> Option<u64> {
        self.point_set().into_iter().next_back()
    }
}

/// Exact intersection of two members, as point sets on the shared universe.
pub fn intersect(a: &Member, b: &Member) -> BTreeSet<u64> {
    match (a, b) {
        (Member::Fn(f), Member::Fn(g)) => f
            .agreement(g)
            .into_iter()
            .map(|(i, v)| encode_pair(i, v))
            .collect(),
        _ => a
            .point_set()
            .intersection(&b.point_set())
            .copied()
            .collect(),
    }
}

/// Union of selected members: a plane set for function families, a plain
/// set otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyUnion {
    Set(BTreeSet<u64>),
    Plane(PlaneSet),
}

impl FamilyUnion {
    /// The union as a point set on the shared universe.
    pub fn point_set(&self) -> BTreeSet<u64> {
        match self {
            FamilyUnion::Set(s) => s.clone(),
            FamilyUnion::Plane(p) => p.points.iter().map(|&(c, v)| encode_pair(c, v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FamilyUnion::Set(s) => s.len(),
            FamilyUnion::Plane(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An ordered finite family with ordinal-style indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySnapshot {
    pub kind: MemberKind,
    pub universe_horizon: u64,
    pub members: Vec<(u64, Member)>,
}

impl FamilySnapshot {
    pub fn new(kind: MemberKind, universe_horizon: u64) -> Self {
        FamilySnapshot {
            kind,
            universe_horizon,
            members: Vec::new(),
        }
    }

    /// Append a member under the next index; enforces the snapshot invariants.
    pub fn push(&mut self, index: u64, member: Member) -> Result<()> {
        if member.kind() != self.kind {
            return Err(Error::invalid(
                "family snapshot",
                "member kind does not match the family kind",
            ));
        }
        if let Some((last, _)) = self.members.last() {
            if *last >= index {
                return Err(Error::invalid(
                    "family snapshot",
                    format!("index {index} does not exceed the previous index {last}"),
                ));
            }
        }
        let fits = match &member {
            Member::Set(s) => s.iter().all(|&x| x < self.universe_horizon),
            Member::Fn(f) => f.entries.keys().all(|&i| i < self.universe_horizon),
        };
        if !fits {
            return Err(Error::invalid(
                "family snapshot",
                format!("member {index} does not fit under the universe horizon"),
            ));
        }
        self.members.push((index, member));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn indices(&self) -> Vec<u64> {
        self.members.iter().map(|&(i, _)| i).collect()
    }

    pub fn get(&self, index: u64) -> Result<&Member> {
        self.members
            .iter()
            .find(|&&(i, _)| i == index)
            .map(|(_, m)| m)
            .ok_or(Error::UnknownIndex { index })
    }

    /// Members with an index strictly below `index`, in order.
    pub fn before(&self, index: u64) -> Vec<(u64, &Member)> {
        self.members
            .iter()
            .filter(|&&(i, _)| i < index)
            .map(|(i, m)| (*i, m))
            .collect()
    }

    /// Exact union of the selected members.
    pub fn union_family(&self, picks: &BTreeSet<u64>) -> Result<FamilyUnion> {
        for &i in picks {
            self.get(i)?;
        }
        match self.kind {
            MemberKind::Sets => {
                let mut out = BTreeSet::new();
                for &i in picks {
                    out.extend(self.get(i)?.point_set());
                }
                Ok(FamilyUnion::Set(out))
            }
            MemberKind::Functions => {
                let mut plane = PlaneSet::new(self.universe_horizon);
                for &i in picks {
                    let f = self.get(i)?.as_fn().expect("kind checked on push");
                    for (c, v) in f.points() {
                        plane.insert(c, v)?;
                    }
                }
                Ok(FamilyUnion::Plane(plane))
            }
        }
    }

    /// Union of the selected members as a point set on the shared universe.
    pub fn union_points(&self, picks: &BTreeSet<u64>) -> Result<BTreeSet<u64>> {
        Ok(self.union_family(picks)?.point_set())
    }

    /// View every member as a point set, keeping the order.
    pub fn point_sets(&self) -> Vec<(u64, BTreeSet<u64>)> {
        self.members
            .iter()
            .map(|(i, m)| (*i, m.point_set()))
            .collect()
    }

    /// The same family with every member replaced by its point-set view.
    pub fn as_set_family(&self) -> FamilySnapshot {
        let mut horizon = self.universe_horizon;
        let sets = self.point_sets();
        for (_, s) in &sets {
            if let Some(&m) = s.iter().next_back() {
                horizon = horizon.max(m + 1);
            }
        }
        FamilySnapshot {
            kind: MemberKind::Sets,
            universe_horizon: horizon,
            members: sets.into_iter().map(|(i, s)| (i, Member::Set(s))).collect(),
        }
    }
}

/// A partial assignment of guess sets: each index maps to a nonempty set
/// of strictly smaller indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetAssignment {
    pub assign: BTreeMap<u64, BTreeSet<u64>>,
}

impl SubsetAssignment {
    pub fn new() -> Self {
        SubsetAssignment::default()
    }

    pub fn insert(&mut self, index: u64, set: BTreeSet<u64>) -> Result<()> {
        if set.is_empty() {
            return Err(Error::invalid("subset assignment", "assigned set is empty"));
        }
        if set.iter().any(|&x| x >= index) {
            return Err(Error::invalid(
                "subset assignment",
                format!("assigned set for {index} contains an index not below it"),
            ));
        }
        self.assign.insert(index, set);
        Ok(())
    }

    pub fn get(&self, index: u64) -> Option<&BTreeSet<u64>> {
        self.assign.get(&index)
    }

    /// The prefix pattern: every index at least 1 guesses all earlier ones.
    pub fn prefixes(count: u64) -> Self {
        let mut a = SubsetAssignment::new();
        for beta in 1..count {
            a.insert(beta, (0..beta).collect()).unwrap();
        }
        a
    }
}
