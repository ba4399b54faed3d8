//! Finite forest orders over node sets encoded into the naturals.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A finite tree (forest) order. Trees grow upward: roots are minimal.
///
/// Every node maps to its parent, or to `None` for roots. The strict order
/// `a < b` holds when `a` is a proper ancestor of `b`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeOrder {
    pub parent: BTreeMap<u64, Option<u64>>,
}

impl TreeOrder {
    pub fn new() -> Self {
        TreeOrder::default()
    }

    /// Build from `(node, parent)` pairs, checking acyclicity and that
    /// every parent chain reaches a root.
    pub fn from_parents(pairs: impl IntoIterator<Item = (u64, Option<u64>)>) -> Result<Self> {
        let parent: BTreeMap<u64, Option<u64>> = pairs.into_iter().collect();
        for (&node, &p) in &parent {
            if let Some(p) = p {
                if !parent.contains_key(&p) {
                    return Err(Error::invalid(
                        "tree order",
                        format!("parent {p} of node {node} is not a node"),
                    ));
                }
            }
        }
        let tree = TreeOrder { parent };
        for &node in tree.parent.keys() {
            // walking up must terminate within |nodes| steps
            let mut cur = node;
            let mut steps = 0usize;
            while let Some(Some(p)) = tree.parent.get(&cur) {
                cur = *p;
                steps += 1;
                if steps > tree.parent.len() {
                    return Err(Error::invalid(
                        "tree order",
                        format!("parent chain from {node} does not reach a root"),
                    ));
                }
            }
        }
        Ok(tree)
    }

    pub fn nodes(&self) -> BTreeSet<u64> {
        self.parent.keys().copied().collect()
    }

    pub fn contains(&self, node: u64) -> bool {
        self.parent.contains_key(&node)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn insert_root(&mut self, node: u64) {
        self.parent.insert(node, None);
    }

    pub fn insert_child(&mut self, node: u64, parent: u64) -> Result<()> {
        if !self.contains(parent) {
            return Err(Error::invalid(
                "tree order",
                format!("parent {parent} is not a node"),
            ));
        }
        self.parent.insert(node, Some(parent));
        Ok(())
    }

    pub fn children(&self, node: u64) -> Vec<u64> {
        self.parent
            .iter()
            .filter_map(|(&n, &p)| (p == Some(node)).then_some(n))
            .collect()
    }

    pub fn is_leaf(&self, node: u64) -> bool {
        self.contains(node) && self.children(node).is_empty()
    }

    pub fn roots(&self) -> Vec<u64> {
        self.parent
            .iter()
            .filter_map(|(&n, &p)| p.is_none().then_some(n))
            .collect()
    }

    /// The node together with all its ancestors, root first.
    pub fn path_from_root(&self, node: u64) -> Vec<u64> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(&Some(p)) = self.parent.get(&cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Strict order: `a` is a proper ancestor of `b`.
    pub fn below(&self, a: u64, b: u64) -> bool {
        if a == b {
            return false;
        }
        let mut cur = b;
        while let Some(&Some(p)) = self.parent.get(&cur) {
            if p == a {
                return true;
            }
            cur = p;
        }
        false
    }

    pub fn comparable(&self, a: u64, b: u64) -> bool {
        a == b || self.below(a, b) || self.below(b, a)
    }

    /// All branches: maximal chains, each returned as a root-to-leaf path.
    pub fn branches(&self) -> Vec<Vec<u64>> {
        let mut out: Vec<Vec<u64>> = self
            .parent
            .keys()
            .filter(|&&n| self.is_leaf(n))
            .map(|&leaf| self.path_from_root(leaf))
            .collect();
        out.sort();
        out
    }

    /// The branch through a leaf, as a node set.
    pub fn branch_of_leaf(&self, leaf: u64) -> Result<BTreeSet<u64>> {
        if !self.contains(leaf) {
            return Err(Error::invalid(
                "tree order",
                format!("{leaf} is not a node"),
            ));
        }
        if !self.is_leaf(leaf) {
            return Err(Error::invalid(
                "tree order",
                format!("{leaf} has children, its path is not maximal"),
            ));
        }
        Ok(self.path_from_root(leaf).into_iter().collect())
    }

    /// Relabel every node through `map`; the map must be injective on nodes.
    pub fn relabel(&self, map: &BTreeMap<u64, u64>) -> Result<TreeOrder> {
        let mut pairs = Vec::new();
        for (&n, &p) in &self.parent {
            let n2 = *map
                .get(&n)
                .ok_or_else(|| Error::invalid("relabel", format!("no image for node {n}")))?;
            let p2 =
                match p {
                    Some(p) => Some(*map.get(&p).ok_or_else(|| {
                        Error::invalid("relabel", format!("no image for node {p}"))
                    })?),
                    None => None,
                };
            pairs.push((n2, p2));
        }
        if pairs.len() != self.parent.len() {
            return Err(Error::invalid("relabel", "map is not injective"));
        }
        TreeOrder::from_parents(pairs)
    }

    /// The complete binary tree of the given depth on nodes `1..2^(depth+1)`,
    /// node `n` having children `2n` and `2n+1`.
    pub fn binary(depth: u32) -> TreeOrder {
        let mut tree = TreeOrder::new();
        tree.insert_root(1);
        for level in 1..=depth {
            for n in (1u64 << level)..(1u64 << (level + 1)) {
                tree.insert_child(n, n / 2).unwrap();
            }
        }
        tree
    }
}
