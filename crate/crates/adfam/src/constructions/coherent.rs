//! Coherent set sequences on finite trees: containment along the order,
//! exact disjointness across incomparable nodes.

use crate::error::Error;
use crate::tree::TreeOrder;
use crate::Result;
use std::collections::{BTreeMap, BTreeSet};

/// Assign to every tree node a subset of `[0, horizon)` so that a node's
/// set contains each child's set, sibling sets are disjoint, and sets at
/// incomparable nodes are disjoint — all exactly, with zero exceptions.
///
/// Roots split the ground segment by residue of rank, and every node
/// splits its own set the same way among its children, so each branch
/// thins out evenly. Fails when some node would receive no elements.
pub fn coherent_sequence(tree: &TreeOrder, horizon: u64) -> Result<BTreeMap<u64, BTreeSet<u64>>> {
    let mut sets: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    let roots = tree.roots();
    if tree.is_empty() {
        return Ok(sets);
    }
    let ground: Vec<u64> = (0..horizon).collect();
    split_among(&ground, &roots, &mut sets, tree)?;
    Ok(sets)
}

fn split_among(
    pool: &[u64],
    nodes: &[u64],
    sets: &mut BTreeMap<u64, BTreeSet<u64>>,
    tree: &TreeOrder,
) -> Result<()> {
    let n = nodes.len();
    for (slot, &node) in nodes.iter().enumerate() {
        let share: Vec<u64> = pool
            .iter()
            .enumerate()
            .filter(|(rank, _)| rank % n == slot)
            .map(|(_, &v)| v)
            .collect();
        if share.is_empty() {
            return Err(Error::HorizonExhausted {
                horizon: pool.len() as u64,
                need: format!("node {node} would receive an empty set"),
            });
        }
        sets.insert(node, share.iter().copied().collect());
        let children = tree.children(node);
        if !children.is_empty() {
            split_among(&share, &children, sets, tree)?;
        }
    }
    Ok(())
}

/// Check the comparability dichotomy for every node pair: containment along
/// the order, exact disjointness across incomparable nodes.
pub fn coherent_relations_hold(
    tree: &TreeOrder,
    sets: &BTreeMap<u64, BTreeSet<u64>>,
) -> std::result::Result<(), String> {
    let nodes: Vec<u64> = tree.nodes().into_iter().collect();
    for (i, &s) in nodes.iter().enumerate() {
        for &t in &nodes[i + 1..] {
            let (cs, ct) = (&sets[&s], &sets[&t]);
            if tree.below(s, t) {
                if !ct.is_subset(cs) {
                    return Err(format!("{s} < {t} but the set at {t} is not contained"));
                }
            } else if tree.below(t, s) {
                if !cs.is_subset(ct) {
                    return Err(format!("{t} < {s} but the set at {s} is not contained"));
                }
            } else if !cs.is_disjoint(ct) {
                return Err(format!("{s} and {t} are incomparable but their sets meet"));
            }
        }
    }
    Ok(())
}
