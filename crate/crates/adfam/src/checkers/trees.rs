//! Tree-family recognizers: verification against a given tree order,
//! exhaustive search for a witnessing order, branch maps, and traces.

use crate::checkers::combinations;
use crate::error::Error;
use crate::family::{FamilySnapshot, Member, MemberKind};
use crate::report::{CheckReport, Verdict, Witness};
use crate::tree::TreeOrder;
use crate::Result;
use std::collections::{BTreeMap, BTreeSet};

/// Find two order-incomparable nodes that each lie on at least `keep` of
/// the given branches. Exhaustive over node pairs, smallest pair first.
pub fn splitting_finder(
    tree: &TreeOrder,
    branches: &[Vec<u64>],
    keep: usize,
) -> Result<(u64, u64)> {
    for (pos, b) in branches.iter().enumerate() {
        for (i, &x) in b.iter().enumerate() {
            if !tree.contains(x) {
                return Err(Error::UnknownNode {
                    index: pos as u64,
                    node: x,
                });
            }
            for &y in &b[i + 1..] {
                if !tree.comparable(x, y) {
                    return Err(Error::invalid(
                        "branch list",
                        format!("branch {pos} contains incomparable nodes {x} and {y}"),
                    ));
                }
            }
        }
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for b in branches {
        for &x in b.iter().collect::<BTreeSet<_>>() {
            *counts.entry(x).or_insert(0) += 1;
        }
    }
    let popular: Vec<u64> = counts
        .iter()
        .filter(|&(_, &c)| c >= keep)
        .map(|(&x, _)| x)
        .collect();
    for (i, &s) in popular.iter().enumerate() {
        for &t in &popular[i + 1..] {
            if !tree.comparable(s, t) {
                return Ok((s, t));
            }
        }
    }
    Err(Error::NoSplittingPair { keep })
}

fn window_delta(a: &BTreeSet<u64>, b: &BTreeSet<u64>, horizon: u64) -> u64 {
    let missing = a.iter().filter(|x| !b.contains(x)).count();
    let extra = b
        .iter()
        .filter(|&&x| x < horizon && !a.contains(&x))
        .count();
    (missing + extra) as u64
}

/// Pass iff every member agrees with some branch of the tree up to at most
/// `exceptions` points inside the member's horizon window.
pub fn tree_family_verify(
    fam: &FamilySnapshot,
    tree: &TreeOrder,
    exceptions: u64,
) -> Result<CheckReport> {
    let nodes = tree.nodes();
    for (i, m) in &fam.members {
        if let Some(&p) = m.point_set().iter().find(|p| !nodes.contains(p)) {
            return Err(Error::UnknownNode { index: *i, node: p });
        }
    }
    let branches: Vec<BTreeSet<u64>> = tree
        .branches()
        .into_iter()
        .map(|b| b.into_iter().collect())
        .collect();
    let mut witnesses = Vec::new();
    for (i, m) in &fam.members {
        let a = m.point_set();
        let best = branches
            .iter()
            .map(|b| (window_delta(&a, b, fam.universe_horizon), b))
            .min_by_key(|&(d, b)| (d, b.iter().copied().collect::<Vec<_>>()));
        match best {
            Some((d, b)) if d <= exceptions => {
                witnesses.push(Witness::MemberBranch {
                    index: *i,
                    top: *b.iter().next_back().expect("branches are nonempty"),
                });
            }
            _ => {
                return Ok(CheckReport::new(Verdict::Fail)
                    .budget("exceptions", exceptions)
                    .witness(Witness::indices([*i]))
                    .witness(Witness::note(format!(
                        "member {i} is not within {exceptions} points of any branch"
                    ))));
            }
        }
    }
    let mut report = CheckReport::new(Verdict::Pass).budget("exceptions", exceptions);
    for w in witnesses {
        report = report.witness(w);
    }
    Ok(report)
}

/// Exhaustive backtracking search for a tree order realizing the family.
///
/// Branch candidates per member are all node sets within `exceptions` of
/// the member; the search prunes on chain-prefix consistency and returns
/// the first order (in candidate order) whose verification passes. A
/// failure is an exhaustive refutation at this node scale.
pub fn tree_family_search(
    fam: &FamilySnapshot,
    node_limit: usize,
    exceptions: u64,
) -> Result<TreeOrder> {
    let mut nodes: BTreeSet<u64> = BTreeSet::new();
    for (_, m) in &fam.members {
        nodes.extend(m.point_set());
    }
    if nodes.len() > node_limit {
        return Err(Error::NodeLimitExceeded {
            nodes: nodes.len(),
            limit: node_limit,
        });
    }
    let node_vec: Vec<u64> = nodes.iter().copied().collect();
    let members: Vec<BTreeSet<u64>> = fam.members.iter().map(|(_, m)| m.point_set()).collect();

    // enumerate candidate branch sets for one member, deterministically
    let candidates_for = |a: &BTreeSet<u64>| -> Vec<BTreeSet<u64>> {
        let a_vec: Vec<u64> = a.iter().copied().collect();
        let outside: Vec<u64> = node_vec
            .iter()
            .copied()
            .filter(|x| !a.contains(x))
            .collect();
        let mut out = Vec::new();
        for rm in 0..=(exceptions as usize).min(a_vec.len()) {
            for removal in combinations(a_vec.len(), rm) {
                let removed: BTreeSet<u64> = removal.iter().map(|&p| a_vec[p]).collect();
                let budget = exceptions as usize - rm;
                for add in 0..=budget.min(outside.len()) {
                    for addition in combinations(outside.len(), add) {
                        let mut b: BTreeSet<u64> = a.difference(&removed).copied().collect();
                        b.extend(addition.iter().map(|&p| outside[p]));
                        if !b.is_empty() {
                            out.push(b);
                        }
                    }
                }
            }
        }
        out
    };

    let candidate_lists: Vec<Vec<BTreeSet<u64>>> = members.iter().map(candidates_for).collect();
    if candidate_lists.iter().any(|c| c.is_empty()) {
        return Err(Error::TreeSearchRefuted { exceptions });
    }

    let mut chosen: Vec<usize> = Vec::new();
    let found = backtrack(&members, &candidate_lists, &mut chosen, &nodes);
    match found {
        Some(tree) => {
            // a reported witness must re-verify
            let report = tree_family_verify(fam, &tree, exceptions)?;
            if report.passed() {
                Ok(tree)
            } else {
                Err(Error::TreeSearchRefuted { exceptions })
            }
        }
        None => Err(Error::TreeSearchRefuted { exceptions }),
    }
}

fn backtrack(
    members: &[BTreeSet<u64>],
    candidates: &[Vec<BTreeSet<u64>>],
    chosen: &mut Vec<usize>,
    all_nodes: &BTreeSet<u64>,
) -> Option<TreeOrder> {
    if chosen.len() == members.len() {
        let branches: Vec<&BTreeSet<u64>> = chosen
            .iter()
            .enumerate()
            .map(|(m, &c)| &candidates[m][c])
            .collect();
        return assemble_forest(&branches, all_nodes);
    }
    let depth = chosen.len();
    'cands: for (ci, cand) in candidates[depth].iter().enumerate() {
        for (m, &c) in chosen.iter().enumerate() {
            if !pair_consistent(&candidates[m][c], cand) {
                continue 'cands;
            }
        }
        chosen.push(ci);
        // edges over the partial choice must stay acyclic
        let branches: Vec<&BTreeSet<u64>> = chosen
            .iter()
            .enumerate()
            .map(|(m, &c)| &candidates[m][c])
            .collect();
        if topo_order(&branches, all_nodes).is_some() {
            if let Some(tree) = backtrack(members, candidates, chosen, all_nodes) {
                return Some(tree);
            }
        }
        chosen.pop();
    }
    None
}

/// Two branches can coexist only if neither is a proper subset of the other.
fn pair_consistent(b1: &BTreeSet<u64>, b2: &BTreeSet<u64>) -> bool {
    if b1 == b2 {
        return true;
    }
    !(b1.is_subset(b2) || b2.is_subset(b1))
}

/// Prefix constraints: shared nodes come before unshared ones in both chains.
fn constraint_edges(branches: &[&BTreeSet<u64>]) -> BTreeSet<(u64, u64)> {
    let mut edges = BTreeSet::new();
    for (i, b1) in branches.iter().enumerate() {
        for b2 in &branches[i + 1..] {
            for &x in b1.intersection(b2) {
                for &y in b1.symmetric_difference(b2) {
                    edges.insert((x, y));
                }
            }
        }
    }
    edges
}

/// Deterministic topological order of all nodes under the constraints,
/// smallest node first within each frontier. `None` on a cycle.
fn topo_order(branches: &[&BTreeSet<u64>], all_nodes: &BTreeSet<u64>) -> Option<Vec<u64>> {
    let edges = constraint_edges(branches);
    let mut indeg: BTreeMap<u64, usize> = all_nodes.iter().map(|&n| (n, 0)).collect();
    let mut succ: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &(x, y) in &edges {
        *indeg.get_mut(&y)? += 1;
        succ.entry(x).or_default().push(y);
    }
    let mut frontier: BTreeSet<u64> = indeg
        .iter()
        .filter(|&(_, &d)| d == 0)
        .map(|(&n, _)| n)
        .collect();
    let mut order = Vec::with_capacity(all_nodes.len());
    while let Some(&n) = frontier.iter().next() {
        frontier.remove(&n);
        order.push(n);
        for &m in succ.get(&n).map(|v| v.as_slice()).unwrap_or(&[]) {
            let d = indeg.get_mut(&m).expect("known node");
            *d -= 1;
            if *d == 0 {
                frontier.insert(m);
            }
        }
    }
    (order.len() == all_nodes.len()).then_some(order)
}

/// Glue the chosen branches into a forest: each branch becomes a root-to-leaf
/// chain ordered by the global priority, leftover nodes become isolated roots.
fn assemble_forest(branches: &[&BTreeSet<u64>], all_nodes: &BTreeSet<u64>) -> Option<TreeOrder> {
    let order = topo_order(branches, all_nodes)?;
    let priority: BTreeMap<u64, usize> = order.iter().enumerate().map(|(p, &n)| (n, p)).collect();
    let mut parent: BTreeMap<u64, Option<u64>> = all_nodes.iter().map(|&n| (n, None)).collect();
    let distinct: BTreeSet<&BTreeSet<u64>> = branches.iter().copied().collect();
    for b in distinct {
        let mut chain: Vec<u64> = b.iter().copied().collect();
        chain.sort_by_key(|n| priority[n]);
        for pair in chain.windows(2) {
            let (prev, next) = (pair[0], pair[1]);
            match parent.get(&next) {
                Some(None) => {
                    parent.insert(next, Some(prev));
                }
                Some(Some(p)) if *p == prev => {}
                _ => return None,
            }
        }
    }
    TreeOrder::from_parents(parent).ok()
}

/// Verify a branch map: injective, pairwise disjoint branches, and each
/// member inside its branch up to `exceptions` stray points.
pub fn weak_tree_verify(
    fam: &FamilySnapshot,
    tree: &TreeOrder,
    phi: &BTreeMap<u64, u64>,
    exceptions: u64,
) -> Result<CheckReport> {
    let mut branch_of: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for (i, _) in &fam.members {
        let leaf = *phi.get(i).ok_or_else(|| {
            Error::invalid("branch map", format!("no branch assigned to member {i}"))
        })?;
        if !tree.contains(leaf) {
            return Err(Error::UnknownNode {
                index: *i,
                node: leaf,
            });
        }
        if !tree.is_leaf(leaf) {
            return Err(Error::NotABranch {
                index: *i,
                node: leaf,
            });
        }
        branch_of.insert(*i, tree.branch_of_leaf(leaf)?);
    }
    let indices: Vec<u64> = fam.indices();
    for (pos, &i) in indices.iter().enumerate() {
        for &j in &indices[pos + 1..] {
            if phi[&i] == phi[&j] {
                return Ok(CheckReport::new(Verdict::Fail)
                    .budget("exceptions", exceptions)
                    .witness(Witness::indices([i, j]))
                    .witness(Witness::note("branch map is not injective")));
            }
            if !branch_of[&i].is_disjoint(&branch_of[&j]) {
                return Ok(CheckReport::new(Verdict::Fail)
                    .budget("exceptions", exceptions)
                    .witness(Witness::indices([i, j]))
                    .witness(Witness::note("assigned branches share a node")));
            }
        }
    }
    let mut report = CheckReport::new(Verdict::Pass).budget("exceptions", exceptions);
    for (i, m) in &fam.members {
        let stray: BTreeSet<u64> = m.point_set().difference(&branch_of[i]).copied().collect();
        if stray.len() as u64 > exceptions {
            return Ok(CheckReport::new(Verdict::Fail)
                .budget("exceptions", exceptions)
                .witness(Witness::indices([*i]))
                .witness(Witness::points(&stray)));
        }
        report = report.witness(Witness::MemberBranch {
            index: *i,
            top: *branch_of[i].iter().next_back().expect("nonempty branch"),
        });
    }
    Ok(report)
}

/// The branch-set variant: each member maps to a finite set of branches
/// with pairwise disjoint unions, and lies in its union up to `exceptions`.
pub fn very_weak_tree_verify(
    fam: &FamilySnapshot,
    tree: &TreeOrder,
    phi: &BTreeMap<u64, BTreeSet<u64>>,
    exceptions: u64,
) -> Result<CheckReport> {
    let mut cover_of: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for (i, _) in &fam.members {
        let leaves = phi.get(i).ok_or_else(|| {
            Error::invalid(
                "branch map",
                format!("no branch set assigned to member {i}"),
            )
        })?;
        let mut cover = BTreeSet::new();
        for &leaf in leaves {
            if !tree.contains(leaf) {
                return Err(Error::UnknownNode {
                    index: *i,
                    node: leaf,
                });
            }
            if !tree.is_leaf(leaf) {
                return Err(Error::NotABranch {
                    index: *i,
                    node: leaf,
                });
            }
            cover.extend(tree.branch_of_leaf(leaf)?);
        }
        cover_of.insert(*i, cover);
    }
    let indices: Vec<u64> = fam.indices();
    for (pos, &i) in indices.iter().enumerate() {
        for &j in &indices[pos + 1..] {
            if !cover_of[&i].is_disjoint(&cover_of[&j]) {
                return Ok(CheckReport::new(Verdict::Fail)
                    .budget("exceptions", exceptions)
                    .witness(Witness::indices([i, j]))
                    .witness(Witness::note("branch-set unions share a node")));
            }
        }
    }
    for (i, m) in &fam.members {
        let stray: BTreeSet<u64> = m.point_set().difference(&cover_of[i]).copied().collect();
        if stray.len() as u64 > exceptions {
            return Ok(CheckReport::new(Verdict::Fail)
                .budget("exceptions", exceptions)
                .witness(Witness::indices([*i]))
                .witness(Witness::points(&stray)));
        }
    }
    Ok(CheckReport::new(Verdict::Pass)
        .budget("exceptions", exceptions)
        .witness(Witness::note("all members covered by disjoint branch sets")))
}

/// Trace the family over a subset of the universe, dropping members whose
/// trace has fewer than `min_size` points. Indices are preserved.
pub fn hidden_reduce(
    fam: &FamilySnapshot,
    through: &BTreeSet<u64>,
    min_size: usize,
) -> FamilySnapshot {
    let mut out = FamilySnapshot::new(MemberKind::Sets, fam.universe_horizon);
    for (i, m) in &fam.members {
        let trace: BTreeSet<u64> = m.point_set().intersection(through).copied().collect();
        if trace.len() >= min_size {
            out.push(*i, Member::Set(trace))
                .expect("indices stay increasing");
        }
    }
    out
}
