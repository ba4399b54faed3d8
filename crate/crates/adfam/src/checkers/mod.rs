//! Budgeted checkers and witness searches for the family properties.
//!
//! Every checker is exhaustive within its declared budgets and reports the
//! budgets next to the verdict. Searches are deterministic; any witness a
//! checker reports has been re-verified before the report is returned.

mod ad;
mod boost;
mod delta;
mod linkage;
mod luzin;
mod trees;

pub use ad::almost_disjoint_check;
pub use boost::{intersection_booster, tuple_system_boost, Boost, TupleBoost};
pub use delta::{delta_system_refine, DeltaSystem};
pub use linkage::{accumulation_split, linkage_check, AccumulationSplit};
pub use luzin::{anti_luzin_search, k_near_luzin_check, luzin_witness_check};
pub use trees::{
    hidden_reduce, splitting_finder, tree_family_search, tree_family_verify, very_weak_tree_verify,
    weak_tree_verify,
};

/// All k-element subsets of `0..n`, in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let mut i = k;
        while i > 0 && cur[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
