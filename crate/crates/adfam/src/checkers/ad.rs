//! Pairwise intersection bound check.

use crate::family::{intersect, FamilySnapshot};
use crate::report::{CheckReport, Verdict, Witness};

/// Pass iff every pairwise intersection has size at most `bound`.
///
/// A fail carries the first offending pair and its intersection size; a
/// pass carries an exhaustiveness note over all pairs.
pub fn almost_disjoint_check(fam: &FamilySnapshot, bound: u64) -> CheckReport {
    let mut pairs = 0u64;
    for (pos, (i, a)) in fam.members.iter().enumerate() {
        for (j, b) in fam.members.iter().skip(pos + 1) {
            pairs += 1;
            let size = intersect(a, b).len() as u64;
            if size > bound {
                return CheckReport::new(Verdict::Fail)
                    .budget("bound", bound)
                    .witness(Witness::Pair {
                        left: *i,
                        right: *j,
                        size,
                    });
            }
        }
    }
    CheckReport::new(Verdict::Pass)
        .budget("bound", bound)
        .witness(Witness::note(format!("exhaustive over {pairs} pairs")))
}
