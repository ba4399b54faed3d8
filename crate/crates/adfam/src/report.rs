//! Verdicts, budgets, and witnesses for the budgeted checkers.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// A concrete witness or counterexample attached to a report.
///
/// Pass and fail reports always carry at least one witness or an
/// exhaustiveness note; inconclusive is reserved for exhausted search
/// budgets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// An offending or witnessing pair of member indices with the size of
    /// their intersection.
    Pair { left: u64, right: u64, size: u64 },
    /// A member index together with a test-set size and the indices counted
    /// against it.
    Box {
        index: u64,
        box_size: u64,
        offenders: Vec<u64>,
    },
    /// A group of member indices.
    Indices(Vec<u64>),
    /// A split into two index groups with the size of the union meet.
    Split {
        left: Vec<u64>,
        right: Vec<u64>,
        meet: u64,
    },
    /// A set of universe points.
    Points(Vec<u64>),
    /// A single universe point or column.
    Point(u64),
    /// A pair of tree nodes.
    Nodes { s: u64, t: u64 },
    /// A member matched to a branch, given by the branch's top node.
    MemberBranch { index: u64, top: u64 },
    /// Free-form exhaustiveness or context note.
    Note(String),
}

impl Witness {
    pub fn indices(v: impl IntoIterator<Item = u64>) -> Self {
        Witness::Indices(v.into_iter().collect())
    }

    pub fn points(v: &BTreeSet<u64>) -> Self {
        Witness::Points(v.iter().copied().collect())
    }

    pub fn note(s: impl Into<String>) -> Self {
        Witness::Note(s.into())
    }
}

/// Outcome of a budgeted check: verdict, the budgets used, and witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub budgets: BTreeMap<String, u64>,
    pub witnesses: Vec<Witness>,
}

impl CheckReport {
    pub fn new(verdict: Verdict) -> Self {
        CheckReport {
            verdict,
            budgets: BTreeMap::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn budget(mut self, name: &str, value: u64) -> Self {
        self.budgets.insert(name.to_string(), value);
        self
    }

    pub fn witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Render as a stable one-record CSV (header plus one row).
    pub fn to_csv(&self, check: &str) -> String {
        let budgets = self
            .budgets
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        format!(
            "check,verdict,budgets,witnesses\n{check},{verdict},{budgets},{}\n",
            self.witnesses.len()
        )
    }

    /// Render as a short human-readable text block.
    pub fn to_text(&self, check: &str) -> String {
        let mut out = String::new();
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        out.push_str(&format!("{check}: {verdict}\n"));
        for (k, v) in &self.budgets {
            out.push_str(&format!("  budget {k} = {v}\n"));
        }
        for w in &self.witnesses {
            out.push_str(&format!("  witness {w:?}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_serializes_with_stable_shape() {
        let r = CheckReport::new(Verdict::Pass)
            .budget("bound", 3)
            .witness(Witness::note("exhaustive over 10 pairs"));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("{\"verdict\":\"pass\",\"budgets\":{\"bound\":3},"));
        let back: CheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
