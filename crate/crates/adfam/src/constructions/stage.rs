//! The staged extension engine.
//!
//! Builds one new function against a finite almost disjoint background
//! family, a list of subfamilies, and a list of fat plane sets. Each stage
//! computes a frequency skeleton for its subfamily, designates one point
//! of each fat set for the new function to pass through, fills the gap
//! coordinates with values that dodge every used-up member and every
//! skeleton, and picks per-subfamily avoiders that witness the box
//! property. The full stage history is returned for replay and
//! postcondition checks.

use crate::constructions::registry::FatRegistry;
use crate::error::Error;
use crate::partial_fn::{tight_function, ExtValue, ExtendedFn, PartialFn};
use crate::plane::PlaneSet;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Inputs of one engine run.
#[derive(Clone, Debug)]
pub struct ExtendInstance<'a> {
    /// The background family; every member total on `[0, col_horizon)`.
    pub members: &'a [PartialFn],
    /// Subfamilies as positions into `members`, one per stage slot.
    pub subfams: &'a [Vec<usize>],
    /// Fat sets, one per stage slot.
    pub fats: &'a [PlaneSet],
    /// Number of stages to run.
    pub stages: usize,
    /// Frequency threshold for the skeletons.
    pub tau: u64,
    /// Column universe bound.
    pub col_horizon: u64,
}

/// Engine policy knobs. The default is the strict regime: designated
/// points must avoid used members' graphs and any exhaustion is an error.
#[derive(Clone, Debug)]
pub struct ExtendOptions {
    /// Designated points must lie off every used member's graph.
    pub exclude_used_picks: bool,
    /// Error out on pick/avoider exhaustion instead of recording a skip.
    pub strict: bool,
    /// Enrollment order of background members (positions); input order
    /// when absent.
    pub enroll_order: Option<Vec<usize>>,
    /// Extend the result to a total function on `[0, total_to)` after the
    /// last stage, with values dodging the whole background family.
    pub total_to: Option<u64>,
    /// Gap fills dodge every background member, not only the used-up
    /// ones. Impossible at unbounded scale, available on a finite desk;
    /// keeps all agreements at designated points.
    pub fill_avoids_all: bool,
    /// Plane points already designated by other runs; fresh points are
    /// preferred over these so one point stays on at most two graphs.
    pub avoid_points: BTreeSet<(u64, u64)>,
    /// Members protected from designated points before the first stage,
    /// keeping them clean for later avoider duty.
    pub pre_protected: Vec<usize>,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions {
            exclude_used_picks: true,
            strict: true,
            enroll_order: None,
            total_to: None,
            fill_avoids_all: false,
            avoid_points: BTreeSet::new(),
            pre_protected: Vec::new(),
        }
    }
}

/// One stage of the trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Skeleton computed for this stage's subfamily.
    pub tight: ExtendedFn,
    /// Designated `(column, value)` per slot `k <= stage`; `None` marks a
    /// missing fat set or a recorded skip.
    pub picks: Vec<Option<(u64, u64)>>,
    /// Stage mark: the last designated column (stage floor when none).
    pub mark: u64,
    /// Avoider member position per slot `k <= stage`.
    pub avoiders: Vec<Option<usize>>,
    /// Background member enrolled at this stage, if any.
    pub enrolled: Option<usize>,
    /// Used-up set after the stage, sorted positions.
    pub used: Vec<usize>,
}

/// Full history of an engine run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StageTrace {
    pub stages: Vec<StageRecord>,
    pub skipped_picks: u64,
    pub skipped_avoiders: u64,
}

impl StageTrace {
    pub fn marks(&self) -> Vec<u64> {
        self.stages.iter().map(|s| s.mark).collect()
    }

    /// Stage at which a member position entered the used-up set.
    pub fn entry_stage(&self, pos: usize) -> Option<usize> {
        self.stages
            .iter()
            .position(|s| s.used.binary_search(&pos).is_ok())
    }
}

/// Run the engine. Returns the new function (domain `[0, last mark]`, or
/// `[0, total_to)` when requested) together with the stage trace.
///
/// With a registry present, the designated column for slot `k` at stage
/// `j` must additionally have a fat-set fiber wider than
/// `min(j, registry cap for k)`, which keeps the restriction of the
/// tracked set to the function's hit columns wide.
pub fn staged_extend(
    inst: &ExtendInstance,
    opts: &ExtendOptions,
    registry: Option<&FatRegistry>,
) -> Result<(PartialFn, StageTrace)> {
    for (pos, g) in inst.members.iter().enumerate() {
        if !g.is_total_below(inst.col_horizon) {
            return Err(Error::MemberNotTotal {
                index: pos as u64,
                horizon: inst.col_horizon,
            });
        }
    }
    let mut f = PartialFn::new(
        opts.total_to
            .unwrap_or(inst.col_horizon)
            .max(inst.col_horizon),
    );
    let mut trace = StageTrace::default();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    // members serving as avoiders: designated points dodge their graphs so
    // their confined agreements stay confined
    let mut protected: BTreeSet<usize> = opts.pre_protected.iter().copied().collect();
    let mut tights: Vec<ExtendedFn> = Vec::new();
    let mut marks: Vec<u64> = Vec::new();

    for stage in 0..inst.stages {
        let floor = marks.last().map(|&m| m + 1).unwrap_or(0);
        // skeleton for this stage's subfamily
        let tight = match inst.subfams.get(stage) {
            Some(subfam) if !subfam.is_empty() => {
                let sample: Vec<PartialFn> =
                    subfam.iter().map(|&p| inst.members[p].clone()).collect();
                tight_function(&sample, inst.col_horizon, inst.tau)?
            }
            _ => ExtendedFn::all_top(inst.col_horizon),
        };
        tights.push(tight.clone());

        // designated points, one per fat-set slot
        let mut picks: Vec<Option<(u64, u64)>> = Vec::new();
        let mut next_col = floor;
        for slot in 0..=stage {
            if slot >= inst.fats.len() {
                picks.push(None);
                continue;
            }
            let fat = &inst.fats[slot];
            let cap = registry.and_then(|r| r.width_cap(slot));
            match designate(
                fat,
                next_col,
                inst.col_horizon,
                stage,
                cap,
                registry.is_some(),
                opts,
                &used,
                &protected,
                inst.members,
                &tights,
            ) {
                Some((r, t)) => {
                    f.insert(r, t)?;
                    next_col = r + 1;
                    picks.push(Some((r, t)));
                }
                None => {
                    if opts.strict {
                        return Err(Error::FatPointExhausted {
                            stage,
                            slot,
                            past: next_col,
                        });
                    }
                    trace.skipped_picks += 1;
                    picks.push(None);
                }
            }
        }
        let mark = picks
            .iter()
            .flatten()
            .map(|&(r, _)| r)
            .max()
            .unwrap_or(floor);
        marks.push(mark);

        // fill the remaining coordinates of the stage window
        for i in floor..=mark {
            if f.get(i).is_some() {
                continue;
            }
            let mut excluded: BTreeSet<u64> = if opts.fill_avoids_all {
                inst.members.iter().filter_map(|g| g.get(i)).collect()
            } else {
                used.iter()
                    .filter_map(|&p| inst.members[p].get(i))
                    .collect()
            };
            for t in &tights {
                if let ExtValue::Num(v) = t.get(i) {
                    excluded.insert(v);
                }
            }
            let v = (0..)
                .find(|v| !excluded.contains(v))
                .expect("values are unbounded");
            f.insert(i, v)?;
        }

        // avoiders witness the box property per subfamily slot
        let mut avoiders: Vec<Option<usize>> = Vec::new();
        let mut newly_used: BTreeSet<usize> = BTreeSet::new();
        for slot in 0..=stage {
            let subfam = match inst.subfams.get(slot) {
                Some(s) if !s.is_empty() => s,
                _ => {
                    avoiders.push(None);
                    continue;
                }
            };
            let window_lo = if slot == 0 { 0 } else { marks[slot - 1] + 1 };
            let found = subfam.iter().copied().find(|&p| {
                !used.contains(&p)
                    && (window_lo..=mark).all(|i| match (f.get(i), inst.members[p].get(i)) {
                        (Some(a), Some(b)) => a != b,
                        _ => true,
                    })
            });
            match found {
                Some(p) => {
                    newly_used.insert(p);
                    protected.insert(p);
                    avoiders.push(Some(p));
                }
                None => {
                    if opts.strict {
                        return Err(Error::AvoiderExhausted { stage, slot });
                    }
                    trace.skipped_avoiders += 1;
                    avoiders.push(None);
                }
            }
        }

        // enroll the next background member
        let enrolled = match &opts.enroll_order {
            Some(order) => order.get(stage).copied(),
            None => (stage < inst.members.len()).then_some(stage),
        };
        if let Some(p) = enrolled {
            newly_used.insert(p);
        }
        used.extend(newly_used);

        trace.stages.push(StageRecord {
            stage,
            tight,
            picks,
            mark,
            avoiders,
            enrolled,
            used: used.iter().copied().collect(),
        });
    }

    // optional tail: make the function total, dodging the whole family
    if let Some(total_to) = opts.total_to {
        let last = marks.last().copied().unwrap_or(0);
        for i in (last + 1)..total_to {
            if f.get(i).is_some() {
                continue;
            }
            let mut excluded: BTreeSet<u64> =
                inst.members.iter().filter_map(|g| g.get(i)).collect();
            for t in &tights {
                if let ExtValue::Num(v) = t.get(i) {
                    excluded.insert(v);
                }
            }
            let v = (0..)
                .find(|v| !excluded.contains(v))
                .expect("values are unbounded");
            f.insert(i, v)?;
        }
    }

    Ok((f, trace))
}

/// Choose the designated point for one slot: the best eligible point at or
/// past `floor`. Quality, most important first: stay off protected
/// avoiders' graphs; smallest column (floors shared across slots must stay
/// low); within a column, stay off points designated by other runs, sit on
/// an already used-up graph rather than a fresh one, dodge the skeleton
/// values, smallest value last.
#[allow(clippy::too_many_arguments)]
fn designate(
    fat: &PlaneSet,
    floor: u64,
    horizon: u64,
    stage: usize,
    cap: Option<u64>,
    registry_mode: bool,
    opts: &ExtendOptions,
    used: &BTreeSet<usize>,
    protected: &BTreeSet<usize>,
    members: &[PartialFn],
    tights: &[ExtendedFn],
) -> Option<(u64, u64)> {
    let need = if registry_mode {
        (stage as u64).min(cap.unwrap_or(stage as u64)) + 1
    } else {
        1
    };
    let mut best: Option<(bool, u64, bool, bool, bool, u64)> = None;
    for col in floor..horizon {
        let fiber = fat.fiber(col);
        if (fiber.len() as u64) < need {
            continue;
        }
        for &t in &fiber {
            let on_used = used.iter().any(|&p| members[p].get(col) == Some(t));
            if opts.exclude_used_picks && on_used {
                continue;
            }
            let on_protected = protected.iter().any(|&p| members[p].get(col) == Some(t));
            let on_avoid = opts.avoid_points.contains(&(col, t));
            let on_tight = tights.iter().any(|s| s.get(col) == ExtValue::Num(t));
            let key = (on_protected, col, on_avoid, !on_used, on_tight, t);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        // nothing at a later column can beat an off-protection point here
        if matches!(best, Some((false, ..))) {
            break;
        }
    }
    best.map(|(_, col, _, _, _, t)| (col, t))
}

/// Replay verification: check a finished run's trace against the function
/// and the instance, exactly as recorded.
///
/// Verifies the structural invariants (nested used-up sets, monotone marks
/// at or above the stage index, strictly increasing designated columns per
/// stage) and the recorded claims: every designated point lies on its fat
/// set and on the function, every avoider dodges the function on its
/// window, and — when the strict pick rule was in force — designated
/// points lie off the previously used-up graphs.
pub fn verify_trace(
    inst: &ExtendInstance,
    opts: &ExtendOptions,
    f: &PartialFn,
    trace: &StageTrace,
) -> Result<()> {
    let fail = |reason: String| Err(Error::BadCondition { reason });
    let mut prev_used: Vec<usize> = Vec::new();
    let mut prev_mark: Option<u64> = None;
    for rec in &trace.stages {
        if prev_used.iter().any(|p| rec.used.binary_search(p).is_err()) {
            return fail(format!("stage {}: used-up set shrank", rec.stage));
        }
        if (rec.mark as usize) < rec.stage {
            return fail(format!(
                "stage {}: mark {} below the stage index",
                rec.stage, rec.mark
            ));
        }
        if let Some(m) = prev_mark {
            if rec.mark <= m && rec.picks.iter().flatten().next().is_some() {
                return fail(format!("stage {}: mark did not advance", rec.stage));
            }
        }
        let mut last_col: Option<u64> = None;
        for (slot, pick) in rec.picks.iter().enumerate() {
            let Some(&(col, value)) = pick.as_ref() else {
                continue;
            };
            if let Some(l) = last_col {
                if col <= l {
                    return fail(format!(
                        "stage {}: designated columns not increasing at slot {slot}",
                        rec.stage
                    ));
                }
            }
            last_col = Some(col);
            if f.get(col) != Some(value) {
                return fail(format!(
                    "stage {}: designated point ({col},{value}) is not on the function",
                    rec.stage
                ));
            }
            let fat = inst.fats.get(slot).ok_or_else(|| Error::BadCondition {
                reason: format!("stage {}: no fat set at slot {slot}", rec.stage),
            })?;
            if !fat.contains(col, value) {
                return fail(format!(
                    "stage {}: designated point ({col},{value}) misses fat set {slot}",
                    rec.stage
                ));
            }
            if opts.exclude_used_picks
                && prev_used
                    .iter()
                    .any(|&p| inst.members[p].get(col) == Some(value))
            {
                return fail(format!(
                    "stage {}: designated point ({col},{value}) sits on a used-up graph",
                    rec.stage
                ));
            }
        }
        for (slot, avoider) in rec.avoiders.iter().enumerate() {
            let Some(pos) = *avoider else { continue };
            if prev_used.binary_search(&pos).is_ok() {
                return fail(format!(
                    "stage {}: avoider {pos} was already used up",
                    rec.stage
                ));
            }
            let window_lo = if slot == 0 {
                0
            } else {
                trace.stages[slot - 1].mark + 1
            };
            let clash = (window_lo..=rec.mark).any(
                |i| matches!((f.get(i), inst.members[pos].get(i)), (Some(a), Some(b)) if a == b),
            );
            if clash {
                return fail(format!(
                    "stage {}: avoider {pos} meets the function on its window",
                    rec.stage
                ));
            }
        }
        prev_used = rec.used.clone();
        prev_mark = Some(rec.mark);
    }
    Ok(())
}
