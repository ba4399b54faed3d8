//! Finite-scale combinatorics of almost disjoint families.
//!
//! Everything here works on explicit finite objects: partial functions on an
//! initial segment of the naturals, finite plane sets (subsets of a grid),
//! ordered family snapshots, and finite tree orders. Notions that are
//! classically about infinite or uncountable families (almost disjointness,
//! Luzin enumerations, fatness, k-linkage, tree families) are replaced by
//! budgeted analogs: every checker takes explicit count/size/depth budgets
//! and reports the budgets it used next to its verdict.
//!
//! The crate is organized in four layers:
//!
//! * core types and operations ([`encode`], [`partial_fn`], [`plane`],
//!   [`family`], [`tree`]);
//! * budgeted property checkers and witness searches ([`checkers`]);
//! * explicit family builders: staged diagonal extensions, k-linked
//!   domain families, Luzin-style enumerations, coherent sequences on
//!   trees ([`constructions`]);
//! * a generic dense-rule chain engine with concrete posets ([`forcing`]).
//!
//! All operations are pure; searches and builders are deterministic given
//! their inputs (randomness, where offered, flows from an explicit seed).

pub mod checkers;
pub mod constructions;
pub mod encode;
pub mod error;
pub mod family;
pub mod forcing;
pub mod partial_fn;
pub mod plane;
pub mod report;
pub mod tree;
pub mod wire;

pub use error::Error;
pub use family::{FamilySnapshot, Member, MemberKind, SubsetAssignment};
pub use partial_fn::{ExtValue, ExtendedFn, PartialFn};
pub use plane::PlaneSet;
pub use report::{CheckReport, Verdict, Witness};
pub use tree::TreeOrder;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
