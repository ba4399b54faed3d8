//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {coord} is not below the horizon {horizon}")]
    CoordinateAboveHorizon { coord: u64, horizon: u64 },

    #[error("column {column} is not below the horizon {horizon}")]
    ColumnAboveHorizon { column: u64, horizon: u64 },

    #[error("unknown member index {index}")]
    UnknownIndex { index: u64 },

    #[error("family is empty")]
    EmptyFamily,

    #[error("index sets overlap at {index}")]
    OverlappingParts { index: u64 },

    #[error("empty part at position {position}")]
    EmptyPart { position: usize },

    #[error("duplicate member at positions {first} and {second}")]
    DuplicateMember { first: usize, second: usize },

    #[error("member {index} is not defined at every coordinate below {horizon}")]
    MemberNotTotal { index: u64, horizon: u64 },

    #[error("sample is empty")]
    EmptySample,

    #[error("frequency threshold must be at least 2, got {tau}")]
    BadTau { tau: u64 },

    #[error("bit strings must all have length {expected}, got one of length {got}")]
    MixedStringLengths { expected: u32, got: u32 },

    #[error("duplicate bit string in level set")]
    DuplicateString,

    #[error("level {level} holds only {available} strings, cannot choose {wanted}")]
    LevelTooSmall {
        level: u32,
        available: u64,
        wanted: u64,
    },

    #[error("bit string of length {len} is shorter than depth {depth}")]
    StringTooShort { len: u32, depth: u32 },

    #[error("need at least {want} sets to look for {want} petals, got {got}")]
    TooFewSets { want: usize, got: usize },

    #[error("no sunflower with {want} petals found among {searched} candidate roots")]
    NoSunflower { want: usize, searched: usize },

    #[error("need {size} members for a {size}-wise intersection, got {got}")]
    TooFewMembers { size: usize, got: usize },

    #[error("no {wanted} distinct prefixes at any level up to {depth}")]
    NoPrefixSplit { wanted: usize, depth: u32 },

    #[error("union of the family has {nodes} nodes, above the limit {limit}")]
    NodeLimitExceeded { nodes: usize, limit: usize },

    #[error("no tree order realizes the family within {exceptions} exceptions (search exhausted)")]
    TreeSearchRefuted { exceptions: u64 },

    #[error(
        "no incomparable node pair lies on {keep} branches each; the popular nodes form a chain"
    )]
    NoSplittingPair { keep: usize },

    #[error("branch map sends member {index} to node {node}, which is not a leaf of the tree")]
    NotABranch { index: u64, node: u64 },

    #[error("member {index} assigned to {node} which is not a tree node")]
    UnknownNode { index: u64, node: u64 },

    #[error("no common point above {above} covers {keep} members on each side")]
    BoosterExhausted { above: u64, keep: usize },

    #[error("stage {stage}: no eligible point of fat set {slot} (columns past {past} exhausted)")]
    FatPointExhausted {
        stage: usize,
        slot: usize,
        past: u64,
    },

    #[error("stage {stage}: no avoider exists in subfamily {slot} at this scale")]
    AvoiderExhausted { stage: usize, slot: usize },

    #[error("horizon {horizon} too small: {need}")]
    HorizonExhausted { horizon: u64, need: String },

    #[error("tracked set {provenance:?} fails its fat budget (width {width}, from {from})")]
    RegistryViolation {
        provenance: String,
        width: u64,
        from: u64,
        cascade: Vec<String>,
    },

    #[error(
        "no eligible agreement point for pair (member {member}, earlier {earlier}) at step {step}"
    )]
    NoAgreementPoint {
        member: u64,
        earlier: u64,
        step: usize,
    },

    #[error("dense rule {rule:?} cannot extend the current condition: {reason}")]
    RuleExhausted { rule: String, reason: String },

    #[error("condition outside the poset universe: {reason}")]
    BadCondition { reason: String },

    #[error("{context}: {reason}")]
    Invalid { context: String, reason: String },
}

impl Error {
    /// Shorthand for input-validation failures that have no dedicated variant.
    pub fn invalid(context: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            context: context.into(),
            reason: reason.into(),
        }
    }
}
