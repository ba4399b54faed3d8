//! Explicit family builders: the staged extension engine and its derived
//! recursive builders, the k-linked domain family, the basic diagonal
//! Luzin construction, the Luzin family over k-linked domains, and
//! coherent sequences on finite trees.

mod builders;
mod coherent;
mod hajnal;
mod linked_luzin;
mod luzin_basic;
mod registry;
mod stage;

pub use builders::{
    build_registry_family, build_staged_family, tracked_tuples, BoxRecord, BuildReport,
    Enumeration, MeetRecord, StagedFamilyConfig, StagedFamilyOutput, TrackedTuple, TupleMeetRecord,
};
pub use coherent::{coherent_relations_hold, coherent_sequence};
pub use hajnal::{hajnal_member, level_contribution};
pub use linked_luzin::{
    build_linked_luzin, code_horizon, prefix_class_parts, Designation, LinkedLuzinConfig,
    LinkedLuzinLog,
};
pub use luzin_basic::{build_luzin_basic, max_box_count, LuzinBasicLog};
pub use registry::{FatEntry, FatRegistry};
pub use stage::{
    staged_extend, verify_trace, ExtendInstance, ExtendOptions, StageRecord, StageTrace,
};
