//! Object-centric process mining over OCEL 2.0 event logs.
//!
//! ```text
//! generate / load_json > OcelLog > filter | retain_linked | drill_down | unfold | project
//!                                > flatten > discover_dfg        > DOT
//!                                > discover_ocdfg                > DOT
//!                                > extraction_matrix             > CSV
//! ```
//!
//! The [`recipes`] module composes these into the claim-part analyses and
//! [`casegen`] produces a synthetic log that reproduces the published counts.

pub mod casegen;
pub mod discovery;
pub mod error;
pub mod io;
mod kv;
pub mod label;
pub mod metrics;
pub mod model;
pub mod ops;
pub mod recipes;
pub mod vocab;

pub use discovery::{dfg_to_dot, discover_dfg, discover_ocdfg, Dfg, OcDfg, ToDot};
pub use error::{Error, IntegrityError, Issue, IssueCode, Result};
pub use io::{load_json, save_json, validate, ValidationReport};
pub use label::TypeLabel;
pub use model::{
    build_log, events_of_object, AttrValue, LogParts, OcelEvent, OcelLog, OcelObject, Relation, Timestamp,
};
pub use ops::{ExtractionMatrix, FilterMode, FlatLog};
