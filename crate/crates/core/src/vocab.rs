//! Activity, object-type, and attribute names of the claim-part identification process.

use crate::label::TypeLabel;

pub const REGISTER_CLAIM: &str = "rc";
pub const CREATE_NOTE: &str = "cn";
pub const REPORT_CLAIM_PART: &str = "rCP";
pub const CREATE_INVESTIGATION: &str = "cCPi";
pub const SCAN_CLAIM: &str = "sc";
pub const PREDICT_CLAIM_PART: &str = "pCP";

pub const CLAIM: &str = "claim";
pub const CUSTOMER: &str = "customer";
pub const EMPLOYEE: &str = "employee";
pub const CLAIM_NOTE: &str = "claim_note";
pub const CLAIM_PART: &str = "claim_part";
pub const AI_MODEL: &str = "AI";

pub const ROLE: &str = "role";
pub const CLAIM_HANDLER: &str = "claim_handler";
pub const INVESTIGATOR: &str = "claim_part_investigator";

pub fn activity(name: &str) -> TypeLabel {
    TypeLabel::known(name)
}

pub fn object_type(name: &str) -> TypeLabel {
    TypeLabel::known(name)
}

/// `(employee, claim_handler)`
pub fn handler_type() -> TypeLabel {
    object_type(EMPLOYEE).refine(CLAIM_HANDLER)
}

/// `(employee, claim_part_investigator)`
pub fn investigator_type() -> TypeLabel {
    object_type(EMPLOYEE).refine(INVESTIGATOR)
}
