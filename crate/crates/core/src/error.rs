use std::fmt;

use thiserror::Error;

use crate::label::TypeLabel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("type label base must be non-empty")]
    EmptyBase,
}

/// Machine-readable code of a validation finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IssueCode {
    DupEventId,
    DupObjectId,
    DanglingE2o,
    DanglingO2o,
    UnsortedAttributeTimeline,
    NoRelatedObjects,
    UnknownField,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::DupEventId => "DUP_EVENT_ID",
            IssueCode::DupObjectId => "DUP_OBJECT_ID",
            IssueCode::DanglingE2o => "DANGLING_E2O",
            IssueCode::DanglingO2o => "DANGLING_O2O",
            IssueCode::UnsortedAttributeTimeline => "UNSORTED_ATTRIBUTE_TIMELINE",
            IssueCode::NoRelatedObjects => "NO_RELATED_OBJECTS",
            IssueCode::UnknownField => "UNKNOWN_FIELD",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One validation finding: what is wrong and where.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub code: IssueCode,
    pub message: String,
    /// Path-like pointer, e.g. `events[e17].relationships[0]`.
    pub locator: String,
}

impl Issue {
    pub fn new(code: IssueCode, message: impl Into<String>, locator: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            locator: locator.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.locator, self.message)
    }
}

/// Every integrity violation found while building a log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegrityError {
    pub violations: Vec<Issue>,
}

impl fmt::Display for IntegrityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} integrity violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for IntegrityError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Integrity(#[from] IntegrityError),
    #[error("malformed JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema violation at {locator}: {message}")]
    Schema { message: String, locator: String },
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown object type `{0}`")]
    UnknownObjectType(TypeLabel),
    #[error("object `{object_id}` lacks attribute `{attribute}`")]
    MissingAttribute { object_id: String, attribute: String },
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("confusion counts are all zero")]
    EmptyConfusion,
    #[error("division by zero: {0}")]
    DivisionByZero(String),
}

impl Error {
    /// Stable error name, as printed by the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Integrity(_) => "IntegrityError",
            Error::Parse(_) => "ParseError",
            Error::Schema { .. } => "SchemaError",
            Error::Label(_) => "LabelError",
            Error::UnknownObject(_) => "UnknownObject",
            Error::UnknownObjectType(_) => "UnknownObjectType",
            Error::MissingAttribute { .. } => "MissingAttribute",
            Error::Config(_) => "ConfigError",
            Error::EmptyConfusion => "EmptyConfusion",
            Error::DivisionByZero(_) => "DivisionByZero",
        }
    }

    pub(crate) fn schema(message: impl Into<String>, locator: impl Into<String>) -> Self {
        Error::Schema {
            message: message.into(),
            locator: locator.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
