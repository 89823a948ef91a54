//! Structured type labels for activities and object types.
//!
//! A label is a base name plus an ordered list of refinements. Drill-down
//! and unfold append refinements instead of concatenating strings, so the
//! base activity or object type can always be recovered.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::LabelError;

/// An activity or object-type label, e.g. `cCPi` or `(employee, claim_handler)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeLabel {
    base: String,
    refinements: Vec<String>,
}

impl TypeLabel {
    /// Plain label without refinements.
    pub fn new(base: impl Into<String>) -> Result<Self, LabelError> {
        Self::with_refinements(base, Vec::<String>::new())
    }

    pub fn with_refinements<S: Into<String>>(
        base: impl Into<String>,
        refinements: impl IntoIterator<Item = S>,
    ) -> Result<Self, LabelError> {
        let base = base.into();
        if base.is_empty() {
            return Err(LabelError::EmptyBase);
        }
        Ok(Self {
            base,
            refinements: refinements.into_iter().map(Into::into).collect(),
        })
    }

    /// Label for the built-in vocabulary. Panics on an empty base.
    pub(crate) fn known(base: &str) -> Self {
        Self::new(base).expect("vocabulary labels are non-empty")
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn refinements(&self) -> &[String] {
        &self.refinements
    }

    pub fn is_refined(&self) -> bool {
        !self.refinements.is_empty()
    }

    /// A new label with `refinement` appended.
    pub fn refine(&self, refinement: impl Into<String>) -> Self {
        let mut out = self.clone();
        out.refinements.push(refinement.into());
        out
    }

    /// The label with every refinement stripped.
    pub fn unrefined(&self) -> Self {
        Self {
            base: self.base.clone(),
            refinements: Vec::new(),
        }
    }

    /// Parse a display form back into base and refinements.
    ///
    /// `"(cCPi, (employee, claim_handler))"` yields base `cCPi` with the single
    /// refinement `"(employee, claim_handler)"`. Strings without a top-level
    /// comma inside enclosing parentheses are taken verbatim as a base.
    pub fn parse(text: &str) -> Result<Self, LabelError> {
        if let Some(inner) = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            if let Some(parts) = split_top_level(inner) {
                if parts.len() > 1 {
                    let mut parts = parts.into_iter().map(|p| p.trim().to_string());
                    let base = parts.next().unwrap_or_default();
                    return Self::with_refinements(base, parts);
                }
            }
        }
        Self::new(text)
    }
}

/// Splits on commas at parenthesis depth zero. `None` when parentheses are unbalanced.
fn split_top_level(text: &str) -> Option<Vec<&str>> {
    let mut depth = 0usize;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(&text[start..]);
    Some(parts)
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.refinements.is_empty() {
            return f.write_str(&self.base);
        }
        write!(f, "({}", self.base)?;
        for r in &self.refinements {
            write!(f, ", {r}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for TypeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TypeLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        TypeLabel::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl FromStr for TypeLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
