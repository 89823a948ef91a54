//! In-memory OCEL 2.0 model with integrity validation and lookup indices.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use chrono::{DateTime, DurationRound, TimeDelta, Utc};

use crate::error::{Error, IntegrityError, Issue, IssueCode, Result};
use crate::label::TypeLabel;

pub type Timestamp = DateTime<Utc>;

/// Truncates a timestamp to whole milliseconds.
pub fn to_millis(ts: Timestamp) -> Timestamp {
    ts.duration_trunc(TimeDelta::milliseconds(1)).unwrap_or(ts)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl AttrValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            AttrValue::Str(s) => Some(s),
            _ => None,
        }
    }

    /// OCEL 2.0 attribute type name.
    pub fn type_name(&self) -> &'static str {
        match self {
            AttrValue::Str(_) => "string",
            AttrValue::Int(_) => "integer",
            AttrValue::Float(_) => "float",
            AttrValue::Bool(_) => "boolean",
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Str(s) => f.write_str(s),
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Float(x) => write!(f, "{x}"),
            AttrValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Str(s.to_string())
    }
}

impl From<bool> for AttrValue {
    fn from(b: bool) -> Self {
        AttrValue::Bool(b)
    }
}

impl From<String> for AttrValue {
    fn from(s: String) -> Self {
        AttrValue::Str(s)
    }
}

/// A qualified relation to an object (E2O or O2O).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pub object_id: String,
    pub qualifier: String,
}

impl Relation {
    pub fn new(object_id: impl Into<String>, qualifier: impl Into<String>) -> Self {
        Self {
            object_id: object_id.into(),
            qualifier: qualifier.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcelObject {
    pub id: String,
    pub object_type: TypeLabel,
    /// Timestamped value history per attribute, ascending by time.
    pub attributes: BTreeMap<String, Vec<(Timestamp, AttrValue)>>,
    pub o2o: Vec<Relation>,
}

impl OcelObject {
    pub fn new(id: impl Into<String>, object_type: TypeLabel) -> Self {
        Self {
            id: id.into(),
            object_type,
            attributes: BTreeMap::new(),
            o2o: Vec::new(),
        }
    }

    pub fn with_attribute(mut self, name: &str, time: Timestamp, value: impl Into<AttrValue>) -> Self {
        self.attributes
            .entry(name.to_string())
            .or_default()
            .push((time, value.into()));
        self
    }

    pub fn with_o2o(mut self, target: impl Into<String>, qualifier: impl Into<String>) -> Self {
        self.o2o.push(Relation::new(target, qualifier));
        self
    }

    /// Latest value of a timestamped attribute.
    pub fn latest(&self, name: &str) -> Option<&AttrValue> {
        self.attributes.get(name).and_then(|v| v.last()).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcelEvent {
    pub id: String,
    pub activity: TypeLabel,
    pub timestamp: Timestamp,
    pub attributes: BTreeMap<String, AttrValue>,
    pub e2o: Vec<Relation>,
}

impl OcelEvent {
    pub fn new(id: impl Into<String>, activity: TypeLabel, timestamp: Timestamp) -> Self {
        Self {
            id: id.into(),
            activity,
            timestamp,
            attributes: BTreeMap::new(),
            e2o: Vec::new(),
        }
    }

    pub fn with_e2o(mut self, object: impl Into<String>, qualifier: impl Into<String>) -> Self {
        self.e2o.push(Relation::new(object, qualifier));
        self
    }

    pub fn with_attribute(mut self, name: &str, value: impl Into<AttrValue>) -> Self {
        self.attributes.insert(name.to_string(), value.into());
        self
    }

    pub fn relates_to(&self, object_id: &str) -> bool {
        self.e2o.iter().any(|r| r.object_id == object_id)
    }

    /// Ids of related objects, each once, in relation order.
    pub fn related_ids(&self) -> impl Iterator<Item = &str> {
        let mut seen = HashSet::new();
        self.e2o
            .iter()
            .map(|r| r.object_id.as_str())
            .filter(move |id| seen.insert(*id))
    }
}

/// Unvalidated log content: what a reader or a transformation hands to [`build_log`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogParts {
    pub objects: Vec<OcelObject>,
    pub events: Vec<OcelEvent>,
}

/// Errors block loading; warnings do not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_loadable(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn error_codes(&self) -> Vec<IssueCode> {
        self.errors.iter().map(|i| i.code).collect()
    }

    pub fn warning_codes(&self) -> Vec<IssueCode> {
        self.warnings.iter().map(|i| i.code).collect()
    }
}

/// Runs every integrity check over raw log content.
///
/// Errors: duplicate ids, dangling E2O/O2O endpoints, unsorted attribute timelines.
/// Warnings: events without related objects.
pub fn check_parts(parts: &LogParts) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut object_ids = HashSet::new();
    for obj in &parts.objects {
        if !object_ids.insert(obj.id.as_str()) {
            report.errors.push(Issue::new(
                IssueCode::DupObjectId,
                format!("object id `{}` is used more than once", obj.id),
                format!("objects[{}]", obj.id),
            ));
        }
    }

    for obj in &parts.objects {
        for (i, rel) in obj.o2o.iter().enumerate() {
            if !object_ids.contains(rel.object_id.as_str()) {
                report.errors.push(Issue::new(
                    IssueCode::DanglingO2o,
                    format!("object `{}` relates to unknown object `{}`", obj.id, rel.object_id),
                    format!("objects[{}].relationships[{i}]", obj.id),
                ));
            }
        }
        for (name, timeline) in &obj.attributes {
            if timeline.windows(2).any(|w| w[0].0 > w[1].0) {
                report.errors.push(Issue::new(
                    IssueCode::UnsortedAttributeTimeline,
                    format!("attribute `{name}` of object `{}` is not sorted by time", obj.id),
                    format!("objects[{}].attributes[{name}]", obj.id),
                ));
            }
        }
    }

    let mut event_ids = HashSet::new();
    for ev in &parts.events {
        if !event_ids.insert(ev.id.as_str()) {
            report.errors.push(Issue::new(
                IssueCode::DupEventId,
                format!("event id `{}` is used more than once", ev.id),
                format!("events[{}]", ev.id),
            ));
        }
        if ev.e2o.is_empty() {
            report.warnings.push(Issue::new(
                IssueCode::NoRelatedObjects,
                format!("event `{}` relates to no object", ev.id),
                format!("events[{}].relationships", ev.id),
            ));
        }
        for (i, rel) in ev.e2o.iter().enumerate() {
            if !object_ids.contains(rel.object_id.as_str()) {
                report.errors.push(Issue::new(
                    IssueCode::DanglingE2o,
                    format!("event `{}` relates to unknown object `{}`", ev.id, rel.object_id),
                    format!("events[{}].relationships[{i}]", ev.id),
                ));
            }
        }
    }
    report
}

/// A validated, indexed, immutable object-centric event log.
#[derive(Debug, Clone, Default)]
pub struct OcelLog {
    objects: BTreeMap<String, OcelObject>,
    events: BTreeMap<String, OcelEvent>,
    object_types: BTreeSet<TypeLabel>,
    event_types: BTreeSet<TypeLabel>,
    by_type: BTreeMap<TypeLabel, Vec<String>>,
    by_activity: BTreeMap<TypeLabel, Vec<String>>,
    by_object: HashMap<String, Vec<String>>,
}

/// Builds an indexed log, reporting every integrity violation at once.
pub fn build_log(objects: Vec<OcelObject>, events: Vec<OcelEvent>) -> Result<OcelLog, IntegrityError> {
    OcelLog::from_parts(LogParts { objects, events })
}

impl OcelLog {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates and indexes. Relations are sorted by (object id, qualifier)
    /// and timestamps truncated to milliseconds.
    pub fn from_parts(parts: LogParts) -> Result<Self, IntegrityError> {
        let report = check_parts(&parts);
        if !report.errors.is_empty() {
            return Err(IntegrityError {
                violations: report.errors,
            });
        }

        let mut log = OcelLog::default();
        for mut obj in parts.objects {
            obj.o2o.sort();
            for timeline in obj.attributes.values_mut() {
                for (t, _) in timeline.iter_mut() {
                    *t = to_millis(*t);
                }
            }
            log.object_types.insert(obj.object_type.clone());
            log.by_type
                .entry(obj.object_type.clone())
                .or_default()
                .push(obj.id.clone());
            log.objects.insert(obj.id.clone(), obj);
        }
        for mut ev in parts.events {
            ev.e2o.sort();
            ev.timestamp = to_millis(ev.timestamp);
            log.event_types.insert(ev.activity.clone());
            log.by_activity
                .entry(ev.activity.clone())
                .or_default()
                .push(ev.id.clone());
            for id in ev.related_ids() {
                log.by_object.entry(id.to_string()).or_default().push(ev.id.clone());
            }
            log.events.insert(ev.id.clone(), ev);
        }
        for ids in log.by_type.values_mut().chain(log.by_activity.values_mut()) {
            ids.sort();
        }
        let events = &log.events;
        for ids in log.by_object.values_mut() {
            ids.sort_by(|a, b| {
                let (ea, eb) = (&events[a], &events[b]);
                (ea.timestamp, &ea.id).cmp(&(eb.timestamp, &eb.id))
            });
        }
        Ok(log)
    }

    /// Clones the content back out, sorted by id.
    pub fn to_parts(&self) -> LogParts {
        LogParts {
            objects: self.objects.values().cloned().collect(),
            events: self.events.values().cloned().collect(),
        }
    }

    pub fn into_parts(self) -> LogParts {
        LogParts {
            objects: self.objects.into_values().collect(),
            events: self.events.into_values().collect(),
        }
    }

    /// Objects in id order.
    pub fn objects(&self) -> impl Iterator<Item = &OcelObject> {
        self.objects.values()
    }

    /// Events in id order.
    pub fn events(&self) -> impl Iterator<Item = &OcelEvent> {
        self.events.values()
    }

    pub fn object(&self, id: &str) -> Option<&OcelObject> {
        self.objects.get(id)
    }

    pub fn event(&self, id: &str) -> Option<&OcelEvent> {
        self.events.get(id)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn object_types(&self) -> &BTreeSet<TypeLabel> {
        &self.object_types
    }

    pub fn event_types(&self) -> &BTreeSet<TypeLabel> {
        &self.event_types
    }

    pub fn objects_of_type<'a>(&'a self, object_type: &TypeLabel) -> impl Iterator<Item = &'a OcelObject> + 'a {
        self.by_type
            .get(object_type)
            .into_iter()
            .flatten()
            .map(|id| &self.objects[id])
    }

    pub fn events_of_activity<'a>(&'a self, activity: &TypeLabel) -> impl Iterator<Item = &'a OcelEvent> + 'a {
        self.by_activity
            .get(activity)
            .into_iter()
            .flatten()
            .map(|id| &self.events[id])
    }

    /// Events related to the object, ascending by (timestamp, event id).
    pub fn events_of_object(&self, object_id: &str) -> Result<Vec<&OcelEvent>> {
        if !self.objects.contains_key(object_id) {
            return Err(Error::UnknownObject(object_id.to_string()));
        }
        Ok(self
            .by_object
            .get(object_id)
            .into_iter()
            .flatten()
            .map(|id| &self.events[id])
            .collect())
    }
}

/// Free-function form of [`OcelLog::events_of_object`].
pub fn events_of_object<'a>(log: &'a OcelLog, object_id: &str) -> Result<Vec<&'a OcelEvent>> {
    log.events_of_object(object_id)
}

/// Structural equality: same objects and events. Indices are derived.
impl PartialEq for OcelLog {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects && self.events == other.events
    }
}
