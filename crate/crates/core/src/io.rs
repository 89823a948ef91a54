//! OCEL 2.0 JSON reading, canonical writing, and validation.
//!
//! The reader is tolerant: unknown fields become `UNKNOWN_FIELD` warnings and
//! object attribute histories are sorted by time. The writer is strict and
//! canonical: everything sorted by id, fixed key order, millisecond UTC
//! timestamps, so equal logs serialize to identical bytes.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Issue, IssueCode, Result};
use crate::label::TypeLabel;
use crate::model::{check_parts, AttrValue, LogParts, OcelEvent, OcelLog, OcelObject, Relation, Timestamp};

pub use crate::model::ValidationReport;

const TOP_LEVEL_KEYS: &[&str] = &["objectTypes", "eventTypes", "objects", "events"];
const OBJECT_KEYS: &[&str] = &["id", "type", "attributes", "relationships"];
const EVENT_KEYS: &[&str] = &["id", "type", "time", "attributes", "relationships"];

/// Aggregated integrity report over raw content.
pub fn validate(parts: &LogParts) -> ValidationReport {
    check_parts(parts)
}

/// Parses and validates a document.
pub fn load_json(text: &str) -> Result<OcelLog> {
    load_json_with_report(text).map(|(log, _)| log)
}

/// Like [`load_json`], also returning the warnings collected while reading.
pub fn load_json_with_report(text: &str) -> Result<(OcelLog, ValidationReport)> {
    let (parts, mut warnings) = parse_document(text)?;
    let mut report = check_parts(&parts);
    let log = OcelLog::from_parts(parts)?;
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    Ok((log, report))
}

/// Reads a document into unvalidated parts plus reader warnings.
///
/// Fails only on malformed JSON or missing required fields; integrity problems
/// are left for [`validate`] or [`OcelLog::from_parts`].
pub fn parse_document(text: &str) -> Result<(LogParts, Vec<Issue>)> {
    let root: Value = serde_json::from_str(text)?;
    let root = root
        .as_object()
        .ok_or_else(|| Error::schema("document must be a JSON object", "$"))?;
    let mut warnings = Vec::new();
    unknown_fields(root, TOP_LEVEL_KEYS, "$", &mut warnings);

    let mut parts = LogParts::default();
    for (i, raw) in required_array(root, "objects", "$")?.iter().enumerate() {
        parts.objects.push(parse_object(raw, i, &mut warnings)?);
    }
    for (i, raw) in required_array(root, "events", "$")?.iter().enumerate() {
        parts.events.push(parse_event(raw, i, &mut warnings)?);
    }
    Ok((parts, warnings))
}

fn unknown_fields(map: &Map<String, Value>, known: &[&str], at: &str, warnings: &mut Vec<Issue>) {
    for key in map.keys().filter(|k| !known.contains(&k.as_str())) {
        warnings.push(Issue::new(
            IssueCode::UnknownField,
            format!("unknown field `{key}` dropped"),
            at.to_string(),
        ));
    }
}

fn required_array<'a>(map: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Vec<Value>> {
    match map.get(key) {
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(Error::schema(format!("`{key}` must be an array"), at)),
        None => Err(Error::schema(format!("missing required field `{key}`"), at)),
    }
}

fn optional_array<'a>(map: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a [Value]> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(&[]),
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(Error::schema(format!("`{key}` must be an array"), at)),
    }
}

fn required_str<'a>(map: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a str> {
    match map.get(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(Error::schema(format!("`{key}` must be a string"), at)),
        None => Err(Error::schema(format!("missing required field `{key}`"), at)),
    }
}

fn as_object<'a>(raw: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    raw.as_object()
        .ok_or_else(|| Error::schema("expected a JSON object", at))
}

/// Locator for an element: its id when known, its index otherwise.
fn element_locator(kind: &str, map: &Map<String, Value>, index: usize) -> String {
    match map.get("id").and_then(Value::as_str) {
        Some(id) => format!("{kind}[{id}]"),
        None => format!("{kind}[#{index}]"),
    }
}

fn parse_label(text: &str, at: &str) -> Result<TypeLabel> {
    TypeLabel::parse(text).map_err(|e| Error::schema(e.to_string(), at))
}

fn parse_time(text: &str, at: &str) -> Result<Timestamp> {
    if let Ok(ts) = DateTime::parse_from_rfc3339(text) {
        return Ok(ts.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(text, fmt) {
            return Ok(naive.and_utc());
        }
    }
    Err(Error::schema(format!("invalid timestamp `{text}`"), at))
}

fn parse_value(raw: &Value, at: &str) -> Result<AttrValue> {
    match raw {
        Value::String(s) => Ok(AttrValue::Str(s.clone())),
        Value::Bool(b) => Ok(AttrValue::Bool(*b)),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(AttrValue::Int(i)),
            None => n
                .as_f64()
                .map(AttrValue::Float)
                .ok_or_else(|| Error::schema("unrepresentable number", at)),
        },
        _ => Err(Error::schema(
            "attribute value must be a string, number, or boolean",
            at,
        )),
    }
}

fn parse_relationships(map: &Map<String, Value>, at: &str, warnings: &mut Vec<Issue>) -> Result<Vec<Relation>> {
    let mut out = Vec::new();
    for (i, raw) in required_array(map, "relationships", at)?.iter().enumerate() {
        let here = format!("{at}.relationships[{i}]");
        let rel = as_object(raw, &here)?;
        unknown_fields(rel, &["objectId", "qualifier"], &here, warnings);
        let object_id = required_str(rel, "objectId", &here)?;
        let qualifier = match rel.get("qualifier") {
            None | Some(Value::Null) => "",
            Some(Value::String(q)) => q,
            Some(_) => return Err(Error::schema("`qualifier` must be a string", here)),
        };
        out.push(Relation::new(object_id, qualifier));
    }
    Ok(out)
}

fn parse_object(raw: &Value, index: usize, warnings: &mut Vec<Issue>) -> Result<OcelObject> {
    let map = as_object(raw, &format!("objects[#{index}]"))?;
    let at = element_locator("objects", map, index);
    unknown_fields(map, OBJECT_KEYS, &at, warnings);
    let id = required_str(map, "id", &at)?;
    let object_type = parse_label(required_str(map, "type", &at)?, &at)?;
    let mut obj = OcelObject::new(id, object_type);
    for (i, raw_attr) in optional_array(map, "attributes", &at)?.iter().enumerate() {
        let here = format!("{at}.attributes[{i}]");
        let attr = as_object(raw_attr, &here)?;
        unknown_fields(attr, &["name", "time", "value"], &here, warnings);
        let name = required_str(attr, "name", &here)?;
        let time = parse_time(required_str(attr, "time", &here)?, &here)?;
        let value = parse_value(
            attr.get("value")
                .ok_or_else(|| Error::schema("missing required field `value`", &here))?,
            &here,
        )?;
        obj.attributes.entry(name.to_string()).or_default().push((time, value));
    }
    for timeline in obj.attributes.values_mut() {
        timeline.sort_by_key(|(t, _)| *t);
    }
    obj.o2o = parse_relationships(map, &at, warnings)?;
    Ok(obj)
}

fn parse_event(raw: &Value, index: usize, warnings: &mut Vec<Issue>) -> Result<OcelEvent> {
    let map = as_object(raw, &format!("events[#{index}]"))?;
    let at = element_locator("events", map, index);
    unknown_fields(map, EVENT_KEYS, &at, warnings);
    let id = required_str(map, "id", &at)?;
    let activity = parse_label(required_str(map, "type", &at)?, &at)?;
    let time = match map.get("time") {
        Some(Value::String(s)) => parse_time(s, &at)?,
        Some(_) => return Err(Error::schema(format!("`time` of event `{id}` must be a string"), at)),
        None => {
            return Err(Error::schema(
                format!("event `{id}` is missing required field `time`"),
                at,
            ))
        }
    };
    let mut ev = OcelEvent::new(id, activity, time);
    for (i, raw_attr) in optional_array(map, "attributes", &at)?.iter().enumerate() {
        let here = format!("{at}.attributes[{i}]");
        let attr = as_object(raw_attr, &here)?;
        unknown_fields(attr, &["name", "value"], &here, warnings);
        let name = required_str(attr, "name", &here)?;
        let value = parse_value(
            attr.get("value")
                .ok_or_else(|| Error::schema("missing required field `value`", &here))?,
            &here,
        )?;
        ev.attributes.insert(name.to_string(), value);
    }
    ev.e2o = parse_relationships(map, &at, warnings)?;
    Ok(ev)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Document {
    object_types: Vec<TypeDecl>,
    event_types: Vec<TypeDecl>,
    objects: Vec<ObjectOut>,
    events: Vec<EventOut>,
}

#[derive(Serialize)]
struct TypeDecl {
    name: String,
    attributes: Vec<AttrDecl>,
}

#[derive(Serialize)]
struct AttrDecl {
    name: String,
    #[serde(rename = "type")]
    kind: &'static str,
}

#[derive(Serialize)]
struct ObjectOut {
    id: String,
    #[serde(rename = "type")]
    kind: String,
    attributes: Vec<TimedAttrOut>,
    relationships: Vec<RelOut>,
}

#[derive(Serialize)]
struct EventOut {
    id: String,
    #[serde(rename = "type")]
    kind: String,
    time: String,
    attributes: Vec<AttrOut>,
    relationships: Vec<RelOut>,
}

#[derive(Serialize)]
struct TimedAttrOut {
    name: String,
    time: String,
    value: Value,
}

#[derive(Serialize)]
struct AttrOut {
    name: String,
    value: Value,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RelOut {
    object_id: String,
    qualifier: String,
}

pub fn format_time(ts: &Timestamp) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn value_json(v: &AttrValue) -> Value {
    match v {
        AttrValue::Str(s) => Value::String(s.clone()),
        AttrValue::Int(i) => Value::from(*i),
        AttrValue::Float(x) => Value::from(*x),
        AttrValue::Bool(b) => Value::Bool(*b),
    }
}

fn rels_out(rels: &[Relation]) -> Vec<RelOut> {
    rels.iter()
        .map(|r| RelOut {
            object_id: r.object_id.clone(),
            qualifier: r.qualifier.clone(),
        })
        .collect()
}

/// Declared attribute names per type; the first value seen (in id order) fixes the type name.
fn declarations<'a>(
    types: impl Iterator<Item = &'a TypeLabel>,
    attrs: impl Iterator<Item = (&'a TypeLabel, &'a str, &'a AttrValue)>,
) -> Vec<TypeDecl> {
    let mut table: BTreeMap<String, BTreeMap<String, &'static str>> =
        types.map(|t| (t.to_string(), BTreeMap::new())).collect();
    for (t, name, value) in attrs {
        table
            .entry(t.to_string())
            .or_default()
            .entry(name.to_string())
            .or_insert(value.type_name());
    }
    table
        .into_iter()
        .map(|(name, attrs)| TypeDecl {
            name,
            attributes: attrs.into_iter().map(|(name, kind)| AttrDecl { name, kind }).collect(),
        })
        .collect()
}

/// Canonical pretty-printed OCEL 2.0 JSON.
pub fn save_json(log: &OcelLog) -> String {
    let object_types = declarations(
        log.object_types().iter(),
        log.objects().flat_map(|o| {
            o.attributes
                .iter()
                .filter_map(move |(name, tl)| tl.first().map(|(_, v)| (&o.object_type, name.as_str(), v)))
        }),
    );
    let event_types = declarations(
        log.event_types().iter(),
        log.events().flat_map(|e| {
            e.attributes
                .iter()
                .map(move |(name, v)| (&e.activity, name.as_str(), v))
        }),
    );
    let objects = log
        .objects()
        .map(|o| ObjectOut {
            id: o.id.clone(),
            kind: o.object_type.to_string(),
            attributes: o
                .attributes
                .iter()
                .flat_map(|(name, tl)| {
                    tl.iter().map(move |(t, v)| TimedAttrOut {
                        name: name.clone(),
                        time: format_time(t),
                        value: value_json(v),
                    })
                })
                .collect(),
            relationships: rels_out(&o.o2o),
        })
        .collect();
    let events = log
        .events()
        .map(|e| EventOut {
            id: e.id.clone(),
            kind: e.activity.to_string(),
            time: format_time(&e.timestamp),
            attributes: e
                .attributes
                .iter()
                .map(|(name, v)| AttrOut {
                    name: name.clone(),
                    value: value_json(v),
                })
                .collect(),
            relationships: rels_out(&e.e2o),
        })
        .collect();
    let doc = Document {
        object_types,
        event_types,
        objects,
        events,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("document serialization is infallible");
    out.push('\n');
    out
}
