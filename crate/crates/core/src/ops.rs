//! Log algebra: activity filtering, relation-linked retention, drill-down,
//! unfolding, object-type projection, latest-note filtering, flattening, and
//! the activity × object-type extraction matrix.
//!
//! Every operation takes a log by reference and returns a new one.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::label::TypeLabel;
use crate::model::{LogParts, OcelLog, Timestamp};
use crate::vocab;

fn rebuild(parts: LogParts) -> OcelLog {
    OcelLog::from_parts(parts).expect("log operations preserve referential integrity")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    Keep,
    Drop,
}

/// Keeps or drops events by activity. Objects stay even when orphaned.
pub fn filter_activities(log: &OcelLog, mode: FilterMode, activities: &BTreeSet<TypeLabel>) -> OcelLog {
    let mut parts = log.to_parts();
    parts
        .events
        .retain(|e| activities.contains(&e.activity) == (mode == FilterMode::Keep));
    rebuild(parts)
}

/// Removes every `target` event that shares no `via`-typed object with any `anchor` event.
///
/// Event order is ignored: a target event before its linking anchor still counts.
pub fn retain_linked(log: &OcelLog, target: &TypeLabel, anchor: &TypeLabel, via: &TypeLabel) -> OcelLog {
    let is_via = |id: &str| log.object(id).is_some_and(|o| &o.object_type == via);
    let linked: HashSet<&str> = log
        .events_of_activity(anchor)
        .flat_map(|e| e.related_ids())
        .filter(|id| is_via(id))
        .collect();
    let mut parts = log.to_parts();
    parts
        .events
        .retain(|e| &e.activity != target || e.related_ids().any(|id| is_via(id) && linked.contains(id)));
    rebuild(parts)
}

/// Refines every object of `object_type` by the latest value of `attribute`.
pub fn drill_down(log: &OcelLog, object_type: &TypeLabel, attribute: &str) -> Result<OcelLog> {
    let mut parts = log.to_parts();
    for obj in parts.objects.iter_mut().filter(|o| &o.object_type == object_type) {
        let value = obj.latest(attribute).ok_or_else(|| Error::MissingAttribute {
            object_id: obj.id.clone(),
            attribute: attribute.to_string(),
        })?;
        obj.object_type = object_type.refine(value.to_string());
    }
    Ok(rebuild(parts))
}

/// Relabels `activity` events related to at least one `object_type` object as
/// `(activity, object_type)`.
pub fn unfold(log: &OcelLog, activity: &TypeLabel, object_type: &TypeLabel) -> OcelLog {
    let unfolded = activity.refine(object_type.to_string());
    let mut parts = log.to_parts();
    for ev in parts.events.iter_mut().filter(|e| &e.activity == activity) {
        let touches = ev
            .e2o
            .iter()
            .any(|r| log.object(&r.object_id).is_some_and(|o| &o.object_type == object_type));
        if touches {
            ev.activity = unfolded.clone();
        }
    }
    rebuild(parts)
}

/// Keeps only objects of the given types.
///
/// Relations to removed objects are dropped, then events that lost all of
/// their relations are dropped too.
pub fn project_object_types(log: &OcelLog, keep: &BTreeSet<TypeLabel>) -> OcelLog {
    let LogParts {
        mut objects,
        mut events,
    } = log.to_parts();
    objects.retain(|o| keep.contains(&o.object_type));
    let kept: HashSet<String> = objects.iter().map(|o| o.id.clone()).collect();
    remove_dangling(objects, &mut events, &kept)
}

fn remove_dangling(
    mut objects: Vec<crate::model::OcelObject>,
    events: &mut Vec<crate::model::OcelEvent>,
    kept: &HashSet<String>,
) -> OcelLog {
    for obj in &mut objects {
        obj.o2o.retain(|r| kept.contains(&r.object_id));
    }
    events.retain_mut(|e| {
        let before = e.e2o.len();
        e.e2o.retain(|r| kept.contains(&r.object_id));
        before == 0 || !e.e2o.is_empty()
    });
    rebuild(LogParts {
        objects,
        events: std::mem::take(events),
    })
}

/// Keeps one note per claim: the latest `cn` strictly before the claim's first `sc`.
///
/// Claims without a scan keep their latest note overall; claims whose notes
/// all follow the first scan keep none. A note event related to several claims
/// survives if any of them selects it. Note objects that only belonged to
/// dropped note events are removed along with relations to them.
pub fn latest_note_filter(log: &OcelLog) -> OcelLog {
    let create_note = vocab::activity(vocab::CREATE_NOTE);
    let scan = vocab::activity(vocab::SCAN_CLAIM);
    let claim = vocab::object_type(vocab::CLAIM);
    let note_type = vocab::object_type(vocab::CLAIM_NOTE);

    let mut selected: HashSet<&str> = HashSet::new();
    let mut governed: HashSet<&str> = HashSet::new();
    for c in log.objects_of_type(&claim) {
        let trace = log.events_of_object(&c.id).expect("claim ids come from the log");
        let first_scan: Option<Timestamp> = trace.iter().find(|e| e.activity == scan).map(|e| e.timestamp);
        let mut notes = trace.iter().filter(|e| e.activity == create_note);
        governed.extend(notes.clone().map(|e| e.id.as_str()));
        // trace is ascending, so the last qualifying note is the latest
        let pick = notes.rfind(|e| first_scan.is_none_or(|s| e.timestamp < s));
        if let Some(e) = pick {
            selected.insert(e.id.as_str());
        }
    }

    let dropped: HashSet<&str> = governed.difference(&selected).copied().collect();
    let note_of = |id: &str| -> Vec<String> {
        log.event(id)
            .into_iter()
            .flat_map(|e| e.related_ids())
            .filter(|o| log.object(o).is_some_and(|o| o.object_type == note_type))
            .map(str::to_string)
            .collect()
    };
    let still_used: HashSet<String> = log
        .events_of_activity(&create_note)
        .filter(|e| !dropped.contains(e.id.as_str()))
        .flat_map(|e| note_of(&e.id))
        .collect();
    let removed_notes: HashSet<String> = dropped
        .iter()
        .flat_map(|id| note_of(id))
        .filter(|n| !still_used.contains(n))
        .collect();

    let LogParts {
        mut objects,
        mut events,
    } = log.to_parts();
    events.retain(|e| !dropped.contains(e.id.as_str()));
    objects.retain(|o| !removed_notes.contains(&o.id));
    let kept: HashSet<String> = objects.iter().map(|o| o.id.clone()).collect();
    remove_dangling(objects, &mut events, &kept)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub event_id: String,
    pub activity: TypeLabel,
    pub timestamp: Timestamp,
}

/// Case-based log obtained by flattening on one object type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatLog {
    pub case_object_type: TypeLabel,
    /// Case id (object id) to trace, ascending by (timestamp, event id).
    pub cases: BTreeMap<String, Vec<TraceEntry>>,
}

impl FlatLog {
    pub fn case_count(&self) -> usize {
        self.cases.len()
    }

    pub fn traces(&self) -> impl Iterator<Item = &[TraceEntry]> {
        self.cases.values().map(Vec::as_slice)
    }

    /// Activity sequences, one per case.
    pub fn variants(&self) -> Vec<Vec<TypeLabel>> {
        self.traces()
            .map(|t| t.iter().map(|e| e.activity.clone()).collect())
            .collect()
    }
}

/// One case per object of `object_type`; shared events appear in every case they touch.
pub fn flatten(log: &OcelLog, object_type: &TypeLabel) -> Result<FlatLog> {
    if !log.object_types().contains(object_type) {
        return Err(Error::UnknownObjectType(object_type.clone()));
    }
    let mut cases = BTreeMap::new();
    for obj in log.objects_of_type(object_type) {
        let trace = log
            .events_of_object(&obj.id)?
            .into_iter()
            .map(|e| TraceEntry {
                event_id: e.id.clone(),
                activity: e.activity.clone(),
                timestamp: e.timestamp,
            })
            .collect();
        cases.insert(obj.id.clone(), trace);
    }
    Ok(FlatLog {
        case_object_type: object_type.clone(),
        cases,
    })
}

/// Activity × object-type E2O relation counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractionMatrix {
    pub activities: Vec<TypeLabel>,
    pub object_types: Vec<TypeLabel>,
    /// `cells[row][col]`, rows follow `activities`, columns follow `object_types`.
    pub cells: Vec<Vec<u64>>,
}

impl ExtractionMatrix {
    pub fn cell(&self, activity: &TypeLabel, object_type: &TypeLabel) -> u64 {
        let row = self.activities.iter().position(|a| a == activity);
        let col = self.object_types.iter().position(|t| t == object_type);
        match (row, col) {
            (Some(r), Some(c)) => self.cells[r][c],
            _ => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.activities.is_empty() && self.object_types.is_empty()
    }

    pub fn row_total(&self, activity: &TypeLabel) -> u64 {
        self.activities
            .iter()
            .position(|a| a == activity)
            .map_or(0, |r| self.cells[r].iter().sum())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("activity");
        for t in &self.object_types {
            out.push(',');
            out.push_str(&csv_field(&t.to_string()));
        }
        out.push('\n');
        for (a, row) in self.activities.iter().zip(&self.cells) {
            out.push_str(&csv_field(&a.to_string()));
            for n in row {
                let _ = write!(out, ",{n}");
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sorted_by_display<'a>(labels: impl Iterator<Item = &'a TypeLabel>) -> Vec<TypeLabel> {
    let mut v: Vec<TypeLabel> = labels.cloned().collect();
    v.sort_by_cached_key(|l| (l.to_string(), l.clone()));
    v
}

pub fn extraction_matrix(log: &OcelLog) -> ExtractionMatrix {
    let activities = sorted_by_display(log.event_types().iter());
    let object_types = sorted_by_display(log.object_types().iter());
    let row: BTreeMap<&TypeLabel, usize> = activities.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let col: BTreeMap<&TypeLabel, usize> = object_types.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut cells = vec![vec![0u64; object_types.len()]; activities.len()];
    for ev in log.events() {
        let r = row[&ev.activity];
        for id in ev.related_ids() {
            let obj = log.object(id).expect("validated log");
            cells[r][col[&obj.object_type]] += 1;
        }
    }
    ExtractionMatrix {
        activities,
        object_types,
        cells,
    }
}
