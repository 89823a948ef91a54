//! Random small logs for property tests.
#![allow(dead_code)]

use chrono::{TimeZone, Utc};
use ocpm_core::{build_log, AttrValue, OcelEvent, OcelLog, OcelObject, Timestamp, TypeLabel};
use proptest::prelude::*;

pub const OBJECT_TYPES: &[&str] = &["claim", "employee", "part"];
pub const ACTIVITIES: &[&str] = &["rc", "cn", "sc", "rCP", "pCP", "cCPi"];
pub const ROLES: &[&str] = &["claim_handler", "claim_part_investigator", "adjuster"];

pub fn label(s: &str) -> TypeLabel {
    TypeLabel::parse(s).unwrap()
}

fn ts(ms: i64) -> Timestamp {
    Utc.timestamp_millis_opt(1_727_222_400_000 + ms).unwrap()
}

fn attr_value() -> impl Strategy<Value = AttrValue> {
    prop_oneof![
        "[a-z ,()\"é0-9]{0,6}".prop_map(AttrValue::Str),
        any::<i64>().prop_map(AttrValue::Int),
        any::<f64>()
            .prop_filter("finite", |x| x.is_finite())
            .prop_map(AttrValue::Float),
        any::<bool>().prop_map(AttrValue::Bool),
    ]
}

fn object(i: usize, n_objects: usize) -> impl Strategy<Value = OcelObject> {
    (
        0..OBJECT_TYPES.len(),
        prop::collection::vec((0i64..50_000, 0..ROLES.len()), 1..3),
        prop::option::of((0i64..50_000, attr_value())),
        prop::collection::vec((0..n_objects, "[a-z_]{1,5}"), 0..3),
    )
        .prop_map(move |(t, mut roles, extra, o2o)| {
            roles.sort();
            let mut obj = OcelObject::new(format!("o{i:02}"), label(OBJECT_TYPES[t]));
            for (ms, r) in roles {
                obj = obj.with_attribute("role", ts(ms), ROLES[r]);
            }
            if let Some((ms, v)) = extra {
                obj = obj.with_attribute("extra", ts(ms), v);
            }
            for (target, q) in o2o {
                obj = obj.with_o2o(format!("o{target:02}"), q);
            }
            obj
        })
}

fn event(j: usize, n_objects: usize) -> impl Strategy<Value = OcelEvent> {
    (
        0..ACTIVITIES.len(),
        // narrow window so timestamp ties are common
        0i64..40,
        prop::collection::vec((0..n_objects, prop::sample::select(vec!["", "of", "by"])), 0..4),
        prop::option::of(attr_value()),
    )
        .prop_map(move |(a, minute, rels, attr)| {
            let mut ev = OcelEvent::new(format!("e{j:03}"), label(ACTIVITIES[a]), ts(minute * 60_000));
            for (o, q) in rels {
                ev = ev.with_e2o(format!("o{o:02}"), q);
            }
            if let Some(v) = attr {
                ev = ev.with_attribute("cost", v);
            }
            ev
        })
}

/// A valid log with 1..=12 objects and 0..=`max_events` events.
pub fn arb_log_sized(max_events: usize) -> impl Strategy<Value = OcelLog> {
    (1usize..=12, 0..=max_events).prop_flat_map(|(n_objects, n_events)| {
        let objects: Vec<_> = (0..n_objects).map(|i| object(i, n_objects)).collect();
        let events: Vec<_> = (0..n_events).map(|j| event(j, n_objects)).collect();
        (objects, events).prop_map(|(o, e)| build_log(o, e).expect("generated logs are valid"))
    })
}

pub fn arb_log() -> impl Strategy<Value = OcelLog> {
    arb_log_sized(200)
}
