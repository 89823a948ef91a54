//! Frequency-annotated DFG and OC-DFG discovery, plus DOT rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::label::TypeLabel;
use crate::model::OcelLog;
use crate::ops::FlatLog;

/// Directly-follows graph of a case-based log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dfg {
    /// Number of trace positions carrying each activity.
    pub nodes: BTreeMap<TypeLabel, u64>,
    pub edges: BTreeMap<(TypeLabel, TypeLabel), u64>,
    pub start: BTreeMap<TypeLabel, u64>,
    pub end: BTreeMap<TypeLabel, u64>,
}

impl Dfg {
    pub fn node(&self, activity: &TypeLabel) -> u64 {
        self.nodes.get(activity).copied().unwrap_or(0)
    }

    pub fn edge(&self, from: &TypeLabel, to: &TypeLabel) -> u64 {
        self.edges.get(&(from.clone(), to.clone())).copied().unwrap_or(0)
    }

    /// Sum of edge counts into `activity`, optionally skipping its self-loop.
    pub fn incoming(&self, activity: &TypeLabel, include_self_loop: bool) -> u64 {
        self.edges
            .iter()
            .filter(|((a, b), _)| b == activity && (include_self_loop || a != activity))
            .map(|(_, n)| n)
            .sum()
    }

    pub fn outgoing(&self, activity: &TypeLabel, include_self_loop: bool) -> u64 {
        self.edges
            .iter()
            .filter(|((a, b), _)| a == activity && (include_self_loop || b != activity))
            .map(|(_, n)| n)
            .sum()
    }

    /// Every position is entered by an edge or a start and left by an edge or an end.
    pub fn is_flow_conserving(&self) -> bool {
        let starts: u64 = self.start.values().sum();
        let ends: u64 = self.end.values().sum();
        starts == ends
            && self.nodes.iter().all(|(n, &freq)| {
                let start = self.start.get(n).copied().unwrap_or(0);
                let end = self.end.get(n).copied().unwrap_or(0);
                self.incoming(n, true) + start == freq && self.outgoing(n, true) + end == freq
            })
    }

    /// Adds one trace.
    pub fn add_trace<'a>(&mut self, trace: impl IntoIterator<Item = &'a TypeLabel>) {
        let mut prev: Option<&TypeLabel> = None;
        for act in trace {
            *self.nodes.entry(act.clone()).or_default() += 1;
            match prev {
                None => *self.start.entry(act.clone()).or_default() += 1,
                Some(p) => *self.edges.entry((p.clone(), act.clone())).or_default() += 1,
            }
            prev = Some(act);
        }
        if let Some(last) = prev {
            *self.end.entry(last.clone()).or_default() += 1;
        }
    }
}

impl Dfg {
    /// Counts as JSON: `nodes`, `edges` as `[from, to, count]`, `start`, `end`.
    pub fn to_json(&self) -> Value {
        json!({
            "nodes": label_map(&self.nodes),
            "edges": self.edges.iter().map(|((a, b), n)| json!([a.to_string(), b.to_string(), n])).collect::<Vec<_>>(),
            "start": label_map(&self.start),
            "end": label_map(&self.end),
        })
    }
}

fn label_map(m: &BTreeMap<TypeLabel, u64>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

pub fn discover_dfg(flat: &FlatLog) -> Dfg {
    let mut dfg = Dfg::default();
    for trace in flat.traces() {
        dfg.add_trace(trace.iter().map(|e| &e.activity));
    }
    dfg
}

/// DFG over plain activity sequences.
pub fn dfg_from_traces<'a, T>(traces: impl IntoIterator<Item = T>) -> Dfg
where
    T: IntoIterator<Item = &'a TypeLabel>,
{
    let mut dfg = Dfg::default();
    for t in traces {
        dfg.add_trace(t);
    }
    dfg
}

/// Object-centric DFG: directly-follows relations per object, annotated by object type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OcDfg {
    /// Distinct events per activity.
    pub nodes: BTreeMap<TypeLabel, u64>,
    /// (object type, from, to) to count.
    pub typed_edges: BTreeMap<(TypeLabel, TypeLabel, TypeLabel), u64>,
    pub typed_start: BTreeMap<(TypeLabel, TypeLabel), u64>,
    pub typed_end: BTreeMap<(TypeLabel, TypeLabel), u64>,
    pub object_counts: BTreeMap<TypeLabel, u64>,
}

impl OcDfg {
    pub fn node(&self, activity: &TypeLabel) -> u64 {
        self.nodes.get(activity).copied().unwrap_or(0)
    }

    /// Edges contributed by objects of one type.
    pub fn edges_for(&self, object_type: &TypeLabel) -> BTreeMap<(TypeLabel, TypeLabel), u64> {
        self.typed_edges
            .iter()
            .filter(|((t, _, _), _)| t == object_type)
            .map(|((_, a, b), n)| ((a.clone(), b.clone()), *n))
            .collect()
    }

    pub fn object_types(&self) -> impl Iterator<Item = &TypeLabel> {
        self.object_counts.keys()
    }

    /// Counts as JSON, with typed entries as `[type, from, to, count]` / `[type, activity, count]`.
    pub fn to_json(&self) -> Value {
        let pairs = |m: &BTreeMap<(TypeLabel, TypeLabel), u64>| {
            m.iter()
                .map(|((t, a), n)| json!([t.to_string(), a.to_string(), n]))
                .collect::<Vec<_>>()
        };
        json!({
            "nodes": label_map(&self.nodes),
            "edges": self.typed_edges.iter()
                .map(|((t, a, b), n)| json!([t.to_string(), a.to_string(), b.to_string(), n]))
                .collect::<Vec<_>>(),
            "start": pairs(&self.typed_start),
            "end": pairs(&self.typed_end),
            "objects": label_map(&self.object_counts),
        })
    }
}

pub fn discover_ocdfg(log: &OcelLog) -> OcDfg {
    let mut model = OcDfg::default();
    for ev in log.events() {
        *model.nodes.entry(ev.activity.clone()).or_default() += 1;
    }
    for obj in log.objects() {
        let t = &obj.object_type;
        *model.object_counts.entry(t.clone()).or_default() += 1;
        let trace = log.events_of_object(&obj.id).expect("object ids come from the log");
        let (Some(first), Some(last)) = (trace.first(), trace.last()) else {
            continue;
        };
        *model
            .typed_start
            .entry((t.clone(), first.activity.clone()))
            .or_default() += 1;
        *model.typed_end.entry((t.clone(), last.activity.clone())).or_default() += 1;
        for pair in trace.windows(2) {
            let key = (t.clone(), pair[0].activity.clone(), pair[1].activity.clone());
            *model.typed_edges.entry(key).or_default() += 1;
        }
    }
    model
}

/// One colour per object type, assigned in type order.
const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_ids<'a>(nodes: impl Iterator<Item = &'a TypeLabel>) -> BTreeMap<&'a TypeLabel, String> {
    nodes.enumerate().map(|(i, n)| (n, format!("n{i}"))).collect()
}

pub trait ToDot {
    fn to_dot(&self) -> String;
}

impl ToDot for Dfg {
    fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfg {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n");
        let ids = node_ids(self.nodes.keys());
        for (n, freq) in &self.nodes {
            let _ = writeln!(out, "  {} [label={}];", ids[n], quote(&format!("{n} ({freq})")));
        }
        if !self.start.is_empty() {
            out.push_str("  start [shape=circle, label=\"\", style=filled, fillcolor=\"#2ca02c\"];\n");
        }
        if !self.end.is_empty() {
            out.push_str("  end [shape=doublecircle, label=\"\", style=filled, fillcolor=\"#d62728\"];\n");
        }
        for (n, count) in &self.start {
            let _ = writeln!(out, "  start -> {} [label=\"{count}\", style=dashed];", ids[n]);
        }
        for ((a, b), count) in &self.edges {
            let _ = writeln!(out, "  {} -> {} [label=\"{count}\"];", ids[a], ids[b]);
        }
        for (n, count) in &self.end {
            let _ = writeln!(out, "  {} -> end [label=\"{count}\", style=dashed];", ids[n]);
        }
        out.push_str("}\n");
        out
    }
}

impl ToDot for OcDfg {
    fn to_dot(&self) -> String {
        let mut out = String::from("digraph ocdfg {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n");
        let ids = node_ids(self.nodes.keys());
        for (n, freq) in &self.nodes {
            let _ = writeln!(out, "  {} [label={}];", ids[n], quote(&format!("{n} (E={freq})")));
        }
        for (ti, (t, objects)) in self.object_counts.iter().enumerate() {
            let color = PALETTE[ti % PALETTE.len()];
            let name = t.to_string();
            let _ = writeln!(
                out,
                "  start{ti} [shape=ellipse, style=filled, fillcolor=\"{color}\", fontcolor=white, label={}];",
                quote(&format!("{name} ({objects})"))
            );
            let _ = writeln!(out, "  end{ti} [shape=doublecircle, label=\"\", color=\"{color}\"];");
            for ((_, a), count) in self.typed_start.iter().filter(|((st, _), _)| st == t) {
                let _ = writeln!(
                    out,
                    "  start{ti} -> {} [label={}, color=\"{color}\", style=dashed];",
                    ids[a],
                    quote(&format!("{name} {count}"))
                );
            }
            for ((a, b), count) in self.edges_for(t) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [label={}, color=\"{color}\", fontcolor=\"{color}\"];",
                    ids[&a],
                    ids[&b],
                    quote(&format!("{name} {count}"))
                );
            }
            for ((_, a), count) in self.typed_end.iter().filter(|((et, _), _)| et == t) {
                let _ = writeln!(
                    out,
                    "  {} -> end{ti} [label={}, color=\"{color}\", style=dashed];",
                    ids[a],
                    quote(&format!("{name} {count}"))
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn dfg_to_dot(model: &impl ToDot) -> String {
    model.to_dot()
}
