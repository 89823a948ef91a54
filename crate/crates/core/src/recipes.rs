//! The four claim-part analyses, the human/AI attribution of investigations,
//! and the scaling metric, each composed from log operations and discovery.
//!
//! Q1 and Q2 flatten on claim and return a DFG; Q3 and Q4 return an OC-DFG of
//! an unfolded log. None of them touches its input.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::discovery::{discover_dfg, discover_ocdfg, Dfg, OcDfg};
use crate::error::{Error, Result};
use crate::label::TypeLabel;
use crate::model::OcelLog;
use crate::ops::{self, FilterMode};
use crate::vocab::{self, activity, object_type};

fn labels(names: &[&str]) -> BTreeSet<TypeLabel> {
    names.iter().map(|n| activity(n)).collect()
}

/// Handler variant: drop AI activities, keep investigations on handler-reported claims.
pub fn q1_human_effectiveness(log: &OcelLog) -> Result<Dfg> {
    let claim = object_type(vocab::CLAIM);
    let filtered = ops::filter_activities(
        log,
        FilterMode::Drop,
        &labels(&[vocab::SCAN_CLAIM, vocab::PREDICT_CLAIM_PART]),
    );
    let linked = ops::retain_linked(
        &filtered,
        &activity(vocab::CREATE_INVESTIGATION),
        &activity(vocab::REPORT_CLAIM_PART),
        &claim,
    );
    Ok(discover_dfg(&ops::flatten(&linked, &claim)?))
}

/// AI variant: drop handler reports, keep investigations on AI-predicted claims.
pub fn q2_ai_effectiveness(log: &OcelLog) -> Result<Dfg> {
    let claim = object_type(vocab::CLAIM);
    let filtered = ops::filter_activities(log, FilterMode::Drop, &labels(&[vocab::REPORT_CLAIM_PART]));
    let linked = ops::retain_linked(
        &filtered,
        &activity(vocab::CREATE_INVESTIGATION),
        &activity(vocab::PREDICT_CLAIM_PART),
        &claim,
    );
    Ok(discover_dfg(&ops::flatten(&linked, &claim)?))
}

/// Investigations identified without the AI stay `cCPi`; the rest become `(cCPi, AI)`.
pub fn q3_missed_by_ai(log: &OcelLog) -> Result<OcDfg> {
    let ai = object_type(vocab::AI_MODEL);
    let filtered = ops::filter_activities(
        log,
        FilterMode::Drop,
        &labels(&[vocab::SCAN_CLAIM, vocab::PREDICT_CLAIM_PART]),
    );
    let projected = ops::project_object_types(&filtered, &BTreeSet::from([object_type(vocab::CLAIM), ai.clone()]));
    let unfolded = ops::unfold(&projected, &activity(vocab::CREATE_INVESTIGATION), &ai);
    Ok(discover_ocdfg(&unfolded))
}

/// Investigations identified without a claim handler stay `cCPi`; the rest become
/// `(cCPi, (employee, claim_handler))`. Drills employees down by role first.
pub fn q4_missed_by_humans(log: &OcelLog) -> Result<OcDfg> {
    let handler = vocab::handler_type();
    let drilled = ops::drill_down(log, &object_type(vocab::EMPLOYEE), vocab::ROLE)?;
    let projected = ops::project_object_types(&drilled, &BTreeSet::from([object_type(vocab::CLAIM), handler.clone()]));
    let filtered = ops::filter_activities(&projected, FilterMode::Drop, &labels(&[vocab::REGISTER_CLAIM]));
    let unfolded = ops::unfold(&filtered, &activity(vocab::CREATE_INVESTIGATION), &handler);
    Ok(discover_ocdfg(&unfolded))
}

/// Investigated claim parts by who identified them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VennResult {
    pub ai_only: usize,
    pub both: usize,
    pub human_only: usize,
    /// Investigated parts on claims with neither a report nor a prediction.
    pub unattributed: usize,
}

impl VennResult {
    pub fn total(&self) -> usize {
        self.ai_only + self.both + self.human_only + self.unattributed
    }
}

/// Claims touched by at least one event of `activity_name`.
fn claims_with(log: &OcelLog, activity_name: &str) -> HashSet<String> {
    let claim = object_type(vocab::CLAIM);
    log.events_of_activity(&activity(activity_name))
        .flat_map(|e| e.related_ids())
        .filter(|id| log.object(id).is_some_and(|o| o.object_type == claim))
        .map(str::to_string)
        .collect()
}

/// Attributes each investigated claim part by claim: a part counts as handler-
/// identified when its claim has an `rCP`, as AI-identified when it has a `pCP`.
pub fn venn_attribution(log: &OcelLog) -> VennResult {
    let claim = object_type(vocab::CLAIM);
    let part = object_type(vocab::CLAIM_PART);
    let reported = claims_with(log, vocab::REPORT_CLAIM_PART);
    let predicted = claims_with(log, vocab::PREDICT_CLAIM_PART);

    // investigated unit (claim-part id, or the claim when no part is related) -> its claims
    let mut units: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for ev in log.events_of_activity(&activity(vocab::CREATE_INVESTIGATION)) {
        let of_type = |t: &TypeLabel| -> Vec<String> {
            ev.related_ids()
                .filter(|id| log.object(id).is_some_and(|o| &o.object_type == t))
                .map(str::to_string)
                .collect()
        };
        let claims = of_type(&claim);
        let parts = of_type(&part);
        let keys = if parts.is_empty() { claims.clone() } else { parts };
        for k in keys {
            units.entry(k).or_default().extend(claims.iter().cloned());
        }
    }

    let mut out = VennResult::default();
    for claims in units.values() {
        let human = claims.iter().any(|c| reported.contains(c));
        let ai = claims.iter().any(|c| predicted.contains(c));
        match (human, ai) {
            (true, true) => out.both += 1,
            (false, true) => out.ai_only += 1,
            (true, false) => out.human_only += 1,
            (false, false) => out.unattributed += 1,
        }
    }
    out
}

/// Distinct claim parts predicted by the AI, ignoring redelivered predictions.
pub fn unique_predictions(log: &OcelLog) -> usize {
    let part = object_type(vocab::CLAIM_PART);
    log.events_of_activity(&activity(vocab::PREDICT_CLAIM_PART))
        .flat_map(|e| e.related_ids())
        .filter(|id| log.object(id).is_some_and(|o| o.object_type == part))
        .collect::<HashSet<_>>()
        .len()
}

/// Growth of AI-identified over handler-identified claims, in percent, rounded to the nearest 10.
pub fn scaling_percentage(log: &OcelLog) -> Result<i64> {
    let ai = claims_with(log, vocab::PREDICT_CLAIM_PART).len();
    let human = claims_with(log, vocab::REPORT_CLAIM_PART).len();
    scaling_from_counts(ai, human)
}

pub fn scaling_from_counts(ai_claims: usize, human_claims: usize) -> Result<i64> {
    if human_claims == 0 {
        return Err(Error::DivisionByZero("no handler-reported claim parts".into()));
    }
    let pct = 100.0 * (ai_claims as f64 - human_claims as f64) / human_claims as f64;
    Ok(((pct / 10.0).round() * 10.0) as i64)
}

/// `part / whole` as a percentage with two decimals, e.g. `1.82%`.
pub fn percent(part: u64, whole: u64) -> String {
    if whole == 0 {
        return "undefined".to_string();
    }
    format!("{:.2}%", 100.0 * part as f64 / whole as f64)
}

/// One observed value checked against its published counterpart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: String,
    pub target: String,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, observed: impl ToString, target: impl ToString) -> Self {
        let (observed, target) = (observed.to_string(), target.to_string());
        Self {
            name: name.to_string(),
            pass: observed == target,
            observed,
            target,
        }
    }
}

/// Every published count of the case, recomputed from a log.
#[derive(Debug, Clone, Serialize)]
pub struct Reproduction {
    pub checks: Vec<Check>,
    pub venn: VennResult,
}

impl Reproduction {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn reproduce(log: &OcelLog) -> Result<Reproduction> {
    let rc = activity(vocab::REGISTER_CLAIM);
    let rcp = activity(vocab::REPORT_CLAIM_PART);
    let pcp = activity(vocab::PREDICT_CLAIM_PART);
    let ccpi = activity(vocab::CREATE_INVESTIGATION);
    let q1 = q1_human_effectiveness(log)?;
    let q2 = q2_ai_effectiveness(log)?;
    let q3 = q3_missed_by_ai(log)?;
    let q4 = q4_missed_by_humans(log)?;
    let venn = venn_attribution(log);
    let registered = q1.node(&rc);
    let unique = unique_predictions(log) as u64;
    let scaling = match scaling_percentage(log) {
        Ok(s) => format!("{s}%"),
        Err(e) => e.to_string(),
    };
    let checks = vec![
        Check::new("q1.rc", registered, 3743),
        Check::new("q1.rCP", q1.node(&rcp), 68),
        Check::new("q1.cCPi", q1.node(&ccpi), 21),
        Check::new("q2.unique_pCP", unique, 1034),
        Check::new("q2.pCP_incoming", q2.incoming(&pcp, false), 1034),
        Check::new("q2.cCPi", q2.node(&ccpi), 23),
        Check::new("q3.cCPi", q3.node(&ccpi), 3),
        Check::new("q3.(cCPi, AI)", q3.node(&ccpi.refine(vocab::AI_MODEL)), 23),
        Check::new("q4.cCPi", q4.node(&ccpi), 5),
        Check::new(
            "q4.(cCPi, (employee, claim_handler))",
            q4.node(&ccpi.refine(vocab::handler_type().to_string())),
            21,
        ),
        Check::new("venn.ai_only", venn.ai_only, 5),
        Check::new("venn.both", venn.both, 18),
        Check::new("venn.human_only", venn.human_only, 3),
        Check::new("human_share", percent(q1.node(&rcp), registered), "1.82%"),
        Check::new("ai_share", percent(unique, registered), "27.62%"),
        Check::new("scaling", scaling, "1420%"),
    ];
    Ok(Reproduction { checks, venn })
}
