//! Deterministic generator for the dual-variant claim-part identification process.
//!
//! Claim handlers register claims, write notes, and report claim parts by hand;
//! an AI model scans every claim and predicts claim parts; investigators open
//! investigations for a subset of identified parts. All headline counts are hit
//! exactly: claims are partitioned by sampling without replacement, never by
//! per-claim coin flips. Only timestamps and performer assignment are random.

use std::collections::BTreeMap;

use chrono::{TimeDelta, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::kv;
use crate::label::TypeLabel;
use crate::model::{OcelEvent, OcelLog, OcelObject, Timestamp};
use crate::vocab::{self, activity, object_type};

/// Seed of [`default_case_config`].
pub const DEFAULT_SEED: u64 = 0x0CE1_2025;

/// Share of human-reported claims the AI also flags, before clamping to what
/// the investigation targets allow.
const OVERLAP_SHARE: f64 = 0.7;

const MS_PER_DAY: i64 = 86_400_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n_claims: usize,
    pub horizon_days: u32,
    /// Claims with a handler-reported claim part (`rCP`).
    pub n_human_reported: usize,
    /// Claims with an AI-predicted claim part (`pCP`).
    pub n_ai_predicted: usize,
    pub n_inv_both: usize,
    pub n_inv_ai_only: usize,
    pub n_inv_human_only: usize,
    /// Predicted claims that receive one duplicated `pCP` event.
    pub n_duplicate_pcp: usize,
    pub n_claim_handlers: usize,
    pub n_investigators: usize,
    pub n_customers: usize,
    /// Inclusive (min, max) note count per claim.
    pub notes_per_claim: (usize, usize),
    /// Chance that an investigation of a handler-reported part precedes the scan.
    pub p_ccpi_before_scan: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        default_case_config()
    }
}

/// Defaults calibrated to the published case: 3743 claims over five months,
/// 68 handler-reported and 1034 AI-predicted claim parts, and 26 investigations
/// split 18 / 5 / 3 between both, AI-only, and handler-only identification.
pub fn default_case_config() -> GeneratorConfig {
    GeneratorConfig {
        n_claims: 3743,
        horizon_days: 150,
        n_human_reported: 68,
        n_ai_predicted: 1034,
        n_inv_both: 18,
        n_inv_ai_only: 5,
        n_inv_human_only: 3,
        n_duplicate_pcp: 7,
        n_claim_handlers: 25,
        n_investigators: 3,
        n_customers: 3400,
        notes_per_claim: (1, 3),
        p_ccpi_before_scan: 0.3,
        seed: DEFAULT_SEED,
    }
}

impl GeneratorConfig {
    /// A config with every count zeroed except the claim population.
    pub fn minimal(n_claims: usize) -> Self {
        Self {
            n_claims,
            n_human_reported: 0,
            n_ai_predicted: 0,
            n_inv_both: 0,
            n_inv_ai_only: 0,
            n_inv_human_only: 0,
            n_duplicate_pcp: 0,
            n_claim_handlers: 1,
            n_investigators: 1,
            n_customers: 1,
            ..default_case_config()
        }
    }

    pub fn n_investigations(&self) -> usize {
        self.n_inv_both + self.n_inv_ai_only + self.n_inv_human_only
    }

    /// Number of claims flagged by both a handler and the AI.
    pub fn overlap(&self) -> usize {
        let lo = self
            .n_inv_both
            .max((self.n_human_reported + self.n_ai_predicted).saturating_sub(self.n_claims));
        let hi = self
            .n_human_reported
            .saturating_sub(self.n_inv_human_only)
            .min(self.n_ai_predicted.saturating_sub(self.n_inv_ai_only));
        let wanted = (self.n_human_reported as f64 * OVERLAP_SHARE).round() as usize;
        wanted.clamp(lo, hi.max(lo))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_human_reported > self.n_claims {
            return fail(format!(
                "n_human_reported {} exceeds n_claims {}",
                self.n_human_reported, self.n_claims
            ));
        }
        if self.n_ai_predicted > self.n_claims {
            return fail(format!(
                "n_ai_predicted {} exceeds n_claims {}",
                self.n_ai_predicted, self.n_claims
            ));
        }
        if self.n_inv_both > self.n_human_reported.min(self.n_ai_predicted) {
            return fail("n_inv_both exceeds min(n_human_reported, n_ai_predicted)".into());
        }
        if self.n_inv_ai_only > self.n_ai_predicted - self.n_inv_both {
            return fail("n_inv_ai_only exceeds n_ai_predicted - n_inv_both".into());
        }
        if self.n_inv_human_only > self.n_human_reported - self.n_inv_both {
            return fail("n_inv_human_only exceeds n_human_reported - n_inv_both".into());
        }
        let overlap = self.overlap();
        if overlap < self.n_inv_both
            || self.n_human_reported - overlap < self.n_inv_human_only
            || self.n_ai_predicted - overlap < self.n_inv_ai_only
            || self.n_human_reported + self.n_ai_predicted - overlap > self.n_claims
        {
            return fail("claim-part and investigation counts cannot be partitioned over n_claims".into());
        }
        if self.n_duplicate_pcp > self.n_ai_predicted {
            return fail("n_duplicate_pcp exceeds n_ai_predicted".into());
        }
        let (lo, hi) = self.notes_per_claim;
        if lo == 0 || lo > hi {
            return fail(format!("notes_per_claim ({lo}, {hi}) must satisfy 1 <= min <= max"));
        }
        if self.horizon_days == 0 {
            return fail("horizon_days must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.p_ccpi_before_scan) {
            return fail("p_ccpi_before_scan must lie in [0, 1]".into());
        }
        if self.n_claims > 0 && (self.n_claim_handlers == 0 || self.n_customers == 0) {
            return fail("claims need at least one claim handler and one customer".into());
        }
        if self.n_investigations() > 0 && self.n_investigators == 0 {
            return fail("investigations need at least one investigator".into());
        }
        Ok(())
    }

    /// Reads a JSON object or `key = value` lines; absent keys keep their defaults.
    ///
    /// In the line format `notes_per_claim` is written `1..3`.
    pub fn from_text(text: &str) -> Result<Self> {
        let config: Self = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            let mut map = Map::new();
            for (key, value) in kv::parse_pairs(text)? {
                let json = match value.split_once("..") {
                    Some((lo, hi)) => Value::Array(vec![json_scalar(lo.trim()), json_scalar(hi.trim())]),
                    None => json_scalar(&value),
                };
                map.insert(key, json);
            }
            serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn to_kv(&self) -> String {
        let c = self;
        format!(
            "n_claims = {}\nhorizon_days = {}\nn_human_reported = {}\nn_ai_predicted = {}\n\
             n_inv_both = {}\nn_inv_ai_only = {}\nn_inv_human_only = {}\nn_duplicate_pcp = {}\n\
             n_claim_handlers = {}\nn_investigators = {}\nn_customers = {}\nnotes_per_claim = {}..{}\n\
             p_ccpi_before_scan = {}\nseed = {}\n",
            c.n_claims,
            c.horizon_days,
            c.n_human_reported,
            c.n_ai_predicted,
            c.n_inv_both,
            c.n_inv_ai_only,
            c.n_inv_human_only,
            c.n_duplicate_pcp,
            c.n_claim_handlers,
            c.n_investigators,
            c.n_customers,
            c.notes_per_claim.0,
            c.notes_per_claim.1,
            c.p_ccpi_before_scan,
            c.seed
        )
    }
}

fn json_scalar(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}

/// How a claim's part was identified and whether it was investigated.
#[derive(Debug, Clone, Copy, Default)]
struct ClaimPlan {
    human: bool,
    ai: bool,
    investigated: bool,
    duplicate: bool,
}

/// Event under construction; ids are assigned once all events are placed.
struct Draft {
    /// (time ms, claim index, sequence within claim, duplicate flag)
    key: (i64, usize, usize, u8),
    event: OcelEvent,
}

fn pad(prefix: &str, i: usize, width: usize) -> String {
    format!("{prefix}-{:0width$}", i + 1)
}

fn width_for(n: usize) -> usize {
    n.max(1).to_string().len().max(3)
}

fn start_of_window() -> Timestamp {
    Utc.with_ymd_and_hms(2024, 9, 25, 0, 0, 0).unwrap()
}

/// Uniform offset in whole milliseconds, at least one.
fn offset(rng: &mut ChaCha8Rng, lo: f64, hi: f64, unit_ms: i64) -> i64 {
    let x: f64 = rng.gen_range(lo..hi);
    ((x * unit_ms as f64) as i64).max(1)
}

pub fn generate(config: &GeneratorConfig) -> Result<OcelLog> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_claims;

    // partition claims: handler-only, both, AI-only, unidentified
    let overlap = config.overlap();
    let human_only = config.n_human_reported - overlap;
    let ai_only = config.n_ai_predicted - overlap;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (human_only_claims, rest) = order.split_at(human_only);
    let (both_claims, rest) = rest.split_at(overlap);
    let (ai_only_claims, _) = rest.split_at(ai_only);

    let mut plans = vec![ClaimPlan::default(); n];
    for &c in human_only_claims {
        plans[c].human = true;
    }
    for &c in both_claims {
        plans[c].human = true;
        plans[c].ai = true;
    }
    for &c in ai_only_claims {
        plans[c].ai = true;
    }
    for (pool, k) in [
        (both_claims, config.n_inv_both),
        (human_only_claims, config.n_inv_human_only),
        (ai_only_claims, config.n_inv_ai_only),
    ] {
        for &c in pool.choose_multiple(&mut rng, k) {
            plans[c].investigated = true;
        }
    }
    let mut predicted: Vec<usize> = both_claims.iter().chain(ai_only_claims).copied().collect();
    predicted.sort_unstable();
    for &c in predicted.choose_multiple(&mut rng, config.n_duplicate_pcp) {
        plans[c].duplicate = true;
    }

    let t0 = start_of_window();
    let at = |ms: i64| t0 + TimeDelta::milliseconds(ms);
    let claim_w = width_for(n);
    let emp_w = width_for(config.n_claim_handlers + config.n_investigators);

    let mut objects = Vec::new();
    let ai_id = "ai-model".to_string();
    objects.push(OcelObject::new(&ai_id, object_type(vocab::AI_MODEL)).with_attribute("version", t0, "v5"));
    let handlers: Vec<String> = (0..config.n_claim_handlers).map(|i| pad("emp", i, emp_w)).collect();
    let investigators: Vec<String> = (0..config.n_investigators)
        .map(|i| pad("emp", config.n_claim_handlers + i, emp_w))
        .collect();
    for h in &handlers {
        objects.push(OcelObject::new(h, object_type(vocab::EMPLOYEE)).with_attribute(
            vocab::ROLE,
            t0,
            vocab::CLAIM_HANDLER,
        ));
    }
    for i in &investigators {
        objects.push(OcelObject::new(i, object_type(vocab::EMPLOYEE)).with_attribute(
            vocab::ROLE,
            t0,
            vocab::INVESTIGATOR,
        ));
    }
    let customers: Vec<String> = (0..config.n_customers)
        .map(|i| pad("cust", i, width_for(config.n_customers)))
        .collect();
    for c in &customers {
        objects.push(OcelObject::new(c, object_type(vocab::CUSTOMER)));
    }

    let horizon_ms = i64::from(config.horizon_days) * MS_PER_DAY;
    // follow-up activity of a claim stays within a tenth of the window (10 days at most)
    let follow_up_ms = (horizon_ms / 10).clamp(10, 10 * MS_PER_DAY);
    let unit = follow_up_ms / 10;
    let act = |name: &str| -> TypeLabel { activity(name) };

    let mut drafts: Vec<Draft> = Vec::new();
    for (ci, plan) in plans.iter().enumerate() {
        let claim_id = pad("claim", ci, claim_w);
        let handler = &handlers[rng.gen_range(0..handlers.len())];
        let customer = &customers[rng.gen_range(0..customers.len())];
        objects.push(OcelObject::new(&claim_id, object_type(vocab::CLAIM)).with_o2o(customer, "made_by"));

        let mut seq = 0usize;
        let mut push = |drafts: &mut Vec<Draft>, ms: i64, event: OcelEvent| {
            drafts.push(Draft {
                key: (ms, ci, seq, 0),
                event,
            });
            seq += 1;
            seq - 1
        };
        let ev = |name: &str, ms: i64| OcelEvent::new(String::new(), act(name), at(ms)).with_e2o(&claim_id, "claim");

        let rc = rng.gen_range(0..(horizon_ms - follow_up_ms).max(1));
        push(
            &mut drafts,
            rc,
            ev(vocab::REGISTER_CLAIM, rc)
                .with_e2o(handler, "registered_by")
                .with_e2o(customer, "claimant"),
        );

        let first_note = rc + offset(&mut rng, 0.01, 0.5, unit);
        let sc = first_note + offset(&mut rng, 0.1, 1.0, unit);
        let n_notes = rng.gen_range(config.notes_per_claim.0..=config.notes_per_claim.1);
        let mut notes = vec![first_note];
        for _ in 1..n_notes {
            notes.push(rc + offset(&mut rng, 0.01, 3.0, unit));
        }
        notes.sort_unstable();
        let mut note_ids = Vec::new();
        for (ni, &t) in notes.iter().enumerate() {
            let note_id = format!("note-{}-{}", &claim_id["claim-".len()..], ni + 1);
            objects.push(OcelObject::new(&note_id, object_type(vocab::CLAIM_NOTE)).with_o2o(&claim_id, "note_of"));
            push(
                &mut drafts,
                t,
                ev(vocab::CREATE_NOTE, t)
                    .with_e2o(&note_id, "note")
                    .with_e2o(handler, "author"),
            );
            note_ids.push((t, note_id));
        }
        let scanned_note = note_ids
            .iter()
            .rfind(|(t, _)| *t < sc)
            .map(|(_, id)| id.clone())
            .expect("first note precedes the scan");
        push(
            &mut drafts,
            sc,
            ev(vocab::SCAN_CLAIM, sc)
                .with_e2o(&ai_id, "scanner")
                .with_e2o(&scanned_note, "input"),
        );

        if !(plan.human || plan.ai) {
            continue;
        }
        let part_id = format!("cp-{}", &claim_id["claim-".len()..]);
        objects.push(OcelObject::new(&part_id, object_type(vocab::CLAIM_PART)).with_o2o(&claim_id, "part_of"));

        let early = plan.investigated && plan.human && rng.gen_bool(config.p_ccpi_before_scan);
        let mut ready = rc;
        let mut rcp_early = None;
        if plan.human {
            let rcp = if early {
                first_note + offset(&mut rng, 0.05, 0.45, sc - first_note)
            } else {
                first_note + offset(&mut rng, 0.05, 2.0, unit)
            };
            push(
                &mut drafts,
                rcp,
                ev(vocab::REPORT_CLAIM_PART, rcp)
                    .with_e2o(&part_id, "reported")
                    .with_e2o(handler, "reporter"),
            );
            ready = ready.max(rcp);
            rcp_early = Some(rcp);
        }
        let mut pcp_seq = None;
        if plan.ai {
            let pcp = sc + offset(&mut rng, 0.001, 0.05, unit);
            let s = push(
                &mut drafts,
                pcp,
                ev(vocab::PREDICT_CLAIM_PART, pcp)
                    .with_e2o(&part_id, "predicted")
                    .with_e2o(&ai_id, "predictor"),
            );
            pcp_seq = Some((pcp, s));
            ready = ready.max(pcp);
        }
        if plan.investigated {
            let inv = match (early, rcp_early) {
                (true, Some(rcp)) => rcp + offset(&mut rng, 0.1, 0.9, sc - rcp),
                _ => ready + offset(&mut rng, 0.5, 4.0, unit),
            };
            let investigator = &investigators[rng.gen_range(0..investigators.len())];
            let mut e = ev(vocab::CREATE_INVESTIGATION, inv)
                .with_e2o(&part_id, "investigated")
                .with_e2o(investigator, "investigator");
            if plan.ai {
                e = e.with_e2o(&ai_id, "ai_identified");
            }
            if plan.human {
                e = e.with_e2o(handler, "handler_identified");
            }
            push(&mut drafts, inv, e);
        }
        if plan.duplicate {
            let (pcp, pcp_seq) = pcp_seq.expect("duplicates are drawn from predicted claims");
            // the redelivered prediction must directly follow the original in the claim's trace
            let next = drafts
                .iter()
                .filter(|d| d.key.1 == ci && d.key.0 > pcp)
                .map(|d| d.key.0)
                .min();
            let gap = next.map_or(120_000, |t| t - pcp);
            let dup = if gap >= 2 { pcp + (gap / 2).min(60_000) } else { pcp };
            drafts.push(Draft {
                key: (dup, ci, pcp_seq, 1),
                event: ev(vocab::PREDICT_CLAIM_PART, dup)
                    .with_e2o(&part_id, "predicted")
                    .with_e2o(&ai_id, "predictor")
                    .with_attribute("redelivered", true),
            });
        }
    }

    drafts.sort_by_key(|d| d.key);
    let width = drafts.len().max(1).to_string().len().max(6);
    let events = drafts
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut e = d.event;
            e.id = format!("ev-{:0width$}", i + 1);
            e
        })
        .collect();
    Ok(OcelLog::from_parts(crate::model::LogParts { objects, events })?)
}

/// Count summary used by tests and reports.
pub fn activity_counts(log: &OcelLog) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for e in log.events() {
        *out.entry(e.activity.to_string()).or_default() += 1;
    }
    out
}
