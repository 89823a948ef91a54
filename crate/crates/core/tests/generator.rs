use std::collections::{BTreeMap, BTreeSet};

use ocpm_core::casegen::{self, GeneratorConfig};
use ocpm_core::vocab::{self, activity, object_type};
use ocpm_core::{io, AttrValue, OcelLog};
use proptest::prelude::*;

fn arb_config() -> impl Strategy<Value = GeneratorConfig> {
    (1usize..40, any::<u64>())
        .prop_flat_map(|(n, seed)| {
            (
                Just(n),
                Just(seed),
                0..=n,
                0..=n,
                0usize..4,
                0usize..4,
                0usize..4,
                0usize..3,
                1usize..4,
            )
        })
        .prop_map(
            |(n, seed, human, ai, both, ai_only, human_only, dup, notes_hi)| GeneratorConfig {
                n_human_reported: human,
                n_ai_predicted: ai,
                n_inv_both: both,
                n_inv_ai_only: ai_only,
                n_inv_human_only: human_only,
                n_duplicate_pcp: dup,
                n_claim_handlers: 3,
                n_investigators: 2,
                n_customers: 5,
                notes_per_claim: (1, notes_hi),
                horizon_days: 20,
                seed,
                ..GeneratorConfig::minimal(n)
            },
        )
        .prop_filter("feasible", |c| c.validate().is_ok())
}

fn count(log: &OcelLog, name: &str) -> usize {
    log.events_of_activity(&activity(name)).count()
}

/// Claim-part ids related to events of `name` on `claim`.
fn parts_of(log: &OcelLog, claim: &str, name: &str) -> BTreeSet<String> {
    log.events_of_object(claim)
        .unwrap()
        .into_iter()
        .filter(|e| e.activity == activity(name))
        .flat_map(|e| e.related_ids().map(str::to_string).collect::<Vec<_>>())
        .filter(|id| log.object(id).unwrap().object_type == object_type(vocab::CLAIM_PART))
        .collect()
}

fn role_of(log: &OcelLog, id: &str) -> Option<String> {
    match log.object(id)?.latest(vocab::ROLE)? {
        AttrValue::Str(s) => Some(s.clone()),
        _ => None,
    }
}

fn check_invariants(c: &GeneratorConfig, log: &OcelLog) -> Result<(), TestCaseError> {
    prop_assert_eq!(count(log, vocab::REGISTER_CLAIM), c.n_claims);
    prop_assert_eq!(count(log, vocab::SCAN_CLAIM), c.n_claims);
    prop_assert_eq!(count(log, vocab::REPORT_CLAIM_PART), c.n_human_reported);
    prop_assert_eq!(
        count(log, vocab::PREDICT_CLAIM_PART),
        c.n_ai_predicted + c.n_duplicate_pcp
    );
    prop_assert_eq!(count(log, vocab::CREATE_INVESTIGATION), c.n_investigations());
    let predicted: BTreeSet<&str> = log
        .events_of_activity(&activity(vocab::PREDICT_CLAIM_PART))
        .flat_map(|e| e.related_ids())
        .filter(|id| log.object(id).unwrap().object_type == object_type(vocab::CLAIM_PART))
        .collect();
    prop_assert_eq!(predicted.len(), c.n_ai_predicted);

    for claim in log.objects_of_type(&object_type(vocab::CLAIM)) {
        let trace = log.events_of_object(&claim.id).unwrap();
        prop_assert_eq!(&trace[0].activity, &activity(vocab::REGISTER_CLAIM));
        prop_assert!(trace[1..].iter().all(|e| e.timestamp > trace[0].timestamp));
        let scan = trace
            .iter()
            .position(|e| e.activity == activity(vocab::SCAN_CLAIM))
            .unwrap();
        for (i, e) in trace.iter().enumerate() {
            if e.activity == activity(vocab::PREDICT_CLAIM_PART) {
                prop_assert!(i > scan, "pCP before sc on {}", claim.id);
            }
        }
        let known: BTreeSet<String> = parts_of(log, &claim.id, vocab::REPORT_CLAIM_PART)
            .union(&parts_of(log, &claim.id, vocab::PREDICT_CLAIM_PART))
            .cloned()
            .collect();
        prop_assert!(parts_of(log, &claim.id, vocab::CREATE_INVESTIGATION).is_subset(&known));
    }

    let ai = object_type(vocab::AI_MODEL);
    let employee = object_type(vocab::EMPLOYEE);
    for ev in log.events() {
        let name = ev.activity.base();
        for rel in &ev.e2o {
            let obj = log.object(&rel.object_id).unwrap();
            if obj.object_type != employee {
                continue;
            }
            let role = role_of(log, &obj.id).unwrap();
            let expected = if name == vocab::CREATE_INVESTIGATION && rel.qualifier == "investigator" {
                vocab::INVESTIGATOR
            } else {
                vocab::CLAIM_HANDLER
            };
            prop_assert!(name != vocab::SCAN_CLAIM && name != vocab::PREDICT_CLAIM_PART);
            prop_assert_eq!(role.as_str(), expected, "{} on {}", rel.qualifier, ev.id);
        }
        let performed_by_ai = ev.related_ids().any(|id| log.object(id).unwrap().object_type == ai);
        if name == vocab::SCAN_CLAIM || name == vocab::PREDICT_CLAIM_PART {
            prop_assert!(performed_by_ai);
        }
        if name == vocab::CREATE_INVESTIGATION {
            let inv = ev
                .related_ids()
                .filter(|id| role_of(log, id).as_deref() == Some(vocab::INVESTIGATOR));
            prop_assert_eq!(inv.count(), 1);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_logs_satisfy_the_invariants(c in arb_config()) {
        let log = casegen::generate(&c).unwrap();
        check_invariants(&c, &log)?;
    }

    #[test]
    fn equal_seeds_give_identical_bytes(c in arb_config()) {
        let a = io::save_json(&casegen::generate(&c).unwrap());
        let b = io::save_json(&casegen::generate(&c).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn default_config_invariants_and_seed_sensitivity() {
    let c = casegen::default_case_config();
    let log = casegen::generate(&c).unwrap();
    check_invariants(&c, &log).unwrap();
    let again = io::save_json(&casegen::generate(&c).unwrap());
    assert_eq!(io::save_json(&log), again);
    let other = GeneratorConfig {
        seed: c.seed + 1,
        ..c.clone()
    };
    assert_ne!(io::save_json(&casegen::generate(&other).unwrap()), again);
}

#[test]
fn different_seeds_differ_on_small_configs() {
    let base = GeneratorConfig {
        n_customers: 5,
        ..GeneratorConfig::minimal(10)
    };
    let outputs: BTreeSet<String> = (0..5)
        .map(|seed| io::save_json(&casegen::generate(&GeneratorConfig { seed, ..base.clone() }).unwrap()))
        .collect();
    assert_eq!(outputs.len(), 5);
}

#[test]
fn infeasible_configs_are_rejected() {
    let too_many = GeneratorConfig {
        n_human_reported: 11,
        ..GeneratorConfig::minimal(10)
    };
    assert!(casegen::generate(&too_many).is_err());
    let no_notes = GeneratorConfig {
        notes_per_claim: (0, 2),
        ..GeneratorConfig::minimal(10)
    };
    assert!(no_notes.validate().is_err());
}

#[test]
fn default_activity_mix() {
    let log = casegen::generate(&casegen::default_case_config()).unwrap();
    let counts: BTreeMap<String, usize> = casegen::activity_counts(&log);
    assert_eq!(counts["rc"], 3743);
    assert_eq!(counts["rCP"], 68);
    assert_eq!(counts["pCP"], 1034 + 7);
    assert_eq!(counts["cCPi"], 26);
}
