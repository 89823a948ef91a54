use std::collections::BTreeSet;
use std::sync::OnceLock;

use ocpm_core::casegen::{self, GeneratorConfig};
use ocpm_core::ops::{self, FilterMode};
use ocpm_core::recipes::{self, VennResult};
use ocpm_core::vocab::{self, activity, object_type};
use ocpm_core::{discover_dfg, discover_ocdfg, io, OcelLog};
use proptest::prelude::*;

fn case_log() -> &'static OcelLog {
    static LOG: OnceLock<OcelLog> = OnceLock::new();
    LOG.get_or_init(|| casegen::generate(&casegen::default_case_config()).unwrap())
}

fn check_venn_agreement(log: &OcelLog) -> Result<VennResult, TestCaseError> {
    let ccpi = activity(vocab::CREATE_INVESTIGATION);
    let venn = recipes::venn_attribution(log);
    let q3 = recipes::q3_missed_by_ai(log).unwrap();
    let q4 = recipes::q4_missed_by_humans(log).unwrap();
    prop_assert_eq!(venn.unattributed, 0);
    prop_assert_eq!(q3.node(&ccpi) as usize, venn.human_only);
    prop_assert_eq!(
        q3.node(&ccpi.refine(vocab::AI_MODEL)) as usize,
        venn.both + venn.ai_only
    );
    prop_assert_eq!(q4.node(&ccpi) as usize, venn.ai_only);
    prop_assert_eq!(
        q4.node(&ccpi.refine(vocab::handler_type().to_string())) as usize,
        venn.both + venn.human_only
    );
    prop_assert_eq!(venn.total(), log.events_of_activity(&ccpi).count());
    Ok(venn)
}

#[test]
fn case_log_reproduces_every_published_count() {
    let rep = recipes::reproduce(case_log()).unwrap();
    for c in &rep.checks {
        assert!(c.pass, "{}: observed {} target {}", c.name, c.observed, c.target);
    }
    assert_eq!(rep.checks.len(), 16);
    assert_eq!(rep.venn, check_venn_agreement(case_log()).unwrap());
}

#[test]
fn recipes_leave_the_input_untouched() {
    let log = case_log();
    let before = io::save_json(log);
    recipes::reproduce(log).unwrap();
    assert_eq!(io::save_json(log), before);
}

#[test]
fn recipes_equal_their_manual_composition() {
    let log = case_log();
    let claim = object_type(vocab::CLAIM);
    let ai = object_type(vocab::AI_MODEL);
    let ccpi = activity(vocab::CREATE_INVESTIGATION);
    let drop = |l: &OcelLog, names: &[&str]| {
        ops::filter_activities(l, FilterMode::Drop, &names.iter().map(|n| activity(n)).collect())
    };

    let q1 = drop(log, &[vocab::SCAN_CLAIM, vocab::PREDICT_CLAIM_PART]);
    let q1 = ops::retain_linked(&q1, &ccpi, &activity(vocab::REPORT_CLAIM_PART), &claim);
    let q1 = discover_dfg(&ops::flatten(&q1, &claim).unwrap());
    assert_eq!(q1, recipes::q1_human_effectiveness(log).unwrap());

    let q2 = drop(log, &[vocab::REPORT_CLAIM_PART]);
    let q2 = ops::retain_linked(&q2, &ccpi, &activity(vocab::PREDICT_CLAIM_PART), &claim);
    let q2 = discover_dfg(&ops::flatten(&q2, &claim).unwrap());
    assert_eq!(q2, recipes::q2_ai_effectiveness(log).unwrap());

    let q3 = drop(log, &[vocab::SCAN_CLAIM, vocab::PREDICT_CLAIM_PART]);
    let q3 = ops::project_object_types(&q3, &BTreeSet::from([claim.clone(), ai.clone()]));
    let q3 = discover_ocdfg(&ops::unfold(&q3, &ccpi, &ai));
    assert_eq!(q3, recipes::q3_missed_by_ai(log).unwrap());

    let handler = vocab::handler_type();
    let q4 = ops::drill_down(log, &object_type(vocab::EMPLOYEE), vocab::ROLE).unwrap();
    let q4 = ops::project_object_types(&q4, &BTreeSet::from([claim, handler.clone()]));
    let q4 = drop(&q4, &[vocab::REGISTER_CLAIM]);
    let q4 = discover_ocdfg(&ops::unfold(&q4, &ccpi, &handler));
    assert_eq!(q4, recipes::q4_missed_by_humans(log).unwrap());

    for dfg in [&q1, &q2] {
        assert!(dfg.is_flow_conserving());
    }
}

#[test]
fn pcp_self_loop_comes_from_redeliveries() {
    let q2 = recipes::q2_ai_effectiveness(case_log()).unwrap();
    let pcp = activity(vocab::PREDICT_CLAIM_PART);
    assert_eq!(q2.edge(&pcp, &pcp), 7);
    assert_eq!(q2.node(&pcp), 1034 + 7);
}

#[test]
fn latest_note_filter_keeps_one_note_per_claim() {
    let log = case_log();
    let out = ops::latest_note_filter(log);
    let notes = out.events_of_activity(&activity(vocab::CREATE_NOTE)).count();
    assert_eq!(notes, log.objects_of_type(&object_type(vocab::CLAIM)).count());
    assert_eq!(out.objects_of_type(&object_type(vocab::CLAIM_NOTE)).count(), notes);
    for claim in out.objects_of_type(&object_type(vocab::CLAIM)) {
        let trace = out.events_of_object(&claim.id).unwrap();
        let scan = trace
            .iter()
            .position(|e| e.activity == activity(vocab::SCAN_CLAIM))
            .unwrap();
        let note = trace
            .iter()
            .position(|e| e.activity == activity(vocab::CREATE_NOTE))
            .unwrap();
        assert!(note < scan);
    }
}

#[test]
fn scaling_needs_handler_reports() {
    let log = casegen::generate(&GeneratorConfig {
        n_customers: 3,
        ..GeneratorConfig::minimal(5)
    })
    .unwrap();
    assert!(recipes::scaling_percentage(&log).is_err());
    assert_eq!(recipes::venn_attribution(&log), VennResult::default());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn venn_and_unfolded_models_agree(n in 5usize..40, seed in any::<u64>(), both in 0usize..3, ai_only in 0usize..3, human_only in 0usize..3) {
        let c = GeneratorConfig {
            n_human_reported: (n / 3).max(both + human_only),
            n_ai_predicted: (n / 2).max(both + ai_only),
            n_inv_both: both,
            n_inv_ai_only: ai_only,
            n_inv_human_only: human_only,
            n_duplicate_pcp: 1.min(n / 2),
            n_claim_handlers: 2,
            n_investigators: 1,
            n_customers: 4,
            seed,
            ..GeneratorConfig::minimal(n)
        };
        prop_assume!(c.validate().is_ok());
        let log = casegen::generate(&c).unwrap();
        let venn = check_venn_agreement(&log)?;
        prop_assert_eq!((venn.both, venn.ai_only, venn.human_only), (both, ai_only, human_only));
        prop_assert!(recipes::q1_human_effectiveness(&log).unwrap().is_flow_conserving());
        prop_assert!(recipes::q2_ai_effectiveness(&log).unwrap().is_flow_conserving());
    }
}
