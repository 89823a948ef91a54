//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::fs;
use std::time::{Duration, Instant};

use ocpm_cli::run;
use ocpm_core::casegen::{self, GeneratorConfig};
use ocpm_core::metrics::{self, FIXTURE_TOLERANCE, HUMAN_RECALL_BASELINE};
use ocpm_core::{discover_dfg, discover_ocdfg, io, ops, recipes, Dfg, OcelLog};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::Value;

const CASES: u32 = 100;
const RUNTIME_LIMIT: Duration = Duration::from_secs(10);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn property(name: &str, check: impl Fn(OcelLog) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&common::arb_log(), check)
        .map_err(|e| format!("{name}: {e}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

struct Repro {
    checks: BTreeMap<String, (String, String)>,
    elapsed: Duration,
    dfgs: Vec<(String, Dfg)>,
}

fn run_repro() -> Result<Repro, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = run(["ocpm", "repro", "--outdir", dir.path().to_str().unwrap()]);
    let elapsed = start.elapsed();
    if r.exit_code != 0 {
        return Err(r.stderr);
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let checks = summary["checks"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| {
            let s = |f: &str| v[f].as_str().unwrap_or_default().to_string();
            (k.clone(), (s("observed"), s("target")))
        })
        .collect();
    let log =
        io::load_json(&fs::read_to_string(dir.path().join("case_log.json")).unwrap()).map_err(|e| e.to_string())?;
    let claim = ocpm_core::vocab::object_type(ocpm_core::vocab::CLAIM);
    let dfgs = vec![
        (
            "q1".to_string(),
            recipes::q1_human_effectiveness(&log).map_err(|e| e.to_string())?,
        ),
        (
            "q2".to_string(),
            recipes::q2_ai_effectiveness(&log).map_err(|e| e.to_string())?,
        ),
        (
            "claim".to_string(),
            discover_dfg(&ops::flatten(&log, &claim).map_err(|e| e.to_string())?),
        ),
    ];
    Ok(Repro { checks, elapsed, dfgs })
}

/// Published counts, written out independently of the library's own check list.
const EXACT: &[(&str, &str)] = &[
    ("q1.rc", "3743"),
    ("q1.rCP", "68"),
    ("q1.cCPi", "21"),
    ("q2.unique_pCP", "1034"),
    ("q2.cCPi", "23"),
    ("q3.cCPi", "3"),
    ("q3.(cCPi, AI)", "23"),
    ("q4.cCPi", "5"),
    ("q4.(cCPi, (employee, claim_handler))", "21"),
    ("venn.ai_only", "5"),
    ("venn.both", "18"),
    ("venn.human_only", "3"),
];

const PERCENTAGES: &[(&str, &str)] = &[("human_share", "1.82%"), ("ai_share", "27.62%"), ("scaling", "1420%")];

fn observed_matches(repro: &Repro, expected: &[(&str, &str)]) -> (bool, Vec<String>) {
    let mut wrong = Vec::new();
    for (name, want) in expected {
        match repro.checks.get(*name) {
            Some((obs, _)) if obs == want => {}
            Some((obs, _)) => wrong.push(format!("{name}={obs} (want {want})")),
            None => wrong.push(format!("{name} missing")),
        }
    }
    (wrong.is_empty(), wrong)
}

fn criterion_1(repro: &Result<Repro, String>) -> Verdict {
    match repro {
        Err(e) => Verdict::new(false, format!("repro failed: {e}")),
        Ok(r) => {
            let (counts_ok, wrong) = observed_matches(r, EXACT);
            let fast = r.elapsed < RUNTIME_LIMIT;
            let detail = if counts_ok {
                format!(
                    "{} exact counts match, runtime {:.2?} (limit {:?})",
                    EXACT.len(),
                    r.elapsed,
                    RUNTIME_LIMIT
                )
            } else {
                format!("mismatched: {}", wrong.join(", "))
            };
            Verdict::new(counts_ok && fast, detail)
        }
    }
}

fn criterion_2(repro: &Result<Repro, String>) -> Verdict {
    match repro {
        Err(e) => Verdict::new(false, format!("repro failed: {e}")),
        Ok(r) => {
            let (ok, wrong) = observed_matches(r, PERCENTAGES);
            let direct = recipes::percent(68, 3743) == "1.82%"
                && recipes::percent(1034, 3743) == "27.62%"
                && recipes::scaling_from_counts(1034, 68).ok() == Some(1420);
            let detail = if ok {
                "1.82%, 27.62%, 1420%".to_string()
            } else {
                wrong.join(", ")
            };
            Verdict::new(ok && direct, detail)
        }
    }
}

fn criterion_3() -> Verdict {
    let rows = metrics::table1();
    let mut bad = Vec::new();
    let mut published = BTreeMap::new();
    for row in &rows {
        match metrics::compute_metrics(&row.confusion) {
            Ok(m) if metrics::reproduces(&m, &row.published, FIXTURE_TOLERANCE) => {}
            Ok(m) => bad.push(format!("{}: {m}", row.label())),
            Err(e) => bad.push(format!("{}: {e}", row.label())),
        }
        published.insert(row.label(), row.published);
    }
    let sel = metrics::select_model(&published, HUMAN_RECALL_BASELINE);
    let sel_ok = sel
        .as_ref()
        .is_some_and(|s| s.version == "v5-eng" && s.recall == Some(0.81) && s.meets_baseline && s.baseline == 0.70);
    let detail = match (&sel, bad.is_empty()) {
        (Some(s), true) => format!(
            "{} rows within ±{FIXTURE_TOLERANCE}; selected {} recall {:.2} >= {:.2}",
            rows.len(),
            s.version,
            s.recall.unwrap_or(f64::NAN),
            s.baseline
        ),
        _ => format!("rows off: [{}]; selection {:?}", bad.join("; "), sel.map(|s| s.version)),
    };
    Verdict::new(rows.len() == 10 && bad.is_empty() && sel_ok, detail)
}

fn criterion_4(extra_dfgs: &mut Vec<(String, Dfg)>) -> Verdict {
    let mut failures = Vec::new();
    let mut record = |r: Result<(), String>| {
        if let Err(e) = r {
            failures.push(e);
        }
    };
    record(property("round trip", |log| {
        let back = io::load_json(&io::save_json(&log)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        ensure(back == log, || "load(save(L)) != L".into())
    }));
    record(property("flatten/OC-DFG coherence", |log| {
        let oc = discover_ocdfg(&log);
        for t in log.object_types() {
            let dfg = discover_dfg(&ops::flatten(&log, t).unwrap());
            ensure(oc.edges_for(t) == dfg.edges, || format!("edges differ for {t}"))?;
            ensure(dfg.is_flow_conserving(), || format!("flow not conserved for {t}"))?;
        }
        Ok(())
    }));
    record(property("unfold event count", |log| {
        for a in common::ACTIVITIES {
            for t in common::OBJECT_TYPES {
                let out = ops::unfold(&log, &common::label(a), &common::label(t));
                ensure(out.event_count() == log.event_count(), || {
                    format!("unfold({a}, {t}) changed event count")
                })?;
            }
        }
        Ok(())
    }));
    record(property("drill_down partition", |log| {
        for t in common::OBJECT_TYPES {
            let ty = common::label(t);
            let out = ops::drill_down(&log, &ty, "role").map_err(|e| TestCaseError::fail(e.to_string()))?;
            let refined: usize = out
                .object_types()
                .iter()
                .filter(|l| l.unrefined() == ty)
                .map(|l| out.objects_of_type(l).count())
                .sum();
            ensure(out.object_count() == log.object_count(), || {
                "object count changed".into()
            })?;
            ensure(refined == log.objects_of_type(&ty).count(), || {
                format!("{t} not partitioned")
            })?;
        }
        Ok(())
    }));
    record(property("extraction matrix", |log| {
        let m = ops::extraction_matrix(&log);
        for a in log.event_types() {
            for t in log.object_types() {
                let mut n = 0;
                for ev in log.events() {
                    for obj in log.objects() {
                        if &ev.activity == a && &obj.object_type == t && ev.e2o.iter().any(|r| r.object_id == obj.id) {
                            n += 1;
                        }
                    }
                }
                ensure(m.cell(a, t) == n, || {
                    format!("cell ({a}, {t}) = {} != {n}", m.cell(a, t))
                })?;
            }
        }
        Ok(())
    }));

    let config = casegen::default_case_config();
    let a = io::save_json(&casegen::generate(&config).unwrap());
    let b = io::save_json(&casegen::generate(&config).unwrap());
    let other = io::save_json(
        &casegen::generate(&GeneratorConfig {
            seed: config.seed ^ 1,
            ..config
        })
        .unwrap(),
    );
    if a != b {
        failures.push("equal seeds produced different bytes".into());
    }
    if a == other {
        failures.push("different seeds produced identical bytes".into());
    }

    // sample DFGs for criterion 5
    let mut runner = TestRunner::deterministic();
    for _ in 0..20 {
        use proptest::strategy::{Strategy, ValueTree};
        let log = common::arb_log().new_tree(&mut runner).unwrap().current();
        for t in log.object_types() {
            extra_dfgs.push((format!("random/{t}"), discover_dfg(&ops::flatten(&log, t).unwrap())));
        }
    }

    let detail = if failures.is_empty() {
        format!("5 properties x {CASES} random logs, generator determinism")
    } else {
        failures.join(" | ")
    };
    Verdict::new(failures.is_empty(), detail)
}

fn criterion_5(dfgs: &[(String, Dfg)]) -> Verdict {
    let broken: Vec<&str> = dfgs
        .iter()
        .filter(|(_, d)| !d.is_flow_conserving())
        .map(|(n, _)| n.as_str())
        .collect();
    let detail = if broken.is_empty() {
        format!("{} DFGs conserve flow", dfgs.len())
    } else {
        format!("not conserving: {}", broken.join(", "))
    };
    Verdict::new(broken.is_empty() && !dfgs.is_empty(), detail)
}

fn main() {
    let repro = run_repro();
    let mut dfgs: Vec<(String, Dfg)> = repro.as_ref().map(|r| r.dfgs.clone()).unwrap_or_default();
    let verdicts = [
        ("1 case reproduction", criterion_1(&repro)),
        ("2 derived percentages", criterion_2(&repro)),
        ("3 metric fixtures", criterion_3()),
        ("4 property suite", criterion_4(&mut dfgs)),
        ("5 DFG flow conservation", criterion_5(&dfgs)),
    ];
    let mut all = true;
    for (name, v) in &verdicts {
        println!(
            "[{}] criterion {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        all &= v.pass;
    }
    if !all {
        std::process::exit(1);
    }
}
