//! Classifier evaluation arithmetic and recall-first model selection.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kv;

/// Human claim handlers find 70% of the actual claim parts.
pub const HUMAN_RECALL_BASELINE: f64 = 0.70;

/// Published metrics are rounded to two decimals.
pub const FIXTURE_TOLERANCE: f64 = 0.005;

const TABLE1: &str = include_str!("../fixtures/table1.conf");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self::new(self.tp * k, self.fp * k, self.tn * k, self.fn_ * k)
    }
}

/// `None` marks a metric whose denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl MetricReport {
    /// Metrics taken as published, not computed from counts.
    pub fn published(accuracy: f64, precision: f64, recall: f64, f1: f64) -> Self {
        Self {
            accuracy: Some(accuracy),
            precision: Some(precision),
            recall: Some(recall),
            f1: Some(f1),
        }
    }
}

fn show(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"))
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "accuracy={} precision={} recall={} f1={}",
            show(self.accuracy),
            show(self.precision),
            show(self.recall),
            show(self.f1)
        )
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(c: &ConfusionCounts) -> Result<MetricReport> {
    if c.total() == 0 {
        return Err(Error::EmptyConfusion);
    }
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(MetricReport {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub version: String,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub baseline: f64,
    pub meets_baseline: bool,
}

/// Picks the highest recall; ties go to higher F1, then the smaller version label.
/// Undefined metrics rank below every defined one.
pub fn select_model(reports: &BTreeMap<String, MetricReport>, baseline_recall: f64) -> Option<Selection> {
    let key = |x: Option<f64>| x.unwrap_or(f64::NEG_INFINITY);
    let (version, report) = reports.iter().reduce(|best, cand| {
        let ord = key(cand.1.recall)
            .total_cmp(&key(best.1.recall))
            .then(key(cand.1.f1).total_cmp(&key(best.1.f1)));
        // BTreeMap iterates in label order, so Equal keeps the smaller label
        if ord.is_gt() {
            cand
        } else {
            best
        }
    })?;
    Some(Selection {
        version: version.clone(),
        recall: report.recall,
        f1: report.f1,
        baseline: baseline_recall,
        meets_baseline: report.recall.is_some_and(|r| r >= baseline_recall),
    })
}

/// One evaluation row: published metrics plus a confusion that reproduces them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureRow {
    pub version: String,
    pub language: String,
    pub published: MetricReport,
    pub confusion: ConfusionCounts,
}

impl FixtureRow {
    /// `v5-eng` style label.
    pub fn label(&self) -> String {
        format!("{}-{}", self.version, self.language)
    }
}

fn numbers<T: std::str::FromStr>(text: &str, n: usize, key: &str) -> Result<Vec<T>> {
    let out: Vec<T> = text
        .split_whitespace()
        .map(|t| t.parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("`{key}`: expected numbers, got `{text}`")))?;
    if out.len() != n {
        return Err(Error::Config(format!(
            "`{key}`: expected {n} numbers, got {}",
            out.len()
        )));
    }
    Ok(out)
}

/// Parses `version-language = acc prec rec f1 | tp fp tn fn` lines.
pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureRow>> {
    kv::parse_pairs(text)?
        .into_iter()
        .map(|(key, value)| {
            let (version, language) = key
                .split_once('-')
                .ok_or_else(|| Error::Config(format!("`{key}`: expected <version>-<language>")))?;
            let (metrics, counts) = value
                .split_once('|')
                .ok_or_else(|| Error::Config(format!("`{key}`: expected `metrics | counts`")))?;
            let m = numbers::<f64>(metrics, 4, &key)?;
            let c = numbers::<u64>(counts, 4, &key)?;
            Ok(FixtureRow {
                version: version.to_string(),
                language: language.to_string(),
                published: MetricReport::published(m[0], m[1], m[2], m[3]),
                confusion: ConfusionCounts::new(c[0], c[1], c[2], c[3]),
            })
        })
        .collect()
}

/// The bundled ten-row model evaluation.
pub fn table1() -> Vec<FixtureRow> {
    parse_fixtures(TABLE1).expect("bundled fixture parses")
}

pub fn within(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        (None, None) => true,
        _ => false,
    }
}

/// Whether computed metrics match published ones metric by metric.
pub fn reproduces(computed: &MetricReport, published: &MetricReport, tol: f64) -> bool {
    within(computed.accuracy, published.accuracy, tol)
        && within(computed.precision, published.precision, tol)
        && within(computed.recall, published.recall, tol)
        && within(computed.f1, published.f1, tol)
}
