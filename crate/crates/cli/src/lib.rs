//! `ocpm` command line: generation, IO, log algebra, discovery, recipes, and metrics.
//!
//! [`run`] is the whole program minus process exit, so tests drive it directly.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ocpm_core::casegen::{self, GeneratorConfig};
use ocpm_core::metrics::{self, FIXTURE_TOLERANCE, HUMAN_RECALL_BASELINE};
use ocpm_core::recipes::{self, Check};
use ocpm_core::{io, ops, vocab, Error, FilterMode, OcelLog, ToDot, TypeLabel};

/// Fallback output directory for `recipe` and `repro`.
pub const OUT_DIR_ENV: &str = "OCPM_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "ocpm", version, about = "Object-centric process mining over OCEL 2.0 logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic claims-process log.
    Generate {
        /// Config file (JSON or key = value); defaults reproduce the case study.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a log file and list every problem found.
    Validate { log: PathBuf },
    /// Activity × object-type relation counts as CSV.
    Matrix {
        log: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flatten on one object type into a case-based log (JSON).
    Flatten {
        log: PathBuf,
        #[arg(long = "type")]
        object_type: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Discover a DFG (from a flattened view) or an OC-DFG.
    Discover {
        kind: ModelKind,
        #[arg(long = "in")]
        input: PathBuf,
        /// Case object type for `dfg`.
        #[arg(long = "type", default_value = vocab::CLAIM)]
        object_type: String,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Apply one log operation and write the resulting log.
    Ops {
        #[command(subcommand)]
        op: OpCommand,
    },
    /// Run one of the case-study analyses.
    Recipe {
        name: RecipeName,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
    /// Model-evaluation arithmetic.
    Metrics {
        #[command(subcommand)]
        which: MetricsCommand,
    },
    /// Generate the default log, run every recipe, compare with the published counts.
    Repro {
        #[arg(long)]
        outdir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelKind {
    Dfg,
    Ocdfg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RecipeName {
    Q1,
    Q2,
    Q3,
    Q4,
    Venn,
    Scaling,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Keep,
    Drop,
}

#[derive(Args, Debug)]
struct InOut {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum OpCommand {
    /// Keep or drop events by activity.
    Filter {
        #[command(flatten)]
        io: InOut,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Activity label; repeat or comma-separate.
        #[arg(long = "activity", required = true)]
        activities: Vec<String>,
    },
    /// Drop target events sharing no `via` object with any anchor event.
    RetainLinked {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        target: String,
        #[arg(long)]
        anchor: String,
        #[arg(long)]
        via: String,
    },
    /// Refine an object type by an attribute value.
    Drilldown {
        #[command(flatten)]
        io: InOut,
        #[arg(long = "type")]
        object_type: String,
        #[arg(long)]
        attribute: String,
    },
    /// Relabel an activity by related objects of a type.
    Unfold {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        activity: String,
        #[arg(long = "type")]
        object_type: String,
    },
    /// Keep only the listed object types.
    Project {
        #[command(flatten)]
        io: InOut,
        /// Object type label; repeat for several. Comma-containing labels must be quoted whole.
        #[arg(long = "keep")]
        keep: Vec<String>,
    },
    /// Keep each claim's latest note before its first scan.
    LatestNote {
        #[command(flatten)]
        io: InOut,
    },
}

#[derive(Subcommand, Debug)]
enum MetricsCommand {
    /// Recompute the model-evaluation table and select a model by recall.
    Table1 {
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = HUMAN_RECALL_BASELINE)]
        baseline: f64,
    },
}

#[derive(Debug)]
enum Failure {
    Op(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Op(e)
    }
}

impl Failure {
    fn render(&self) -> String {
        match self {
            Failure::Op(e) => format!("{}: {e}", e.name()),
            Failure::Io(p, e) => format!("IoError: {}: {e}", p.display()),
        }
    }
}

type Outcome = Result<(), Failure>;

#[derive(Default)]
struct Session {
    stdout: String,
    artifacts: Vec<PathBuf>,
}

impl Session {
    fn say(&mut self, line: impl AsRef<str>) {
        self.stdout.push_str(line.as_ref());
        self.stdout.push('\n');
    }

    /// Writes via a temporary file in the target directory, then renames.
    fn write(&mut self, path: &Path, content: &str) -> Outcome {
        let fail = |e: std::io::Error| Failure::Io(path.to_path_buf(), e);
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&dir).map_err(fail)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
        tmp.write_all(content.as_bytes()).map_err(fail)?;
        tmp.persist(path).map_err(|e| fail(e.error))?;
        self.artifacts.push(path.to_path_buf());
        Ok(())
    }

    fn write_json(&mut self, path: &Path, value: &Value) -> Outcome {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
        text.push('\n');
        self.write(path, &text)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load(path: &Path) -> Result<OcelLog, Failure> {
    Ok(io::load_json(&read(path)?)?)
}

fn label(text: &str) -> Result<TypeLabel, Failure> {
    Ok(TypeLabel::parse(text.trim()).map_err(Error::from)?)
}

/// Labels from repeated flags, also split on top-level commas when unparenthesized.
fn label_set(items: &[String]) -> Result<BTreeSet<TypeLabel>, Failure> {
    let mut out = BTreeSet::new();
    for item in items {
        let item = item.trim();
        if item.starts_with('(') {
            out.insert(label(item)?);
        } else {
            for part in item.split(',').filter(|p| !p.trim().is_empty()) {
                out.insert(label(part)?);
            }
        }
    }
    Ok(out)
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_config(path: Option<&Path>) -> Result<GeneratorConfig, Failure> {
    match path {
        Some(p) => Ok(GeneratorConfig::from_text(&read(p)?)?),
        None => Ok(casegen::default_case_config()),
    }
}

/// Parses arguments (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CommandResult {
                    stdout: text,
                    ..Default::default()
                },
                _ => CommandResult {
                    exit_code: 2,
                    stderr: text,
                    ..Default::default()
                },
            };
        }
    };
    let mut session = Session::default();
    let outcome = dispatch(cli.command, &mut session);
    let Session { stdout, artifacts } = session;
    match outcome {
        Ok(()) => CommandResult {
            exit_code: 0,
            stdout,
            stderr: String::new(),
            artifacts,
        },
        Err(f) => CommandResult {
            exit_code: 1,
            stdout,
            stderr: f.render() + "\n",
            artifacts,
        },
    }
}

fn dispatch(command: Command, s: &mut Session) -> Outcome {
    match command {
        Command::Generate { config, out } => {
            let config = load_config(config.as_deref())?;
            let log = casegen::generate(&config)?;
            s.write(&out, &io::save_json(&log))?;
            s.say(format!(
                "generated {} events and {} objects -> {}",
                log.event_count(),
                log.object_count(),
                out.display()
            ));
            Ok(())
        }
        Command::Validate { log } => validate(&log, s),
        Command::Matrix { log, out } => {
            let csv = ops::extraction_matrix(&load(&log)?).to_csv();
            match out {
                Some(p) => s.write(&p, &csv)?,
                None => s.stdout.push_str(&csv),
            }
            Ok(())
        }
        Command::Flatten { log, object_type, out } => {
            let flat = ops::flatten(&load(&log)?, &label(&object_type)?)?;
            s.write_json(&out, &serde_json::to_value(&flat).expect("flat logs serialize"))?;
            s.say(format!("{} cases -> {}", flat.case_count(), out.display()));
            Ok(())
        }
        Command::Discover {
            kind,
            input,
            object_type,
            dot,
            json,
        } => {
            let log = load(&input)?;
            let (text, value) = match kind {
                ModelKind::Dfg => {
                    let dfg = ocpm_core::discover_dfg(&ops::flatten(&log, &label(&object_type)?)?);
                    (dfg.to_dot(), dfg.to_json())
                }
                ModelKind::Ocdfg => {
                    let m = ocpm_core::discover_ocdfg(&log);
                    (m.to_dot(), m.to_json())
                }
            };
            match &dot {
                Some(p) => s.write(p, &text)?,
                None if json.is_none() => s.stdout.push_str(&text),
                None => {}
            }
            if let Some(p) = &json {
                s.write_json(p, &value)?;
            }
            Ok(())
        }
        Command::Ops { op } => run_op(op, s),
        Command::Recipe { name, input, outdir } => {
            let log = load(&input)?;
            // targets are reported only when the whole case pipeline applies to this log
            let checks = recipes::reproduce(&log).map(|r| r.checks).unwrap_or_default();
            run_recipe(name, &log, &checks, &out_dir(outdir), s)
        }
        Command::Metrics {
            which: MetricsCommand::Table1 { fixtures, baseline },
        } => table1(fixtures.as_deref(), baseline, s),
        Command::Repro { outdir, config } => repro(&out_dir(outdir), config.as_deref(), s),
    }
}

fn validate(path: &Path, s: &mut Session) -> Outcome {
    let (parts, mut warnings) = io::parse_document(&read(path)?)?;
    let mut report = io::validate(&parts);
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    for issue in &report.errors {
        s.say(format!("error {issue}"));
    }
    for issue in &report.warnings {
        s.say(format!("warning {issue}"));
    }
    s.say(format!(
        "{} objects, {} events: {} error(s), {} warning(s)",
        parts.objects.len(),
        parts.events.len(),
        report.errors.len(),
        report.warnings.len()
    ));
    if report.is_loadable() {
        Ok(())
    } else {
        Err(Failure::Op(Error::Integrity(ocpm_core::IntegrityError {
            violations: report.errors,
        })))
    }
}

fn run_op(op: OpCommand, s: &mut Session) -> Outcome {
    let (io_paths, result) = match op {
        OpCommand::Filter { io, mode, activities } => {
            let log = load(&io.input)?;
            let mode = match mode {
                ModeArg::Keep => FilterMode::Keep,
                ModeArg::Drop => FilterMode::Drop,
            };
            let out = ops::filter_activities(&log, mode, &label_set(&activities)?);
            (io, out)
        }
        OpCommand::RetainLinked {
            io,
            target,
            anchor,
            via,
        } => {
            let log = load(&io.input)?;
            let out = ops::retain_linked(&log, &label(&target)?, &label(&anchor)?, &label(&via)?);
            (io, out)
        }
        OpCommand::Drilldown {
            io,
            object_type,
            attribute,
        } => {
            let log = load(&io.input)?;
            let out = ops::drill_down(&log, &label(&object_type)?, &attribute)?;
            (io, out)
        }
        OpCommand::Unfold {
            io,
            activity,
            object_type,
        } => {
            let log = load(&io.input)?;
            let out = ops::unfold(&log, &label(&activity)?, &label(&object_type)?);
            (io, out)
        }
        OpCommand::Project { io, keep } => {
            let log = load(&io.input)?;
            let out = ops::project_object_types(&log, &label_set(&keep)?);
            (io, out)
        }
        OpCommand::LatestNote { io } => {
            let log = load(&io.input)?;
            let out = ops::latest_note_filter(&log);
            (io, out)
        }
    };
    s.write(&io_paths.out, &io::save_json(&result))?;
    s.say(format!(
        "{} events, {} objects -> {}",
        result.event_count(),
        result.object_count(),
        io_paths.out.display()
    ));
    Ok(())
}

fn checks_json(checks: &[Check]) -> Value {
    Value::Object(
        checks
            .iter()
            .map(|c| {
                (
                    c.name.clone(),
                    json!({"observed": c.observed, "target": c.target, "pass": c.pass}),
                )
            })
            .collect(),
    )
}

/// The published-count checks belonging to one recipe.
fn recipe_checks(name: RecipeName, all: &[Check]) -> Vec<Check> {
    let prefix = match name {
        RecipeName::Q1 => vec!["q1.", "human_share"],
        RecipeName::Q2 => vec!["q2.", "ai_share"],
        RecipeName::Q3 => vec!["q3."],
        RecipeName::Q4 => vec!["q4."],
        RecipeName::Venn => vec!["venn."],
        RecipeName::Scaling => vec!["scaling"],
    };
    all.iter()
        .filter(|c| prefix.iter().any(|p| c.name.starts_with(p)))
        .cloned()
        .collect()
}

fn run_recipe(name: RecipeName, log: &OcelLog, checks: &[Check], dir: &Path, s: &mut Session) -> Outcome {
    let stem = format!("{name:?}").to_lowercase();
    let (model, dot) = match name {
        RecipeName::Q1 => {
            let m = recipes::q1_human_effectiveness(log)?;
            (m.to_json(), Some(m.to_dot()))
        }
        RecipeName::Q2 => {
            let m = recipes::q2_ai_effectiveness(log)?;
            let mut v = m.to_json();
            v["unique_predictions"] = json!(recipes::unique_predictions(log));
            (v, Some(m.to_dot()))
        }
        RecipeName::Q3 => {
            let m = recipes::q3_missed_by_ai(log)?;
            (m.to_json(), Some(m.to_dot()))
        }
        RecipeName::Q4 => {
            let m = recipes::q4_missed_by_humans(log)?;
            (m.to_json(), Some(m.to_dot()))
        }
        RecipeName::Venn => (
            serde_json::to_value(recipes::venn_attribution(log)).expect("serializable"),
            None,
        ),
        RecipeName::Scaling => (json!({ "scaling_percent": recipes::scaling_percentage(log)? }), None),
    };
    let summary = json!({
        "recipe": stem,
        "result": model,
        "targets": checks_json(&recipe_checks(name, checks)),
    });
    s.write_json(&dir.join(format!("{stem}.json")), &summary)?;
    if let Some(dot) = dot {
        s.write(&dir.join(format!("{stem}.dot")), &dot)?;
    }
    s.say(serde_json::to_string(&summary["result"]).expect("serializable"));
    Ok(())
}

fn table1(fixtures: Option<&Path>, baseline: f64, s: &mut Session) -> Outcome {
    let rows = match fixtures {
        Some(p) => metrics::parse_fixtures(&read(p)?)?,
        None => metrics::table1(),
    };
    let mut published = std::collections::BTreeMap::new();
    s.say("model     accuracy precision recall   f1       (from counts)  within ±0.005");
    for row in &rows {
        let computed = metrics::compute_metrics(&row.confusion)?;
        let ok = metrics::reproduces(&computed, &row.published, FIXTURE_TOLERANCE);
        let f = |x: Option<f64>| x.map_or("undef".to_string(), |v| format!("{v:.4}"));
        s.say(format!(
            "{:<9} {:<8} {:<9} {:<8} {:<8}                {}",
            row.label(),
            f(computed.accuracy),
            f(computed.precision),
            f(computed.recall),
            f(computed.f1),
            if ok { "PASS" } else { "FAIL" }
        ));
        published.insert(row.label(), row.published);
    }
    if let Some(sel) = metrics::select_model(&published, baseline) {
        s.say(format!(
            "selected {} recall={:.2} baseline={:.2} {}",
            sel.version,
            sel.recall.unwrap_or(f64::NAN),
            sel.baseline,
            if sel.meets_baseline {
                "meets baseline"
            } else {
                "below baseline"
            }
        ));
    }
    Ok(())
}

fn repro(dir: &Path, config: Option<&Path>, s: &mut Session) -> Outcome {
    let config = load_config(config)?;
    let log = casegen::generate(&config)?;
    s.write(&dir.join("config.conf"), &config.to_kv())?;
    s.write(&dir.join("case_log.json"), &io::save_json(&log))?;
    s.write(&dir.join("matrix.csv"), &ops::extraction_matrix(&log).to_csv())?;
    let overall = ocpm_core::discover_dfg(&ops::flatten(&log, &ocpm_core::vocab::object_type(vocab::CLAIM))?);
    s.write(&dir.join("overall.dot"), &overall.to_dot())?;
    let rep = recipes::reproduce(&log)?;
    let mut quiet = Session::default();
    for name in [
        RecipeName::Q1,
        RecipeName::Q2,
        RecipeName::Q3,
        RecipeName::Q4,
        RecipeName::Venn,
        RecipeName::Scaling,
    ] {
        run_recipe(name, &log, &rep.checks, dir, &mut quiet)?;
    }
    s.artifacts.append(&mut quiet.artifacts);

    let mut table = String::new();
    for c in &rep.checks {
        let _ = writeln!(
            table,
            "{:<38} {:>8} {:>8}  {}",
            c.name,
            c.observed,
            c.target,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    s.stdout.push_str(&table);
    let passed = rep.checks.iter().filter(|c| c.pass).count();
    s.say(format!(
        "{passed}/{} checks pass{}",
        rep.checks.len(),
        if rep.all_pass() { ", ALL PASS" } else { "" }
    ));
    s.write_json(
        &dir.join("summary.json"),
        &json!({
            "events": log.event_count(),
            "objects": log.object_count(),
            "all_pass": rep.all_pass(),
            "checks": checks_json(&rep.checks),
        }),
    )?;
    Ok(())
}
