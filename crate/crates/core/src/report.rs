//! Markdown, CSV and JSON renderings of audit, statistics and score
//! results. Output is a pure function of the inputs.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::filters::{AuditReport, FilterVerdict, Outcome};
use crate::rouge::{AggregateScore, CorpusScores};
use crate::stats::LengthStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Md,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Md => "md",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" | "markdown" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown format {other:?}, expected md, csv or json"
            ))),
        }
    }
}

fn audit_columns(with_max_cr: bool) -> Vec<(&'static str, Outcome)> {
    let mut cols = vec![
        ("Min Length Ref", Outcome::MinlenRef),
        ("Min Length Summ", Outcome::MinlenSummary),
        ("Id", Outcome::Identity),
        ("Min CR", Outcome::MinCr),
    ];
    if with_max_cr {
        cols.push(("Max CR", Outcome::MaxCr));
    }
    cols.extend([
        ("Fully Extr", Outcome::FullyExtractive),
        ("Dup Exact", Outcome::DupExact),
        ("Dup Ref", Outcome::DupReference),
        ("Dup Summ", Outcome::DupSummary),
    ]);
    cols
}

fn split_name(report: &AuditReport) -> &str {
    report.split_label.as_deref().unwrap_or("-")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per report; the max-CR column appears only when that check
/// was enabled.
pub fn audit_markdown(reports: &[AuditReport], with_max_cr: bool) -> String {
    let cols = audit_columns(with_max_cr);
    let mut out = String::from("| Split | Samples |");
    for (name, _) in &cols {
        let _ = write!(out, " {name} |");
    }
    out.push_str(" Valid Samples |\n|---|---:|");
    out.push_str(&"---:|".repeat(cols.len()));
    out.push_str("---:|\n");
    for r in reports {
        let _ = write!(out, "| {} | {} |", split_name(r), r.total);
        for (_, outcome) in &cols {
            let _ = write!(out, " {} |", r.counts.get(*outcome));
        }
        let _ = writeln!(out, " {} ({:.2}%) |", r.valid, r.valid_percent());
    }
    out
}

pub fn audit_csv(reports: &[AuditReport], with_max_cr: bool) -> String {
    let cols = audit_columns(with_max_cr);
    let mut out = String::from("split,samples");
    for (_, outcome) in &cols {
        let _ = write!(out, ",{outcome}");
    }
    out.push_str(",valid,valid_percent\n");
    for r in reports {
        let _ = write!(out, "{},{}", csv_field(split_name(r)), r.total);
        for (_, outcome) in &cols {
            let _ = write!(out, ",{}", r.counts.get(*outcome));
        }
        let _ = writeln!(out, ",{},{:.2}", r.valid, r.valid_percent());
    }
    out
}

pub fn audit_json(reports: &[AuditReport]) -> String {
    pretty(&reports)
}

pub fn render_audit(reports: &[AuditReport], with_max_cr: bool, format: Format) -> String {
    match format {
        Format::Md => audit_markdown(reports, with_max_cr),
        Format::Csv => audit_csv(reports, with_max_cr),
        Format::Json => audit_json(reports),
    }
}

/// `{"id":…,"outcome":…}` per line.
pub fn verdicts_jsonl(verdicts: &[FilterVerdict]) -> String {
    let mut out = String::new();
    for v in verdicts {
        out.push_str(&serde_json::to_string(v).expect("verdicts serialise"));
        out.push('\n');
    }
    out
}

/// Plot-ready distribution data.
pub fn violin_json(stats: &LengthStats) -> String {
    pretty(stats)
}

pub fn stats_markdown(stats: &[LengthStats]) -> String {
    let mut out = String::from("| Field | Unit | Count | Mean | Q1 | Median | Q3 | Min | Max |\n");
    out.push_str("|---|---|---:|---:|---:|---:|---:|---:|---:|\n");
    for s in stats {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} |",
            enum_name(&s.field),
            enum_name(&s.unit),
            s.count,
            s.mean,
            s.q1,
            s.median,
            s.q3,
            s.min,
            s.max
        );
    }
    out
}

fn enum_name<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

/// Aggregated scores of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub system: String,
    pub coverage: f64,
    pub aggregates: Vec<AggregateScore>,
}

fn points(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

/// F1 ×100 with the bootstrap interval, one row per system.
pub fn score_markdown(rows: &[ScoreRow]) -> String {
    let variants: Vec<_> = rows
        .first()
        .map(|r| r.aggregates.iter().map(|a| a.variant).collect())
        .unwrap_or_default();
    let mut out = String::from("| System |");
    for v in &variants {
        let _ = write!(out, " {} |", v.short());
    }
    out.push_str(" Samples | Coverage |\n|---|");
    out.push_str(&"---:|".repeat(variants.len() + 2));
    out.push('\n');
    for row in rows {
        let _ = write!(out, "| {} |", row.system);
        for a in &row.aggregates {
            let _ = write!(out, " {} [{}, {}] |", points(a.mean_f1), points(a.ci_low), points(a.ci_high));
        }
        let n = row.aggregates.first().map_or(0, |a| a.n_samples);
        let _ = writeln!(out, " {n} | {:.2}% |", row.coverage * 100.0);
    }
    out
}

pub fn score_csv(rows: &[ScoreRow]) -> String {
    let mut out = String::from(
        "system,variant,mean_f1,ci_low,ci_high,mean_precision,mean_recall,n_samples,n_resamples,seed,coverage\n",
    );
    for row in rows {
        for a in &row.aggregates {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&row.system),
                a.variant,
                a.mean_f1,
                a.ci_low,
                a.ci_high,
                a.mean_precision,
                a.mean_recall,
                a.n_samples,
                a.n_resamples,
                a.seed,
                row.coverage
            );
        }
    }
    out
}

pub fn score_json(rows: &[ScoreRow]) -> String {
    let systems: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut scores = Map::new();
            for a in &row.aggregates {
                scores.insert(
                    a.variant.to_string(),
                    json!({
                        "mean_f1": a.mean_f1,
                        "ci_low": a.ci_low,
                        "ci_high": a.ci_high,
                        "mean_precision": a.mean_precision,
                        "mean_recall": a.mean_recall,
                        "n_samples": a.n_samples,
                        "n_resamples": a.n_resamples,
                        "seed": a.seed,
                    }),
                );
            }
            json!({ "system": row.system, "coverage": row.coverage, "scores": scores })
        })
        .collect();
    pretty(&json!({ "systems": systems }))
}

pub fn render_scores(rows: &[ScoreRow], format: Format) -> String {
    match format {
        Format::Md => score_markdown(rows),
        Format::Csv => score_csv(rows),
        Format::Json => score_json(rows),
    }
}

/// `id,variant,p,r,f1` per sample and variant.
pub fn per_sample_csv(scores: &CorpusScores) -> String {
    let mut out = String::from("id,variant,p,r,f1\n");
    for sample in &scores.per_sample {
        for s in &sample.scores {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                csv_field(&sample.id),
                s.variant,
                s.precision,
                s.recall,
                s.f1
            );
        }
    }
    out
}

fn pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialise");
    s.push('\n');
    s
}
