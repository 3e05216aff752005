//! Per-sample sanity checks, additive deduplication and corpus audits.
//!
//! Every sample is attributed to exactly one [`Outcome`]: the first check
//! it fails in the order minimum reference length, minimum summary length,
//! identity, minimum compression ratio, maximum compression ratio (when
//! enabled), full extractiveness, and finally duplicates. Samples that
//! pass all per-sample checks go through a single ordered deduplication
//! pass.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Sample};
use crate::error::{Error, Result};
use crate::textproc::{casefold, count_tokens, normalize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Inclusive lower bound on characters of the normalised reference.
    pub min_ref_chars: usize,
    /// Inclusive lower bound on characters of the normalised summary.
    pub min_summary_chars: usize,
    /// Inclusive lower bound on reference/summary whitespace-token ratio.
    pub min_cr: f64,
    /// Optional inclusive upper bound on the same ratio. Off by default.
    pub max_cr: Option<f64>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_ref_chars: 50,
            min_summary_chars: 20,
            min_cr: 1.25,
            max_cr: None,
        }
    }
}

impl FilterConfig {
    pub const PRESETS: &'static [&'static str] = &["default", "wikilingua"];

    /// Short instructional texts: 20 characters for references, 8 for summaries.
    pub fn wikilingua() -> Self {
        FilterConfig {
            min_ref_chars: 20,
            min_summary_chars: 8,
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "wikilingua" => Ok(Self::wikilingua()),
            other => Err(Error::Unknown {
                kind: "preset",
                name: other.to_string(),
                known: Self::PRESETS.join(", "),
            }),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: FilterConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_cr.is_finite() && self.min_cr > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "min_cr must be positive, got {}",
                self.min_cr
            )));
        }
        if let Some(max) = self.max_cr {
            if !(max.is_finite() && max >= self.min_cr) {
                return Err(Error::InvalidConfig(format!(
                    "max_cr must be at least min_cr ({}), got {max}",
                    self.min_cr
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Valid,
    MinlenRef,
    MinlenSummary,
    Identity,
    MinCr,
    MaxCr,
    FullyExtractive,
    DupExact,
    DupReference,
    DupSummary,
}

impl Outcome {
    /// Rejection buckets in precedence order.
    pub const REJECTIONS: [Outcome; 9] = [
        Outcome::MinlenRef,
        Outcome::MinlenSummary,
        Outcome::Identity,
        Outcome::MinCr,
        Outcome::MaxCr,
        Outcome::FullyExtractive,
        Outcome::DupExact,
        Outcome::DupReference,
        Outcome::DupSummary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Valid => "valid",
            Outcome::MinlenRef => "minlen_ref",
            Outcome::MinlenSummary => "minlen_summary",
            Outcome::Identity => "identity",
            Outcome::MinCr => "min_cr",
            Outcome::MaxCr => "max_cr",
            Outcome::FullyExtractive => "fully_extractive",
            Outcome::DupExact => "dup_exact",
            Outcome::DupReference => "dup_reference",
            Outcome::DupSummary => "dup_summary",
        }
    }

    pub fn is_valid(self) -> bool {
        self == Outcome::Valid
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Outcome::Valid)
            .chain(Outcome::REJECTIONS)
            .find(|o| o.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown outcome {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    #[serde(rename = "id")]
    pub sample_id: String,
    pub outcome: Outcome,
}

/// Rejection counts, one field per bucket.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub minlen_ref: usize,
    pub minlen_summary: usize,
    pub identity: usize,
    pub min_cr: usize,
    pub max_cr: usize,
    pub fully_extractive: usize,
    pub dup_exact: usize,
    pub dup_reference: usize,
    pub dup_summary: usize,
}

impl OutcomeCounts {
    fn slot(&mut self, outcome: Outcome) -> Option<&mut usize> {
        Some(match outcome {
            Outcome::Valid => return None,
            Outcome::MinlenRef => &mut self.minlen_ref,
            Outcome::MinlenSummary => &mut self.minlen_summary,
            Outcome::Identity => &mut self.identity,
            Outcome::MinCr => &mut self.min_cr,
            Outcome::MaxCr => &mut self.max_cr,
            Outcome::FullyExtractive => &mut self.fully_extractive,
            Outcome::DupExact => &mut self.dup_exact,
            Outcome::DupReference => &mut self.dup_reference,
            Outcome::DupSummary => &mut self.dup_summary,
        })
    }

    pub fn get(&self, outcome: Outcome) -> usize {
        let mut copy = *self;
        copy.slot(outcome).map_or(0, |c| *c)
    }

    pub fn rejected(&self) -> usize {
        Outcome::REJECTIONS.iter().map(|&o| self.get(o)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub split_label: Option<String>,
    pub total: usize,
    pub counts: OutcomeCounts,
    pub valid: usize,
    /// `valid / total`, or 0 for an empty corpus.
    pub valid_fraction: f64,
}

impl AuditReport {
    pub fn from_outcomes<'a>(
        split_label: Option<String>,
        outcomes: impl IntoIterator<Item = &'a Outcome>,
    ) -> Self {
        let mut counts = OutcomeCounts::default();
        let mut total = 0;
        let mut valid = 0;
        for &outcome in outcomes {
            total += 1;
            match counts.slot(outcome) {
                Some(c) => *c += 1,
                None => valid += 1,
            }
        }
        let valid_fraction = if total == 0 {
            0.0
        } else {
            valid as f64 / total as f64
        };
        AuditReport {
            split_label,
            total,
            counts,
            valid,
            valid_fraction,
        }
    }

    pub fn valid_percent(&self) -> f64 {
        self.valid_fraction * 100.0
    }

    /// Every sample attributed exactly once.
    pub fn check(&self) -> Result<()> {
        let attributed = self.counts.rejected() + self.valid;
        if attributed != self.total {
            return Err(Error::Invariant(format!(
                "audit attributes {attributed} samples but corpus has {}",
                self.total
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Audit {
    pub report: AuditReport,
    pub verdicts: Vec<FilterVerdict>,
}

fn char_len(text: &str) -> usize {
    normalize(text).chars().count()
}

pub fn check_min_length(sample: &Sample, config: &FilterConfig) -> Option<Outcome> {
    if char_len(&sample.reference) < config.min_ref_chars {
        Some(Outcome::MinlenRef)
    } else if char_len(&sample.summary) < config.min_summary_chars {
        Some(Outcome::MinlenSummary)
    } else {
        None
    }
}

/// Case-sensitive equality after whitespace normalisation.
pub fn check_identity(sample: &Sample) -> Option<Outcome> {
    (normalize(&sample.reference) == normalize(&sample.summary)).then_some(Outcome::Identity)
}

/// Reference tokens per summary token, counted on whitespace.
pub fn compression_ratio(sample: &Sample) -> Result<f64> {
    let summary = count_tokens(&sample.summary);
    if summary == 0 {
        return Err(Error::UndefinedRatio {
            id: sample.id.clone(),
        });
    }
    Ok(count_tokens(&sample.reference) as f64 / summary as f64)
}

/// A summary without tokens has no defined ratio and fails this check.
pub fn check_min_cr(sample: &Sample, config: &FilterConfig) -> Option<Outcome> {
    match compression_ratio(sample) {
        Ok(cr) if cr >= config.min_cr => None,
        _ => Some(Outcome::MinCr),
    }
}

pub fn check_max_cr(sample: &Sample, config: &FilterConfig) -> Option<Outcome> {
    let max = config.max_cr?;
    match compression_ratio(sample) {
        Ok(cr) if cr > max => Some(Outcome::MaxCr),
        _ => None,
    }
}

/// The summary appears verbatim (ignoring case and whitespace runs)
/// somewhere in the reference.
pub fn check_fully_extractive(sample: &Sample) -> Option<Outcome> {
    casefold(&sample.reference)
        .contains(&casefold(&sample.summary))
        .then_some(Outcome::FullyExtractive)
}

/// Runs the per-sample checks in precedence order.
pub fn check_sample(sample: &Sample, config: &FilterConfig) -> Option<Outcome> {
    check_min_length(sample, config)
        .or_else(|| check_identity(sample))
        .or_else(|| check_min_cr(sample, config))
        .or_else(|| check_max_cr(sample, config))
        .or_else(|| check_fully_extractive(sample))
}

/// Tracks which normalised references and summaries have been admitted.
#[derive(Debug, Default)]
pub struct Deduplicator {
    references: HashSet<String>,
    summaries: HashSet<String>,
}

impl Deduplicator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Admits the sample if neither text was seen before, otherwise names
    /// which of the two collided.
    pub fn admit(&mut self, sample: &Sample) -> Outcome {
        let reference = normalize(&sample.reference);
        let summary = normalize(&sample.summary);
        match (
            self.references.contains(&reference),
            self.summaries.contains(&summary),
        ) {
            (true, true) => Outcome::DupExact,
            (true, false) => Outcome::DupReference,
            (false, true) => Outcome::DupSummary,
            (false, false) => {
                self.references.insert(reference);
                self.summaries.insert(summary);
                Outcome::Valid
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dedup {
    pub kept: Corpus,
    /// One outcome per input sample, `Valid` for kept ones.
    pub outcomes: Vec<Outcome>,
}

pub fn dedup_additive(corpus: &Corpus) -> Dedup {
    let mut dedup = Deduplicator::new();
    let outcomes: Vec<Outcome> = corpus.iter().map(|s| dedup.admit(s)).collect();
    let kept = corpus.subset(
        corpus
            .iter()
            .zip(&outcomes)
            .filter(|(_, o)| o.is_valid())
            .map(|(s, _)| s),
    );
    Dedup { kept, outcomes }
}

pub fn audit(corpus: &Corpus, config: &FilterConfig) -> Audit {
    let mut outcomes: Vec<Option<Outcome>> = corpus
        .samples
        .par_iter()
        .map(|s| check_sample(s, config))
        .collect();

    let mut dedup = Deduplicator::new();
    for (sample, outcome) in corpus.iter().zip(outcomes.iter_mut()) {
        if outcome.is_none() {
            *outcome = Some(dedup.admit(sample));
        }
    }

    let verdicts: Vec<FilterVerdict> = corpus
        .iter()
        .zip(outcomes)
        .map(|(s, o)| FilterVerdict {
            sample_id: s.id.clone(),
            outcome: o.unwrap_or(Outcome::Valid),
        })
        .collect();
    let report = AuditReport::from_outcomes(
        corpus.split_label.clone(),
        verdicts.iter().map(|v| &v.outcome),
    );
    Audit { report, verdicts }
}

/// The samples whose audit outcome is valid, in original order.
pub fn filter(corpus: &Corpus, config: &FilterConfig) -> Corpus {
    let audit = audit(corpus, config);
    corpus.subset(
        corpus
            .iter()
            .zip(&audit.verdicts)
            .filter(|(_, v)| v.outcome.is_valid())
            .map(|(s, _)| s),
    )
}
