//! Length and compression distributions, and sample selection for manual
//! review (in order, at random, or by distance from the median).

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Field, Sample};
use crate::error::{Error, Result};
use crate::filters::compression_ratio;
use crate::textproc::{count_tokens, normalize, SentenceSplitter};

pub const HISTOGRAM_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Chars,
    Tokens,
    Sentences,
    /// Dimensionless; used for compression ratios.
    Ratio,
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chars" => Ok(Unit::Chars),
            "tokens" => Ok(Unit::Tokens),
            "sentences" => Ok(Unit::Sentences),
            other => Err(Error::InvalidArgument(format!(
                "unknown unit {other:?}, expected chars, tokens or sentences"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measured {
    Reference,
    Summary,
    /// Reference tokens per summary token.
    Cr,
}

impl From<Field> for Measured {
    fn from(field: Field) -> Self {
        match field {
            Field::Reference => Measured::Reference,
            Field::Summary => Measured::Summary,
        }
    }
}

/// Summary statistics of one per-sample quantity; serialises to the
/// violin-data export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub field: Measured,
    pub unit: Unit,
    pub count: usize,
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
    /// `(lower edge, count)` for equal-width bins over `[min, max]`.
    pub histogram: Vec<(f64, usize)>,
}

impl LengthStats {
    pub fn from_values(field: Measured, unit: Unit, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("no values to summarise".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let min = sorted[0];
        let max = sorted[sorted.len() - 1];
        Ok(LengthStats {
            field,
            unit,
            count: values.len(),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q1: percentile(&sorted, 0.25),
            median: percentile(&sorted, 0.5),
            q3: percentile(&sorted, 0.75),
            min,
            max,
            histogram: histogram(&sorted, min, max, HISTOGRAM_BINS),
        })
    }
}

/// Linear interpolation between closest ranks over sorted, non-empty data.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    }
}

fn histogram(values: &[f64], min: f64, max: f64, bins: usize) -> Vec<(f64, usize)> {
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let bin = if width > 0.0 && width.is_finite() {
            (((v - min) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[bin] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let edge = if width.is_finite() { min + width * i as f64 } else { min };
            (edge, c)
        })
        .collect()
}

pub fn sample_length(sample: &Sample, field: Field, unit: Unit, splitter: &SentenceSplitter) -> f64 {
    let text = sample.text(field);
    let len = match unit {
        Unit::Chars => normalize(text).chars().count(),
        Unit::Tokens => count_tokens(text),
        Unit::Sentences => sample.sentences(field, splitter).len(),
        Unit::Ratio => return compression_ratio(sample).unwrap_or(f64::INFINITY),
    };
    len as f64
}

pub fn length_distribution(corpus: &Corpus, field: Field, unit: Unit) -> Result<LengthStats> {
    length_distribution_with(corpus, field, unit, &SentenceSplitter::default())
}

pub fn length_distribution_with(
    corpus: &Corpus,
    field: Field,
    unit: Unit,
    splitter: &SentenceSplitter,
) -> Result<LengthStats> {
    if unit == Unit::Ratio {
        return Err(Error::InvalidArgument("use cr_distribution for ratios".into()));
    }
    if corpus.is_empty() {
        return Err(Error::Empty("length distribution of an empty corpus".into()));
    }
    let values: Vec<f64> = corpus
        .iter()
        .map(|s| sample_length(s, field, unit, splitter))
        .collect();
    LengthStats::from_values(field.into(), unit, &values)
}

pub fn cr_distribution(corpus: &Corpus) -> Result<LengthStats> {
    if corpus.is_empty() {
        return Err(Error::Empty("compression ratios of an empty corpus".into()));
    }
    let values = corpus
        .iter()
        .map(compression_ratio)
        .collect::<Result<Vec<f64>>>()?;
    LengthStats::from_values(Measured::Cr, Unit::Ratio, &values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortKey {
    Position,
    /// Whitespace tokens of the reference.
    RefLength,
    /// Whitespace tokens of the summary.
    SummaryLength,
    /// Compression ratio; samples without summary tokens sort last.
    Cr,
}

impl SortKey {
    fn value(self, position: usize, sample: &Sample) -> f64 {
        match self {
            SortKey::Position => position as f64,
            SortKey::RefLength => count_tokens(&sample.reference) as f64,
            SortKey::SummaryLength => count_tokens(&sample.summary) as f64,
            SortKey::Cr => compression_ratio(sample).unwrap_or(f64::INFINITY),
        }
    }
}

impl FromStr for SortKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "position" => Ok(SortKey::Position),
            "ref_length" | "ref-length" => Ok(SortKey::RefLength),
            "summary_length" | "summary-length" => Ok(SortKey::SummaryLength),
            "cr" => Ok(SortKey::Cr),
            other => Err(Error::InvalidArgument(format!(
                "unknown key {other:?}, expected position, ref_length, summary_length or cr"
            ))),
        }
    }
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SortKey::Position => "position",
            SortKey::RefLength => "ref_length",
            SortKey::SummaryLength => "summary_length",
            SortKey::Cr => "cr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutlierMode {
    /// Farthest from the median first.
    Extreme,
    /// Closest to the median first.
    Representative,
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

/// First `n` samples in ascending `key` order; ties keep corpus order.
pub fn inspect_ordered(corpus: &Corpus, key: SortKey, n: usize) -> Result<Vec<&Sample>> {
    require_n(n)?;
    let mut keyed: Vec<(f64, &Sample)> = corpus
        .iter()
        .enumerate()
        .map(|(i, s)| (key.value(i, s), s))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(keyed.into_iter().take(n).map(|(_, s)| s).collect())
}

/// `n` distinct samples drawn with a seeded generator.
pub fn inspect_random(corpus: &Corpus, n: usize, seed: u64) -> Result<Vec<&Sample>> {
    require_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amount = n.min(corpus.len());
    Ok(index::sample(&mut rng, corpus.len(), amount)
        .into_iter()
        .map(|i| &corpus.samples[i])
        .collect())
}

pub fn inspect_outliers(
    corpus: &Corpus,
    metric: SortKey,
    n: usize,
    mode: OutlierMode,
) -> Result<Vec<&Sample>> {
    require_n(n)?;
    if metric == SortKey::Position {
        return Err(Error::InvalidArgument(
            "outliers need ref_length, summary_length or cr".into(),
        ));
    }
    if corpus.is_empty() {
        return Err(Error::Empty("outliers of an empty corpus".into()));
    }
    let values: Vec<f64> = corpus
        .iter()
        .enumerate()
        .map(|(i, s)| metric.value(i, s))
        .collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = percentile(&sorted, 0.5);

    let mut ranked: Vec<(f64, usize)> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let d = (v - median).abs();
            (if d.is_nan() { 0.0 } else { d }, i)
        })
        .collect();
    ranked.sort_by(|a, b| {
        let by_distance = match mode {
            OutlierMode::Extreme => b.0.total_cmp(&a.0),
            OutlierMode::Representative => a.0.total_cmp(&b.0),
        };
        by_distance.then(a.1.cmp(&b.1))
    });
    Ok(ranked
        .into_iter()
        .take(n)
        .map(|(_, i)| &corpus.samples[i])
        .collect())
}
