//! Reference/summary samples and their JSONL representation.
//!
//! One JSON object per line. `reference` and `summary` are required
//! strings; `id` and `split` are optional; every other key is carried
//! through untouched in [`Sample::extra`]. Error messages use 1-based
//! line numbers, while the default id of a sample without one is the
//! 0-based line index.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::textproc::{normalize, SentenceSplitter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidArgument(format!(
                "unknown split {other:?}, expected train, validation or test"
            ))),
        }
    }
}

/// Which text of a sample to look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Reference,
    Summary,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Reference => "reference",
            Field::Summary => "summary",
        }
    }

    /// Extras key holding pre-split sentences for this field.
    pub fn presplit_key(self) -> &'static str {
        match self {
            Field::Reference => "reference_sentences",
            Field::Summary => "summary_sentences",
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(Field::Reference),
            "summary" => Ok(Field::Summary),
            other => Err(Error::InvalidArgument(format!(
                "unknown field {other:?}, expected reference or summary"
            ))),
        }
    }
}

/// One reference/summary pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    /// Source text.
    pub reference: String,
    /// Target text.
    pub summary: String,
    pub split: Option<Split>,
    /// Unrecognised keys, in their original order.
    pub extra: Map<String, Value>,
}

impl Sample {
    pub fn new(id: impl Into<String>, reference: impl Into<String>, summary: impl Into<String>) -> Self {
        Sample {
            id: id.into(),
            reference: reference.into(),
            summary: summary.into(),
            split: None,
            extra: Map::new(),
        }
    }

    pub fn text(&self, field: Field) -> &str {
        match field {
            Field::Reference => &self.reference,
            Field::Summary => &self.summary,
        }
    }

    /// Sentences of `field`: the pre-split list from the extras when the
    /// dataset ships one, otherwise the output of `splitter`.
    pub fn sentences(&self, field: Field, splitter: &SentenceSplitter) -> Vec<String> {
        match self.presplit(field.presplit_key()) {
            Some(sentences) => sentences
                .into_iter()
                .map(|s| normalize(&s))
                .filter(|s| !s.is_empty())
                .collect(),
            None => splitter.split(self.text(field)),
        }
    }

    /// Pre-split sentences stored under `key` in the extras, if present
    /// and well formed (an array of strings).
    pub fn presplit(&self, key: &str) -> Option<Vec<String>> {
        let items = self.extra.get(key)?.as_array()?;
        items
            .iter()
            .map(|v| v.as_str().map(str::to_string))
            .collect()
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::with_capacity(4 + self.extra.len());
        obj.insert("id".into(), Value::String(self.id.clone()));
        obj.insert("reference".into(), Value::String(self.reference.clone()));
        obj.insert("summary".into(), Value::String(self.summary.clone()));
        if let Some(split) = self.split {
            obj.insert("split".into(), Value::String(split.as_str().into()));
        }
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }
}

/// An ordered collection of samples with unique ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub samples: Vec<Sample>,
    pub split_label: Option<String>,
}

impl Corpus {
    pub fn new(samples: Vec<Sample>) -> Self {
        let split_label = common_split(&samples);
        Corpus {
            samples,
            split_label,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    /// Builds a corpus holding clones of the selected samples, keeping the
    /// split label.
    pub fn subset<'a>(&self, samples: impl IntoIterator<Item = &'a Sample>) -> Corpus {
        Corpus {
            samples: samples.into_iter().cloned().collect(),
            split_label: self.split_label.clone(),
        }
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;

    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

fn common_split(samples: &[Sample]) -> Option<String> {
    let first = samples.first()?.split?;
    samples
        .iter()
        .all(|s| s.split == Some(first))
        .then(|| first.as_str().to_string())
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        e => e,
    })
}

/// Parses JSONL from any reader. Fails on the first bad line; blank lines
/// are skipped but still count towards line numbering.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut samples = Vec::new();
    let mut seen = HashSet::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let sample = parse_line(&line, index)?;
        if !seen.insert(sample.id.clone()) {
            return Err(Error::DuplicateId {
                line: index + 1,
                id: sample.id,
            });
        }
        samples.push(sample);
    }
    Ok(Corpus::new(samples))
}

fn parse_line(line: &str, index: usize) -> Result<Sample> {
    let lineno = index + 1;
    let malformed = |message: String| Error::MalformedLine {
        line: lineno,
        message,
    };
    let value: Value = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
    let Value::Object(mut obj) = value else {
        return Err(malformed("expected a JSON object".into()));
    };

    let mut take_text = |key: &'static str| -> Result<String> {
        match obj.shift_remove(key) {
            Some(Value::String(s)) => Ok(s),
            Some(_) => Err(malformed(format!("{key} must be a string"))),
            None => Err(Error::MissingKey { line: lineno, key }),
        }
    };
    let reference = take_text("reference")?;
    let summary = take_text("summary")?;

    let id = match obj.shift_remove("id") {
        None | Some(Value::Null) => index.to_string(),
        Some(Value::String(s)) if !s.is_empty() => s,
        Some(Value::String(_)) => return Err(malformed("id must not be empty".into())),
        Some(Value::Number(n)) if n.is_u64() || n.is_i64() => n.to_string(),
        Some(_) => return Err(malformed("id must be a string".into())),
    };
    let split = match obj.shift_remove("split") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.parse().map_err(|e: Error| malformed(e.to_string()))?),
        Some(_) => return Err(malformed("split must be a string".into())),
    };

    Ok(Sample {
        id,
        reference,
        summary,
        split,
        extra: obj,
    })
}

pub fn write_jsonl(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_jsonl_to(corpus, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_jsonl_to<W: Write>(corpus: &Corpus, out: &mut W) -> std::io::Result<()> {
    for sample in corpus {
        serde_json::to_writer(&mut *out, &sample.to_json())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// One system summary, keyed by the id of the gold sample it summarises.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemOutput {
    pub id: String,
    pub summary: String,
}

pub fn load_system_jsonl(path: impl AsRef<Path>) -> Result<Vec<SystemOutput>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_system_jsonl(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        e => e,
    })
}

/// Reads `{"id":…,"summary":…}` lines; other keys are ignored.
pub fn read_system_jsonl<R: BufRead>(reader: R) -> Result<Vec<SystemOutput>> {
    let mut outputs = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = index + 1;
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line: lineno,
            message: e.to_string(),
        })?;
        let text = |key: &'static str| match value.get(key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(Value::Number(n)) if key == "id" => Ok(n.to_string()),
            Some(_) => Err(Error::MalformedLine {
                line: lineno,
                message: format!("{key} must be a string"),
            }),
            None => Err(Error::MissingKey { line: lineno, key }),
        };
        outputs.push(SystemOutput {
            id: text("id")?,
            summary: text("summary")?,
        });
    }
    Ok(outputs)
}

pub fn write_system_jsonl(outputs: &[SystemOutput], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        for o in outputs {
            serde_json::to_writer(&mut *out, o)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}
