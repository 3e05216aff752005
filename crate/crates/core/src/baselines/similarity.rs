//! Sentence vectors for LexRank centrality.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::textproc::{cistem_stem, tokenize, TokenizeMode};

/// Produces one vector per sentence of a document. All vectors of a call
/// share a dimension. Implementations must be deterministic and safe to
/// call concurrently for different documents.
pub trait SimilarityBackend: Send + Sync {
    fn name(&self) -> &str;

    fn embed(&self, doc_id: &str, sentences: &[String]) -> Result<Vec<Vec<f64>>>;
}

/// Common German function words dropped before TF-IDF weighting.
pub const GERMAN_STOPWORDS: &[&str] = &[
    "aber", "als", "am", "an", "auch", "auf", "aus", "bei", "bis", "da", "das", "dass", "dem", "den",
    "der", "des", "die", "dies", "diese", "dieser", "doch", "du", "ein", "eine", "einem", "einen",
    "einer", "eines", "er", "es", "für", "hat", "hatte", "ich", "ihr", "im", "in", "ist", "ja",
    "man", "mit", "nach", "nicht", "noch", "nur", "ob", "oder", "sich", "sie", "sind", "so", "um",
    "und", "uns", "von", "vor", "war", "waren", "was", "wenn", "wie", "wir", "wird", "wurde",
    "zu", "zum", "zur",
];

/// TF-IDF over Cistem-stemmed tokens, with the vocabulary and document
/// frequencies taken from the sentences of the document itself.
#[derive(Debug, Clone)]
pub struct TfIdfBackend {
    stopwords: HashSet<String>,
}

impl Default for TfIdfBackend {
    fn default() -> Self {
        Self::with_stopwords(GERMAN_STOPWORDS.iter().copied())
    }
}

impl TfIdfBackend {
    pub fn with_stopwords<I, S>(stopwords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TfIdfBackend {
            stopwords: stopwords.into_iter().map(Into::into).collect(),
        }
    }

    pub fn without_stopwords() -> Self {
        Self::with_stopwords(std::iter::empty::<String>())
    }

    fn terms(&self, sentence: &str) -> Vec<String> {
        tokenize(sentence, TokenizeMode::Rouge)
            .into_iter()
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| cistem_stem(&t, false))
            .collect()
    }
}

impl SimilarityBackend for TfIdfBackend {
    fn name(&self) -> &str {
        "tfidf"
    }

    fn embed(&self, _doc_id: &str, sentences: &[String]) -> Result<Vec<Vec<f64>>> {
        let term_counts: Vec<HashMap<String, usize>> = sentences
            .iter()
            .map(|s| {
                let mut counts = HashMap::new();
                for t in self.terms(s) {
                    *counts.entry(t).or_insert(0) += 1;
                }
                counts
            })
            .collect();

        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for counts in &term_counts {
            for term in counts.keys() {
                *df.entry(term.as_str()).or_insert(0) += 1;
            }
        }
        let n = sentences.len() as f64;
        let index: HashMap<&str, (usize, f64)> = df
            .iter()
            .enumerate()
            .map(|(i, (&term, &d))| (term, (i, (n / d as f64).ln())))
            .collect();

        Ok(term_counts
            .iter()
            .map(|counts| {
                let mut v = vec![0.0; index.len()];
                for (term, &tf) in counts {
                    let (i, idf) = index[term.as_str()];
                    v[i] = tf as f64 * idf;
                }
                v
            })
            .collect())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingLine {
    index: usize,
    vector: Vec<f64>,
}

/// Precomputed vectors for a single document, read from JSONL lines of
/// the form `{"index":i,"vector":[…]}`.
#[derive(Debug, Clone)]
pub struct FileEmbeddings {
    vectors: BTreeMap<usize, Vec<f64>>,
    dim: usize,
}

impl FileEmbeddings {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file)).map_err(|e| match e {
            Error::Embedding(msg) => Error::Embedding(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut vectors = BTreeMap::new();
        let mut dim = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<embeddings>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = i + 1;
            let parsed: EmbeddingLine = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                line: lineno,
                message: e.to_string(),
            })?;
            if parsed.vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::Embedding(format!(
                    "non-finite value in vector {} (line {lineno})",
                    parsed.index
                )));
            }
            match dim {
                None => dim = Some(parsed.vector.len()),
                Some(d) if d != parsed.vector.len() => {
                    return Err(Error::Embedding(format!(
                        "vector {} has dimension {}, expected {d} (line {lineno})",
                        parsed.index,
                        parsed.vector.len()
                    )))
                }
                Some(_) => {}
            }
            if vectors.insert(parsed.index, parsed.vector).is_some() {
                return Err(Error::Embedding(format!(
                    "index {} given twice (line {lineno})",
                    parsed.index
                )));
            }
        }
        Ok(FileEmbeddings {
            vectors,
            dim: dim.unwrap_or(0),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn vectors_for(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        (0..count)
            .map(|i| {
                self.vectors
                    .get(&i)
                    .cloned()
                    .ok_or_else(|| Error::Embedding(format!("missing index {i}")))
            })
            .collect()
    }
}

impl SimilarityBackend for FileEmbeddings {
    fn name(&self) -> &str {
        "file"
    }

    fn embed(&self, _doc_id: &str, sentences: &[String]) -> Result<Vec<Vec<f64>>> {
        self.vectors_for(sentences.len())
    }
}

pub fn embed_from_file(path: impl AsRef<Path>) -> Result<FileEmbeddings> {
    FileEmbeddings::load(path)
}

/// A directory holding one [`FileEmbeddings`] file per document, named
/// `<sample id>.jsonl`.
#[derive(Debug, Clone)]
pub struct EmbeddingDir {
    root: PathBuf,
}

impl EmbeddingDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        EmbeddingDir { root: root.into() }
    }
}

impl SimilarityBackend for EmbeddingDir {
    fn name(&self) -> &str {
        "file"
    }

    fn embed(&self, doc_id: &str, sentences: &[String]) -> Result<Vec<Vec<f64>>> {
        FileEmbeddings::load(self.root.join(format!("{doc_id}.jsonl")))?.embed(doc_id, sentences)
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(items: &[&str]) -> Vec<String> {
        items.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn tfidf_identical_sentences_are_parallel() {
        let doc = s(&["Der Hund bellt laut.", "Die Katze schläft.", "Der Hund bellt laut."]);
        let v = TfIdfBackend::default().embed("d", &doc).unwrap();
        assert!((cosine(&v[0], &v[2]) - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&v[0], &v[1]), 0.0);
    }

    #[test]
    fn tfidf_disjoint_vocabularies() {
        let doc = s(&["Äpfel wachsen.", "Autos fahren."]);
        let v = TfIdfBackend::default().embed("d", &doc).unwrap();
        assert_eq!(cosine(&v[0], &v[1]), 0.0);
        assert!(norm(&v[0]) > 0.0);
    }

    #[test]
    fn tfidf_single_sentence_is_zero() {
        let v = TfIdfBackend::default().embed("d", &s(&["Ein einzelner Satz."])).unwrap();
        assert!(v[0].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tfidf_stems_inflections_together() {
        let doc = s(&["Häuser brennen.", "Das Haus brennt nicht.", "Regen fällt."]);
        let v = TfIdfBackend::default().embed("d", &doc).unwrap();
        assert!(cosine(&v[0], &v[1]) > 0.9);
    }

    #[test]
    fn stopword_only_sentence_is_zero() {
        let doc = s(&["und der die", "Hunde bellen.", "Katzen schlafen."]);
        let v = TfIdfBackend::default().embed("d", &doc).unwrap();
        assert!(v[0].iter().all(|&x| x == 0.0));
        let v = TfIdfBackend::without_stopwords().embed("d", &doc).unwrap();
        assert!(norm(&v[0]) > 0.0);
    }

    #[test]
    fn file_embeddings() {
        let f = FileEmbeddings::read("{\"index\":1,\"vector\":[0,1]}\n{\"index\":0,\"vector\":[1,0]}".as_bytes()).unwrap();
        let v = f.embed("d", &s(&["a", "b"])).unwrap();
        assert_eq!(v, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(cosine(&v[0], &v[1]), 0.0);
    }

    #[test]
    fn file_embeddings_errors() {
        let f = FileEmbeddings::read("{\"index\":0,\"vector\":[1,0]}".as_bytes()).unwrap();
        let err = f.embed("d", &s(&["a", "b"])).unwrap_err();
        assert!(err.to_string().contains("missing index 1"), "{err}");

        let err = FileEmbeddings::read("{\"index\":0,\"vector\":[1,0]}\n{\"index\":1,\"vector\":[1]}".as_bytes())
            .unwrap_err();
        assert!(err.to_string().contains("dimension"), "{err}");

        // serde_json refuses out-of-range literals, which would otherwise be infinite
        assert!(FileEmbeddings::read("{\"index\":0,\"vector\":[1e999]}".as_bytes()).is_err());
        assert!(FileEmbeddings::read("{\"index\":0,\"vector\":[1],\"x\":1}".as_bytes()).is_err());
    }

    #[test]
    fn cosine_of_zero_vector_is_zero() {
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
    }
}
