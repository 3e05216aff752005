//! Extractive baselines: lead-3, lead-k and LexRank over sentence
//! embeddings.
//!
//! Every method implements [`Summarizer`] and is constructed through a
//! [`Registry`] by name, so callers pick the method at runtime (the CLI's
//! `--method` flag) and new methods can be registered next to the
//! built-in ones.

mod lead;
mod lexrank;
mod similarity;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Field, SystemOutput};
use crate::error::{Error, Result};
use crate::textproc::SentenceSplitter;

pub use lead::{lead_k, Lead};
pub use lexrank::{centrality, select_top_k, similarity_matrix, Centrality, LexRankSt, PowerIteration};
pub use similarity::{
    cosine, embed_from_file, EmbeddingDir, FileEmbeddings, SimilarityBackend, TfIdfBackend, GERMAN_STOPWORDS,
};

/// A document as a list of sentences.
#[derive(Debug, Clone, Copy)]
pub struct Document<'a> {
    pub id: &'a str,
    pub sentences: &'a [String],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Selected sentence indices, ascending.
    pub selected: Vec<usize>,
    pub text: String,
    /// False when an iterative method stopped at its iteration cap.
    pub converged: bool,
}

impl Summary {
    pub fn from_indices(doc: &Document<'_>, selected: Vec<usize>, converged: bool) -> Self {
        let text = selected
            .iter()
            .map(|&i| doc.sentences[i].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        Summary {
            selected,
            text,
            converged,
        }
    }
}

pub trait Summarizer: Send + Sync {
    fn name(&self) -> &str;

    fn summarize(&self, doc: &Document<'_>) -> Result<Summary>;
}

/// How many sentences to extract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KChoice {
    Fixed(usize),
    /// Scale each document by the average training compression ratio.
    Estimated { cr_avg: f64 },
}

impl KChoice {
    pub fn resolve(self, sentence_count: usize) -> Result<usize> {
        match self {
            KChoice::Fixed(0) => Err(Error::InvalidConfig("k must be at least 1".into())),
            KChoice::Fixed(k) => Ok(k),
            KChoice::Estimated { cr_avg } => estimate_k_hat(sentence_count, cr_avg),
        }
    }
}

/// `max(1, ceil(sentences / cr_avg))`.
pub fn estimate_k_hat(sentence_count: usize, cr_avg: f64) -> Result<usize> {
    if !(cr_avg.is_finite() && cr_avg > 0.0) {
        return Err(Error::InvalidConfig(format!("cr_avg must be positive, got {cr_avg}")));
    }
    // absorb representation error so that e.g. 6 / 1.2 stays 5
    let k = (sentence_count as f64 / cr_avg - 1e-9).ceil();
    Ok((k.max(1.0)) as usize)
}

/// Mean over samples of reference sentences per summary sentence.
pub fn avg_compression_ratio_sentences(training: &Corpus, splitter: &SentenceSplitter) -> Result<f64> {
    if training.is_empty() {
        return Err(Error::Empty("training corpus has no samples".into()));
    }
    let mut total = 0.0;
    for sample in training {
        let reference = sample.sentences(Field::Reference, splitter).len();
        let summary = sample.sentences(Field::Summary, splitter).len();
        if reference == 0 || summary == 0 {
            let which = if reference == 0 { "reference" } else { "summary" };
            return Err(Error::Empty(format!("{which} has no sentences")).for_sample(&sample.id));
        }
        total += reference as f64 / summary as f64;
    }
    Ok(total / training.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Registry name of the summarizer.
    pub method: String,
    pub k_override: Option<usize>,
    pub cr_avg: Option<f64>,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        let p = PowerIteration::default();
        BaselineConfig {
            method: "lead3".into(),
            k_override: None,
            cr_avg: None,
            damping: p.damping,
            tolerance: p.tolerance,
            max_iterations: p.max_iterations,
        }
    }
}

impl BaselineConfig {
    pub fn new(method: impl Into<String>) -> Self {
        BaselineConfig {
            method: method.into(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k_override == Some(0) {
            return bad("k must be at least 1".into());
        }
        if let Some(cr) = self.cr_avg {
            if !(cr.is_finite() && cr > 0.0) {
                return bad(format!("cr_avg must be positive, got {cr}"));
            }
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad(format!("damping must lie in (0, 1), got {}", self.damping));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        Ok(())
    }

    /// `k_override` wins over the per-document estimate.
    pub fn k_choice(&self) -> Result<KChoice> {
        match (self.k_override, self.cr_avg) {
            (Some(k), _) => Ok(KChoice::Fixed(k)),
            (None, Some(cr_avg)) => Ok(KChoice::Estimated { cr_avg }),
            (None, None) => Err(Error::InvalidConfig(format!(
                "{} needs a fixed k or an average compression ratio",
                self.method
            ))),
        }
    }

    pub fn power_iteration(&self) -> PowerIteration {
        PowerIteration {
            damping: self.damping,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

type Factory = Box<dyn Fn(&BaselineConfig, &Arc<dyn SimilarityBackend>) -> Result<Box<dyn Summarizer>> + Send + Sync>;

struct Entry {
    name: &'static str,
    aliases: &'static [&'static str],
    factory: Factory,
}

/// Summarizers by name.
pub struct Registry {
    entries: Vec<Entry>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        r.register("lead3", &["lead-3"], |_, _| Ok(Box::new(Lead::lead3())));
        r.register("leadk", &["lead-k"], |cfg, _| Ok(Box::new(Lead::lead_k(cfg.k_choice()?))));
        r.register("lexrank-st", &["lexrank_st"], |cfg, backend| {
            Ok(Box::new(LexRankSt::new(
                Arc::clone(backend),
                cfg.k_choice()?,
                cfg.power_iteration(),
            )))
        });
        r
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry { entries: Vec::new() }
    }

    /// Adds a summarizer; a later registration under the same name wins.
    pub fn register<F>(&mut self, name: &'static str, aliases: &'static [&'static str], factory: F)
    where
        F: Fn(&BaselineConfig, &Arc<dyn SimilarityBackend>) -> Result<Box<dyn Summarizer>> + Send + Sync + 'static,
    {
        self.entries.retain(|e| e.name != name);
        self.entries.push(Entry {
            name,
            aliases,
            factory: Box::new(factory),
        });
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    /// Canonical name for `name` or one of its aliases.
    pub fn resolve(&self, name: &str) -> Option<&'static str> {
        self.find(name).map(|e| e.name)
    }

    fn find(&self, name: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.name == name || e.aliases.contains(&name))
    }

    pub fn build(&self, config: &BaselineConfig, backend: Arc<dyn SimilarityBackend>) -> Result<Box<dyn Summarizer>> {
        config.validate()?;
        let entry = self.find(&config.method).ok_or_else(|| Error::Unknown {
            kind: "baseline method",
            name: config.method.clone(),
            known: self.names().join(", "),
        })?;
        (entry.factory)(config, &backend)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRun {
    pub outputs: Vec<SystemOutput>,
    /// Samples where centrality hit the iteration cap.
    pub unconverged: Vec<String>,
}

/// Summarises every reference in `corpus`, keeping corpus order.
pub fn run_summarizer(corpus: &Corpus, summarizer: &dyn Summarizer, splitter: &SentenceSplitter) -> Result<BaselineRun> {
    let results: Vec<(SystemOutput, bool)> = corpus
        .samples
        .par_iter()
        .map(|sample| {
            let sentences = sample.sentences(Field::Reference, splitter);
            let doc = Document {
                id: &sample.id,
                sentences: &sentences,
            };
            let summary = summarizer.summarize(&doc).map_err(|e| e.for_sample(&sample.id))?;
            Ok((
                SystemOutput {
                    id: sample.id.clone(),
                    summary: summary.text,
                },
                summary.converged,
            ))
        })
        .collect::<Result<_>>()?;

    let unconverged = results
        .iter()
        .filter(|(_, converged)| !converged)
        .map(|(o, _)| o.id.clone())
        .collect();
    Ok(BaselineRun {
        outputs: results.into_iter().map(|(o, _)| o).collect(),
        unconverged,
    })
}

/// Builds `config.method` from the default registry and runs it with the
/// built-in sentence splitter.
pub fn run_baseline(corpus: &Corpus, config: &BaselineConfig, backend: Arc<dyn SimilarityBackend>) -> Result<BaselineRun> {
    let summarizer = Registry::default().build(config, backend)?;
    run_summarizer(corpus, summarizer.as_ref(), &SentenceSplitter::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sample;

    fn tfidf() -> Arc<dyn SimilarityBackend> {
        Arc::new(TfIdfBackend::default())
    }

    fn doc_of(n: usize) -> String {
        (1..=n).map(|i| format!("Satz Nummer {i} steht hier.")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn k_hat_examples() {
        assert_eq!(estimate_k_hat(30, 10.0).unwrap(), 3);
        assert_eq!(estimate_k_hat(7, 2.0).unwrap(), 4);
        assert_eq!(estimate_k_hat(1, 100.0).unwrap(), 1);
        assert_eq!(estimate_k_hat(6, 1.2).unwrap(), 5);
        assert!(estimate_k_hat(6, 0.0).is_err());
    }

    #[test]
    fn avg_cr_is_mean_of_sentence_ratios() {
        let c = Corpus::new(vec![
            Sample::new("a", doc_of(10), "Kurz."),
            Sample::new("b", doc_of(40), "Eins. Zwei."),
        ]);
        let cr = avg_compression_ratio_sentences(&c, &SentenceSplitter::default()).unwrap();
        assert_eq!(cr, 15.0);

        let ones = Corpus::new(vec![Sample::new("a", "Eins.", "Zwei.")]);
        assert_eq!(avg_compression_ratio_sentences(&ones, &SentenceSplitter::default()).unwrap(), 1.0);
    }

    #[test]
    fn avg_cr_errors() {
        let splitter = SentenceSplitter::default();
        assert!(avg_compression_ratio_sentences(&Corpus::default(), &splitter).is_err());
        let c = Corpus::new(vec![Sample::new("a", "Eins.", "Zwei."), Sample::new("empty", "Eins.", "  ")]);
        let err = avg_compression_ratio_sentences(&c, &splitter).unwrap_err();
        assert!(err.to_string().contains("\"empty\""), "{err}");
    }

    #[test]
    fn lead3_takes_three_sentences() {
        let c = Corpus::new(vec![Sample::new("a", doc_of(5), "x"), Sample::new("b", doc_of(2), "y")]);
        let run = run_baseline(&c, &BaselineConfig::new("lead3"), tfidf()).unwrap();
        let splitter = SentenceSplitter::default();
        for (o, s) in run.outputs.iter().zip(&c.samples) {
            assert_eq!(o.summary, lead_k(&splitter.split(&s.reference), 3));
        }
        assert_eq!(run.outputs[0].summary, "Satz Nummer 1 steht hier. Satz Nummer 2 steht hier. Satz Nummer 3 steht hier.");
    }

    #[test]
    fn leadk_uses_estimate_or_override() {
        let c = Corpus::new(vec![Sample::new("a", doc_of(30), "x")]);
        let splitter = SentenceSplitter::default();
        let cfg = BaselineConfig {
            cr_avg: Some(10.0),
            ..BaselineConfig::new("leadk")
        };
        let run = run_baseline(&c, &cfg, tfidf()).unwrap();
        assert_eq!(splitter.split(&run.outputs[0].summary).len(), 3);

        let cfg = BaselineConfig {
            k_override: Some(2),
            ..cfg
        };
        let run = run_baseline(&c, &cfg, tfidf()).unwrap();
        assert_eq!(splitter.split(&run.outputs[0].summary).len(), 2);

        let err = run_baseline(&c, &BaselineConfig::new("leadk"), tfidf()).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn lexrank_on_identical_sentences_takes_first() {
        let sentences: Vec<String> = vec!["Der Hund bellt.".into(); 3];
        let lr = LexRankSt::new(tfidf(), KChoice::Fixed(1), PowerIteration::default());
        let doc = Document { id: "d", sentences: &sentences };
        assert_eq!(lr.summarize(&doc).unwrap().selected, [0]);
    }

    #[test]
    fn lexrank_large_k_returns_document() {
        let sentences: Vec<String> = ["Äpfel sind rot.", "Bananen sind gelb.", "Äpfel und Bananen sind Obst."]
            .map(String::from)
            .to_vec();
        let lr = LexRankSt::new(tfidf(), KChoice::Fixed(10), PowerIteration::default());
        let doc = Document { id: "d", sentences: &sentences };
        let s = lr.summarize(&doc).unwrap();
        assert_eq!(s.selected, [0, 1, 2]);
        assert_eq!(s.text, sentences.join(" "));
    }

    #[test]
    fn lexrank_picks_the_hub_sentence() {
        let sentences: Vec<String> = [
            "Der Zug fährt ab.",
            "Der Bahnhof ist voll und der Zug fährt gleich ab.",
            "Der Bahnhof ist groß.",
        ]
        .map(String::from)
        .to_vec();
        let lr = LexRankSt::new(tfidf(), KChoice::Fixed(1), PowerIteration::default());
        let doc = Document { id: "d", sentences: &sentences };
        assert_eq!(lr.summarize(&doc).unwrap().selected, [1]);
    }

    #[test]
    fn equal_file_vectors_fall_back_to_position() {
        let f = FileEmbeddings::read("{\"index\":0,\"vector\":[1,1]}\n{\"index\":1,\"vector\":[1,1]}\n{\"index\":2,\"vector\":[1,1]}".as_bytes()).unwrap();
        let lr = LexRankSt::new(Arc::new(f), KChoice::Fixed(2), PowerIteration::default());
        let sentences: Vec<String> = ["a.", "b.", "c."].map(String::from).to_vec();
        let s = lr.summarize(&Document { id: "d", sentences: &sentences }).unwrap();
        assert_eq!(s.selected, [0, 1]);
    }

    #[test]
    fn registry_resolves_names_and_aliases() {
        let r = Registry::default();
        assert_eq!(r.names(), ["lead3", "leadk", "lexrank-st"]);
        assert_eq!(r.resolve("lexrank_st"), Some("lexrank-st"));
        assert_eq!(r.resolve("lead-3"), Some("lead3"));
        let err = r.build(&BaselineConfig::new("oracle"), tfidf()).err().unwrap();
        assert!(err.to_string().contains("lexrank-st"), "{err}");
    }

    struct Last;

    impl Summarizer for Last {
        fn name(&self) -> &str {
            "last"
        }

        fn summarize(&self, doc: &Document<'_>) -> Result<Summary> {
            let picked = doc.sentences.len().checked_sub(1).into_iter().collect();
            Ok(Summary::from_indices(doc, picked, true))
        }
    }

    #[test]
    fn custom_summarizers_can_be_registered() {
        let mut r = Registry::default();
        r.register("last", &[], |_, _| Ok(Box::new(Last)));
        let s = r.build(&BaselineConfig::new("last"), tfidf()).unwrap();
        let c = Corpus::new(vec![Sample::new("a", doc_of(4), "x")]);
        let run = run_summarizer(&c, s.as_ref(), &SentenceSplitter::default()).unwrap();
        assert_eq!(run.outputs[0].summary, "Satz Nummer 4 steht hier.");
    }

    #[test]
    fn config_validation() {
        assert!(BaselineConfig { damping: 1.0, ..Default::default() }.validate().is_err());
        assert!(BaselineConfig { k_override: Some(0), ..Default::default() }.validate().is_err());
        assert!(BaselineConfig { cr_avg: Some(-1.0), ..Default::default() }.validate().is_err());
        assert!(BaselineConfig::default().validate().is_ok());
    }

    #[test]
    fn presplit_references_are_used() {
        let mut s = Sample::new("a", "ignored text. Not split.", "x");
        s.extra.insert("reference_sentences".into(), serde_json::json!(["Erster Satz", "Zweiter Satz", "Dritter", "Vierter"]));
        let run = run_baseline(&Corpus::new(vec![s]), &BaselineConfig::new("lead3"), tfidf()).unwrap();
        assert_eq!(run.outputs[0].summary, "Erster Satz Zweiter Satz Dritter");
    }
}
