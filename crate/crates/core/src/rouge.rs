//! ROUGE-N and ROUGE-L with optional Cistem stemming, corpus-level
//! joins of system outputs against gold summaries, and bootstrap
//! confidence intervals.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::corpus::{Corpus, SystemOutput};
use crate::error::{Error, Result};
use crate::stats::percentile;
use crate::textproc::{cistem_stem, ngrams, tokenize, TokenizeMode};

pub const DEFAULT_RESAMPLES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// n-gram overlap of the given order.
    N(usize),
    /// Longest common subsequence over the whole token sequences.
    L,
}

impl Variant {
    pub const ROUGE1: Variant = Variant::N(1);
    pub const ROUGE2: Variant = Variant::N(2);
    pub const DEFAULTS: [Variant; 3] = [Variant::N(1), Variant::N(2), Variant::L];

    /// Column header used in reports (`R-1`, `R-2`, `R-L`).
    pub fn short(self) -> String {
        match self {
            Variant::N(n) => format!("R-{n}"),
            Variant::L => "R-L".into(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::N(n) => write!(f, "rouge{n}"),
            Variant::L => f.write_str("rougeL"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `rouge1`, `r1`, `rougeL`, `rl` and friends.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let rest = lower
            .strip_prefix("rouge")
            .or_else(|| lower.strip_prefix("r"))
            .map(|r| r.trim_start_matches('-'));
        match rest {
            Some("l") => Ok(Variant::L),
            Some(n) => match n.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Variant::N(n)),
                _ => Err(Error::InvalidArgument(format!("unknown ROUGE variant {s:?}"))),
            },
            None => Err(Error::InvalidArgument(format!("unknown ROUGE variant {s:?}"))),
        }
    }
}

impl Serialize for Variant {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub variant: Variant,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    fn from_counts(variant: Variant, overlap: usize, candidate: usize, reference: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(overlap, candidate);
        let recall = ratio(overlap, reference);
        RougeScore {
            variant,
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Lowercased alphanumeric tokens, optionally reduced to Cistem stems.
pub fn rouge_tokens(text: &str, stem: bool) -> Vec<String> {
    let tokens = tokenize(text, TokenizeMode::Rouge);
    if stem {
        tokens.into_iter().map(|t| cistem_stem(&t, false)).collect()
    } else {
        tokens
    }
}

fn ngram_score(candidate: &[String], reference: &[String], n: usize) -> Result<RougeScore> {
    let cand = ngrams(candidate, n)?;
    let refs = ngrams(reference, n)?;
    let overlap = cand
        .iter()
        .map(|(gram, &c)| c.min(refs.get(gram).copied().unwrap_or(0)))
        .sum();
    let total = |m: &HashMap<Vec<&str>, usize>| m.values().sum::<usize>();
    Ok(RougeScore::from_counts(Variant::N(n), overlap, total(&cand), total(&refs)))
}

fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn lcs_score(candidate: &[String], reference: &[String]) -> RougeScore {
    let l = lcs_len(candidate, reference);
    RougeScore::from_counts(Variant::L, l, candidate.len(), reference.len())
}

pub fn rouge_n(candidate: &str, reference: &str, n: usize, stem: bool) -> Result<RougeScore> {
    ngram_score(&rouge_tokens(candidate, stem), &rouge_tokens(reference, stem), n)
}

pub fn rouge_l(candidate: &str, reference: &str, stem: bool) -> RougeScore {
    lcs_score(&rouge_tokens(candidate, stem), &rouge_tokens(reference, stem))
}

/// Scores several variants while tokenising each text once.
#[derive(Debug, Clone)]
pub struct RougeScorer {
    variants: Vec<Variant>,
    stem: bool,
}

impl RougeScorer {
    pub fn new(variants: &[Variant], stem: bool) -> Result<Self> {
        if variants.is_empty() {
            return Err(Error::InvalidArgument("no ROUGE variants requested".into()));
        }
        if variants.contains(&Variant::N(0)) {
            return Err(Error::InvalidArgument("n-gram order must be at least 1".into()));
        }
        Ok(RougeScorer {
            variants: variants.to_vec(),
            stem,
        })
    }

    pub fn variants(&self) -> &[Variant] {
        &self.variants
    }

    pub fn score(&self, candidate: &str, reference: &str) -> Vec<RougeScore> {
        let cand = rouge_tokens(candidate, self.stem);
        let refs = rouge_tokens(reference, self.stem);
        self.variants
            .iter()
            .map(|&v| match v {
                Variant::N(n) => ngram_score(&cand, &refs, n).expect("order checked in new"),
                Variant::L => lcs_score(&cand, &refs),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleScores {
    pub id: String,
    /// One entry per requested variant, in request order.
    pub scores: Vec<RougeScore>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusScores {
    pub variants: Vec<Variant>,
    /// Scored samples in gold order.
    pub per_sample: Vec<SampleScores>,
    /// Gold ids without a system output.
    pub missing: Vec<String>,
    pub coverage: f64,
}

impl CorpusScores {
    pub fn of_variant(&self, variant: Variant) -> Vec<RougeScore> {
        let Some(pos) = self.variants.iter().position(|&v| v == variant) else {
            return Vec::new();
        };
        self.per_sample.iter().map(|s| s.scores[pos]).collect()
    }

    pub fn aggregate(&self, n_resamples: usize, seed: u64) -> Result<Vec<AggregateScore>> {
        self.variants
            .iter()
            .map(|&v| bootstrap_aggregate(&self.of_variant(v), n_resamples, seed))
            .collect()
    }
}

/// Joins system outputs to gold summaries by id and scores each pair.
/// Gold samples without output are skipped and reported in `missing`.
pub fn score_corpus(system: &[SystemOutput], gold: &Corpus, variants: &[Variant], stem: bool) -> Result<CorpusScores> {
    let scorer = RougeScorer::new(variants, stem)?;
    let mut by_id: HashMap<&str, &str> = HashMap::with_capacity(system.len());
    for output in system {
        if by_id.insert(&output.id, &output.summary).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate system id {:?}", output.id)));
        }
    }
    let gold_ids: HashSet<&str> = gold.iter().map(|s| s.id.as_str()).collect();
    if let Some(unknown) = system.iter().find(|o| !gold_ids.contains(o.id.as_str())) {
        return Err(Error::InvalidArgument(format!(
            "system id {:?} not found in gold corpus",
            unknown.id
        )));
    }

    let missing: Vec<String> = gold
        .iter()
        .filter(|s| !by_id.contains_key(s.id.as_str()))
        .map(|s| s.id.clone())
        .collect();
    let per_sample: Vec<SampleScores> = gold
        .samples
        .par_iter()
        .filter_map(|s| {
            by_id.get(s.id.as_str()).map(|candidate| SampleScores {
                id: s.id.clone(),
                scores: scorer.score(candidate, &s.summary),
            })
        })
        .collect();
    if per_sample.is_empty() {
        return Err(Error::Empty("no system output matches a gold id".into()));
    }
    let coverage = per_sample.len() as f64 / gold.len() as f64;
    Ok(CorpusScores {
        variants: scorer.variants.clone(),
        per_sample,
        missing,
        coverage,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateScore {
    pub variant: Variant,
    pub mean_f1: f64,
    /// 2.5th percentile of resampled mean F1.
    pub ci_low: f64,
    /// 97.5th percentile of resampled mean F1.
    pub ci_high: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub n_samples: usize,
    pub n_resamples: usize,
    pub seed: u64,
}

/// Plain mean as point estimate plus a 95% percentile bootstrap interval
/// on mean F1. Each resample draws `len` indices with replacement from
/// one ChaCha8 stream seeded with `seed`.
pub fn bootstrap_aggregate(per_sample: &[RougeScore], n_resamples: usize, seed: u64) -> Result<AggregateScore> {
    let Some(first) = per_sample.first() else {
        return Err(Error::Empty("no scores to aggregate".into()));
    };
    if n_resamples == 0 {
        return Err(Error::InvalidArgument("n_resamples must be at least 1".into()));
    }
    if per_sample.iter().any(|s| s.variant != first.variant) {
        return Err(Error::InvalidArgument("cannot aggregate mixed ROUGE variants".into()));
    }
    let n = per_sample.len();
    let mean = |f: fn(&RougeScore) -> f64| per_sample.iter().map(f).sum::<f64>() / n as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..n_resamples)
        .map(|_| (0..n).map(|_| per_sample[rng.random_range(0..n)].f1).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);

    Ok(AggregateScore {
        variant: first.variant,
        mean_f1: mean(|s| s.f1),
        ci_low: percentile(&means, 0.025),
        ci_high: percentile(&means, 0.975),
        mean_precision: mean(|s| s.precision),
        mean_recall: mean(|s| s.recall),
        n_samples: n,
        n_resamples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sample;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn identical_texts_score_one() {
        let t = "Der Hund bellt heute laut im Garten";
        for n in 1..=7 {
            let s = rouge_n(t, t, n, true).unwrap();
            assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0), "n={n}");
        }
        assert_eq!(rouge_l(t, t, false).f1, 1.0);
    }

    #[test]
    fn hand_counted_examples() {
        let r1 = rouge_n("der hund bellt", "der hund bellt laut", 1, false).unwrap();
        assert_eq!((r1.precision, r1.recall), (1.0, 0.75));
        assert!(close(r1.f1, 6.0 / 7.0));

        let r2 = rouge_n("der hund bellt", "der hund bellt laut", 2, false).unwrap();
        assert_eq!(r2.precision, 1.0);
        assert!(close(r2.recall, 2.0 / 3.0));
        assert!(close(r2.f1, 0.8));

        let rl = rouge_l("a b c d", "a c b d", false);
        assert_eq!((rl.precision, rl.recall, rl.f1), (0.75, 0.75, 0.75));
    }

    #[test]
    fn degenerate_inputs_score_zero() {
        assert_eq!(rouge_l("x y", "a b", false).f1, 0.0);
        let s = rouge_n("", "a b", 1, false).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        assert_eq!(rouge_n("a", "a", 2, false).unwrap().f1, 0.0);
        assert_eq!(rouge_l("", "", false).f1, 0.0);
        assert!(rouge_n("a", "a", 0, false).is_err());
    }

    #[test]
    fn stemming_merges_inflections() {
        let plain = rouge_n("die Häuser", "das Haus", 1, false).unwrap();
        let stemmed = rouge_n("die Häuser", "das Haus", 1, true).unwrap();
        assert_eq!(plain.f1, 0.0);
        assert_eq!(stemmed.f1, 0.5);
    }

    #[test]
    fn variant_names() {
        for (text, v) in [("r1", Variant::ROUGE1), ("rouge2", Variant::ROUGE2), ("rl", Variant::L), ("rougeL", Variant::L), ("R-L", Variant::L)] {
            assert_eq!(text.parse::<Variant>().unwrap(), v);
        }
        assert!("rx".parse::<Variant>().is_err());
        assert!("r0".parse::<Variant>().is_err());
        assert_eq!(Variant::L.to_string(), "rougeL");
        assert_eq!(serde_json::to_string(&Variant::ROUGE2).unwrap(), "\"rouge2\"");
    }

    fn gold(n: usize) -> Corpus {
        Corpus::new(
            (0..n)
                .map(|i| Sample::new(format!("g{i}"), "Eine lange Referenz.", format!("Zusammenfassung Nummer {i}")))
                .collect(),
        )
    }

    fn outputs_from(c: &Corpus) -> Vec<SystemOutput> {
        c.iter()
            .map(|s| SystemOutput {
                id: s.id.clone(),
                summary: s.summary.clone(),
            })
            .collect()
    }

    #[test]
    fn system_equal_to_gold_scores_one() {
        let g = gold(5);
        let scores = score_corpus(&outputs_from(&g), &g, &Variant::DEFAULTS, true).unwrap();
        assert_eq!(scores.coverage, 1.0);
        assert!(scores.per_sample.iter().flat_map(|s| &s.scores).all(|s| s.f1 == 1.0));
    }

    #[test]
    fn missing_outputs_reduce_coverage() {
        let g = gold(10);
        let mut sys = outputs_from(&g);
        sys.remove(4);
        let scores = score_corpus(&sys, &g, &[Variant::ROUGE1], false).unwrap();
        assert_eq!(scores.per_sample.len(), 9);
        assert_eq!(scores.missing, ["g4"]);
        assert!(close(scores.coverage, 0.9));
    }

    #[test]
    fn join_errors() {
        let g = gold(3);
        let mut dup = outputs_from(&g);
        dup.push(dup[0].clone());
        assert!(score_corpus(&dup, &g, &[Variant::ROUGE1], false).is_err());

        let stranger = vec![SystemOutput { id: "zz".into(), summary: "x".into() }];
        assert!(score_corpus(&stranger, &g, &[Variant::ROUGE1], false).is_err());
        assert!(score_corpus(&[], &g, &[Variant::ROUGE1], false).is_err());
    }

    fn with_f1(values: &[f64]) -> Vec<RougeScore> {
        values
            .iter()
            .map(|&f| RougeScore { variant: Variant::ROUGE1, precision: f, recall: f, f1: f })
            .collect()
    }

    #[test]
    fn bootstrap_zero_variance() {
        let a = bootstrap_aggregate(&with_f1(&[0.5; 40]), DEFAULT_RESAMPLES, 0).unwrap();
        assert_eq!((a.mean_f1, a.ci_low, a.ci_high), (0.5, 0.5, 0.5));
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let scores = with_f1(&[0.1, 0.9, 0.3, 0.4, 0.7]);
        let a = bootstrap_aggregate(&scores, 500, 42).unwrap();
        let b = bootstrap_aggregate(&scores, 500, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = bootstrap_aggregate(&scores, 500, 43).unwrap();
        assert_ne!((a.ci_low, a.ci_high), (c.ci_low, c.ci_high));
    }

    #[test]
    fn bootstrap_half_zero_half_one() {
        // 100 samples: the resampled mean has sd 0.05, so the 95% interval
        // sits near [0.40, 0.60] (simulated over 200 seeds: width 0.18..0.21).
        let values: Vec<f64> = (0..100).map(|i| f64::from(i % 2)).collect();
        let a = bootstrap_aggregate(&with_f1(&values), DEFAULT_RESAMPLES, 0).unwrap();
        assert_eq!(a.mean_f1, 0.5);
        assert!(a.ci_low < 0.5 && a.ci_high > 0.5);
        assert!(a.ci_high - a.ci_low > 0.1 && a.ci_high - a.ci_low < 0.3, "{a:?}");
    }

    #[test]
    fn bootstrap_errors() {
        assert!(bootstrap_aggregate(&[], 10, 0).is_err());
        assert!(bootstrap_aggregate(&with_f1(&[0.5]), 0, 0).is_err());
        let mut mixed = with_f1(&[0.5, 0.5]);
        mixed[1].variant = Variant::L;
        assert!(bootstrap_aggregate(&mixed, 10, 0).is_err());
    }

    const SAME_STEM: [&str; 3] = ["häuser", "haus", "hauses"];

    proptest! {
        #[test]
        fn f1_is_harmonic_mean(cand in "[a-c ]{0,20}", reference in "[a-c ]{0,20}") {
            for s in [rouge_n(&cand, &reference, 1, false).unwrap(), rouge_l(&cand, &reference, false)] {
                prop_assert!((0.0..=1.0).contains(&s.f1));
                if s.precision + s.recall > 0.0 {
                    prop_assert!(close(s.f1, 2.0 * s.precision * s.recall / (s.precision + s.recall)));
                } else {
                    prop_assert_eq!(s.f1, 0.0);
                }
            }
        }

        #[test]
        fn appending_candidate_token_keeps_recall_numerator(
            cand in proptest::collection::vec("[a-d]", 1..8),
            reference in proptest::collection::vec("[a-d]", 0..8),
            pick in any::<prop::sample::Index>(),
        ) {
            let before = rouge_n(&cand.join(" "), &reference.join(" "), 1, false).unwrap();
            let mut extended = reference.clone();
            extended.push(pick.get(&cand).clone());
            let after = rouge_n(&cand.join(" "), &extended.join(" "), 1, false).unwrap();
            let overlap = |s: &RougeScore, len: usize| (s.recall * len as f64).round();
            prop_assert!(overlap(&after, extended.len()) >= overlap(&before, reference.len()));
        }

        #[test]
        fn stemming_makes_inflections_interchangeable(
            tokens in proptest::collection::vec(prop_oneof!["[a-d]{1,3}", Just("häuser".to_string())], 1..10),
            reference in proptest::collection::vec(prop_oneof!["[a-d]{1,3}", Just("haus".to_string())], 1..10),
            replacement in 0usize..3,
        ) {
            let cand = tokens.join(" ");
            let swapped = tokens
                .iter()
                .map(|t| if t == "häuser" { SAME_STEM[replacement] } else { t.as_str() })
                .collect::<Vec<_>>()
                .join(" ");
            let reference = reference.join(" ");
            let scorer = RougeScorer::new(&Variant::DEFAULTS, true).unwrap();
            prop_assert_eq!(scorer.score(&cand, &reference), scorer.score(&swapped, &reference));
        }
    }
}
