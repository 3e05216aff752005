//! Text primitives shared by the checks, baselines and metrics.

mod cistem;
mod sentences;

use std::collections::HashMap;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub use cistem::cistem_stem;
pub use sentences::{load_abbreviations, parse_abbreviations, SentenceSplitter, GERMAN_ABBREVIATIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenizeMode {
    /// Normalise, then split on single spaces. Used for length statistics.
    Whitespace,
    /// Lowercase, then split on every run of non-alphanumeric characters.
    Rouge,
}

/// NFC composition, trimmed, with every whitespace run collapsed to one space.
pub fn normalize(text: &str) -> String {
    let composed: String = text.nfc().collect();
    let mut out = String::with_capacity(composed.len());
    for word in composed.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Lowercased [`normalize`]; the comparison key for extractiveness checks.
pub fn casefold(text: &str) -> String {
    normalize(text).to_lowercase()
}

pub fn tokenize(text: &str, mode: TokenizeMode) -> Vec<String> {
    match mode {
        TokenizeMode::Whitespace => text.split_whitespace().map(|t| t.nfc().collect()).collect(),
        TokenizeMode::Rouge => {
            let lowered: String = text.nfc().collect::<String>().to_lowercase();
            lowered
                .split(|c: char| !c.is_alphanumeric())
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect()
        }
    }
}

/// Number of whitespace tokens, without allocating them.
pub fn count_tokens(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Contiguous `n`-token windows with their multiplicities.
pub fn ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> Result<HashMap<Vec<&str>, usize>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n-gram order must be at least 1".into()));
    }
    let mut counts = HashMap::new();
    if tokens.len() < n {
        return Ok(counts);
    }
    for window in tokens.windows(n) {
        let key: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(counts)
}
