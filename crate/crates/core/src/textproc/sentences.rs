//! Rule-based sentence splitting with an abbreviation list.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::normalize;
use crate::error::{Error, Result};

/// Built-in German abbreviations, written with their trailing period.
pub const GERMAN_ABBREVIATIONS: &[&str] = &[
    "z.B.", "bzw.", "ca.", "Dr.", "Prof.", "Nr.", "u.a.", "d.h.", "vgl.", "evtl.", "ggf.", "inkl.",
    "Abs.", "Art.", "usw.", "etc.", "bspw.", "sog.", "u.U.", "z.T.", "o.ä.", "u.ä.", "v.a.",
    "Str.", "St.", "Hr.", "Fr.", "Mio.", "Mrd.", "Tel.", "Jh.", "Jhd.", "geb.", "gest.", "ehem.",
    "Dipl.", "Ing.", "Mag.", "min.", "max.", "zzgl.", "Bd.", "Hrsg.", "S.", "Abb.", "Kap.", "Jan.",
    "Feb.", "Apr.", "Aug.", "Sept.", "Sep.", "Okt.", "Nov.", "Dez.", "Mo.", "Di.", "Mi.", "Do.",
    "Sa.", "So.", "bzgl.", "i.d.R.", "z.Zt.", "u.v.m.", "allg.", "Anm.", "Aufl.", "Az.", "gem.",
];

const TERMINATORS: &[char] = &['.', '!', '?', ':'];
const CLOSERS: &[char] = &['"', '\'', '”', '“', '»', '«', '’', ')', ']'];
const OPENERS: &[char] = &['"', '\'', '„', '“', '»', '«', '‚', '‘', '(', '['];

/// Splits after `.`, `!`, `?` or `:` when followed by whitespace and an
/// uppercase letter or digit. A period does not end a sentence when the
/// token before it is a known abbreviation, a single letter or a number.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::new(GERMAN_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSplitter {
    pub fn new<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let abbreviations = abbreviations
            .into_iter()
            .map(|a| strip_period(a.as_ref().trim()).to_string())
            .filter(|a| !a.is_empty())
            .collect();
        SentenceSplitter { abbreviations }
    }

    /// Adds to the current list instead of replacing it.
    pub fn with_extra<I, S>(mut self, abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.abbreviations.extend(
            abbreviations
                .into_iter()
                .map(|a| strip_period(a.as_ref().trim()).to_string())
                .filter(|a| !a.is_empty()),
        );
        self
    }

    pub fn is_abbreviation(&self, token: &str) -> bool {
        self.abbreviations.contains(strip_period(token))
    }

    pub fn split(&self, text: &str) -> Vec<String> {
        let normalized = normalize(text);
        if normalized.is_empty() {
            return Vec::new();
        }
        let tokens: Vec<&str> = normalized.split(' ').collect();
        let mut sentences = Vec::new();
        let mut start = 0;
        for i in 0..tokens.len() - 1 {
            if self.ends_sentence(tokens[i], tokens[i + 1]) {
                sentences.push(tokens[start..=i].join(" "));
                start = i + 1;
            }
        }
        sentences.push(tokens[start..].join(" "));
        sentences
    }

    fn ends_sentence(&self, token: &str, next: &str) -> bool {
        let token = token.trim_end_matches(CLOSERS);
        let Some(last) = token.chars().last() else {
            return false;
        };
        if !TERMINATORS.contains(&last) {
            return false;
        }
        let opens_sentence = next
            .trim_start_matches(OPENERS)
            .chars()
            .next()
            .is_some_and(|c| c.is_uppercase() || c.is_ascii_digit());
        if !opens_sentence {
            return false;
        }
        if last != '.' {
            return true;
        }
        let core = token[..token.len() - 1].trim_start_matches(OPENERS);
        let mut chars = core.chars();
        let single_letter = matches!((chars.next(), chars.next()), (Some(c), None) if c.is_alphabetic());
        let number = !core.is_empty() && core.chars().all(|c| c.is_ascii_digit());
        !(single_letter || number || self.abbreviations.contains(core))
    }
}

fn strip_period(s: &str) -> &str {
    s.strip_suffix('.').unwrap_or(s)
}

/// One abbreviation per line; blank lines and `#` comments are ignored.
pub fn parse_abbreviations(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn load_abbreviations(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_abbreviations(&text))
}
