use super::{Document, KChoice, Summarizer, Summary};
use crate::error::Result;

/// The first `min(k, len)` sentences joined by single spaces.
pub fn lead_k<S: AsRef<str>>(sentences: &[S], k: usize) -> String {
    sentences
        .iter()
        .take(k)
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Leading sentences; `k` fixed or estimated per document.
#[derive(Debug, Clone)]
pub struct Lead {
    name: &'static str,
    k: KChoice,
}

impl Lead {
    pub fn lead3() -> Self {
        Lead {
            name: "lead3",
            k: KChoice::Fixed(3),
        }
    }

    pub fn lead_k(k: KChoice) -> Self {
        Lead { name: "leadk", k }
    }
}

impl Summarizer for Lead {
    fn name(&self) -> &str {
        self.name
    }

    fn summarize(&self, doc: &Document<'_>) -> Result<Summary> {
        if doc.sentences.is_empty() {
            return Ok(Summary::from_indices(doc, Vec::new(), true));
        }
        let k = self.k.resolve(doc.sentences.len())?;
        let picked = (0..k.min(doc.sentences.len())).collect();
        Ok(Summary::from_indices(doc, picked, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: [&str; 5] = ["Eins.", "Zwei.", "Drei.", "Vier.", "Fünf."];

    #[test]
    fn lead_examples() {
        assert_eq!(lead_k(&DOC, 3), "Eins. Zwei. Drei.");
        assert_eq!(lead_k(&DOC[..2], 3), "Eins. Zwei.");
        assert_eq!(lead_k(&DOC, 1), "Eins.");
        assert_eq!(lead_k::<&str>(&[], 3), "");
    }
}
