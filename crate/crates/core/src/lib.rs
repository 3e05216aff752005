//! Quality audits, extractive baselines and ROUGE scoring for
//! reference/summary corpora.
//!
//! The crate is organised around the life of a corpus:
//!
//! * [`corpus`] loads and writes JSONL sample files.
//! * [`textproc`] holds the shared text primitives (normalisation,
//!   tokenisation, sentence splitting, Cistem stemming, n-grams).
//! * [`filters`] runs the per-sample sanity checks and additive
//!   deduplication, producing an [`filters::AuditReport`].
//! * [`stats`] computes length / compression distributions and picks
//!   samples for manual inspection.
//! * [`baselines`] provides extractive summarizers behind a name-keyed
//!   registry.
//! * [`rouge`] scores system outputs against gold summaries.
//! * [`report`] renders the above as markdown, CSV or JSON.

pub mod baselines;
pub mod corpus;
pub mod error;
pub mod filters;
pub mod report;
pub mod rouge;
pub mod stats;
pub mod textproc;

pub use error::{Error, Result};
