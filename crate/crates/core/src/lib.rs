//! Audience response prediction toolkit: subtitle/transcript ingest,
//! context-window dataset construction, a Naive Bayes baseline, and
//! evaluation metrics (UAR, F1, ROC, AUC).

pub mod corpus;
pub mod dataset;
pub mod metrics;
pub mod nb;
mod rng;
pub mod scores;
pub mod synth;

/// Version of the on-disk formats (corpus, dataset, export, model, scores).
pub const SCHEMA_VERSION: &str = "1";
