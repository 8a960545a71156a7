//! Labeled context-window datasets for any `(n, m)` configuration.
//!
//! An example anchored at sentence `s_t` carries the window
//! `s_{t-n} ..= s_{t+m}` and is positive iff a response event follows `s_t`.
//! Windows never cross documents and never contain any event boundary other
//! than the anchor's own.

mod build;
mod io;
mod split;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ResponseKind;

pub use build::{
    balance, build_dataset, build_positive_examples, eligible_negative_examples,
    sample_negative_examples, window_at, BuildOptions, PositiveExamples,
};
pub use io::{
    read_dataset, read_dataset_from, write_dataset, write_dataset_to, write_export,
    write_export_to, write_stats,
};
pub use split::split_train_test;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("requested {requested} negative examples but only {eligible} anchors are eligible")]
    NotEnoughNegatives { requested: usize, eligible: usize },
    #[error("no {0} examples available")]
    EmptyClass(Label),
    #[error("class {label} has {count} example(s); at least 2 are needed to split")]
    TooFewToSplit { label: Label, count: usize },
    #[error("split ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
    #[error("grouping by document leaves {label} examples absent from the {split} split")]
    GroupedSplitInfeasible { label: Label, split: Split },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("dataset line {line}: {message}")]
    Schema { line: usize, message: String },
}

/// Window shape: `n` sentences before the anchor, `m` after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ContextConfig {
    pub n: usize,
    pub m: usize,
}

impl ContextConfig {
    pub fn new(n: usize, m: usize) -> Self {
        ContextConfig { n, m }
    }

    pub fn window_len(&self) -> usize {
        self.n + 1 + self.m
    }

    pub fn is_causal(&self) -> bool {
        self.m == 0
    }
}

impl fmt::Display for ContextConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARP_{}^{}", self.n, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "+",
            Label::Negative => "-",
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Anchor {
    pub doc_id: String,
    pub line_idx: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub example_id: String,
    /// `s_{t-n} ..= s_{t+m}`.
    pub context: Vec<String>,
    pub label: Label,
    pub anchor: Anchor,
    /// Event kinds after the anchor; empty for negatives and for examples read back from disk.
    pub events: Vec<ResponseKind>,
}

pub fn example_id(anchor: &Anchor, config: ContextConfig) -> String {
    format!(
        "{}:{}:{}:{}",
        anchor.doc_id, anchor.line_idx, config.n, config.m
    )
}

/// Inverse of [`example_id`]; the doc id may itself contain colons.
pub fn parse_example_id(id: &str) -> Option<(Anchor, ContextConfig)> {
    let mut parts = id.rsplitn(4, ':');
    let m = parts.next()?.parse().ok()?;
    let n = parts.next()?.parse().ok()?;
    let line_idx = parts.next()?.parse().ok()?;
    let doc_id = parts.next()?.to_string();
    Some((Anchor { doc_id, line_idx }, ContextConfig { n, m }))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub positive: usize,
    pub negative: usize,
}

impl LabelCounts {
    fn add(&mut self, label: Label) {
        match label {
            Label::Positive => self.positive += 1,
            Label::Negative => self.negative += 1,
        }
    }

    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
        }
    }

    pub fn total(&self) -> usize {
        self.positive + self.negative
    }
}

/// Summary table written next to a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    pub m: usize,
    pub examples: usize,
    pub labels: LabelCounts,
    pub train: LabelCounts,
    pub test: LabelCounts,
    pub unassigned: LabelCounts,
    pub event_kinds: BTreeMap<ResponseKind, usize>,
    pub context_lengths: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcDataset {
    pub config: ContextConfig,
    pub examples: Vec<Example>,
    pub split_of: BTreeMap<String, Split>,
    /// `None` when read back from disk.
    pub seed: Option<u64>,
    pub stats: DatasetStats,
}

impl ArcDataset {
    pub fn new(
        config: ContextConfig,
        examples: Vec<Example>,
        split_of: BTreeMap<String, Split>,
        seed: Option<u64>,
    ) -> Self {
        let mut ds = ArcDataset {
            config,
            examples,
            split_of,
            seed,
            stats: empty_stats(config),
        };
        ds.stats = dataset_stats(&ds);
        ds
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Example> {
        self.examples
            .iter()
            .filter(move |e| self.split_of.get(&e.example_id) == Some(&split))
    }

    /// True when the stored stats match a recount from examples and splits.
    pub fn stats_consistent(&self) -> bool {
        self.stats == dataset_stats(self)
    }
}

fn empty_stats(config: ContextConfig) -> DatasetStats {
    DatasetStats {
        n: config.n,
        m: config.m,
        examples: 0,
        labels: LabelCounts::default(),
        train: LabelCounts::default(),
        test: LabelCounts::default(),
        unassigned: LabelCounts::default(),
        event_kinds: ResponseKind::ALL.iter().map(|&k| (k, 0)).collect(),
        context_lengths: BTreeMap::new(),
    }
}

/// Per-kind event counts, per-label per-split counts and a context-length histogram.
pub fn dataset_stats(dataset: &ArcDataset) -> DatasetStats {
    let mut stats = empty_stats(dataset.config);
    for ex in &dataset.examples {
        stats.examples += 1;
        stats.labels.add(ex.label);
        match dataset.split_of.get(&ex.example_id) {
            Some(Split::Train) => stats.train.add(ex.label),
            Some(Split::Test) => stats.test.add(ex.label),
            None => stats.unassigned.add(ex.label),
        }
        for kind in &ex.events {
            *stats.event_kinds.entry(*kind).or_insert(0) += 1;
        }
        *stats.context_lengths.entry(ex.context.len()).or_insert(0) += 1;
    }
    stats
}
