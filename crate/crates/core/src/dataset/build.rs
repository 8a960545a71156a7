use rand::seq::index;
use rand_chacha::ChaCha8Rng;

use super::{
    example_id, split_train_test, Anchor, ArcDataset, ContextConfig, DatasetError, Example, Label,
};
use crate::corpus::Document;
use crate::rng::seeded;

const NEGATIVE_STREAM: u64 = 1;
const BALANCE_STREAM: u64 = 2;

/// Context for the anchor at `pos`, or `None` when the window is incomplete or
/// touches an event boundary other than the anchor's.
fn window(doc: &Document, pos: usize, config: ContextConfig) -> Option<Vec<String>> {
    let first = pos.checked_sub(config.n)?;
    let last = pos.checked_add(config.m)?;
    let records = doc.utterances.get(first..=last)?;
    let clean = records
        .iter()
        .enumerate()
        .all(|(i, r)| first + i == pos || !r.has_event());
    clean.then(|| records.iter().map(|r| r.text.clone()).collect())
}

fn make_example(doc: &Document, pos: usize, config: ContextConfig, context: Vec<String>) -> Example {
    let record = &doc.utterances[pos];
    let anchor = Anchor {
        doc_id: doc.doc_id.clone(),
        line_idx: record.line_idx,
    };
    let label = if record.has_event() {
        Label::Positive
    } else {
        Label::Negative
    };
    Example {
        example_id: example_id(&anchor, config),
        context,
        label,
        anchor,
        events: record.events_after.clone(),
    }
}

/// Re-reads the corpus at `anchor`: the window and the label it would get.
pub fn window_at(
    corpus: &[Document],
    anchor: &Anchor,
    config: ContextConfig,
) -> Option<(Vec<String>, Label)> {
    let doc = corpus.iter().find(|d| d.doc_id == anchor.doc_id)?;
    let pos = doc
        .utterances
        .binary_search_by_key(&anchor.line_idx, |r| r.line_idx)
        .ok()?;
    let ex = make_example(doc, pos, config, window(doc, pos, config)?);
    Some((ex.context, ex.label))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveExamples {
    pub examples: Vec<Example>,
    /// Event anchors dropped for missing history/future or a foreign event in the window.
    pub skipped: usize,
}

/// One positive example per event anchor whose full window exists and is event-free.
pub fn build_positive_examples(corpus: &[Document], config: ContextConfig) -> PositiveExamples {
    let mut out = PositiveExamples {
        examples: Vec::new(),
        skipped: 0,
    };
    for doc in corpus {
        for (pos, record) in doc.utterances.iter().enumerate() {
            if !record.has_event() {
                continue;
            }
            match window(doc, pos, config) {
                Some(ctx) => out.examples.push(make_example(doc, pos, config, ctx)),
                None => out.skipped += 1,
            }
        }
    }
    out
}

/// Every event-free anchor whose full window is event-free, in corpus order.
pub fn eligible_negative_examples(corpus: &[Document], config: ContextConfig) -> Vec<Example> {
    let mut out = Vec::new();
    for doc in corpus {
        for (pos, record) in doc.utterances.iter().enumerate() {
            if record.has_event() {
                continue;
            }
            if let Some(ctx) = window(doc, pos, config) {
                out.push(make_example(doc, pos, config, ctx));
            }
        }
    }
    out
}

fn sample_in_order(items: Vec<Example>, count: usize, rng: &mut ChaCha8Rng) -> Vec<Example> {
    let mut picked = index::sample(rng, items.len(), count).into_vec();
    picked.sort_unstable();
    let mut keep = vec![false; items.len()];
    for i in picked {
        keep[i] = true;
    }
    items
        .into_iter()
        .zip(keep)
        .filter_map(|(ex, k)| k.then_some(ex))
        .collect()
}

/// Draws `count` distinct negative anchors uniformly; output keeps corpus order.
pub fn sample_negative_examples(
    corpus: &[Document],
    config: ContextConfig,
    count: usize,
    seed: u64,
) -> Result<Vec<Example>, DatasetError> {
    let eligible = eligible_negative_examples(corpus, config);
    if count > eligible.len() {
        return Err(DatasetError::NotEnoughNegatives {
            requested: count,
            eligible: eligible.len(),
        });
    }
    Ok(sample_in_order(
        eligible,
        count,
        &mut seeded(seed, NEGATIVE_STREAM),
    ))
}

/// Downsamples the larger class to the size of the smaller; positives come first.
pub fn balance(
    positives: Vec<Example>,
    negatives: Vec<Example>,
    seed: u64,
) -> Result<Vec<Example>, DatasetError> {
    if positives.is_empty() {
        return Err(DatasetError::EmptyClass(Label::Positive));
    }
    if negatives.is_empty() {
        return Err(DatasetError::EmptyClass(Label::Negative));
    }
    let size = positives.len().min(negatives.len());
    let mut rng = seeded(seed, BALANCE_STREAM);
    let mut out = sample_in_order(positives, size, &mut rng);
    out.extend(sample_in_order(negatives, size, &mut rng));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub config: ContextConfig,
    pub balance: bool,
    pub ratio: f64,
    pub seed: u64,
    pub group_by_doc: bool,
}

impl BuildOptions {
    pub fn new(config: ContextConfig, seed: u64) -> Self {
        BuildOptions {
            config,
            balance: true,
            ratio: 0.8,
            seed,
            group_by_doc: true,
        }
    }
}

/// Positives, negatives (balanced or all eligible), and a stratified split.
pub fn build_dataset(corpus: &[Document], opts: &BuildOptions) -> Result<ArcDataset, DatasetError> {
    let positives = build_positive_examples(corpus, opts.config).examples;
    let examples = if opts.balance {
        let eligible = eligible_negative_examples(corpus, opts.config).len();
        let negatives = sample_negative_examples(
            corpus,
            opts.config,
            positives.len().min(eligible),
            opts.seed,
        )?;
        balance(positives, negatives, opts.seed)?
    } else {
        let mut all = positives;
        all.extend(eligible_negative_examples(corpus, opts.config));
        all
    };
    let split_of = split_train_test(&examples, opts.ratio, opts.seed, opts.group_by_doc)?;
    Ok(ArcDataset::new(opts.config, examples, split_of, Some(opts.seed)))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::corpus::{ResponseKind, SourceFormat, UtteranceRecord};

    /// Builds a document from `(text, has_event)` pairs.
    pub(crate) fn doc(id: &str, sentences: &[(&str, bool)]) -> Document {
        Document {
            doc_id: id.to_string(),
            utterances: sentences
                .iter()
                .enumerate()
                .map(|(i, &(text, ev))| UtteranceRecord {
                    doc_id: id.to_string(),
                    line_idx: i as u64,
                    text: text.to_string(),
                    events_after: if ev { vec![ResponseKind::Laugh] } else { vec![] },
                    source_format: SourceFormat::OpusLines,
                })
                .collect(),
        }
    }

    fn contexts(examples: &[Example]) -> Vec<Vec<&str>> {
        examples
            .iter()
            .map(|e| e.context.iter().map(String::as_str).collect())
            .collect()
    }

    #[test]
    fn single_sentence_positive() {
        let corpus = [doc("d", &[("s0", false), ("s1", true), ("s2", false)])];
        let pos = build_positive_examples(&corpus, ContextConfig::new(0, 0));
        assert_eq!(contexts(&pos.examples), vec![vec!["s1"]]);
        assert_eq!(pos.examples[0].label, Label::Positive);
        assert_eq!(pos.examples[0].example_id, "d:1:0:0");
        assert_eq!(pos.skipped, 0);
    }

    #[test]
    fn insufficient_history_is_dropped() {
        let corpus = [doc("d", &[("s0", false), ("s1", true), ("s2", false)])];
        let pos = build_positive_examples(&corpus, ContextConfig::new(2, 0));
        assert!(pos.examples.is_empty());
        assert_eq!(pos.skipped, 1);
    }

    /// Enumerates all windows by brute force and keeps those meeting the label rules.
    fn oracle_windows(sentences: &[(&str, bool)], n: usize, m: usize) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for t in 0..sentences.len() {
            if !sentences[t].1 || t < n || t + m >= sentences.len() {
                continue;
            }
            let foreign = (t - n..=t + m).any(|j| j != t && sentences[j].1);
            if !foreign {
                out.push((t - n..=t + m).map(|j| sentences[j].0.to_string()).collect());
            }
        }
        out
    }

    #[test]
    fn non_causal_toy_document() {
        let sents = [
            ("s0", false),
            ("s1", true),
            ("s2", false),
            ("s3", true),
            ("s4", false),
        ];
        let corpus = [doc("d", &sents)];
        let pos = build_positive_examples(&corpus, ContextConfig::new(0, 1));
        assert_eq!(contexts(&pos.examples), vec![vec!["s1", "s2"], vec!["s3", "s4"]]);
        let oracle = oracle_windows(&sents, 0, 1);
        let got: Vec<Vec<String>> = pos.examples.iter().map(|e| e.context.clone()).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn foreign_event_in_window_excludes() {
        let sents = [("a", false), ("b", true), ("c", true), ("d", false)];
        let corpus = [doc("d", &sents)];
        let pos = build_positive_examples(&corpus, ContextConfig::new(1, 0));
        // c's window [b, c] contains b's event; b's window [a, b] is clean.
        assert_eq!(contexts(&pos.examples), vec![vec!["a", "b"]]);
        assert_eq!(pos.skipped, 1);
        let neg = eligible_negative_examples(&corpus, ContextConfig::new(1, 0));
        assert!(neg.is_empty());
    }

    #[test]
    fn windows_stay_inside_documents() {
        let corpus = [
            doc("a", &[("a0", false), ("a1", true)]),
            doc("b", &[("b0", true), ("b1", false)]),
        ];
        let pos = build_positive_examples(&corpus, ContextConfig::new(0, 1));
        assert_eq!(contexts(&pos.examples), vec![vec!["b0", "b1"]]);
    }

    fn ten_negatives() -> Vec<Document> {
        let sents: Vec<(String, bool)> = (0..10).map(|i| (format!("n{i}"), false)).collect();
        let borrowed: Vec<(&str, bool)> = sents.iter().map(|(s, e)| (s.as_str(), *e)).collect();
        vec![doc("neg", &borrowed)]
    }

    #[test]
    fn exhaustive_negative_sample() {
        let corpus = ten_negatives();
        let cfg = ContextConfig::new(0, 0);
        for seed in [0, 1, 99] {
            let got = sample_negative_examples(&corpus, cfg, 10, seed).unwrap();
            assert_eq!(got.len(), 10);
            assert!(got.iter().all(|e| e.label == Label::Negative));
        }
    }

    #[test]
    fn negative_sampling_is_deterministic() {
        let corpus = ten_negatives();
        let cfg = ContextConfig::new(0, 0);
        let ids = |seed| {
            sample_negative_examples(&corpus, cfg, 3, seed)
                .unwrap()
                .into_iter()
                .map(|e| e.example_id)
                .collect::<Vec<_>>()
        };
        assert_eq!(ids(42), ids(42));
    }

    #[test]
    fn too_many_negatives_requested() {
        let corpus = ten_negatives();
        let err = sample_negative_examples(&corpus, ContextConfig::new(0, 0), 11, 0).unwrap_err();
        assert!(matches!(
            err,
            DatasetError::NotEnoughNegatives {
                requested: 11,
                eligible: 10
            }
        ));
        assert!(err.to_string().contains("11") && err.to_string().contains("10"));
    }

    #[test]
    fn negative_sampling_is_uniform() {
        // Each anchor is drawn with probability 3/10; over 10^4 draws the
        // binomial standard deviation is sqrt(10^4 * 0.3 * 0.7) ~= 45.8.
        let corpus = ten_negatives();
        let cfg = ContextConfig::new(0, 0);
        let draws = 10_000u64;
        let mut freq: BTreeMap<String, u64> = BTreeMap::new();
        for seed in 0..draws {
            for ex in sample_negative_examples(&corpus, cfg, 3, seed).unwrap() {
                *freq.entry(ex.example_id).or_default() += 1;
            }
        }
        let mean = draws as f64 * 0.3;
        let sigma = (draws as f64 * 0.3 * 0.7).sqrt();
        assert_eq!(freq.len(), 10);
        for (id, count) in freq {
            assert!(
                (count as f64 - mean).abs() <= 4.0 * sigma,
                "{id}: {count} vs {mean}"
            );
        }
    }

    fn labeled(label: Label, count: usize) -> Vec<Example> {
        (0..count)
            .map(|i| {
                let anchor = Anchor {
                    doc_id: format!("{label}{i}"),
                    line_idx: 0,
                };
                Example {
                    example_id: example_id(&anchor, ContextConfig::default()),
                    context: vec![format!("t{i}")],
                    label,
                    anchor,
                    events: vec![],
                }
            })
            .collect()
    }

    fn class_sizes(examples: &[Example]) -> (usize, usize) {
        let p = examples.iter().filter(|e| e.label.is_positive()).count();
        (p, examples.len() - p)
    }

    #[test]
    fn balance_cases() {
        let b = balance(labeled(Label::Positive, 10), labeled(Label::Negative, 10), 3).unwrap();
        assert_eq!(class_sizes(&b), (10, 10));
        let b1 = balance(labeled(Label::Positive, 10), labeled(Label::Negative, 30), 3).unwrap();
        let b2 = balance(labeled(Label::Positive, 10), labeled(Label::Negative, 30), 3).unwrap();
        assert_eq!(class_sizes(&b1), (10, 10));
        assert_eq!(b1, b2);
        let b = balance(labeled(Label::Positive, 30), labeled(Label::Negative, 10), 3).unwrap();
        assert_eq!(class_sizes(&b), (10, 10));
        assert!(matches!(
            balance(vec![], labeled(Label::Negative, 1), 0),
            Err(DatasetError::EmptyClass(Label::Positive))
        ));
    }

    #[test]
    fn window_at_reproduces_context() {
        let sents = [("a", false), ("b", false), ("c", true), ("d", false), ("e", false)];
        let corpus = [doc("x", &sents)];
        let cfg = ContextConfig::new(2, 1);
        let pos = build_positive_examples(&corpus, cfg);
        assert_eq!(pos.examples.len(), 1);
        let ex = &pos.examples[0];
        assert_eq!(
            window_at(&corpus, &ex.anchor, cfg),
            Some((ex.context.clone(), Label::Positive))
        );
    }
}
