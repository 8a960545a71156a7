use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;

use super::{DatasetError, Example, Label, LabelCounts, Split};
use crate::rng::seeded;

const SPLIT_STREAM: u64 = 3;

/// Number of training examples for a class of `count`, kept within `[1, count - 1]`.
fn train_size(count: usize, ratio: f64) -> usize {
    ((ratio * count as f64).round() as usize).clamp(1, count - 1)
}

/// Stratified train/test assignment.
///
/// Each class is shuffled independently and cut at `ratio`. With
/// `group_by_doc`, whole documents are assigned instead: documents are
/// shuffled and greedily placed in test while every class stays within its
/// test quota, so per-class proportions are approximate. If that leaves a
/// class with no test examples (few, large documents), the smallest document
/// holding that class is moved to test anyway, provided train keeps both classes.
pub fn split_train_test(
    examples: &[Example],
    ratio: f64,
    seed: u64,
    group_by_doc: bool,
) -> Result<BTreeMap<String, Split>, DatasetError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DatasetError::InvalidRatio(ratio));
    }
    let mut totals = LabelCounts::default();
    for ex in examples {
        totals.add(ex.label);
    }
    for label in [Label::Positive, Label::Negative] {
        let count = totals.get(label);
        if count < 2 {
            return Err(DatasetError::TooFewToSplit { label, count });
        }
    }
    let mut rng = seeded(seed, SPLIT_STREAM);
    let mut split_of = BTreeMap::new();

    if !group_by_doc {
        for label in [Label::Positive, Label::Negative] {
            let mut ids: Vec<&str> = examples
                .iter()
                .filter(|e| e.label == label)
                .map(|e| e.example_id.as_str())
                .collect();
            ids.shuffle(&mut rng);
            let cut = train_size(ids.len(), ratio);
            for (i, id) in ids.into_iter().enumerate() {
                let split = if i < cut { Split::Train } else { Split::Test };
                split_of.insert(id.to_string(), split);
            }
        }
        return Ok(split_of);
    }

    let mut per_doc: BTreeMap<&str, LabelCounts> = BTreeMap::new();
    for ex in examples {
        per_doc.entry(ex.anchor.doc_id.as_str()).or_default().add(ex.label);
    }
    let quota = LabelCounts {
        positive: totals.positive - train_size(totals.positive, ratio),
        negative: totals.negative - train_size(totals.negative, ratio),
    };
    let mut docs: Vec<(&str, LabelCounts)> = per_doc.into_iter().collect();
    docs.shuffle(&mut rng);
    let mut in_test = LabelCounts::default();
    let mut test_docs = BTreeSet::new();
    for &(doc, counts) in &docs {
        if in_test.positive + counts.positive <= quota.positive
            && in_test.negative + counts.negative <= quota.negative
        {
            in_test.positive += counts.positive;
            in_test.negative += counts.negative;
            test_docs.insert(doc);
        }
    }
    for label in [Label::Positive, Label::Negative] {
        if in_test.get(label) > 0 {
            continue;
        }
        let fallback = docs
            .iter()
            .filter(|(doc, c)| !test_docs.contains(doc) && c.get(label) > 0)
            .filter(|(_, c)| {
                in_test.positive + c.positive < totals.positive
                    && in_test.negative + c.negative < totals.negative
            })
            .min_by_key(|(_, c)| c.total());
        if let Some(&(doc, c)) = fallback {
            in_test.positive += c.positive;
            in_test.negative += c.negative;
            test_docs.insert(doc);
        }
    }
    for label in [Label::Positive, Label::Negative] {
        if in_test.get(label) == 0 {
            return Err(DatasetError::GroupedSplitInfeasible {
                label,
                split: Split::Test,
            });
        }
        if in_test.get(label) == totals.get(label) {
            return Err(DatasetError::GroupedSplitInfeasible {
                label,
                split: Split::Train,
            });
        }
    }
    for ex in examples {
        let split = if test_docs.contains(ex.anchor.doc_id.as_str()) {
            Split::Test
        } else {
            Split::Train
        };
        split_of.insert(ex.example_id.clone(), split);
    }
    Ok(split_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{example_id, Anchor, ContextConfig};

    fn examples(docs: usize, per_doc_pos: usize, per_doc_neg: usize) -> Vec<Example> {
        let mut out = Vec::new();
        for d in 0..docs {
            for i in 0..per_doc_pos + per_doc_neg {
                let label = if i < per_doc_pos {
                    Label::Positive
                } else {
                    Label::Negative
                };
                let anchor = Anchor {
                    doc_id: format!("doc{d}"),
                    line_idx: i as u64,
                };
                out.push(Example {
                    example_id: example_id(&anchor, ContextConfig::default()),
                    context: vec![],
                    label,
                    anchor,
                    events: vec![],
                });
            }
        }
        out
    }

    fn counts(examples: &[Example], split_of: &BTreeMap<String, Split>, split: Split) -> LabelCounts {
        let mut c = LabelCounts::default();
        for ex in examples {
            if split_of[&ex.example_id] == split {
                c.add(ex.label);
            }
        }
        c
    }

    #[test]
    fn eighty_twenty_stratified() {
        let ex = examples(100, 1, 1);
        let split = split_train_test(&ex, 0.8, 5, false).unwrap();
        assert_eq!(split.len(), 200);
        assert_eq!(counts(&ex, &split, Split::Train), LabelCounts { positive: 80, negative: 80 });
        assert_eq!(counts(&ex, &split, Split::Test), LabelCounts { positive: 20, negative: 20 });
    }

    #[test]
    fn half_split_of_two_per_class() {
        let ex = examples(2, 1, 1);
        let split = split_train_test(&ex, 0.5, 0, false).unwrap();
        assert_eq!(counts(&ex, &split, Split::Train), LabelCounts { positive: 1, negative: 1 });
        assert_eq!(counts(&ex, &split, Split::Test), LabelCounts { positive: 1, negative: 1 });
    }

    #[test]
    fn same_seed_same_split() {
        let ex = examples(50, 2, 3);
        for grouped in [false, true] {
            assert_eq!(
                split_train_test(&ex, 0.8, 11, grouped).unwrap(),
                split_train_test(&ex, 0.8, 11, grouped).unwrap()
            );
        }
    }

    #[test]
    fn grouped_split_keeps_documents_whole() {
        let ex = examples(50, 2, 2);
        let split = split_train_test(&ex, 0.8, 4, true).unwrap();
        let mut doc_split: BTreeMap<&str, Split> = BTreeMap::new();
        for e in &ex {
            let s = split[&e.example_id];
            assert_eq!(*doc_split.entry(e.anchor.doc_id.as_str()).or_insert(s), s);
        }
        // 50 docs of identical shape: the greedy fill reaches the quota exactly.
        assert_eq!(counts(&ex, &split, Split::Test), LabelCounts { positive: 20, negative: 20 });
    }

    #[test]
    fn grouped_split_overshoots_when_documents_are_large() {
        // Each document exceeds the 20% quota on its own.
        let ex = examples(3, 5, 5);
        let split = split_train_test(&ex, 0.8, 1, true).unwrap();
        assert_eq!(counts(&ex, &split, Split::Test), LabelCounts { positive: 5, negative: 5 });
        assert_eq!(counts(&ex, &split, Split::Train), LabelCounts { positive: 10, negative: 10 });
    }

    #[test]
    fn error_paths() {
        let ex = examples(1, 1, 5);
        assert!(matches!(
            split_train_test(&ex, 0.8, 0, false),
            Err(DatasetError::TooFewToSplit { label: Label::Positive, count: 1 })
        ));
        let ex = examples(4, 1, 1);
        assert!(matches!(split_train_test(&ex, 1.0, 0, false), Err(DatasetError::InvalidRatio(_))));
        assert!(matches!(split_train_test(&ex, 0.0, 0, false), Err(DatasetError::InvalidRatio(_))));
        let single_doc = examples(1, 5, 5);
        assert!(matches!(
            split_train_test(&single_doc, 0.8, 0, true),
            Err(DatasetError::GroupedSplitInfeasible { .. })
        ));
    }
}
