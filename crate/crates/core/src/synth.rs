//! Planted-cue corpora for direction-of-effect experiments.
//!
//! Each document is a run of filler sentences with a response event every
//! `spacing` sentences. A cue token is inserted into one sentence near each
//! event, at an offset controlled by [`CuePlacement`]. Sentences carrying a
//! cue are not event anchors (except with [`CuePlacement::Anchor`]), so they
//! can still be drawn as negative anchors or appear inside negative windows;
//! the leak rate is roughly `1 / spacing` per window sentence.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{Document, ResponseKind, SourceFormat, UtteranceRecord};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CuePlacement {
    /// In `s_{t+1}`, the sentence right after the event.
    Following,
    /// In one of `s_{t-1} ..= s_{t-span}`, chosen uniformly.
    Preceding { span: usize },
    /// In `s_t` itself. Negative windows can never contain it.
    Anchor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub docs: usize,
    pub events_per_doc: usize,
    /// Sentences per event block; must exceed the preceding span + 1.
    pub spacing: usize,
    pub min_words: usize,
    pub max_words: usize,
    pub filler_vocab: usize,
    pub cue: String,
    pub placement: CuePlacement,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            docs: 20,
            events_per_doc: 10,
            spacing: 30,
            min_words: 5,
            max_words: 10,
            filler_vocab: 300,
            cue: "zinger".to_string(),
            placement: CuePlacement::Following,
            seed: 0,
        }
    }
}

const KINDS: [ResponseKind; 3] = [ResponseKind::Laugh, ResponseKind::Applause, ResponseKind::Cheer];

fn filler_word(i: usize) -> String {
    const SYLLABLES: [&str; 12] = [
        "ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ba", "de", "fu", "go",
    ];
    let mut word = String::new();
    let mut x = i;
    loop {
        word.push_str(SYLLABLES[x % SYLLABLES.len()]);
        x /= SYLLABLES.len();
        if x == 0 {
            break;
        }
    }
    word
}

/// Generates the corpus. Document ids are `synth-0000`, `synth-0001`, ...
pub fn planted_cue_corpus(cfg: &SynthConfig) -> Vec<Document> {
    let min_spacing = match cfg.placement {
        CuePlacement::Following => 3,
        CuePlacement::Preceding { span } => span + 2,
        CuePlacement::Anchor => 2,
    };
    assert!(cfg.spacing >= min_spacing, "spacing too small for cue placement");
    assert!(cfg.min_words >= 1 && cfg.min_words <= cfg.max_words);
    let vocab: Vec<String> = (0..cfg.filler_vocab.max(1)).map(filler_word).collect();
    let mut rng = seeded(cfg.seed, 0);
    let mut docs = Vec::with_capacity(cfg.docs);
    for d in 0..cfg.docs {
        let doc_id = format!("synth-{d:04}");
        let total = cfg.spacing * cfg.events_per_doc;
        let mut sentences: Vec<Vec<String>> = (0..total)
            .map(|_| {
                let len = rng.gen_range(cfg.min_words..=cfg.max_words);
                (0..len)
                    .map(|_| vocab.choose(&mut rng).expect("non-empty vocab").clone())
                    .collect()
            })
            .collect();
        let mut events = vec![None; total];
        for block in 0..cfg.events_per_doc {
            // Anchor sits second to last in its block so s_{t+1} stays in the block.
            let anchor = block * cfg.spacing + cfg.spacing - 2;
            events[anchor] = Some(KINDS[rng.gen_range(0..KINDS.len())]);
            let target = match cfg.placement {
                CuePlacement::Following => anchor + 1,
                CuePlacement::Preceding { span } => anchor - rng.gen_range(1..=span),
                CuePlacement::Anchor => anchor,
            };
            let at = rng.gen_range(0..=sentences[target].len());
            sentences[target].insert(at, cfg.cue.clone());
        }
        let utterances = sentences
            .into_iter()
            .zip(events)
            .enumerate()
            .map(|(i, (words, event))| UtteranceRecord {
                doc_id: doc_id.clone(),
                line_idx: i as u64,
                text: words.join(" ") + ".",
                events_after: event.into_iter().collect(),
                source_format: SourceFormat::OpusLines,
            })
            .collect();
        docs.push(Document { doc_id, utterances });
    }
    docs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn following_cue_sits_after_every_event() {
        let cfg = SynthConfig {
            docs: 3,
            events_per_doc: 4,
            ..SynthConfig::default()
        };
        let docs = planted_cue_corpus(&cfg);
        assert_eq!(docs.len(), 3);
        for doc in &docs {
            assert_eq!(doc.utterances.len(), 120);
            let events: Vec<usize> = (0..doc.utterances.len())
                .filter(|&i| doc.utterances[i].has_event())
                .collect();
            assert_eq!(events.len(), 4);
            for &i in &events {
                assert!(doc.utterances[i + 1].text.split(' ').any(|w| w.trim_end_matches('.') == "zinger"));
            }
            let cue_sentences = doc
                .utterances
                .iter()
                .filter(|r| r.text.contains("zinger"))
                .count();
            assert_eq!(cue_sentences, 4);
        }
    }

    #[test]
    fn preceding_cue_within_span() {
        let cfg = SynthConfig {
            docs: 2,
            events_per_doc: 20,
            placement: CuePlacement::Preceding { span: 4 },
            ..SynthConfig::default()
        };
        for doc in planted_cue_corpus(&cfg) {
            for (i, r) in doc.utterances.iter().enumerate() {
                if r.has_event() {
                    let hits = (1..=4)
                        .filter(|k| doc.utterances[i - k].text.contains("zinger"))
                        .count();
                    assert_eq!(hits, 1);
                    assert!(!r.text.contains("zinger"));
                }
            }
        }
    }

    #[test]
    fn anchor_cue_marks_exactly_the_event_sentences() {
        let cfg = SynthConfig {
            docs: 2,
            placement: CuePlacement::Anchor,
            ..SynthConfig::default()
        };
        for doc in planted_cue_corpus(&cfg) {
            for r in &doc.utterances {
                assert_eq!(r.has_event(), r.text.contains("zinger"));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = SynthConfig::default();
        assert_eq!(planted_cue_corpus(&cfg), planted_cue_corpus(&cfg));
        let other = SynthConfig { seed: 1, ..cfg.clone() };
        assert_ne!(planted_cue_corpus(&cfg), planted_cue_corpus(&other));
    }

    #[test]
    fn filler_words_are_distinct_from_cue() {
        let words: std::collections::HashSet<String> = (0..300).map(filler_word).collect();
        assert_eq!(words.len(), 300);
        assert!(!words.contains("zinger"));
    }
}
