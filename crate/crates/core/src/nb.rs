//! Multinomial Naive Bayes over bag-of-words context windows.
//!
//! All sentences of a window are pooled into one bag. Likelihoods use
//! additive smoothing over the training vocabulary:
//! `P(w | c) = (count(w, c) + alpha) / (total_c + alpha * V)`.
//! Tokens never seen in training map to a reserved UNK id whose likelihood
//! is the zero-count smoothing mass `alpha / (total_c + alpha * V)`; UNK is
//! not counted in `V`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Label;

#[derive(Debug, Error)]
pub enum NbError {
    #[error("training data has no {0} examples; both classes are required")]
    MissingClass(Label),
    #[error("smoothing constant must be finite and positive, got {0}")]
    InvalidAlpha(f64),
    #[error("training data contains no tokens")]
    EmptyVocabulary,
    #[error("invalid model file: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Lower-cases and splits on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Token ids are dense in `[0, len)`; the UNK id is `len`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, NbError> {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(NbError::InvalidModel(format!("duplicate token {t:?}")));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn unk_id(&self) -> usize {
        self.tokens.len()
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(self.unk_id())
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

const CLASSES: [Label; 2] = [Label::Positive, Label::Negative];

fn class_index(label: Label) -> usize {
    match label {
        Label::Positive => 0,
        Label::Negative => 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    pub alpha: f64,
    /// Indexed `[+, -]`.
    pub log_prior: [f64; 2],
    /// Indexed `[+, -]`, each of length `vocab.len() + 1` with UNK last.
    pub log_likelihood: [Vec<f64>; 2],
    pub vocab: Vocabulary,
}

fn tokens_of(context: &[String]) -> impl Iterator<Item = String> + '_ {
    context.iter().flat_map(|s| tokenize(s))
}

/// Fits the model on `(context, label)` pairs.
pub fn fit<'a, I>(docs: I, alpha: f64) -> Result<NbModel, NbError>
where
    I: IntoIterator<Item = (&'a [String], Label)>,
{
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(NbError::InvalidAlpha(alpha));
    }
    let mut doc_counts = [0u64; 2];
    let mut counts: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    for (context, label) in docs {
        let c = class_index(label);
        doc_counts[c] += 1;
        for token in tokens_of(context) {
            counts.entry(token).or_default()[c] += 1;
        }
    }
    for label in CLASSES {
        if doc_counts[class_index(label)] == 0 {
            return Err(NbError::MissingClass(label));
        }
    }
    if counts.is_empty() {
        return Err(NbError::EmptyVocabulary);
    }
    let v = counts.len() as f64;
    let mut totals = [0u64; 2];
    for per_class in counts.values() {
        totals[0] += per_class[0];
        totals[1] += per_class[1];
    }
    let n_docs = (doc_counts[0] + doc_counts[1]) as f64;
    let log_prior = [
        (doc_counts[0] as f64 / n_docs).ln(),
        (doc_counts[1] as f64 / n_docs).ln(),
    ];
    let log_likelihood = [0, 1].map(|c| {
        let denom = (totals[c] as f64 + alpha * v).ln();
        counts
            .values()
            .map(|per_class| (per_class[c] as f64 + alpha).ln() - denom)
            .chain(std::iter::once(alpha.ln() - denom))
            .collect::<Vec<f64>>()
    });
    let vocab = Vocabulary::from_tokens(counts.into_keys().collect())?;
    Ok(NbModel {
        alpha,
        log_prior,
        log_likelihood,
        vocab,
    })
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

impl NbModel {
    fn joint_log(&self, context: &[String]) -> [f64; 2] {
        let mut joint = self.log_prior;
        for token in tokens_of(context) {
            let id = self.vocab.id(&token);
            joint[0] += self.log_likelihood[0][id];
            joint[1] += self.log_likelihood[1][id];
        }
        joint
    }

    /// Posterior probabilities `[P(+ | x), P(- | x)]`.
    pub fn posterior(&self, context: &[String]) -> [f64; 2] {
        let joint = self.joint_log(context);
        let norm = log_sum_exp(joint[0], joint[1]);
        [(joint[0] - norm).exp(), (joint[1] - norm).exp()]
    }

    pub fn predict_proba(&self, context: &[String]) -> f64 {
        self.posterior(context)[0]
    }

    /// `+` only when the positive posterior strictly exceeds 0.5; ties go to `-`.
    pub fn predict(&self, context: &[String]) -> Label {
        if self.predict_proba(context) > 0.5 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn to_json(&self) -> Result<String, NbError> {
        let file = ModelFile {
            alpha: self.alpha,
            log_prior: LogPrior {
                positive: self.log_prior[0],
                negative: self.log_prior[1],
            },
            vocab: self.vocab.tokens().to_vec(),
            log_likelihood: self.log_likelihood.to_vec(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self, NbError> {
        let file: ModelFile = serde_json::from_str(text)?;
        if !(file.alpha.is_finite() && file.alpha > 0.0) {
            return Err(NbError::InvalidAlpha(file.alpha));
        }
        let rows: [Vec<f64>; 2] = file
            .log_likelihood
            .try_into()
            .map_err(|rows: Vec<Vec<f64>>| {
                NbError::InvalidModel(format!("expected 2 likelihood rows, found {}", rows.len()))
            })?;
        let expected = file.vocab.len() + 1;
        if rows.iter().any(|r| r.len() != expected) {
            return Err(NbError::InvalidModel(format!(
                "likelihood rows must have {expected} entries (vocabulary plus UNK)"
            )));
        }
        Ok(NbModel {
            alpha: file.alpha,
            log_prior: [file.log_prior.positive, file.log_prior.negative],
            log_likelihood: rows,
            vocab: Vocabulary::from_tokens(file.vocab)?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NbError> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(self.to_json()?.as_bytes())?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NbError> {
        let mut text = String::new();
        BufReader::new(File::open(path)?).read_to_string(&mut text)?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogPrior {
    #[serde(rename = "+")]
    positive: f64,
    #[serde(rename = "-")]
    negative: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    alpha: f64,
    log_prior: LogPrior,
    vocab: Vec<String>,
    log_likelihood: Vec<Vec<f64>>,
}
