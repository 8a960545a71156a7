//! Binary classification metrics: confusion counts, recall rates, UAR, F1,
//! ROC and AUC.
//!
//! A score is predicted positive iff `score >= threshold`. F1 is computed for
//! the positive class.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Label;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("score {score} for {example_id:?} is not a finite value in [0, 1]")]
    ScoreOutOfRange { example_id: String, score: f64 },
    #[error("no {0} examples: recall is undefined")]
    EmptyClass(Label),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredExample {
    pub example_id: String,
    pub score: f64,
    pub label: Label,
}

impl ScoredExample {
    pub fn new(example_id: impl Into<String>, score: f64, label: Label) -> Result<Self, MetricsError> {
        let example_id = example_id.into();
        if !(score.is_finite() && (0.0..=1.0).contains(&score)) {
            return Err(MetricsError::ScoreOutOfRange { example_id, score });
        }
        Ok(ScoredExample {
            example_id,
            score,
            label,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// `R+ = TP / (TP + FN)`.
    pub fn recall_positive(&self) -> Result<f64, MetricsError> {
        match self.tp + self.fn_ {
            0 => Err(MetricsError::EmptyClass(Label::Positive)),
            p => Ok(self.tp as f64 / p as f64),
        }
    }

    /// `R- = TN / (TN + FP)`.
    pub fn recall_negative(&self) -> Result<f64, MetricsError> {
        match self.tn + self.fp {
            0 => Err(MetricsError::EmptyClass(Label::Negative)),
            n => Ok(self.tn as f64 / n as f64),
        }
    }
}

pub fn confusion_at(scored: &[ScoredExample], threshold: f64) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for s in scored {
        match (s.score >= threshold, s.label) {
            (true, Label::Positive) => c.tp += 1,
            (true, Label::Negative) => c.fp += 1,
            (false, Label::Negative) => c.tn += 1,
            (false, Label::Positive) => c.fn_ += 1,
        }
    }
    c
}

/// Unweighted average recall `(R+ + R-) / 2`.
pub fn uar(counts: &ConfusionCounts) -> Result<f64, MetricsError> {
    Ok((counts.recall_positive()? + counts.recall_negative()?) / 2.0)
}

/// `TP / (TP + (FP + FN) / 2)`, or 0 when the denominator is 0.
pub fn f1(counts: &ConfusionCounts) -> f64 {
    let denom = counts.tp as f64 + (counts.fp + counts.fn_) as f64 / 2.0;
    if denom == 0.0 {
        0.0
    } else {
        counts.tp as f64 / denom
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

fn class_sizes(scored: &[ScoredExample]) -> Result<(u64, u64), MetricsError> {
    let pos = scored.iter().filter(|s| s.label.is_positive()).count() as u64;
    let neg = scored.len() as u64 - pos;
    if pos == 0 {
        return Err(MetricsError::EmptyClass(Label::Positive));
    }
    if neg == 0 {
        return Err(MetricsError::EmptyClass(Label::Negative));
    }
    Ok((pos, neg))
}

/// Sweeps thresholds over the distinct scores, highest first.
///
/// The first point is `(0, 0)` at threshold `+inf`; the last is `(1, 1)` at
/// the lowest score. Equal scores yield a single point.
pub fn roc_curve(scored: &[ScoredExample]) -> Result<Vec<RocPoint>, MetricsError> {
    let (pos, neg) = class_sizes(scored)?;
    let mut sorted: Vec<&ScoredExample> = scored.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    for (i, s) in sorted.iter().enumerate() {
        if s.label.is_positive() {
            tp += 1;
        } else {
            fp += 1;
        }
        let group_ends = sorted
            .get(i + 1)
            .is_none_or(|next| next.score.total_cmp(&s.score) != Ordering::Equal);
        if group_ends {
            points.push(RocPoint {
                fpr: fp as f64 / neg as f64,
                tpr: tp as f64 / pos as f64,
                threshold: s.score,
            });
        }
    }
    Ok(points)
}

/// Trapezoidal area under a ROC curve ordered by ascending fpr.
pub fn auc_trapezoid(roc: &[RocPoint]) -> f64 {
    roc.windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Mean pair credit over all (+, -) pairs: 1 when the positive scores higher,
/// 0.5 on ties, 0 otherwise.
pub fn auc_pairwise_oracle(scored: &[ScoredExample]) -> Result<f64, MetricsError> {
    let (pos, neg) = class_sizes(scored)?;
    let mut credit2 = 0u64;
    for p in scored.iter().filter(|s| s.label.is_positive()) {
        for n in scored.iter().filter(|s| !s.label.is_positive()) {
            credit2 += match p.score.total_cmp(&n.score) {
                Ordering::Greater => 2,
                Ordering::Equal => 1,
                Ordering::Less => 0,
            };
        }
    }
    Ok(credit2 as f64 / (2 * pos * neg) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub uar: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub f1: f64,
    pub auc: f64,
    pub counts: ConfusionCounts,
    #[serde(skip)]
    pub roc: Vec<RocPoint>,
}

/// Default operating threshold for probabilistic scores.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

pub fn evaluate(scored: &[ScoredExample], threshold: f64) -> Result<MetricsReport, MetricsError> {
    let counts = confusion_at(scored, threshold);
    let r_plus = counts.recall_positive()?;
    let r_minus = counts.recall_negative()?;
    let roc = roc_curve(scored)?;
    Ok(MetricsReport {
        uar: (r_plus + r_minus) / 2.0,
        r_plus,
        r_minus,
        f1: f1(&counts),
        auc: auc_trapezoid(&roc),
        counts,
        roc,
    })
}

/// Writes `threshold,fpr,tpr` rows; the `+inf` sentinel is written as `inf`.
pub fn write_roc_csv<W: Write>(roc: &[RocPoint], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["threshold", "fpr", "tpr"])?;
    for p in roc {
        w.write_record([p.threshold.to_string(), p.fpr.to_string(), p.tpr.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
