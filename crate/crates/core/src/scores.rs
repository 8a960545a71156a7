//! Scores CSV (`example_id,score,label`), the hand-off format between any
//! scoring model and evaluation.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::dataset::Label;
use crate::metrics::ScoredExample;

pub const SCORES_HEADER: [&str; 3] = ["example_id", "score", "label"];

#[derive(Debug, Error)]
pub enum ScoresError {
    #[error("scores line {line}: {message}")]
    Row { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_scores_to<W: Write>(scored: &[ScoredExample], out: W) -> Result<(), ScoresError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCORES_HEADER)?;
    for s in scored {
        w.write_record([s.example_id.as_str(), &s.score.to_string(), s.label.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scores(path: impl AsRef<Path>, scored: &[ScoredExample]) -> Result<(), ScoresError> {
    write_scores_to(scored, File::create(path)?)
}

fn parse_label(raw: &str) -> Option<Label> {
    match raw.trim() {
        "+" | "1" => Some(Label::Positive),
        "-" | "0" => Some(Label::Negative),
        _ => None,
    }
}

/// Reads a scores file, validating every row. Labels may be `+`/`-` or `1`/`0`.
pub fn read_scores_from<R: Read>(input: R) -> Result<Vec<ScoredExample>, ScoresError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().map(str::trim).ne(SCORES_HEADER) {
        return Err(ScoresError::Row {
            line: 1,
            message: format!("expected header {:?}", SCORES_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| ScoresError::Row { line, message };
        let id = record.get(0).unwrap_or_default().to_string();
        let raw_score = record.get(1).unwrap_or_default();
        let score: f64 = raw_score
            .trim()
            .parse()
            .map_err(|_| bad(format!("unparseable score {raw_score:?}")))?;
        let raw_label = record.get(2).unwrap_or_default();
        let label = parse_label(raw_label).ok_or_else(|| bad(format!("bad label {raw_label:?}")))?;
        out.push(ScoredExample::new(id, score, label).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

pub fn read_scores(path: impl AsRef<Path>) -> Result<Vec<ScoredExample>, ScoresError> {
    read_scores_from(File::open(path)?)
}
