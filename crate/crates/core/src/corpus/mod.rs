//! Subtitle and transcript ingest into a canonical utterance stream.

mod io;
pub mod lexicon;
pub mod noise;
mod srt;
mod ted;

use std::fmt;
use std::io::BufRead;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{read_corpus, read_corpus_from, write_corpus, write_corpus_to};
pub use lexicon::{detect_events, EventAnnotation, Lexicon, ResponseKind};
pub use noise::strip_noise;
pub use srt::parse_srt;
pub use ted::parse_ted_transcript;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{doc_id}: unreadable input at byte {offset}: {source}")]
    Read {
        doc_id: String,
        offset: u64,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("corpus line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("document {0:?} appears more than once")]
    DuplicateDocument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceFormat {
    #[serde(rename = "opus-lines")]
    OpusLines,
    #[serde(rename = "srt")]
    Srt,
    #[serde(rename = "ted")]
    Ted,
}

impl SourceFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceFormat::OpusLines => "opus-lines",
            SourceFormat::Srt => "srt",
            SourceFormat::Ted => "ted",
        }
    }
}

impl fmt::Display for SourceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "opus-lines" => Ok(SourceFormat::OpusLines),
            "srt" => Ok(SourceFormat::Srt),
            "ted" => Ok(SourceFormat::Ted),
            other => Err(format!("unknown source format {other:?}")),
        }
    }
}

/// One uttered sentence with the response events that follow it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtteranceRecord {
    pub doc_id: String,
    pub line_idx: u64,
    pub text: String,
    pub events_after: Vec<ResponseKind>,
    pub source_format: SourceFormat,
}

impl UtteranceRecord {
    pub fn has_event(&self) -> bool {
        !self.events_after.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub utterances: Vec<UtteranceRecord>,
}

/// Counters collected while ingesting; reported on standard error by the CLI.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines_read: usize,
    pub warnings: usize,
    pub events_detected: usize,
    /// Events at document start with no preceding utterance to attach to.
    pub events_dropped: usize,
}

impl AddAssign for IngestReport {
    fn add_assign(&mut self, rhs: Self) {
        self.lines_read += rhs.lines_read;
        self.warnings += rhs.warnings;
        self.events_detected += rhs.events_detected;
        self.events_dropped += rhs.events_dropped;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub document: Document,
    pub report: IngestReport,
}

/// A piece of a raw line in reading order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Text(String),
    Event(ResponseKind),
}

/// Splits `raw_line` around `events` into `events.len() + 1` trimmed segments.
///
/// Segment `i` is the text before event `i`; the last segment is the text
/// after the final event. Empty segments are kept here and dropped downstream.
pub fn split_line_at_event<'a>(raw_line: &'a str, events: &[EventAnnotation]) -> Vec<&'a str> {
    let mut segments = Vec::with_capacity(events.len() + 1);
    let mut cursor = 0;
    for event in events {
        segments.push(raw_line[cursor..event.char_start].trim());
        cursor = event.char_end;
    }
    segments.push(raw_line[cursor..].trim());
    segments
}

/// Runs masking, detection, splitting and cleaning on one raw line.
///
/// Returns the pieces (cleaned text segments interleaved with events; empty
/// text dropped) and the malformed-annotation count.
pub fn segment_line(raw_line: &str, lexicon: &Lexicon) -> (Vec<Piece>, usize) {
    let masked = noise::mask_hearing_impaired(raw_line);
    let detection = lexicon.detect(&masked);
    let segments = split_line_at_event(&masked, &detection.events);
    let mut pieces = Vec::with_capacity(segments.len() * 2);
    for (i, segment) in segments.iter().enumerate() {
        let text = noise::clean_segment(segment);
        if !text.is_empty() {
            pieces.push(Piece::Text(text));
        }
        if let Some(event) = detection.events.get(i) {
            pieces.push(Piece::Event(event.kind));
        }
    }
    (pieces, detection.malformed)
}

/// Accumulates records for one document, attaching each event to the latest record.
#[derive(Debug)]
pub(crate) struct DocumentBuilder {
    doc_id: String,
    format: SourceFormat,
    records: Vec<UtteranceRecord>,
    pub(crate) report: IngestReport,
}

impl DocumentBuilder {
    pub(crate) fn new(doc_id: impl Into<String>, format: SourceFormat) -> Self {
        DocumentBuilder {
            doc_id: doc_id.into(),
            format,
            records: Vec::new(),
            report: IngestReport::default(),
        }
    }

    pub(crate) fn push_text(&mut self, text: String) {
        if text.is_empty() {
            return;
        }
        self.records.push(UtteranceRecord {
            doc_id: self.doc_id.clone(),
            line_idx: self.records.len() as u64,
            text,
            events_after: Vec::new(),
            source_format: self.format,
        });
    }

    pub(crate) fn push_event(&mut self, kind: ResponseKind) {
        self.report.events_detected += 1;
        match self.records.last_mut() {
            Some(last) => last.events_after.push(kind),
            None => self.report.events_dropped += 1,
        }
    }

    pub(crate) fn push_pieces(&mut self, pieces: Vec<Piece>) {
        for piece in pieces {
            match piece {
                Piece::Text(text) => self.push_text(text),
                Piece::Event(kind) => self.push_event(kind),
            }
        }
    }

    /// Processes one subtitle line as a unit.
    pub(crate) fn push_raw_line(&mut self, raw_line: &str, lexicon: &Lexicon) {
        let (pieces, malformed) = segment_line(raw_line, lexicon);
        self.report.warnings += malformed;
        self.push_pieces(pieces);
    }

    pub(crate) fn finish(self) -> Ingested {
        Ingested {
            document: Document {
                doc_id: self.doc_id,
                utterances: self.records,
            },
            report: self.report,
        }
    }
}

/// Reads `reader` line by line, failing with the byte offset of invalid input.
pub(crate) fn for_each_line<R: BufRead>(
    mut reader: R,
    doc_id: &str,
    mut f: impl FnMut(&str),
) -> Result<(), CorpusError> {
    let mut offset = 0u64;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|source| CorpusError::Read {
                doc_id: doc_id.to_string(),
                offset,
                source,
            })?;
        if n == 0 {
            return Ok(());
        }
        let line = std::str::from_utf8(&buf).map_err(|e| CorpusError::Read {
            doc_id: doc_id.to_string(),
            offset: offset + e.valid_up_to() as u64,
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?;
        f(line.trim_end_matches(['\n', '\r']));
        offset += n as u64;
    }
}

/// Parses OPUS extracted lines: one subtitle line per input line.
pub fn parse_opus_lines<R: BufRead>(
    reader: R,
    doc_id: &str,
    lexicon: &Lexicon,
) -> Result<Ingested, CorpusError> {
    let mut builder = DocumentBuilder::new(doc_id, SourceFormat::OpusLines);
    for_each_line(reader, doc_id, |line| {
        builder.report.lines_read += 1;
        let line = line.trim_start_matches('\u{feff}');
        builder.push_raw_line(line, lexicon);
    })?;
    Ok(builder.finish())
}

/// Orders documents by `doc_id`, rejecting duplicates and dropping empty documents.
pub fn merge_documents(mut docs: Vec<Document>) -> Result<Vec<Document>, CorpusError> {
    docs.retain(|d| !d.utterances.is_empty());
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    if let Some(w) = docs.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
        return Err(CorpusError::DuplicateDocument(w[0].doc_id.clone()));
    }
    Ok(docs)
}
