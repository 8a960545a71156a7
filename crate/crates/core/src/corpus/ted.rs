use std::io::BufRead;

use serde::Deserialize;

use super::noise::{clean_segment, mask_hearing_impaired};
use super::{
    for_each_line, split_line_at_event, CorpusError, Document, DocumentBuilder, IngestReport,
    Lexicon, SourceFormat,
};

#[derive(Debug, Deserialize)]
struct TalkLine {
    talk_id: String,
    text: String,
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | '”' | '’')
}

/// Splits cleaned text after runs of terminal punctuation followed by whitespace or end.
pub(crate) fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if is_terminal(chars[i].1) {
            let mut j = i;
            while j + 1 < chars.len() && is_terminal(chars[j + 1].1) {
                j += 1;
            }
            while j + 1 < chars.len() && is_closing(chars[j + 1].1) {
                j += 1;
            }
            let at_boundary = j + 1 == chars.len() || chars[j + 1].1.is_whitespace();
            if at_boundary {
                let end = chars[j].0 + chars[j].1.len_utf8();
                let sentence = text[start..end].trim();
                if !sentence.is_empty() {
                    sentences.push(sentence.to_string());
                }
                start = end;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}

/// Parses TED transcripts, one JSON object `{talk_id, text}` per line.
///
/// Each talk becomes one document; sentences are split on terminal
/// punctuation and inline annotations attach to the sentence before them.
/// Lines that are not valid JSON are skipped with a warning.
pub fn parse_ted_transcript<R: BufRead>(
    reader: R,
    source_name: &str,
    lexicon: &Lexicon,
) -> Result<(Vec<Document>, IngestReport), CorpusError> {
    let mut docs = Vec::new();
    let mut report = IngestReport::default();
    for_each_line(reader, source_name, |line| {
        if line.trim().is_empty() {
            return;
        }
        report.lines_read += 1;
        let talk: TalkLine = match serde_json::from_str(line) {
            Ok(t) => t,
            Err(_) => {
                report.warnings += 1;
                return;
            }
        };
        let mut builder = DocumentBuilder::new(talk.talk_id, SourceFormat::Ted);
        let masked = mask_hearing_impaired(&talk.text);
        let detection = lexicon.detect(&masked);
        builder.report.warnings += detection.malformed;
        let segments = split_line_at_event(&masked, &detection.events);
        for (i, segment) in segments.iter().enumerate() {
            for sentence in split_sentences(&clean_segment(segment)) {
                builder.push_text(sentence);
            }
            if let Some(event) = detection.events.get(i) {
                builder.push_event(event.kind);
            }
        }
        let ingested = builder.finish();
        report += ingested.report;
        docs.push(ingested.document);
    })?;
    Ok((docs, report))
}
