use std::io::BufRead;
use std::sync::OnceLock;

use regex::Regex;

use super::{for_each_line, CorpusError, DocumentBuilder, Ingested, Lexicon, SourceFormat};

fn timestamp_line() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(\d{2,}):([0-5]\d):([0-5]\d)[,.](\d{3})\s*-->\s*(\d{2,}):([0-5]\d):([0-5]\d)[,.](\d{3})",
        )
        .expect("valid regex")
    })
}

fn markup() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"</?[A-Za-z][^>]*>|\{\\[^}]*\}").expect("valid regex"))
}

fn to_millis(caps: &regex::Captures<'_>, first: usize) -> Option<u64> {
    let field = |i: usize| caps.get(first + i)?.as_str().parse::<u64>().ok();
    Some(((field(0)? * 60 + field(1)?) * 60 + field(2)?) * 1000 + field(3)?)
}

struct Cue {
    start_ms: u64,
    text: String,
}

/// Parses one cue block; `None` when the timing line is missing or malformed.
fn parse_cue(block: &[String]) -> Option<Cue> {
    let mut lines = block.iter().map(|l| l.trim());
    let mut first = lines.next()?;
    if first.chars().all(|c| c.is_ascii_digit()) {
        first = lines.next()?;
    }
    let caps = timestamp_line().captures(first)?;
    let start_ms = to_millis(&caps, 1)?;
    let end_ms = to_millis(&caps, 5)?;
    if end_ms < start_ms {
        return None;
    }
    let text = lines
        .map(|l| markup().replace_all(l, ""))
        .filter(|l| !l.trim().is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    Some(Cue { start_ms, text })
}

/// Parses a SubRip file. Each cue is one subtitle line; cues are ordered by start time.
pub fn parse_srt<R: BufRead>(
    reader: R,
    doc_id: &str,
    lexicon: &Lexicon,
) -> Result<Ingested, CorpusError> {
    let mut blocks: Vec<Vec<String>> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut first = true;
    for_each_line(reader, doc_id, |line| {
        let line = if first {
            first = false;
            line.trim_start_matches('\u{feff}')
        } else {
            line
        };
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line.to_string());
        }
    })?;
    if !current.is_empty() {
        blocks.push(current);
    }

    let mut builder = DocumentBuilder::new(doc_id, SourceFormat::Srt);
    let mut cues = Vec::with_capacity(blocks.len());
    for block in &blocks {
        match parse_cue(block) {
            Some(cue) => cues.push(cue),
            None => builder.report.warnings += 1,
        }
    }
    cues.sort_by_key(|c| c.start_ms);
    for cue in cues {
        builder.report.lines_read += 1;
        builder.push_raw_line(&cue.text, lexicon);
    }
    Ok(builder.finish())
}
