//! Hearing-impaired notation removal.
//!
//! Rules, applied in order:
//! 1. a leading upper-case speaker tag (`JOHN:`, `MR. SMITH:`) is removed;
//! 2. text between music notes (`♪`, `♫`) is removed, notes included; an
//!    unpaired note removes everything to the end of the line;
//! 3. every well-formed `[...]` / `(...)` annotation is removed;
//! 4. stray delimiters are removed;
//! 5. whitespace runs collapse to one space and the result is trimmed.
//!
//! Rules 1 and 2 are implemented as a same-length mask so that byte offsets
//! computed on the masked line are valid on the raw line.

use std::sync::OnceLock;

use regex::Regex;

use super::lexicon::scan_annotations;

fn speaker_tag() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*[A-Z][A-Z0-9'.\- ]*:").expect("valid regex"))
}

fn is_music_note(c: char) -> bool {
    matches!(c, '♪' | '♫')
}

fn blank(out: &mut String, segment: &str) {
    out.extend(std::iter::repeat_n(' ', segment.len()));
}

/// Replaces speaker tags and music-delimited lyrics with spaces, preserving byte length.
pub fn mask_hearing_impaired(raw_line: &str) -> String {
    let mut out = String::with_capacity(raw_line.len());
    let mut rest = raw_line;
    if let Some(m) = speaker_tag().find(raw_line) {
        blank(&mut out, m.as_str());
        rest = &raw_line[m.end()..];
    }
    while let Some(open) = rest.find(is_music_note) {
        out.push_str(&rest[..open]);
        let note_len = rest[open..].chars().next().map_or(1, char::len_utf8);
        let after = &rest[open + note_len..];
        match after.find(is_music_note) {
            Some(close) => {
                let close_len = after[close..].chars().next().map_or(1, char::len_utf8);
                let end = open + note_len + close + close_len;
                blank(&mut out, &rest[open..end]);
                rest = &rest[end..];
            }
            None => {
                blank(&mut out, &rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    debug_assert_eq!(out.len(), raw_line.len());
    out
}

/// Removes annotations and stray delimiters, then collapses whitespace.
pub(crate) fn clean_segment(text: &str) -> String {
    let scan = scan_annotations(text);
    let mut kept = String::with_capacity(text.len());
    let mut cursor = 0;
    for span in &scan.spans {
        kept.push_str(&text[cursor..span.start]);
        kept.push(' ');
        cursor = span.end;
    }
    kept.push_str(&text[cursor..]);
    collapse_whitespace(&kept.replace(['[', ']', '(', ')'], " "))
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Strips all hearing-impaired notation from a raw subtitle line.
pub fn strip_noise(raw_line: &str) -> String {
    clean_segment(&mask_hearing_impaired(raw_line))
}
