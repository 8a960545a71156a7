//! Response-event vocabulary and bracket/parenthesis annotation scanning.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The eleven audience response kinds tracked by the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Clap,
    Applause,
    Cheer,
    Chuckle,
    Cry,
    Laugh,
    Scream,
    Shout,
    Sigh,
    Grunt,
    Sob,
}

impl ResponseKind {
    pub const ALL: [ResponseKind; 11] = [
        ResponseKind::Clap,
        ResponseKind::Applause,
        ResponseKind::Cheer,
        ResponseKind::Chuckle,
        ResponseKind::Cry,
        ResponseKind::Laugh,
        ResponseKind::Scream,
        ResponseKind::Shout,
        ResponseKind::Sigh,
        ResponseKind::Grunt,
        ResponseKind::Sob,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResponseKind::Clap => "clap",
            ResponseKind::Applause => "applause",
            ResponseKind::Cheer => "cheer",
            ResponseKind::Chuckle => "chuckle",
            ResponseKind::Cry => "cry",
            ResponseKind::Laugh => "laugh",
            ResponseKind::Scream => "scream",
            ResponseKind::Shout => "shout",
            ResponseKind::Sigh => "sigh",
            ResponseKind::Grunt => "grunt",
            ResponseKind::Sob => "sob",
        }
    }
}

impl fmt::Display for ResponseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownKind(pub String);

impl fmt::Display for UnknownKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown response kind {:?}", self.0)
    }
}

impl std::error::Error for UnknownKind {}

impl FromStr for ResponseKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResponseKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// How a lexicon entry matches an annotation token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormMatch {
    /// Token must start with the form (LAUGH matches LAUGHS, LAUGHTER, ...).
    Prefix,
    /// Token must equal the form.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Upper-case surface form.
    pub form: String,
    pub mode: FormMatch,
    pub kind: ResponseKind,
}

/// Maps surface forms found inside annotations to response kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
}

impl Default for Lexicon {
    fn default() -> Self {
        use FormMatch::{Exact, Prefix};
        use ResponseKind::*;
        let table: &[(&str, FormMatch, ResponseKind)] = &[
            ("CLAP", Prefix, Clap),
            ("APPLAU", Prefix, Applause),
            ("CHEER", Prefix, Cheer),
            ("CHUCKL", Prefix, Chuckle),
            ("CRY", Prefix, Cry),
            ("CRIES", Exact, Cry),
            ("CRIED", Exact, Cry),
            ("LAUGH", Prefix, Laugh),
            ("SCREAM", Prefix, Scream),
            ("SHOUT", Prefix, Shout),
            ("SIGH", Prefix, Sigh),
            ("GRUNT", Prefix, Grunt),
            ("SOB", Exact, Sob),
            ("SOBS", Exact, Sob),
            ("SOBBING", Exact, Sob),
            ("SOBBED", Exact, Sob),
        ];
        Lexicon {
            entries: table
                .iter()
                .map(|&(form, mode, kind)| LexiconEntry {
                    form: form.to_string(),
                    mode,
                    kind,
                })
                .collect(),
        }
    }
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Self {
        Lexicon { entries }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    /// Classifies a single token (any case).
    pub fn lookup_token(&self, token: &str) -> Option<ResponseKind> {
        let upper = token.to_uppercase();
        self.entries
            .iter()
            .find(|e| match e.mode {
                FormMatch::Prefix => upper.starts_with(&e.form),
                FormMatch::Exact => upper == e.form,
            })
            .map(|e| e.kind)
    }

    /// Classifies annotation content: the first alphabetic token that matches wins.
    pub fn classify(&self, content: &str) -> Option<ResponseKind> {
        content
            .split(|c: char| !c.is_alphabetic())
            .filter(|t| !t.is_empty())
            .find_map(|t| self.lookup_token(t))
    }

    /// Scans `raw_line` and returns the lexicon events plus the malformed-annotation count.
    pub fn detect(&self, raw_line: &str) -> Detection {
        let scan = scan_annotations(raw_line);
        let events = scan
            .spans
            .iter()
            .filter_map(|span| {
                let inner = &raw_line[span.start + 1..span.end - 1];
                self.classify(inner).map(|kind| EventAnnotation {
                    kind,
                    char_start: span.start,
                    char_end: span.end,
                    raw_text: raw_line[span.start..span.end].to_string(),
                })
            })
            .collect();
        Detection {
            events,
            malformed: scan.malformed,
        }
    }
}

/// A response annotation located in a raw line. Offsets are byte offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventAnnotation {
    pub kind: ResponseKind,
    pub char_start: usize,
    pub char_end: usize,
    /// Matched text including its delimiters.
    pub raw_text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Detection {
    pub events: Vec<EventAnnotation>,
    pub malformed: usize,
}

/// Byte range `[start, end)` of a well-formed annotation, delimiters included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationScan {
    pub spans: Vec<Span>,
    pub malformed: usize,
}

fn closer_for(open: char) -> Option<char> {
    match open {
        '[' => Some(']'),
        '(' => Some(')'),
        _ => None,
    }
}

fn is_delimiter(c: char) -> bool {
    matches!(c, '[' | ']' | '(' | ')')
}

/// Finds every flat `[...]` / `(...)` annotation in `line`.
///
/// An opener whose matching closer is missing, or that contains another
/// delimiter before its closer, is malformed; it is counted and left as text.
/// A stray closer is also counted.
pub fn scan_annotations(line: &str) -> AnnotationScan {
    let mut scan = AnnotationScan::default();
    let mut iter = line.char_indices().peekable();
    while let Some((start, c)) = iter.next() {
        if let Some(close) = closer_for(c) {
            let rest = &line[start + c.len_utf8()..];
            match rest.char_indices().find(|&(_, d)| is_delimiter(d)) {
                Some((off, d)) if d == close => {
                    let end = start + c.len_utf8() + off + d.len_utf8();
                    scan.spans.push(Span { start, end });
                    while iter.peek().is_some_and(|&(i, _)| i < end) {
                        iter.next();
                    }
                }
                _ => scan.malformed += 1,
            }
        } else if c == ']' || c == ')' {
            scan.malformed += 1;
        }
    }
    scan
}

/// Convenience wrapper over [`Lexicon::detect`] that drops the warning count.
pub fn detect_events(raw_line: &str, lexicon: &Lexicon) -> Vec<EventAnnotation> {
    lexicon.detect(raw_line).events
}
