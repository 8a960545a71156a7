//! Canonical corpus JSONL: one `UtteranceRecord` per line.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{CorpusError, Document, UtteranceRecord};

pub fn write_corpus_to<W: Write>(docs: &[Document], mut out: W) -> Result<(), CorpusError> {
    for doc in docs {
        for record in &doc.utterances {
            serde_json::to_writer(&mut out, record).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_corpus(path: impl AsRef<Path>, docs: &[Document]) -> Result<(), CorpusError> {
    write_corpus_to(docs, BufWriter::new(File::create(path)?))
}

/// Reads a corpus, grouping consecutive records by `doc_id`.
///
/// Records of a document must be contiguous with strictly increasing `line_idx`.
pub fn read_corpus_from<R: BufRead>(reader: R) -> Result<Vec<Document>, CorpusError> {
    let mut docs: Vec<Document> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let record: UtteranceRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::Schema {
                line: line_no,
                message: e.to_string(),
            })?;
        match docs.last_mut() {
            Some(doc) if doc.doc_id == record.doc_id => {
                let prev = doc.utterances.last().map(|r| r.line_idx);
                if prev.is_some_and(|p| p >= record.line_idx) {
                    return Err(CorpusError::Schema {
                        line: line_no,
                        message: format!(
                            "line_idx {} does not increase within document {:?}",
                            record.line_idx, record.doc_id
                        ),
                    });
                }
                doc.utterances.push(record);
            }
            _ => {
                if !seen.insert(record.doc_id.clone()) {
                    return Err(CorpusError::Schema {
                        line: line_no,
                        message: format!("document {:?} is not contiguous", record.doc_id),
                    });
                }
                docs.push(Document {
                    doc_id: record.doc_id.clone(),
                    utterances: vec![record],
                });
            }
        }
    }
    Ok(docs)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>, CorpusError> {
    read_corpus_from(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_opus_lines, Lexicon, ResponseKind, SourceFormat};

    fn bytes(docs: &[Document]) -> Vec<u8> {
        let mut out = Vec::new();
        write_corpus_to(docs, &mut out).unwrap();
        out
    }

    #[test]
    fn empty_corpus() {
        assert!(bytes(&[]).is_empty());
        assert!(read_corpus_from(&b""[..]).unwrap().is_empty());
    }

    #[test]
    fn key_order_is_fixed() {
        let doc = Document {
            doc_id: "d".into(),
            utterances: vec![UtteranceRecord {
                doc_id: "d".into(),
                line_idx: 0,
                text: "Hi \"you\"".into(),
                events_after: vec![ResponseKind::Laugh, ResponseKind::Cheer],
                source_format: SourceFormat::OpusLines,
            }],
        };
        assert_eq!(
            String::from_utf8(bytes(&[doc])).unwrap(),
            "{\"doc_id\":\"d\",\"line_idx\":0,\"text\":\"Hi \\\"you\\\"\",\
             \"events_after\":[\"laugh\",\"cheer\"],\"source_format\":\"opus-lines\"}\n"
        );
    }

    #[test]
    fn parsed_document_is_byte_stable() {
        let doc = parse_opus_lines(
            &b"JOHN: Hi\nA [LAUGHS] B\n(APPLAUSE)\nend"[..],
            "x",
            &Lexicon::default(),
        )
        .unwrap()
        .document;
        let first = bytes(std::slice::from_ref(&doc));
        let back = read_corpus_from(&first[..]).unwrap();
        assert_eq!(back, vec![doc]);
        assert_eq!(bytes(&back), first);
    }

    #[test]
    fn schema_violation_names_line() {
        let input = b"{\"doc_id\":\"d\",\"line_idx\":0,\"text\":\"a\",\"events_after\":[],\"source_format\":\"srt\"}\n\
{\"doc_id\":\"d\",\"line_idx\":1,\"text\":\"b\",\"events_after\":[\"giggle\"],\"source_format\":\"srt\"}\n";
        match read_corpus_from(&input[..]) {
            Err(CorpusError::Schema { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_monotone_and_split_documents_rejected() {
        let rec = |doc: &str, idx: u64| {
            format!(
                "{{\"doc_id\":\"{doc}\",\"line_idx\":{idx},\"text\":\"t\",\"events_after\":[],\"source_format\":\"ted\"}}\n"
            )
        };
        let dup = rec("a", 0) + &rec("a", 0);
        assert!(matches!(
            read_corpus_from(dup.as_bytes()),
            Err(CorpusError::Schema { line: 2, .. })
        ));
        let split = rec("a", 0) + &rec("b", 0) + &rec("a", 1);
        assert!(matches!(
            read_corpus_from(split.as_bytes()),
            Err(CorpusError::Schema { line: 3, .. })
        ));
    }
}
