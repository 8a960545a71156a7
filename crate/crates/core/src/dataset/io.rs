//! Dataset JSONL and the stats sidecar.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    parse_example_id, ArcDataset, ContextConfig, DatasetError, DatasetStats, Example, Label, Split,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetRecord {
    example_id: String,
    context: Vec<String>,
    label: Label,
    n: usize,
    m: usize,
    split: Split,
}

/// Writes one line per example; every example must have a split.
pub fn write_dataset_to<W: Write>(dataset: &ArcDataset, mut out: W) -> Result<(), DatasetError> {
    for (i, ex) in dataset.examples.iter().enumerate() {
        let split = *dataset
            .split_of
            .get(&ex.example_id)
            .ok_or_else(|| DatasetError::Schema {
                line: i + 1,
                message: format!("example {:?} has no split", ex.example_id),
            })?;
        let record = DatasetRecord {
            example_id: ex.example_id.clone(),
            context: ex.context.clone(),
            label: ex.label,
            n: dataset.config.n,
            m: dataset.config.m,
            split,
        };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_dataset(path: impl AsRef<Path>, dataset: &ArcDataset) -> Result<(), DatasetError> {
    write_dataset_to(dataset, BufWriter::new(File::create(path)?))
}

pub fn write_stats(path: impl AsRef<Path>, stats: &DatasetStats) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, stats).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExportRecord<'a> {
    example_id: &'a str,
    sentences: &'a [String],
    label: u8,
    split: Split,
}

/// Writes the classifier hand-off format: raw sentences, 0/1 labels, split.
///
/// Joining sentences with model-specific separator tokens is left to the consumer.
pub fn write_export_to<W: Write>(dataset: &ArcDataset, mut out: W) -> Result<(), DatasetError> {
    for (i, ex) in dataset.examples.iter().enumerate() {
        let split = *dataset
            .split_of
            .get(&ex.example_id)
            .ok_or_else(|| DatasetError::Schema {
                line: i + 1,
                message: format!("example {:?} has no split", ex.example_id),
            })?;
        let record = ExportRecord {
            example_id: &ex.example_id,
            sentences: &ex.context,
            label: u8::from(ex.label.is_positive()),
            split,
        };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_export(path: impl AsRef<Path>, dataset: &ArcDataset) -> Result<(), DatasetError> {
    write_export_to(dataset, BufWriter::new(File::create(path)?))
}

pub fn read_dataset_from<R: BufRead>(reader: R) -> Result<ArcDataset, DatasetError> {
    let mut config: Option<ContextConfig> = None;
    let mut examples = Vec::new();
    let mut split_of = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| DatasetError::Schema {
            line: line_no,
            message,
        };
        let rec: DatasetRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let cfg = ContextConfig::new(rec.n, rec.m);
        match config {
            None => config = Some(cfg),
            Some(c) if c != cfg => {
                return Err(bad(format!("mixed configurations {c} and {cfg}")));
            }
            _ => {}
        }
        let (anchor, id_cfg) = parse_example_id(&rec.example_id)
            .ok_or_else(|| bad(format!("malformed example_id {:?}", rec.example_id)))?;
        if id_cfg != cfg {
            return Err(bad(format!(
                "example_id {:?} disagrees with n={} m={}",
                rec.example_id, rec.n, rec.m
            )));
        }
        if rec.context.len() != cfg.window_len() {
            return Err(bad(format!(
                "context has {} sentences, expected {}",
                rec.context.len(),
                cfg.window_len()
            )));
        }
        if split_of.insert(rec.example_id.clone(), rec.split).is_some() {
            return Err(bad(format!("duplicate example_id {:?}", rec.example_id)));
        }
        examples.push(Example {
            example_id: rec.example_id,
            context: rec.context,
            label: rec.label,
            anchor,
            events: Vec::new(),
        });
    }
    Ok(ArcDataset::new(
        config.unwrap_or_default(),
        examples,
        split_of,
        None,
    ))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<ArcDataset, DatasetError> {
    read_dataset_from(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{example_id, Anchor};

    fn dataset() -> ArcDataset {
        let cfg = ContextConfig::new(1, 0);
        let mut examples = Vec::new();
        let mut split_of = BTreeMap::new();
        for (i, label) in [Label::Positive, Label::Negative].into_iter().enumerate() {
            let anchor = Anchor {
                doc_id: "d:1".into(),
                line_idx: i as u64 + 1,
            };
            let id = example_id(&anchor, cfg);
            split_of.insert(id.clone(), if i == 0 { Split::Train } else { Split::Test });
            examples.push(Example {
                example_id: id,
                context: vec!["a".into(), format!("b{i}")],
                label,
                anchor,
                events: vec![],
            });
        }
        ArcDataset::new(cfg, examples, split_of, None)
    }

    #[test]
    fn round_trip() {
        let ds = dataset();
        let mut buf = Vec::new();
        write_dataset_to(&ds, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "{\"example_id\":\"d:1:1:1:0\",\"context\":[\"a\",\"b0\"],\"label\":\"+\",\"n\":1,\"m\":0,\"split\":\"train\"}\n"
        ));
        let back = read_dataset_from(&buf[..]).unwrap();
        assert_eq!(back, ds);
        assert!(back.stats_consistent());
    }

    #[test]
    fn export_maps_labels_to_integers() {
        let ds = dataset();
        let mut buf = Vec::new();
        write_export_to(&ds, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), ds.examples.len());
        assert_eq!(
            lines[0],
            "{\"example_id\":\"d:1:1:1:0\",\"sentences\":[\"a\",\"b0\"],\"label\":1,\"split\":\"train\"}"
        );
        assert!(lines[1].contains("\"label\":0"));
    }

    #[test]
    fn rejects_inconsistent_rows() {
        let row = |id: &str, ctx: &str, n: usize| {
            format!("{{\"example_id\":\"{id}\",\"context\":{ctx},\"label\":\"+\",\"n\":{n},\"m\":0,\"split\":\"train\"}}\n")
        };
        let wrong_len = row("d:0:1:0", "[\"a\"]", 1);
        assert!(matches!(read_dataset_from(wrong_len.as_bytes()), Err(DatasetError::Schema { line: 1, .. })));
        let mixed = row("d:0:0:0", "[\"a\"]", 0) + &row("d:1:1:0", "[\"a\",\"b\"]", 1);
        assert!(matches!(read_dataset_from(mixed.as_bytes()), Err(DatasetError::Schema { line: 2, .. })));
        let dup = row("d:0:0:0", "[\"a\"]", 0) + &row("d:0:0:0", "[\"a\"]", 0);
        assert!(matches!(read_dataset_from(dup.as_bytes()), Err(DatasetError::Schema { line: 2, .. })));
    }
}
