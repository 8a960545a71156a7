use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arc_core::corpus::{
    merge_documents, parse_opus_lines, parse_srt, parse_ted_transcript, read_corpus, write_corpus,
    CorpusError, Document, IngestReport, Lexicon, SourceFormat,
};
use arc_core::dataset::{
    build_dataset, read_dataset, write_dataset, write_export, write_stats, ArcDataset,
    BuildOptions, ContextConfig, DatasetError, Split,
};
use arc_core::metrics::{evaluate, write_roc_csv, MetricsError, ScoredExample, DEFAULT_THRESHOLD};
use arc_core::nb::{fit, NbError, NbModel};
use arc_core::scores::{read_scores, write_scores, ScoresError};
use arc_core::synth::{planted_cue_corpus, CuePlacement, SynthConfig};
use clap::{Parser, Subcommand, ValueEnum};

// Kept in step with arc_core::SCHEMA_VERSION (checked by a unit test).
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (schema 1)");

#[derive(Parser)]
#[command(name = "arc", version = VERSION, about = "Audience-response corpus and baseline pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse raw subtitle/transcript files into a canonical corpus JSONL.
    Ingest {
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a labelled, split context-window dataset from a corpus.
    Build {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Sample as many negatives as positives.
        #[arg(long)]
        balance: bool,
        /// Fraction of each class assigned to train.
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        #[arg(long)]
        seed: u64,
        /// Keep every example of a document in the same split.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        group_by_doc: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the Naive Bayes baseline on the train split.
    TrainNb {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Score the test split with a trained model.
    ScoreNb {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        scores: PathBuf,
    },
    /// Compute UAR, F1 and ROC/AUC from any scores CSV.
    Eval {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        roc: PathBuf,
    },
    /// Write the bridge-ready JSONL for an external model.
    Export {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with a planted cue token.
    Synth {
        #[arg(long, default_value_t = 20)]
        docs: usize,
        #[arg(long, default_value_t = 10)]
        events_per_doc: usize,
        #[arg(long, default_value_t = 30)]
        spacing: usize,
        #[arg(long, value_enum, default_value_t = Placement::Anchor)]
        placement: Placement,
        /// Window for `--placement preceding`.
        #[arg(long, default_value_t = 4)]
        span: usize,
        /// Distinct filler words; smaller means less sampling noise per word.
        #[arg(long, default_value_t = 300)]
        filler_vocab: usize,
        #[arg(long, default_value = "zinger")]
        cue: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    OpusLines,
    Srt,
    Ted,
}

impl From<Format> for SourceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::OpusLines => SourceFormat::OpusLines,
            Format::Srt => SourceFormat::Srt,
            Format::Ted => SourceFormat::Ted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Placement {
    Following,
    Preceding,
    Anchor,
}

/// A failed run: exit 1 for invalid data, 2 for I/O or unparseable input.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn data(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn fatal(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

fn at(path: &Path, err: impl std::fmt::Display) -> String {
    format!("{}: {err}", path.display())
}

fn corpus_failure(path: &Path, err: CorpusError) -> Failure {
    match err {
        CorpusError::DuplicateDocument(_) => Failure::data(err.to_string()),
        _ => Failure::fatal(at(path, err)),
    }
}

fn dataset_failure(path: &Path, err: DatasetError) -> Failure {
    match err {
        DatasetError::Io(_) | DatasetError::Schema { .. } => Failure::fatal(at(path, err)),
        _ => Failure::data(err.to_string()),
    }
}

fn nb_failure(path: &Path, err: NbError) -> Failure {
    match err {
        NbError::Io(_) | NbError::Json(_) | NbError::InvalidModel(_) => Failure::fatal(at(path, err)),
        _ => Failure::data(err.to_string()),
    }
}

fn scores_failure(path: &Path, err: ScoresError) -> Failure {
    Failure::fatal(at(path, err))
}

fn metrics_failure(err: MetricsError) -> Failure {
    Failure::data(err.to_string())
}

fn io_failure(path: &Path, err: std::io::Error) -> Failure {
    Failure::fatal(at(path, err))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io_failure(path, e))
}

fn doc_id_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn ingest(format: Format, inputs: &[PathBuf], out: &Path) -> Result<(), Failure> {
    let lexicon = Lexicon::default();
    // Check every path up front so nothing is written on a typo.
    for path in inputs {
        if !path.is_file() {
            return Err(Failure::fatal(format!("{}: input file not found", path.display())));
        }
    }
    let mut docs: Vec<Document> = Vec::new();
    let mut report = IngestReport::default();
    for path in inputs {
        let reader = open(path)?;
        let name = doc_id_for(path);
        match format {
            Format::OpusLines | Format::Srt => {
                let ing = if matches!(format, Format::Srt) {
                    parse_srt(reader, &name, &lexicon)
                } else {
                    parse_opus_lines(reader, &name, &lexicon)
                }
                .map_err(|e| corpus_failure(path, e))?;
                docs.push(ing.document);
                report += ing.report;
            }
            Format::Ted => {
                let (talks, rep) =
                    parse_ted_transcript(reader, &name, &lexicon).map_err(|e| corpus_failure(path, e))?;
                docs.extend(talks);
                report += rep;
            }
        }
    }
    let docs = merge_documents(docs).map_err(|e| corpus_failure(out, e))?;
    write_corpus(out, &docs).map_err(|e| corpus_failure(out, e))?;
    let records: usize = docs.iter().map(|d| d.utterances.len()).sum();
    eprintln!(
        "ingest [{}]: files={} documents={} records={} lines={} warnings={} events={} dropped={}",
        SourceFormat::from(format).as_str(),
        inputs.len(),
        docs.len(),
        records,
        report.lines_read,
        report.warnings,
        report.events_detected,
        report.events_dropped,
    );
    Ok(())
}

fn stats_path(out: &Path) -> PathBuf {
    out.with_extension("stats.json")
}

fn load_dataset(path: &Path) -> Result<ArcDataset, Failure> {
    if !path.is_file() {
        return Err(Failure::fatal(format!("{}: dataset file not found", path.display())));
    }
    read_dataset(path).map_err(|e| dataset_failure(path, e))
}

fn build(corpus_path: &Path, opts: BuildOptions, out: &Path) -> Result<(), Failure> {
    if !corpus_path.is_file() {
        return Err(Failure::fatal(format!("{}: corpus file not found", corpus_path.display())));
    }
    let corpus = read_corpus(corpus_path).map_err(|e| corpus_failure(corpus_path, e))?;
    let ds = build_dataset(&corpus, &opts).map_err(|e| dataset_failure(out, e))?;
    write_dataset(out, &ds).map_err(|e| dataset_failure(out, e))?;
    let sidecar = stats_path(out);
    write_stats(&sidecar, &ds.stats).map_err(|e| dataset_failure(&sidecar, e))?;
    let s = &ds.stats;
    println!("{}: {} examples", opts.config, s.examples);
    println!("train: +{} -{}", s.train.positive, s.train.negative);
    println!("test:  +{} -{}", s.test.positive, s.test.negative);
    Ok(())
}

fn train_nb(dataset: &Path, model: &Path, alpha: f64) -> Result<(), Failure> {
    let ds = load_dataset(dataset)?;
    let train: Vec<_> = ds.split(Split::Train).collect();
    if train.is_empty() {
        return Err(Failure::fatal(format!("{}: dataset has no train split", dataset.display())));
    }
    let fitted = fit(train.iter().map(|e| (&e.context[..], e.label)), alpha)
        .map_err(|e| nb_failure(dataset, e))?;
    fitted.save(model).map_err(|e| nb_failure(model, e))?;
    println!(
        "trained on {} examples, vocabulary {}",
        train.len(),
        fitted.vocab.len()
    );
    Ok(())
}

fn score_nb(dataset: &Path, model: &Path, scores: &Path) -> Result<(), Failure> {
    let ds = load_dataset(dataset)?;
    if !model.is_file() {
        return Err(Failure::fatal(format!("{}: model file not found", model.display())));
    }
    let fitted = NbModel::load(model).map_err(|e| nb_failure(model, e))?;
    let scored = ds
        .split(Split::Test)
        .map(|e| ScoredExample::new(e.example_id.clone(), fitted.predict_proba(&e.context), e.label))
        .collect::<Result<Vec<_>, _>>()
        .map_err(metrics_failure)?;
    if scored.is_empty() {
        return Err(Failure::fatal(format!("{}: dataset has no test split", dataset.display())));
    }
    write_scores(scores, &scored).map_err(|e| scores_failure(scores, e))?;
    println!("scored {} test examples", scored.len());
    Ok(())
}

fn eval(scores: &Path, report: &Path, roc: &Path) -> Result<(), Failure> {
    if !scores.is_file() {
        return Err(Failure::fatal(format!("{}: scores file not found", scores.display())));
    }
    let scored = read_scores(scores).map_err(|e| scores_failure(scores, e))?;
    let r = evaluate(&scored, DEFAULT_THRESHOLD).map_err(metrics_failure)?;
    let json = serde_json::to_string_pretty(&r).expect("report serializes");
    std::fs::write(report, json + "\n").map_err(|e| io_failure(report, e))?;
    let file = File::create(roc).map_err(|e| io_failure(roc, e))?;
    let mut w = BufWriter::new(file);
    write_roc_csv(&r.roc, &mut w).map_err(|e| Failure::fatal(at(roc, e)))?;
    w.flush().map_err(|e| io_failure(roc, e))?;
    println!(
        "UAR={:.4} (R+={:.4} R-={:.4}) F1={:.4} AUC={:.4} n={}",
        r.uar,
        r.r_plus,
        r.r_minus,
        r.f1,
        r.auc,
        r.counts.total()
    );
    Ok(())
}

fn export(dataset: &Path, out: &Path) -> Result<(), Failure> {
    let ds = load_dataset(dataset)?;
    write_export(out, &ds).map_err(|e| dataset_failure(out, e))?;
    println!("exported {} examples", ds.examples.len());
    Ok(())
}

fn synth(cfg: SynthConfig, out: &Path) -> Result<(), Failure> {
    let min = match cfg.placement {
        CuePlacement::Following => 3,
        CuePlacement::Preceding { span } => span + 2,
        CuePlacement::Anchor => 2,
    };
    if cfg.spacing < min || matches!(cfg.placement, CuePlacement::Preceding { span: 0 }) {
        return Err(Failure::data(format!(
            "spacing {} is too small for this cue placement (need at least {min}, span >= 1)",
            cfg.spacing
        )));
    }
    let docs = planted_cue_corpus(&cfg);
    write_corpus(out, &docs).map_err(|e| corpus_failure(out, e))?;
    println!("wrote {} documents", docs.len());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ingest { format, inputs, out } => ingest(format, &inputs, &out),
        Command::Build { corpus, n, m, balance, split, seed, group_by_doc, out } => {
            let opts = BuildOptions {
                config: ContextConfig::new(n, m),
                balance,
                ratio: split,
                seed,
                group_by_doc,
            };
            build(&corpus, opts, &out)
        }
        Command::TrainNb { dataset, model, alpha } => train_nb(&dataset, &model, alpha),
        Command::ScoreNb { dataset, model, scores } => score_nb(&dataset, &model, &scores),
        Command::Eval { scores, report, roc } => eval(&scores, &report, &roc),
        Command::Export { dataset, out } => export(&dataset, &out),
        Command::Synth { docs, events_per_doc, spacing, placement, span, filler_vocab, cue, seed, out } => {
            let placement = match placement {
                Placement::Following => CuePlacement::Following,
                Placement::Preceding => CuePlacement::Preceding { span },
                Placement::Anchor => CuePlacement::Anchor,
            };
            let cfg = SynthConfig {
                docs,
                events_per_doc,
                spacing,
                filler_vocab,
                cue,
                placement,
                seed,
                ..SynthConfig::default()
            };
            synth(cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_carries_schema() {
        assert!(VERSION.ends_with(&format!("(schema {})", arc_core::SCHEMA_VERSION)));
    }

    #[test]
    fn stats_sidecar_name() {
        assert_eq!(stats_path(Path::new("out/dataset.jsonl")), Path::new("out/dataset.stats.json"));
    }

    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
