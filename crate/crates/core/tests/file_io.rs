use arc_core::corpus::{read_corpus, write_corpus};
use arc_core::dataset::{build_dataset, read_dataset, write_dataset, BuildOptions, ContextConfig, Split};
use arc_core::metrics::ScoredExample;
use arc_core::nb::{fit, NbModel};
use arc_core::scores::{read_scores, write_scores};
use arc_core::synth::{planted_cue_corpus, SynthConfig};

#[test]
fn artifacts_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = planted_cue_corpus(&SynthConfig { docs: 6, seed: 4, ..SynthConfig::default() });
    let corpus_path = dir.path().join("corpus.jsonl");
    write_corpus(&corpus_path, &corpus).unwrap();
    assert_eq!(read_corpus(&corpus_path).unwrap(), corpus);

    let ds = build_dataset(&corpus, &BuildOptions::new(ContextConfig::new(1, 1), 2)).unwrap();
    let ds_path = dir.path().join("dataset.jsonl");
    write_dataset(&ds_path, &ds).unwrap();
    let back = read_dataset(&ds_path).unwrap();
    assert_eq!(back.split_of, ds.split_of);
    // Event kinds are not part of the dataset rows; only the build-time sidecar has them.
    assert_eq!(back.stats.event_kinds.values().sum::<usize>(), 0);
    let mut expected = ds.stats.clone();
    expected.event_kinds = back.stats.event_kinds.clone();
    assert_eq!(back.stats, expected);
    assert_eq!(back.seed, None);

    let model = fit(ds.split(Split::Train).map(|e| (&e.context[..], e.label)), 1.0).unwrap();
    let model_path = dir.path().join("model.json");
    model.save(&model_path).unwrap();
    let loaded = NbModel::load(&model_path).unwrap();
    let scored: Vec<ScoredExample> = back
        .split(Split::Test)
        .map(|e| ScoredExample::new(e.example_id.clone(), loaded.predict_proba(&e.context), e.label).unwrap())
        .collect();
    for (e, s) in ds.split(Split::Test).zip(&scored) {
        assert_eq!(model.predict_proba(&e.context), s.score);
    }

    let scores_path = dir.path().join("scores.csv");
    write_scores(&scores_path, &scored).unwrap();
    assert_eq!(read_scores(&scores_path).unwrap(), scored);
}

#[test]
fn missing_files_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent");
    assert!(read_corpus(&missing).is_err());
    assert!(read_dataset(&missing).is_err());
    assert!(NbModel::load(&missing).is_err());
    assert!(read_scores(&missing).is_err());
}
