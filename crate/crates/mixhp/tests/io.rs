//! Disk round trips at pipeline scale: simulated corpora and fitted models
//! must survive write/read unchanged, and a fit must not care whether its
//! data came from memory or from a file.

use mixhp::io::{read_sequences, write_model, write_sequences};
use mixhp::learn::{mle_fit, EmConfig, ModelInit};
use mixhp::simulate::simulate_mixture;

#[test]
fn simulated_corpora_survive_the_disk_round_trip() {
    let mut cfg = mixhp::io::preset("k2c2").unwrap();
    cfg.n_sequences = 40;
    let data = simulate_mixture(&cfg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("data.jsonl");
    let second = dir.path().join("again.jsonl");
    write_sequences(&first, &data.sequences, Some(&data.labels)).unwrap();
    let (seqs, labels) = read_sequences(&first, None).unwrap();
    assert_eq!(seqs, data.sequences);
    assert_eq!(labels.as_deref(), Some(data.labels.as_slice()));

    write_sequences(&second, &seqs, labels.as_deref()).unwrap();
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
}

#[test]
fn fits_agree_between_in_memory_and_disk_data() {
    let mut cfg = mixhp::io::preset("k2c2").unwrap();
    cfg.n_sequences = 24;
    let data = simulate_mixture(&cfg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.jsonl");
    write_sequences(&path, &data.sequences, Some(&data.labels)).unwrap();
    let (from_disk, _) = read_sequences(&path, None).unwrap();

    let em = EmConfig {
        max_iters: 8,
        ..EmConfig::default()
    };
    let weights = vec![1.0; data.sequences.len()];
    let fit_mem = mle_fit(&data.sequences, &weights, 2, 1.0, &ModelInit::Seeded(9), &em).unwrap();
    let fit_disk = mle_fit(&from_disk, &weights, 2, 1.0, &ModelInit::Seeded(9), &em).unwrap();

    let a = dir.path().join("mem.json");
    let b = dir.path().join("disk.json");
    write_model(&a, &fit_mem, None).unwrap();
    write_model(&b, &fit_disk, None).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
