//! File formats: JSON-lines event data, JSON model files, benchmark CSV.
//!
//! Data files hold one sequence per line:
//!
//! ```text
//! {"id":"seq-000000","T":12.0,"events":[[0.41,1],[2.79,0]],"label":0}
//! ```
//!
//! `label` (the generating component) and `origin` (how the sequence was
//! constructed) are optional; `origin` is written only when it is not
//! plain `observed`, and a file must either label every sequence or none.
//!
//! Model files hold the full mixture with its shape spelled out:
//!
//! ```text
//! {"K":2, "C":2, "beta":1.0, "pi":[0.5,0.5],
//!  "components":[{"mu":[...],"A":[[...],[...]]}, ...], "meta":{...}}
//! ```
//!
//! Numbers round-trip exactly (shortest-representation printing), so
//! write-read-write produces byte-identical files — relied on by the
//! reproducibility tests.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::BenchmarkReport;
use crate::model::{Event, EventSequence, HawkesParams, MixtureModel, Origin};
use crate::simulate::SimConfig;

#[derive(Serialize, Deserialize)]
struct SeqRecord {
    id: String,
    #[serde(rename = "T")]
    horizon: f64,
    events: Vec<(f64, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<Origin>,
}

/// Write sequences (one JSON object per line). `labels`, when given, must
/// be one per sequence.
pub fn write_sequences(
    path: impl AsRef<Path>,
    sequences: &[EventSequence],
    labels: Option<&[usize]>,
) -> Result<()> {
    if let Some(labels) = labels {
        if labels.len() != sequences.len() {
            return Err(Error::LengthMismatch {
                left: sequences.len(),
                right: labels.len(),
            });
        }
    }
    let mut out = fs::File::create(path)?;
    for (i, seq) in sequences.iter().enumerate() {
        let record = SeqRecord {
            id: seq.id.clone(),
            horizon: seq.horizon,
            events: seq.events.iter().map(|ev| (ev.time, ev.kind)).collect(),
            label: labels.map(|l| l[i]),
            origin: (seq.origin != Origin::Observed).then_some(seq.origin),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Read a sequence file. `num_types` fixes the type alphabet; pass `None`
/// to infer it as one past the largest type in the file (at least 1, so an
/// event-free file still yields usable sequences).
///
/// Returns the labels alongside the sequences when every line carries one;
/// a file that labels only some lines is rejected.
pub fn read_sequences(
    path: impl AsRef<Path>,
    num_types: Option<usize>,
) -> Result<(Vec<EventSequence>, Option<Vec<usize>>)> {
    let path_str = path.as_ref().display().to_string();
    let file = fs::File::open(path.as_ref())?;
    let mut records: Vec<(usize, SeqRecord)> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SeqRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedData {
                path: path_str.clone(),
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        records.push((lineno + 1, record));
    }

    let num_types = num_types.unwrap_or_else(|| {
        records
            .iter()
            .flat_map(|(_, r)| r.events.iter().map(|&(_, kind)| kind + 1))
            .max()
            .unwrap_or(1)
    });

    let labeled = records.iter().filter(|(_, r)| r.label.is_some()).count();
    if labeled != 0 && labeled != records.len() {
        return Err(Error::MalformedData {
            path: path_str,
            line: 0,
            reason: format!(
                "{labeled} of {} sequences carry labels; label all or none",
                records.len()
            ),
        });
    }

    let mut sequences = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(if labeled > 0 { records.len() } else { 0 });
    for (lineno, record) in records {
        let events: Vec<Event> = record
            .events
            .iter()
            .map(|&(time, kind)| Event { time, kind })
            .collect();
        let seq = EventSequence::with_origin(
            record.id,
            events,
            record.horizon,
            num_types,
            record.origin.unwrap_or(Origin::Observed),
        )
        .map_err(|e| Error::MalformedData {
            path: path_str.clone(),
            line: lineno,
            reason: e.to_string(),
        })?;
        sequences.push(seq);
        if let Some(label) = record.label {
            labels.push(label);
        }
    }
    Ok((sequences, (labeled > 0).then_some(labels)))
}

#[derive(Serialize, Deserialize)]
struct ComponentRecord {
    mu: Vec<f64>,
    #[serde(rename = "A")]
    infectivity: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "C")]
    c: usize,
    beta: f64,
    pi: Vec<f64>,
    components: Vec<ComponentRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

/// Write a mixture model as pretty-printed JSON. `meta` travels verbatim
/// (fit settings, seeds, crate version — whatever the producer wants to
/// record); object keys are written in sorted order, so equal models with
/// equal metadata produce byte-identical files.
pub fn write_model(
    path: impl AsRef<Path>,
    model: &MixtureModel,
    meta: Option<serde_json::Value>,
) -> Result<()> {
    model.validate()?;
    let record = ModelRecord {
        k: model.num_components(),
        c: model.num_types(),
        beta: model.components[0].decay,
        pi: model.weights.clone(),
        components: model
            .components
            .iter()
            .map(|comp| ComponentRecord {
                mu: comp.mu.clone(),
                infectivity: comp.infectivity.clone(),
            })
            .collect(),
        meta,
    };
    let mut out = fs::File::create(path)?;
    let text = serde_json::to_string_pretty(&record)?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Read a model file back, with its metadata (if any). The declared shape
/// (`K`, `C`) must match the parameter arrays, and the parameters must pass
/// the usual validity checks.
pub fn read_model(
    path: impl AsRef<Path>,
) -> Result<(MixtureModel, Option<serde_json::Value>)> {
    let path_str = path.as_ref().display().to_string();
    let malformed = |reason: String| Error::MalformedModel {
        path: path_str.clone(),
        reason,
    };
    let text = fs::read_to_string(path.as_ref())?;
    let record: ModelRecord =
        serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    if record.components.len() != record.k {
        return Err(malformed(format!(
            "declares K={} but holds {} components",
            record.k,
            record.components.len()
        )));
    }
    if record.pi.len() != record.k {
        return Err(malformed(format!(
            "declares K={} but pi has {} entries",
            record.k,
            record.pi.len()
        )));
    }
    let mut components = Vec::with_capacity(record.k);
    for (idx, comp) in record.components.into_iter().enumerate() {
        if comp.mu.len() != record.c {
            return Err(malformed(format!(
                "component {idx} has {} base rates for C={}",
                comp.mu.len(),
                record.c
            )));
        }
        let params = HawkesParams::new(comp.mu, comp.infectivity, record.beta)
            .map_err(|e| malformed(format!("component {idx}: {e}")))?;
        if params.num_types() != record.c {
            return Err(malformed(format!(
                "component {idx} has a {0}x{0} infectivity matrix for C={1}",
                params.num_types(),
                record.c
            )));
        }
        components.push(params);
    }
    let model = MixtureModel::new(components, record.pi)
        .map_err(|e| malformed(e.to_string()))?;
    Ok((model, record.meta))
}

/// Names accepted by [`preset`].
pub fn preset_names() -> &'static [&'static str] {
    &["k2c2", "k3c5"]
}

/// Ready-made generator configurations for experiments and smoke tests.
///
/// * `k2c2` — two well-separated components over two event types: a loud
///   cluster driving type 0 and a quiet cluster driving type 1, separated
///   both by composition and by overall rate; roughly eight events per
///   sequence, sized for a 200/200 train/test split.
/// * `k3c5` — three components over five types, each driving a different
///   pair of types; longer horizon, roughly twenty-five events per
///   sequence.
///
/// Callers typically override `n_sequences` and `seed`.
pub fn preset(name: &str) -> Result<SimConfig> {
    match name {
        "k2c2" => {
            let comp0 = HawkesParams::new(
                vec![0.50, 0.05],
                vec![vec![0.45, 0.05], vec![0.05, 0.15]],
                1.0,
            )?;
            let comp1 = HawkesParams::new(
                vec![0.04, 0.18],
                vec![vec![0.15, 0.05], vec![0.05, 0.45]],
                1.0,
            )?;
            Ok(SimConfig {
                model: MixtureModel::new(vec![comp0, comp1], vec![0.5, 0.5])?,
                n_sequences: 400,
                horizon: 12.0,
                seed: 7,
                max_events: 20_000,
            })
        }
        "k3c5" => {
            // Component k concentrates on types {2k, 2k+1 mod 5}.
            let mut components = Vec::with_capacity(3);
            for k in 0..3_usize {
                let hot = [(2 * k) % 5, (2 * k + 1) % 5];
                let mu: Vec<f64> = (0..5)
                    .map(|c| if hot.contains(&c) { 0.22 } else { 0.03 })
                    .collect();
                let mut infectivity = vec![vec![0.01; 5]; 5];
                for &h in &hot {
                    infectivity[h][h] = 0.35;
                }
                infectivity[hot[0]][hot[1]] = 0.15;
                infectivity[hot[1]][hot[0]] = 0.15;
                components.push(HawkesParams::new(mu, infectivity, 1.0)?);
            }
            Ok(SimConfig {
                model: MixtureModel::new(components, vec![1.0 / 3.0; 3])?,
                n_sequences: 90,
                horizon: 20.0,
                seed: 11,
                max_events: 50_000,
            })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

fn csv_f64(v: f64) -> String {
    format!("{v}")
}

/// Aggregate benchmark rows as CSV. The single timing column is the only
/// part of the output that varies between identical runs.
pub fn benchmark_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("method,mean_loglike,ci95,mean_purity,mean_seconds\n");
    for row in &report.rows {
        let ci = row
            .ci95
            .map(csv_f64)
            .unwrap_or_else(|| "n/a".to_string());
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.method,
            csv_f64(row.mean_loglike),
            ci,
            csv_f64(row.mean_purity),
            csv_f64(row.mean_seconds)
        ));
    }
    out
}

/// Per-trial benchmark rows as CSV, for paired comparisons and plotting.
pub fn benchmark_trials_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("trial,method,test_loglik,purity,seconds,n_train,n_test\n");
    for row in &report.trials {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.trial,
            row.method,
            csv_f64(row.test_loglik),
            csv_f64(row.purity),
            csv_f64(row.seconds),
            row.n_train,
            row.n_test
        ));
    }
    out
}

/// Aggregate benchmark rows as an aligned text table for terminals.
pub fn benchmark_table(report: &BenchmarkReport) -> String {
    let mut lines = vec![format!(
        "{:<8} {:>14} {:>10} {:>8} {:>10}",
        "method", "test loglik", "ci95", "purity", "seconds"
    )];
    for row in &report.rows {
        let ci = row
            .ci95
            .map(|c| format!("{c:.4}"))
            .unwrap_or_else(|| "n/a".to_string());
        lines.push(format!(
            "{:<8} {:>14.6} {:>10} {:>8.4} {:>10.3}",
            row.method, row.mean_loglike, ci, row.mean_purity, row.mean_seconds
        ));
    }
    lines.join("\n") + "\n"
}
