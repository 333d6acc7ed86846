//! Held-out evaluation, method benchmarking, and empirical cost probes.
//!
//! Benchmarks compare fitting strategies under paired conditions: every
//! strategy in a trial sees the same train/test split, and every trial
//! derives its split and fit seeds from the benchmark seed and trial index,
//! so two runs of the same configuration produce identical splits, fits,
//! and scores (timing columns aside).

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::{fit_with_strategy, AsplConfig, FitReport, FitStrategy};
use crate::math::{loglog_slope, mean_ci95};
use crate::model::{EventSequence, MixtureModel};
use crate::simulate::{simulate_mixture, stream_rng, SimConfig};

/// Base RNG stream for per-trial train/test shuffles; trial `t` shuffles on
/// stream `TRIAL_STREAM_BASE + t`, far above simulation and learning
/// streams.
const TRIAL_STREAM_BASE: u64 = 1 << 42;

/// Mean per-event held-out log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestLoglik {
    pub value: f64,
    /// Sequences that contributed.
    pub n_used: usize,
    /// Empty sequences skipped (no events to normalize by).
    pub n_skipped: usize,
}

/// Average of `log p(seq) / I` over the non-empty sequences in `test`.
pub fn test_loglik(model: &MixtureModel, test: &[EventSequence]) -> Result<TestLoglik> {
    let mut sum = 0.0_f64;
    let mut used = 0_usize;
    let mut skipped = 0_usize;
    for seq in test {
        if seq.is_empty() {
            skipped += 1;
            continue;
        }
        sum += model.loglik(seq)? / seq.len() as f64;
        used += 1;
    }
    if used == 0 {
        return Err(Error::InvalidParams(
            "held-out scoring needs at least one non-empty sequence".into(),
        ));
    }
    Ok(TestLoglik {
        value: sum / used as f64,
        n_used: used,
        n_skipped: skipped,
    })
}

/// Most-probable component for each sequence: `argmax_k log pi_k + l_k`,
/// ties to the lower index. Components with zero weight never win unless
/// every component has zero posterior mass.
pub fn assign_clusters(model: &MixtureModel, seqs: &[EventSequence]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(seqs.len());
    for seq in seqs {
        let logliks = model.component_logliks(seq)?;
        let mut best = 0_usize;
        let mut best_score = f64::NEG_INFINITY;
        for (k, (&l, &w)) in logliks.iter().zip(&model.weights).enumerate() {
            let score = if w == 0.0 { f64::NEG_INFINITY } else { w.ln() + l };
            if score > best_score {
                best_score = score;
                best = k;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Clustering purity: each predicted cluster votes for its most common true
/// label, and purity is the fraction of sequences covered by those votes.
/// `1.0` is a perfect (up to relabeling) clustering; `1 / #labels` is
/// chance level for balanced labels.
pub fn purity(assignments: &[usize], labels: &[usize]) -> Result<f64> {
    if assignments.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: assignments.len(),
            right: labels.len(),
        });
    }
    if assignments.is_empty() {
        return Err(Error::InvalidParams(
            "purity of an empty assignment is undefined".into(),
        ));
    }
    let n_clusters = assignments.iter().max().unwrap() + 1;
    let n_labels = labels.iter().max().unwrap() + 1;
    let mut counts = vec![vec![0_usize; n_labels]; n_clusters];
    for (&a, &l) in assignments.iter().zip(labels) {
        counts[a][l] += 1;
    }
    let covered: usize = counts
        .iter()
        .map(|row| row.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(covered as f64 / assignments.len() as f64)
}

/// Benchmark settings. `fit` supplies the shared model shape and learning
/// knobs; its seed is overridden per trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub strategies: Vec<FitStrategy>,
    pub trials: usize,
    /// Fraction of sequences used for training in each trial.
    pub train_fraction: f64,
    pub fit: AsplConfig,
    pub seed: u64,
}

/// One strategy's scores in one trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub method: String,
    pub test_loglik: f64,
    pub purity: f64,
    pub seconds: f64,
    pub n_train: usize,
    pub n_test: usize,
}

/// One strategy's scores aggregated over all trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub method: String,
    pub mean_loglike: f64,
    /// Half-width of the 95% normal-approximation interval on the mean
    /// test log-likelihood; absent with fewer than two trials.
    pub ci95: Option<f64>,
    pub mean_purity: f64,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub trials: Vec<TrialRow>,
    /// Fit reports aligned one-to-one with `trials`, for inspecting the
    /// self-paced schedules behind the scores.
    pub fit_reports: Vec<FitReport>,
}

/// Deterministic train/test split for trial `t`: a seeded shuffle of the
/// sequence indices, split at `round(train_fraction * n)` (keeping at least
/// one sequence on each side).
pub fn split_indices(
    n: usize,
    train_fraction: f64,
    seed: u64,
    trial: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::NotEnoughSequences { needed: 2, got: n });
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParams(format!(
            "train fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let mut rng = stream_rng(seed, TRIAL_STREAM_BASE + trial as u64);
    let mut indices: Vec<usize> = (0..n).collect();
    // Fisher-Yates; rand's slice helper is generic over the trait object and
    // this stays explicit about the draw order the determinism tests pin.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }
    let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let test = indices.split_off(n_train);
    Ok((indices, test))
}

/// Per-trial fit seed: decorrelates trials without touching the split
/// streams.
fn trial_fit_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Run every strategy on `trials` independent train/test splits of the
/// labeled dataset. Within a trial all strategies share the split and the
/// fit seed, so differences are attributable to the strategy alone.
pub fn benchmark(
    sequences: &[EventSequence],
    labels: &[usize],
    cfg: &BenchmarkConfig,
) -> Result<BenchmarkReport> {
    if sequences.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: sequences.len(),
            right: labels.len(),
        });
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidParams("benchmark needs at least one trial".into()));
    }
    if cfg.strategies.is_empty() {
        return Err(Error::InvalidParams("benchmark needs at least one strategy".into()));
    }
    cfg.fit.validate()?;

    let mut trial_rows: Vec<TrialRow> = Vec::new();
    let mut fit_reports: Vec<FitReport> = Vec::new();
    for trial in 0..cfg.trials {
        let (train_idx, test_idx) =
            split_indices(sequences.len(), cfg.train_fraction, cfg.seed, trial)?;
        let train: Vec<EventSequence> =
            train_idx.iter().map(|&i| sequences[i].clone()).collect();
        let test: Vec<EventSequence> = test_idx.iter().map(|&i| sequences[i].clone()).collect();
        let test_labels: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();

        let mut fit_cfg = cfg.fit.clone();
        fit_cfg.seed = trial_fit_seed(cfg.seed, trial);

        for &strategy in &cfg.strategies {
            let start = Instant::now();
            let (model, report) = fit_with_strategy(&train, strategy, &fit_cfg)?;
            let seconds = start.elapsed().as_secs_f64();
            let score = test_loglik(&model, &test)?;
            let assignment = assign_clusters(&model, &test)?;
            let pur = purity(&assignment, &test_labels)?;
            trial_rows.push(TrialRow {
                trial,
                method: strategy.to_string(),
                test_loglik: score.value,
                purity: pur,
                seconds,
                n_train: train.len(),
                n_test: test.len(),
            });
            fit_reports.push(report);
        }
    }

    let mut rows = Vec::with_capacity(cfg.strategies.len());
    for &strategy in &cfg.strategies {
        let name = strategy.to_string();
        let logliks: Vec<f64> = trial_rows
            .iter()
            .filter(|r| r.method == name)
            .map(|r| r.test_loglik)
            .collect();
        let purities: Vec<f64> = trial_rows
            .iter()
            .filter(|r| r.method == name)
            .map(|r| r.purity)
            .collect();
        let seconds: Vec<f64> = trial_rows
            .iter()
            .filter(|r| r.method == name)
            .map(|r| r.seconds)
            .collect();
        let (mean_loglike, ci95) = mean_ci95(&logliks);
        let (mean_purity, _) = mean_ci95(&purities);
        let (mean_seconds, _) = mean_ci95(&seconds);
        rows.push(BenchmarkRow {
            method: name,
            mean_loglike,
            ci95,
            mean_purity,
            mean_seconds,
        });
    }
    Ok(BenchmarkReport {
        rows,
        trials: trial_rows,
        fit_reports,
    })
}

/// Settings for the empirical cost probe.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Generator whose base rates are scaled to control event counts.
    pub base_model: MixtureModel,
    pub n_sequences: usize,
    pub horizon: f64,
    /// Base-rate multipliers, one probe point each; successive doublings
    /// (e.g. `[1, 2, 4]`) make the doubling ratios meaningful.
    pub mu_scales: Vec<f64>,
    /// Timing repetitions per point; medians are reported.
    pub reps: usize,
    pub seed: u64,
}

/// One measured probe point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbePoint {
    /// The quantity being varied (mean events per sequence, component
    /// count, or sequence count).
    pub size: f64,
    pub median_secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexityReport {
    /// Cost against mean events per sequence, at fixed N and K.
    pub event_points: Vec<ProbePoint>,
    /// Consecutive time ratios between event points.
    pub event_ratios: Vec<f64>,
    /// Least-squares slope of log time against log mean events.
    pub event_slope: f64,
    /// Time ratio for doubled component count, at fixed data.
    pub component_ratio: f64,
    /// Time ratio for doubled sequence count, at fixed K and event rate.
    pub sequence_ratio: f64,
}

fn scale_base_rates(model: &MixtureModel, scale: f64) -> MixtureModel {
    let mut scaled = model.clone();
    for comp in &mut scaled.components {
        for mu in &mut comp.mu {
            *mu *= scale;
        }
    }
    scaled
}

/// One fixed-shape unit of learning work: a candidate batch, two
/// model-update/selection alternations, every EM run pinned to exactly
/// three iterations of two ascent steps (negative tolerances disable every
/// early exit). Work is then proportional to the likelihood and gradient
/// evaluations — the quantities whose scaling the probe measures.
fn probe_unit(sequences: &[EventSequence], num_components: usize, decay: f64, seed: u64) -> Result<f64> {
    let mut cfg = AsplConfig::new(num_components, decay);
    cfg.seed = seed;
    cfg.em = crate::learn::EmConfig {
        max_iters: 3,
        tol: -1.0,
        mstep_steps: 2,
        mstep_tol: -1.0,
    };
    let mut rng = stream_rng(seed, TRIAL_STREAM_BASE >> 1);
    let (candidates, _pairs) = crate::augment::make_candidates_with_pairs(
        sequences,
        cfg.augment,
        sequences.len(),
        &mut rng,
    )?;
    let mut model = crate::learn::seeded_init(&candidates, num_components, decay, seed)?;
    let opts = crate::learn::UpdateOptions {
        alpha: cfg.alpha,
        rate_correction: cfg.rate_correction,
        em: cfg.em.clone(),
    };
    let mut flags = vec![false; candidates.len()];
    let start = Instant::now();
    for round in 0..2 {
        model = crate::learn::update_model(&candidates, &[], &flags, &model, &opts)?;
        let state = crate::learn::select_easy(
            &candidates,
            &model,
            cfg.select_fraction,
            round,
            cfg.rate_correction,
        )?;
        flags = state.selected;
    }
    Ok(start.elapsed().as_secs_f64())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

/// One probe configuration: a dataset and a component count to run the
/// work unit against.
struct ProbeCase<'a> {
    sequences: &'a [EventSequence],
    num_components: usize,
}

/// Time every case once per repetition, cycling through the cases within
/// each repetition rather than finishing one case before starting the
/// next. Machine-wide slowdowns (frequency scaling, noisy neighbors) then
/// hit all cases of a repetition about equally and cancel out of the
/// ratios taken between them. Returns per-case times, `[case][rep]`.
fn interleaved_times(cases: &[ProbeCase<'_>], decay: f64, seed: u64, reps: usize) -> Result<Vec<Vec<f64>>> {
    // One untimed pass warms caches and brings the clock up to speed.
    for case in cases {
        probe_unit(case.sequences, case.num_components, decay, seed)?;
    }
    let mut times = vec![Vec::with_capacity(reps); cases.len()];
    for _ in 0..reps {
        for (i, case) in cases.iter().enumerate() {
            times[i].push(probe_unit(case.sequences, case.num_components, decay, seed)?);
        }
    }
    Ok(times)
}

/// Median of the repetition-wise ratios `num[i] / den[i]` — each ratio
/// compares two runs from the same repetition, so drift that is slow
/// against a repetition's length divides out.
fn paired_ratio(num: &[f64], den: &[f64]) -> f64 {
    let mut ratios: Vec<f64> = num.iter().zip(den).map(|(n, d)| n / d).collect();
    median(&mut ratios)
}

/// Measure how the cost of a fixed unit of learning work grows with mean
/// sequence length, component count, and sequence count.
pub fn complexity_probe(cfg: &ProbeConfig) -> Result<ComplexityReport> {
    if cfg.mu_scales.len() < 2 {
        return Err(Error::InvalidParams(
            "the event-count probe needs at least two base-rate scales".into(),
        ));
    }
    if cfg.reps == 0 || cfg.n_sequences < 2 {
        return Err(Error::InvalidParams(
            "probes need at least one repetition and two sequences".into(),
        ));
    }
    cfg.base_model.validate()?;
    let decay = cfg.base_model.components[0].decay;
    let k = cfg.base_model.num_components();

    // Event-count scaling: same sequence count, base rates scaled up.
    let mut scale_data = Vec::with_capacity(cfg.mu_scales.len());
    for (i, &scale) in cfg.mu_scales.iter().enumerate() {
        let sim = SimConfig {
            model: scale_base_rates(&cfg.base_model, scale),
            n_sequences: cfg.n_sequences,
            horizon: cfg.horizon,
            seed: cfg.seed.wrapping_add(i as u64 + 1),
            max_events: 1_000_000,
        };
        scale_data.push(simulate_mixture(&sim)?);
    }

    // Component scaling reruns the unscaled data with twice the
    // components; sequence-count scaling reruns the generator with twice
    // the sequences.
    let base_sim = SimConfig {
        model: cfg.base_model.clone(),
        n_sequences: cfg.n_sequences,
        horizon: cfg.horizon,
        seed: cfg.seed.wrapping_add(101),
        max_events: 1_000_000,
    };
    let base_data = simulate_mixture(&base_sim)?;
    let double_sim = SimConfig {
        n_sequences: 2 * cfg.n_sequences,
        seed: base_sim.seed,
        ..base_sim.clone()
    };
    let double_data = simulate_mixture(&double_sim)?;

    let mut cases: Vec<ProbeCase<'_>> = scale_data
        .iter()
        .map(|d| ProbeCase {
            sequences: &d.sequences,
            num_components: k,
        })
        .collect();
    cases.push(ProbeCase {
        sequences: &base_data.sequences,
        num_components: k,
    });
    cases.push(ProbeCase {
        sequences: &base_data.sequences,
        num_components: 2 * k,
    });
    cases.push(ProbeCase {
        sequences: &double_data.sequences,
        num_components: k,
    });
    let mut times = interleaved_times(&cases, decay, cfg.seed, cfg.reps)?;
    let t_2n = times.pop().unwrap();
    let t_2k = times.pop().unwrap();
    let t_k = times.pop().unwrap();

    // Ratios pair rep i with rep i, so take them before `median` reorders
    // the rep vectors.
    let event_ratios: Vec<f64> = times
        .windows(2)
        .map(|w| paired_ratio(&w[1], &w[0]))
        .collect();
    let mut event_points = Vec::with_capacity(scale_data.len());
    for (data, reps) in scale_data.iter().zip(&mut times) {
        let mean_events = data
            .sequences
            .iter()
            .map(|s| s.len() as f64)
            .sum::<f64>()
            / data.sequences.len() as f64;
        event_points.push(ProbePoint {
            size: mean_events,
            median_secs: median(reps),
        });
    }
    let points: Vec<(f64, f64)> = event_points
        .iter()
        .map(|p| (p.size, p.median_secs))
        .collect();
    let event_slope = loglog_slope(&points);

    Ok(ComplexityReport {
        event_points,
        event_ratios,
        event_slope,
        component_ratio: paired_ratio(&t_2k, &t_k),
        sequence_ratio: paired_ratio(&t_2n, &t_k),
    })
}
