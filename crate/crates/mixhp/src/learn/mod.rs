//! Fitting strategies for mixtures of Hawkes processes.
//!
//! Three entry points share one weighted EM engine:
//!
//! * [`mle_fit`] — plain (weighted) maximum likelihood.
//! * [`spl_fit`] — the classic self-paced curriculum: repeatedly fold the
//!   *easiest* not-yet-used training sequences into the fit.
//! * [`aspl_fit`] — the adversarial variant: synthesize candidate sequences
//!   by pairing training sequences (see `augment`), and repeatedly fold the
//!   *hardest* candidates into the easy set, so the model is forced to
//!   stretch its components over exactly the pairings it currently fails to
//!   explain. Candidates built from two same-cluster draws stay close to a
//!   single component's law, while cross-cluster pairings land between
//!   components; early models centered on a blurry average find the pure
//!   same-cluster candidates *hardest*, so the adversarial rule keeps
//!   sharpening the components.
//!
//! Each outer round of the adversarial loop alternates two steps until the
//! flags stabilize: refit the model on all candidates plus the accumulated
//! easy set, with a per-event bonus `alpha * easiness` for currently
//! flagged candidates, then re-flag the `L` candidates with the smallest
//! smooth easiness. The round's survivors join the easy set and the loop
//! repeats with a fresh candidate batch until the easy set reaches
//! `easy_target_multiple * N` sequences.
//!
//! # Superposed candidates and base rates
//!
//! Merging two independent realizations on a shared clock adds their
//! immigrant streams: a candidate built from two draws of the same
//! component follows that component's law with *doubled base rates* and an
//! unchanged kernel. Scoring such a candidate against the component's own
//! base rates would punish the synthetic doubling itself rather than any
//! real mismatch, so while `rate_correction` is on (the default) the
//! learning loop evaluates superposed sequences with base rates scaled by
//! two. End-to-end concatenation preserves the events-per-unit-time budget,
//! so stitched candidates keep scale one. The correction is internal to the
//! self-paced loops and their easiness scores; [`mle_fit`] always evaluates
//! sequences exactly as the model writes them.

mod em;
mod select;

pub use em::EmConfig;
pub use select::{
    select_easy, select_from_easiness, select_top_from_easiness, selection_budget, SelectionState,
};

use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::augment::{make_candidates_with_pairs, AugmentMethod};
use crate::error::{Error, Result};
use crate::model::{EventSequence, MixtureModel, Origin};
use crate::simulate::stream_rng;
use em::Term;

/// Base RNG stream for candidate pairing; round `m` draws from stream
/// `AUGMENT_STREAM_BASE + m`. Far above any per-sequence simulation stream
/// and distinct from the seeding stream in `em`.
const AUGMENT_STREAM_BASE: u64 = 1 << 41;

/// Base-rate multiplier a sequence is evaluated with inside the self-paced
/// loops (see the module docs).
pub(crate) fn base_scale_for(origin: Origin, rate_correction: bool) -> f64 {
    match origin {
        Origin::Superposed if rate_correction => 2.0,
        _ => 1.0,
    }
}

/// Where a fit starts from.
#[derive(Debug, Clone)]
pub enum ModelInit {
    /// Cluster sequences by their type histograms (deterministically, from
    /// this seed) and start from per-cluster empirical rates.
    Seeded(u64),
    /// Start from an existing model.
    Warm(MixtureModel),
}

/// Settings shared by the self-paced fitting strategies. [`spl_fit`] reads
/// only the model shape (`num_components`, `decay`), the schedule knobs
/// (`easy_target_multiple`, `select_fraction`), `em`, and `seed`; the
/// remaining fields drive the adversarial loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsplConfig {
    pub num_components: usize,
    /// Shared kernel decay rate; fixed, not fitted.
    pub decay: f64,
    /// Weight of the per-event easiness bonus in the model update.
    pub alpha: f64,
    /// How candidate sequences are built from pairs.
    pub augment: AugmentMethod,
    /// Stop once the easy set holds this multiple of the training set.
    pub easy_target_multiple: f64,
    /// Candidates drawn per outer round; defaults to the training-set size.
    pub candidates_per_round: Option<usize>,
    /// Fraction in the selection budget `floor(fraction * sum pi^2 * n)`.
    pub select_fraction: f64,
    /// Cap on model-update/selection alternations per outer round.
    pub inner_max_iters: usize,
    /// Relative objective tolerance that ends a round's alternations.
    pub inner_tol: f64,
    /// Evaluate superposed sequences at doubled base rates (see module docs).
    pub rate_correction: bool,
    pub em: EmConfig,
    pub seed: u64,
}

impl AsplConfig {
    pub fn new(num_components: usize, decay: f64) -> Self {
        Self {
            num_components,
            decay,
            alpha: 10.0,
            augment: AugmentMethod::Superpose,
            easy_target_multiple: 2.0,
            candidates_per_round: None,
            select_fraction: 0.25,
            inner_max_iters: 10,
            inner_tol: 1e-4,
            rate_correction: true,
            em: EmConfig::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_components == 0 {
            return Err(Error::InvalidParams("need at least one component".into()));
        }
        if !(self.decay > 0.0) || !self.decay.is_finite() {
            return Err(Error::InvalidParams(format!(
                "decay must be positive and finite, got {}",
                self.decay
            )));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha must be nonnegative and finite, got {}",
                self.alpha
            )));
        }
        if !(self.easy_target_multiple > 0.0) || !self.easy_target_multiple.is_finite() {
            return Err(Error::InvalidParams(
                "easy_target_multiple must be positive and finite".into(),
            ));
        }
        if !(self.select_fraction > 0.0) || !self.select_fraction.is_finite() {
            return Err(Error::InvalidParams(
                "select_fraction must be positive and finite".into(),
            ));
        }
        if self.inner_max_iters == 0 {
            return Err(Error::InvalidParams(
                "need at least one alternation per round".into(),
            ));
        }
        if !(self.inner_tol >= 0.0) {
            return Err(Error::InvalidParams(
                "inner_tol must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Fitting strategies exposed to callers (and the command line).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitStrategy {
    Mle,
    Spl,
    Aspl,
}

impl std::fmt::Display for FitStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitStrategy::Mle => "mle",
            FitStrategy::Spl => "spl",
            FitStrategy::Aspl => "aspl",
        })
    }
}

impl std::str::FromStr for FitStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mle" => Ok(FitStrategy::Mle),
            "spl" => Ok(FitStrategy::Spl),
            "aspl" => Ok(FitStrategy::Aspl),
            other => Err(format!("unknown strategy `{other}` (expected mle, spl, or aspl)")),
        }
    }
}

/// One outer-loop round, for diagnostics and reporting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Full objective at the end of the round.
    pub objective: f64,
    /// Accumulated easy-set size after this round.
    pub easy_set_size: usize,
    /// Candidates flagged this round.
    pub budget: usize,
    /// Easiness at the selection boundary (absent for plain MLE).
    pub zeta: Option<f64>,
    /// Alternations this round took (EM iterations for MLE rounds).
    pub inner_alternations: usize,
    pub wall_secs: f64,
    /// Original-sequence index pairs behind each candidate, when the round
    /// synthesized candidates.
    pub candidate_pairs: Option<Vec<(usize, usize)>>,
    /// Candidate indices folded into the easy set this round.
    pub selected: Vec<usize>,
}

/// What a fitting strategy did, alongside the model it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub strategy: String,
    /// Easy-set size the self-paced loops ran until, if applicable.
    pub easy_target: Option<usize>,
    pub iterations: Vec<IterationRecord>,
    pub final_model: MixtureModel,
    /// Whether every (inner) loop ended by its own convergence test rather
    /// than an iteration cap.
    pub converged: bool,
    pub total_secs: f64,
}

impl FitReport {
    /// Structural sanity checks on the recorded schedule: finite
    /// objectives, a non-shrinking easy set that grows by exactly the
    /// selection budget each adversarial round, and — when a target was set
    /// — a final easy set that reached it.
    pub fn check_invariants(&self) -> Result<()> {
        let mut prev_size = 0usize;
        for rec in &self.iterations {
            if !rec.objective.is_finite() {
                return Err(Error::NonFiniteObjective(format!(
                    "round {} recorded objective {}",
                    rec.iteration, rec.objective
                )));
            }
            if rec.easy_set_size < prev_size {
                return Err(Error::InvalidParams(format!(
                    "easy set shrank from {prev_size} to {} in round {}",
                    rec.easy_set_size, rec.iteration
                )));
            }
            if self.strategy == "aspl" {
                if rec.budget == 0 || rec.selected.len() != rec.budget {
                    return Err(Error::InvalidParams(format!(
                        "round {} flagged {} candidates against a budget of {}",
                        rec.iteration,
                        rec.selected.len(),
                        rec.budget
                    )));
                }
                if rec.easy_set_size != prev_size + rec.budget {
                    return Err(Error::InvalidParams(format!(
                        "round {} grew the easy set by {} instead of its budget {}",
                        rec.iteration,
                        rec.easy_set_size - prev_size,
                        rec.budget
                    )));
                }
            }
            prev_size = rec.easy_set_size;
        }
        if let Some(target) = self.easy_target {
            if prev_size < target {
                return Err(Error::InvalidParams(format!(
                    "fit stopped with an easy set of {prev_size}, short of its target {target}"
                )));
            }
        }
        Ok(())
    }
}

/// The histogram seeding every strategy starts from, exposed for callers
/// that drive [`update_model`] and [`select_easy`] directly.
pub fn seeded_init(
    sequences: &[EventSequence],
    num_components: usize,
    decay: f64,
    seed: u64,
) -> Result<MixtureModel> {
    let refs: Vec<&EventSequence> = sequences.iter().collect();
    let unit = vec![1.0; sequences.len()];
    em::seeded_init(&refs, &unit, num_components, decay, seed)
}

fn initial_model(
    seqs: &[EventSequence],
    weights: &[f64],
    num_components: usize,
    decay: f64,
    init: &ModelInit,
) -> Result<MixtureModel> {
    match init {
        ModelInit::Warm(model) => {
            model.validate()?;
            if model.num_components() != num_components {
                return Err(Error::InvalidParams(format!(
                    "warm start has {} components, expected {num_components}",
                    model.num_components()
                )));
            }
            if (model.components[0].decay - decay).abs() > 1e-12 {
                return Err(Error::InvalidParams(format!(
                    "warm start decay {} does not match requested decay {decay}",
                    model.components[0].decay
                )));
            }
            Ok(model.clone())
        }
        ModelInit::Seeded(seed) => {
            let refs: Vec<&EventSequence> = seqs.iter().collect();
            em::seeded_init(&refs, weights, num_components, decay, *seed)
        }
    }
}

fn mle_outcome(
    sequences: &[EventSequence],
    weights: &[f64],
    num_components: usize,
    decay: f64,
    init: &ModelInit,
    em_cfg: &EmConfig,
) -> Result<em::EmOutcome> {
    if sequences.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: sequences.len(),
            right: weights.len(),
        });
    }
    if num_components == 0 {
        return Err(Error::InvalidParams("need at least one component".into()));
    }
    for w in weights {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::InvalidParams(format!(
                "sequence weights must be finite and nonnegative, got {w}"
            )));
        }
    }
    let nonzero = weights.iter().filter(|w| **w > 0.0).count();
    if nonzero < num_components {
        return Err(Error::NotEnoughSequences {
            needed: num_components,
            got: nonzero,
        });
    }
    let model = initial_model(sequences, weights, num_components, decay, init)?;
    let terms: Vec<Term> = sequences
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(seq, &w)| Term {
            seq,
            like_weight: w,
            bonus_weight: 0.0,
            base_scale: 1.0,
        })
        .collect();
    em::fit_weighted(&terms, &model, em_cfg)
}

/// Weighted maximum-likelihood fit of a `num_components`-component mixture.
///
/// Maximizes `sum_n weight_n * log p(seq_n)` over mixture weights, base
/// rates, and infectivity, holding `decay` fixed. Sequences are evaluated
/// exactly as written, whatever their origin: a superposed pair of
/// same-component draws will honestly come out with roughly doubled base
/// rates. At least `num_components` sequences must carry positive weight.
pub fn mle_fit(
    sequences: &[EventSequence],
    weights: &[f64],
    num_components: usize,
    decay: f64,
    init: &ModelInit,
    em_cfg: &EmConfig,
) -> Result<MixtureModel> {
    mle_outcome(sequences, weights, num_components, decay, init, em_cfg).map(|o| o.model)
}

/// How one EM run went, for tests and diagnostics.
#[derive(Debug, Clone)]
pub struct EmDiagnostics {
    /// Objective before each iteration's update, ending with the objective
    /// at the returned model; nondecreasing up to a 1e-8 relative slack.
    pub objectives: Vec<f64>,
    pub iterations: usize,
    /// Whether the recorded objectives respected the slack.
    pub monotone: bool,
    pub converged: bool,
}

/// [`mle_fit`] that also reports the optimization trajectory.
pub fn mle_fit_traced(
    sequences: &[EventSequence],
    weights: &[f64],
    num_components: usize,
    decay: f64,
    init: &ModelInit,
    em_cfg: &EmConfig,
) -> Result<(MixtureModel, EmDiagnostics)> {
    let outcome = mle_outcome(sequences, weights, num_components, decay, init, em_cfg)?;
    let diag = EmDiagnostics {
        objectives: outcome.objectives,
        iterations: outcome.iterations,
        monotone: outcome.monotone,
        converged: outcome.converged,
    };
    Ok((outcome.model, diag))
}

/// Per-sequence objective terms for the adversarial model update: every
/// candidate and easy sequence enters the likelihood with unit weight, and
/// flagged non-empty candidates add `alpha / I` on their weight-free
/// smooth-max term — i.e. `alpha` times their easiness.
fn assemble_terms<'a>(
    candidates: &'a [EventSequence],
    easy: &'a [EventSequence],
    selected: &[bool],
    alpha: f64,
    rate_correction: bool,
) -> Vec<Term<'a>> {
    let mut terms = Vec::with_capacity(candidates.len() + easy.len());
    for (cand, &sel) in candidates.iter().zip(selected) {
        let bonus = if sel && !cand.is_empty() {
            alpha / cand.len() as f64
        } else {
            0.0
        };
        terms.push(Term {
            seq: cand,
            like_weight: 1.0,
            bonus_weight: bonus,
            base_scale: base_scale_for(cand.origin, rate_correction),
        });
    }
    for seq in easy {
        terms.push(Term {
            seq,
            like_weight: 1.0,
            bonus_weight: 0.0,
            base_scale: base_scale_for(seq.origin, rate_correction),
        });
    }
    terms
}

/// Options for one adversarial model update.
#[derive(Debug, Clone)]
pub struct UpdateOptions {
    pub alpha: f64,
    pub rate_correction: bool,
    pub em: EmConfig,
}

/// One model update of the adversarial loop: EM from `warm` on all
/// candidates plus the easy set, with flagged candidates' easiness folded
/// into the objective at weight `alpha`. With `alpha = 0` (or nothing
/// flagged) this is exactly a warm-started [`mle_fit`] over
/// `candidates ++ easy`, apart from the base-rate handling of superposed
/// sequences described in the module docs.
pub fn update_model(
    candidates: &[EventSequence],
    easy: &[EventSequence],
    selected: &[bool],
    warm: &MixtureModel,
    opts: &UpdateOptions,
) -> Result<MixtureModel> {
    if candidates.len() != selected.len() {
        return Err(Error::LengthMismatch {
            left: candidates.len(),
            right: selected.len(),
        });
    }
    let terms = assemble_terms(candidates, easy, selected, opts.alpha, opts.rate_correction);
    em::fit_weighted(&terms, warm, &opts.em).map(|o| o.model)
}

/// Value of the full adversarial objective at `model`:
///
/// ```text
/// sum_{n in candidates ++ easy} log p(s_n)
///   + alpha * sum_{flagged n} easiness(s_n)
///   + alpha * zeta * #unflagged
/// ```
///
/// The last term is what makes alternation self-consistent: with `zeta`
/// pinned at the selection boundary, flagging a candidate pays off exactly
/// when its easiness is below `zeta`.
pub fn aspl_objective(
    model: &MixtureModel,
    candidates: &[EventSequence],
    easy: &[EventSequence],
    selected: &[bool],
    alpha: f64,
    zeta: f64,
    rate_correction: bool,
) -> Result<f64> {
    if candidates.len() != selected.len() {
        return Err(Error::LengthMismatch {
            left: candidates.len(),
            right: selected.len(),
        });
    }
    let terms = assemble_terms(candidates, easy, selected, alpha, rate_correction);
    let base = em::objective(model, &terms)?;
    let unselected = selected.iter().filter(|s| !**s).count();
    Ok(base + alpha * zeta * unselected as f64)
}

/// Gradient of [`aspl_objective`] with respect to every component's base
/// rates and infectivity (the `zeta` term is constant in the parameters and
/// the mixture weights are not differentiated — their exact update is
/// closed-form).
#[derive(Debug, Clone)]
pub struct ObjectiveGradient {
    /// `mu[k][c]`: gradient w.r.t. component `k`'s base rate for type `c`.
    pub mu: Vec<Vec<f64>>,
    /// `infectivity[k][c][c']`: gradient w.r.t. component `k`'s `a[c][c']`.
    pub infectivity: Vec<Vec<Vec<f64>>>,
}

pub fn objective_gradient(
    model: &MixtureModel,
    candidates: &[EventSequence],
    easy: &[EventSequence],
    selected: &[bool],
    alpha: f64,
    rate_correction: bool,
) -> Result<ObjectiveGradient> {
    if candidates.len() != selected.len() {
        return Err(Error::LengthMismatch {
            left: candidates.len(),
            right: selected.len(),
        });
    }
    let terms = assemble_terms(candidates, easy, selected, alpha, rate_correction);
    let (mu, infectivity) = em::objective_grad(model, &terms)?;
    Ok(ObjectiveGradient { mu, infectivity })
}

/// Adversarial self-paced fit. See the module docs for the loop structure.
///
/// Returns the fitted model together with a per-round report; the model is
/// also embedded in the report for serialization.
pub fn aspl_fit(
    originals: &[EventSequence],
    cfg: &AsplConfig,
) -> Result<(MixtureModel, FitReport)> {
    cfg.validate()?;
    let n = originals.len();
    if n < 2 {
        return Err(Error::NotEnoughSequences { needed: 2, got: n });
    }
    let start = Instant::now();
    let target = ((cfg.easy_target_multiple * n as f64).ceil() as usize).max(1);
    let per_round = cfg.candidates_per_round.unwrap_or(n).max(1);
    let opts = UpdateOptions {
        alpha: cfg.alpha,
        rate_correction: cfg.rate_correction,
        em: cfg.em.clone(),
    };

    let mut easy: Vec<EventSequence> = Vec::new();
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut model: Option<MixtureModel> = None;
    let mut all_converged = true;
    let mut round = 0usize;

    while easy.len() < target {
        let round_start = Instant::now();
        let mut rng = stream_rng(cfg.seed, AUGMENT_STREAM_BASE + round as u64);
        let (candidates, pairs) =
            make_candidates_with_pairs(originals, cfg.augment, per_round, &mut rng)?;

        if model.is_none() {
            let refs: Vec<&EventSequence> = candidates.iter().collect();
            let unit = vec![1.0; candidates.len()];
            model = Some(em::seeded_init(
                &refs,
                &unit,
                cfg.num_components,
                cfg.decay,
                cfg.seed,
            )?);
        }
        let mut current = model.take().expect("just seeded");

        let mut flags = vec![false; candidates.len()];
        let mut prev_obj: Option<f64> = None;
        let mut last_state: Option<SelectionState> = None;
        let mut alternations = 0usize;
        let mut objective = f64::NAN;
        let mut settled = false;
        for _ in 0..cfg.inner_max_iters {
            alternations += 1;
            current = update_model(&candidates, &easy, &flags, &current, &opts)?;
            let state = select_easy(
                &candidates,
                &current,
                cfg.select_fraction,
                round,
                cfg.rate_correction,
            )?;
            objective = aspl_objective(
                &current,
                &candidates,
                &easy,
                &state.selected,
                cfg.alpha,
                state.zeta,
                cfg.rate_correction,
            )?;
            if !objective.is_finite() {
                return Err(Error::NonFiniteObjective(format!(
                    "round {round} reached objective {objective}"
                )));
            }
            let stable = state.selected == flags;
            flags = state.selected.clone();
            last_state = Some(state);
            if stable {
                settled = true;
                break;
            }
            if let Some(prev) = prev_obj {
                if (objective - prev).abs() <= cfg.inner_tol * prev.abs().max(1.0) {
                    settled = true;
                    break;
                }
            }
            prev_obj = Some(objective);
        }
        all_converged &= settled;

        let state = last_state.expect("at least one alternation ran");
        let mut chosen = Vec::with_capacity(state.budget);
        for (idx, (cand, &flag)) in candidates.iter().zip(&flags).enumerate() {
            if flag {
                chosen.push(idx);
                easy.push(cand.clone());
            }
        }
        info!(
            "adversarial round {round}: flagged {} of {} candidates, easy set {}/{}",
            chosen.len(),
            candidates.len(),
            easy.len(),
            target
        );
        records.push(IterationRecord {
            iteration: round,
            objective,
            easy_set_size: easy.len(),
            budget: state.budget,
            zeta: Some(state.zeta),
            inner_alternations: alternations,
            wall_secs: round_start.elapsed().as_secs_f64(),
            candidate_pairs: Some(pairs),
            selected: chosen,
        });
        model = Some(current);
        round += 1;
        // The budget is at least one, so each round grows the easy set.
        debug_assert!(round <= target, "adversarial loop failed to make progress");
    }

    let final_model = model.expect("a positive target forces at least one round");
    let report = FitReport {
        strategy: "aspl".into(),
        easy_target: Some(target),
        iterations: records,
        final_model: final_model.clone(),
        converged: all_converged,
        total_secs: start.elapsed().as_secs_f64(),
    };
    Ok((final_model, report))
}

/// Classic self-paced fit over the training sequences themselves: start
/// from the histogram seeding, then repeatedly flag the easiest
/// not-yet-used sequences and refit (plain maximum likelihood, warm-started)
/// on everything flagged so far, until `min(easy_target_multiple, 1) * N`
/// sequences are in. Empty sequences sort hardest and so join last.
pub fn spl_fit(
    originals: &[EventSequence],
    cfg: &AsplConfig,
) -> Result<(MixtureModel, FitReport)> {
    cfg.validate()?;
    let n = originals.len();
    if n == 0 {
        return Err(Error::NotEnoughSequences { needed: 1, got: 0 });
    }
    let start = Instant::now();
    let target = ((cfg.easy_target_multiple.min(1.0) * n as f64).ceil() as usize).clamp(1, n);

    let refs: Vec<&EventSequence> = originals.iter().collect();
    let unit = vec![1.0; n];
    let mut model = em::seeded_init(&refs, &unit, cfg.num_components, cfg.decay, cfg.seed)?;

    let mut taken = vec![false; n];
    let mut n_taken = 0usize;
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut all_converged = true;
    let mut round = 0usize;

    while n_taken < target {
        let round_start = Instant::now();
        let remaining: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
        let mut easiness = Vec::with_capacity(remaining.len());
        for &i in &remaining {
            if originals[i].is_empty() {
                easiness.push(f64::NEG_INFINITY);
            } else {
                easiness.push(model.easiness_smooth(&originals[i])?);
            }
        }
        let budget = selection_budget(&model.weights, remaining.len(), cfg.select_fraction);
        let state = select_top_from_easiness(&easiness, budget, round);

        let mut chosen = Vec::with_capacity(state.budget);
        for (local, &flag) in state.selected.iter().enumerate() {
            if flag {
                let global = remaining[local];
                taken[global] = true;
                chosen.push(global);
            }
        }
        chosen.sort_unstable();
        n_taken += chosen.len();

        // Plain maximum likelihood on everything flagged so far — a fresh
        // seeding and fit, not a continuation of the previous round's
        // model. Warm-starting here lets the early, homogeneous rounds
        // park a component at zero weight, and the responsibility updates
        // can never revive a zero-weight component as harder sequences
        // arrive. Refitting from scratch also makes the final round (the
        // whole target set) an ordinary seeded fit.
        let included: Vec<&EventSequence> = (0..n)
            .filter(|&i| taken[i])
            .map(|i| &originals[i])
            .collect();
        let init = em::seeded_init(
            &included,
            &vec![1.0; included.len()],
            cfg.num_components,
            cfg.decay,
            cfg.seed,
        )?;
        let terms: Vec<Term> = (0..n)
            .filter(|&i| taken[i])
            .map(|i| Term {
                seq: &originals[i],
                like_weight: 1.0,
                bonus_weight: 0.0,
                base_scale: 1.0,
            })
            .collect();
        let outcome = em::fit_weighted(&terms, &init, &cfg.em)?;
        all_converged &= outcome.converged;
        model = outcome.model;

        info!(
            "easy-first round {round}: took {} of {} remaining, {}/{} in",
            chosen.len(),
            remaining.len(),
            n_taken,
            target
        );
        records.push(IterationRecord {
            iteration: round,
            objective: outcome.objective,
            easy_set_size: n_taken,
            budget: state.budget,
            zeta: Some(state.zeta),
            inner_alternations: outcome.iterations,
            wall_secs: round_start.elapsed().as_secs_f64(),
            candidate_pairs: None,
            selected: chosen,
        });
        round += 1;
        debug_assert!(round <= n, "easy-first loop failed to make progress");
    }

    let report = FitReport {
        strategy: "spl".into(),
        easy_target: Some(target),
        iterations: records,
        final_model: model.clone(),
        converged: all_converged,
        total_secs: start.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

/// Fit `originals` with the requested strategy under one shared
/// configuration, reporting the schedule uniformly.
pub fn fit_with_strategy(
    originals: &[EventSequence],
    strategy: FitStrategy,
    cfg: &AsplConfig,
) -> Result<(MixtureModel, FitReport)> {
    match strategy {
        FitStrategy::Aspl => aspl_fit(originals, cfg),
        FitStrategy::Spl => spl_fit(originals, cfg),
        FitStrategy::Mle => {
            cfg.validate()?;
            let start = Instant::now();
            let unit = vec![1.0; originals.len()];
            let outcome = mle_outcome(
                originals,
                &unit,
                cfg.num_components,
                cfg.decay,
                &ModelInit::Seeded(cfg.seed),
                &cfg.em,
            )?;
            let report = FitReport {
                strategy: "mle".into(),
                easy_target: None,
                iterations: vec![IterationRecord {
                    iteration: 0,
                    objective: outcome.objective,
                    easy_set_size: 0,
                    budget: 0,
                    zeta: None,
                    inner_alternations: outcome.iterations,
                    wall_secs: start.elapsed().as_secs_f64(),
                    candidate_pairs: None,
                    selected: Vec::new(),
                }],
                final_model: outcome.model.clone(),
                converged: outcome.converged,
                total_secs: start.elapsed().as_secs_f64(),
            };
            Ok((outcome.model, report))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HawkesParams;
    use crate::simulate::{simulate_mixture, SimConfig};

    fn tiny_dataset(seed: u64, n: usize) -> Vec<EventSequence> {
        let comp = HawkesParams::new(vec![0.4, 0.2], vec![vec![0.3, 0.1], vec![0.1, 0.3]], 1.0)
            .unwrap();
        let model = MixtureModel::new(vec![comp], vec![1.0]).unwrap();
        let cfg = SimConfig {
            model,
            n_sequences: n,
            horizon: 8.0,
            seed,
            max_events: 10_000,
        };
        simulate_mixture(&cfg).unwrap().sequences
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [FitStrategy::Mle, FitStrategy::Spl, FitStrategy::Aspl] {
            let parsed: FitStrategy = s.to_string().parse().unwrap();
            assert_eq!(parsed, s);
        }
        assert!("em".parse::<FitStrategy>().is_err());
    }

    #[test]
    fn mle_rejects_mismatched_weights_and_scarce_data() {
        let seqs = tiny_dataset(7, 3);
        let em = EmConfig::default();
        assert!(matches!(
            mle_fit(&seqs, &[1.0, 1.0], 1, 1.0, &ModelInit::Seeded(0), &em),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            mle_fit(&seqs, &[1.0, 0.0, 0.0], 2, 1.0, &ModelInit::Seeded(0), &em),
            Err(Error::NotEnoughSequences { needed: 2, got: 1 })
        ));
        assert!(mle_fit(&seqs, &[1.0, -0.5, 1.0], 1, 1.0, &ModelInit::Seeded(0), &em).is_err());
    }

    #[test]
    fn warm_start_must_match_shape_and_decay() {
        let seqs = tiny_dataset(11, 4);
        let em = EmConfig {
            max_iters: 2,
            ..EmConfig::default()
        };
        let comp =
            HawkesParams::new(vec![0.5, 0.5], vec![vec![0.1, 0.0], vec![0.0, 0.1]], 2.0).unwrap();
        let warm = MixtureModel::new(vec![comp], vec![1.0]).unwrap();
        // Decay 1.0 requested, warm model carries 2.0.
        assert!(mle_fit(&seqs, &[1.0; 4], 1, 1.0, &ModelInit::Warm(warm.clone()), &em).is_err());
        assert!(mle_fit(&seqs, &[1.0; 4], 2, 2.0, &ModelInit::Warm(warm.clone()), &em).is_err());
        assert!(mle_fit(&seqs, &[1.0; 4], 1, 2.0, &ModelInit::Warm(warm), &em).is_ok());
    }

    #[test]
    fn config_validation_catches_bad_knobs() {
        let mut cfg = AsplConfig::new(0, 1.0);
        assert!(cfg.validate().is_err());
        cfg.num_components = 1;
        assert!(cfg.validate().is_ok());
        cfg.decay = -1.0;
        assert!(cfg.validate().is_err());
        cfg.decay = 1.0;
        cfg.select_fraction = 0.0;
        assert!(cfg.validate().is_err());
        cfg.select_fraction = 0.25;
        cfg.inner_max_iters = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn superposed_scale_doubles_only_with_correction_on() {
        assert_eq!(base_scale_for(Origin::Superposed, true), 2.0);
        assert_eq!(base_scale_for(Origin::Superposed, false), 1.0);
        assert_eq!(base_scale_for(Origin::Observed, true), 1.0);
        assert_eq!(base_scale_for(Origin::Stitched, true), 1.0);
    }

    #[test]
    fn report_invariants_catch_bad_schedules() {
        let comp = HawkesParams::new(vec![0.5], vec![vec![0.1]], 1.0).unwrap();
        let model = MixtureModel::new(vec![comp], vec![1.0]).unwrap();
        let mut report = FitReport {
            strategy: "aspl".into(),
            easy_target: Some(4),
            iterations: vec![IterationRecord {
                iteration: 0,
                objective: -3.0,
                easy_set_size: 2,
                budget: 2,
                zeta: Some(-1.0),
                inner_alternations: 3,
                wall_secs: 0.0,
                candidate_pairs: None,
                selected: vec![0, 3],
            }],
            final_model: model,
            converged: true,
            total_secs: 0.0,
        };
        // Easy set stopped short of the target.
        assert!(report.check_invariants().is_err());
        report.iterations.push(IterationRecord {
            iteration: 1,
            objective: -2.5,
            easy_set_size: 4,
            budget: 2,
            zeta: Some(-0.8),
            inner_alternations: 1,
            wall_secs: 0.0,
            candidate_pairs: None,
            selected: vec![1, 2],
        });
        assert!(report.check_invariants().is_ok());
        report.iterations[1].objective = f64::NAN;
        assert!(report.check_invariants().is_err());
        report.iterations[1].objective = -2.5;
        report.iterations[1].easy_set_size = 5;
        assert!(report.check_invariants().is_err());
    }
}
