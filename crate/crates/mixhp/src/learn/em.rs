//! Weighted EM engine shared by every fitting strategy in this crate.
//!
//! The engine maximizes objectives of the form
//!
//! ```text
//! J(Theta) = sum_n  like_n  * log sum_k pi_k exp(l_nk)
//!          + sum_n bonus_n * log sum_k      exp(l_nk)
//! ```
//!
//! over mixture weights `pi` and per-component Hawkes parameters, where
//! `l_nk` is the component log-likelihood of sequence `n` (optionally with
//! its base rates scaled, see [`Term::base_scale`]). Plain maximum
//! likelihood is the special case `bonus = 0`; the self-paced objective adds
//! per-sequence bonus weight on the weight-free smooth-max term.
//!
//! Each iteration takes one E-step (responsibilities for both sums via
//! Jensen's inequality), a closed-form update of `pi`, and a partial M-step
//! per component: projected gradient ascent with Armijo backtracking on the
//! responsibility-weighted log-likelihood, clamping the parameters at zero.
//! Any step accepted by the line search improves the surrogate, so the
//! outer objective is nondecreasing up to the 1e-8 slack the monotonicity
//! flag tolerates (generalized EM).
//!
//! Likelihoods and gradients walk the O(I^2) event-pair double loop on every
//! call; nothing is memoized across evaluations. Fits therefore cost
//! O(iterations * K * N * I^2), which is the scaling the complexity probes
//! in `evaluate` assert.

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::{logsumexp, softmax_into};
use crate::model::{EventSequence, HawkesParams, MixtureModel};
use crate::simulate::stream_rng;

/// RNG stream for k-means++ seeding (see `simulate::stream_rng`); far above
/// any sequence index, so dataset streams are never reused.
pub(crate) const INIT_STREAM: u64 = 1 << 40;

/// Knobs for one EM run. `max_iters`/`tol` govern the outer loop;
/// `mstep_steps`/`mstep_tol` bound the projected-gradient ascent inside each
/// M-step (the M-step may stop early once the projected gradient's sup-norm
/// falls below the tolerance).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EmConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub mstep_steps: usize,
    pub mstep_tol: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_iters: 50,
            tol: 1e-6,
            mstep_steps: 12,
            mstep_tol: 1e-7,
        }
    }
}

/// One sequence's role in the objective.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term<'a> {
    pub seq: &'a EventSequence,
    /// Weight on the mixture log-likelihood of this sequence.
    pub like_weight: f64,
    /// Weight on the weight-free smooth-max term of this sequence.
    pub bonus_weight: f64,
    /// Base-rate multiplier used when evaluating this sequence: superposed
    /// sequences follow the component law with doubled base rates, so the
    /// self-paced loop evaluates them at scale 2 (see `learn`).
    pub base_scale: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct EmOutcome {
    pub model: MixtureModel,
    /// Objective at the returned model.
    pub objective: f64,
    /// Objective before each iteration's update, ending with the objective
    /// at the returned model — the nondecreasing sequence EM guarantees.
    pub objectives: Vec<f64>,
    pub iterations: usize,
    /// False if some iteration decreased the objective by more than the
    /// 1e-8-relative slack; a red flag for tests, not an error.
    pub monotone: bool,
    pub converged: bool,
}

/// Log-likelihood of `seq` and its gradient w.r.t. the component's base
/// rates and infectivity, with the base rates scaled by `base_scale`.
///
/// Callers must only evaluate this at points of finite log-likelihood (the
/// EM engine guarantees that by construction); a zero-intensity event would
/// poison the gradient with infinities.
pub(crate) fn loglik_and_grad(
    params: &HawkesParams,
    seq: &EventSequence,
    base_scale: f64,
) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let c = params.num_types();
    let beta = params.decay;
    let mut g_mu = vec![0.0_f64; c];
    let mut g_a = vec![vec![0.0_f64; c]; c];
    let mut excite = vec![0.0_f64; c];
    let mut event_term = 0.0_f64;

    for (i, ev) in seq.events.iter().enumerate() {
        excite.fill(0.0);
        for prev in &seq.events[..i] {
            excite[prev.kind] += beta * (-beta * (ev.time - prev.time)).exp();
        }
        let row = &params.infectivity[ev.kind];
        let lambda = base_scale * params.mu[ev.kind]
            + row.iter().zip(&excite).map(|(a, r)| a * r).sum::<f64>();
        event_term += lambda.ln();
        let inv = 1.0 / lambda;
        g_mu[ev.kind] += base_scale * inv;
        for (ga, r) in g_a[ev.kind].iter_mut().zip(&excite) {
            *ga += r * inv;
        }
    }

    // Compensator: base_scale * T * sum(mu) + sum_{c'} colsum[c'] * D[c'],
    // with D[c'] the summed kernel mass of type-c' events up to the horizon.
    let mut decay_mass = vec![0.0_f64; c];
    for ev in &seq.events {
        decay_mass[ev.kind] += 1.0 - (-beta * (seq.horizon - ev.time)).exp();
    }
    for gm in &mut g_mu {
        *gm -= base_scale * seq.horizon;
    }
    for row in &mut g_a {
        for (ga, d) in row.iter_mut().zip(&decay_mass) {
            *ga -= d;
        }
    }
    let mu_total: f64 = params.mu.iter().sum();
    let mut kernel_mass = 0.0;
    for row in &params.infectivity {
        kernel_mass += row.iter().zip(&decay_mass).map(|(a, d)| a * d).sum::<f64>();
    }
    let loglik = event_term - base_scale * mu_total * seq.horizon - kernel_mass;
    (loglik, g_mu, g_a)
}

/// Objective value at `model` without mutating anything.
pub(crate) fn objective(model: &MixtureModel, terms: &[Term]) -> Result<f64> {
    let k = model.num_components();
    let mut scratch = vec![0.0_f64; k];
    let mut j = 0.0_f64;
    for term in terms {
        for (s, comp) in scratch.iter_mut().zip(&model.components) {
            *s = comp.loglik_scaled(term.seq, term.base_scale)?;
        }
        if term.bonus_weight > 0.0 {
            j += term.bonus_weight * logsumexp(&scratch);
        }
        if term.like_weight > 0.0 {
            for (s, w) in scratch.iter_mut().zip(&model.weights) {
                *s = if *w == 0.0 { f64::NEG_INFINITY } else { w.ln() + *s };
            }
            j += term.like_weight * logsumexp(&scratch);
        }
    }
    Ok(j)
}

/// Gradient of the full objective w.r.t. every component's `(mu, A)`,
/// evaluated by the chain rule through both log-sum-exp terms: component `k`
/// receives each sequence's gradient weighted by
/// `like * gamma_nk + bonus * eta_nk`, where `gamma` are the mixture
/// responsibilities and `eta` the weight-free ones. `pi` is not
/// differentiated here; its exact maximizer is closed-form inside the EM
/// loop.
pub(crate) fn objective_grad(
    model: &MixtureModel,
    terms: &[Term],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>)> {
    let k = model.num_components();
    let c = model.num_types();
    let mut grad_mu = vec![vec![0.0_f64; c]; k];
    let mut grad_a = vec![vec![vec![0.0_f64; c]; c]; k];
    let mut logliks = vec![0.0_f64; k];
    let mut weighted = vec![0.0_f64; k];
    let mut gamma = vec![0.0_f64; k];
    let mut eta = vec![0.0_f64; k];
    for term in terms {
        for (l, comp) in logliks.iter_mut().zip(&model.components) {
            *l = comp.loglik_scaled(term.seq, term.base_scale)?;
        }
        if term.like_weight > 0.0 {
            for ((w, l), out) in model.weights.iter().zip(&logliks).zip(weighted.iter_mut()) {
                *out = if *w == 0.0 { f64::NEG_INFINITY } else { w.ln() + l };
            }
            softmax_into(&weighted, &mut gamma);
        } else {
            gamma.fill(0.0);
        }
        if term.bonus_weight > 0.0 {
            softmax_into(&logliks, &mut eta);
        } else {
            eta.fill(0.0);
        }
        for ki in 0..k {
            let rho = term.like_weight * gamma[ki] + term.bonus_weight * eta[ki];
            if rho == 0.0 {
                continue;
            }
            let (_, g_mu, g_a) = loglik_and_grad(&model.components[ki], term.seq, term.base_scale);
            for (acc, g) in grad_mu[ki].iter_mut().zip(&g_mu) {
                *acc += rho * g;
            }
            for (acc_row, g_row) in grad_a[ki].iter_mut().zip(&g_a) {
                for (acc, g) in acc_row.iter_mut().zip(g_row) {
                    *acc += rho * g;
                }
            }
        }
    }
    Ok((grad_mu, grad_a))
}

/// Responsibility-weighted log-likelihood of one component: the piece of the
/// EM surrogate that the M-step ascends. `rho` entries of zero are skipped
/// so sequences a component is not responsible for cannot poison the sum
/// with `0 * -inf`.
fn q_value(comp: &HawkesParams, terms: &[Term], rho: &[f64]) -> f64 {
    let mut q = 0.0;
    for (term, &r) in terms.iter().zip(rho) {
        if r == 0.0 {
            continue;
        }
        // Terms with positive responsibility have finite likelihood at the
        // current iterate; trial points may still hit -inf, which the line
        // search rejects.
        q += r * comp
            .loglik_scaled(term.seq, term.base_scale)
            .expect("validated terms");
    }
    q
}

fn q_gradient(comp: &HawkesParams, terms: &[Term], rho: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let c = comp.num_types();
    let mut g_mu = vec![0.0_f64; c];
    let mut g_a = vec![vec![0.0_f64; c]; c];
    for (term, &r) in terms.iter().zip(rho) {
        if r == 0.0 {
            continue;
        }
        let (_, sm, sa) = loglik_and_grad(comp, term.seq, term.base_scale);
        for (acc, g) in g_mu.iter_mut().zip(&sm) {
            *acc += r * g;
        }
        for (acc_row, g_row) in g_a.iter_mut().zip(&sa) {
            for (acc, g) in acc_row.iter_mut().zip(g_row) {
                *acc += r * g;
            }
        }
    }
    (g_mu, g_a)
}

/// Sup-norm of the gradient projected onto the nonnegative orthant's
/// feasible directions: coordinates pinned at zero with a negative gradient
/// cannot move and do not count.
fn projected_norm(comp: &HawkesParams, g_mu: &[f64], g_a: &[Vec<f64>]) -> f64 {
    let mut norm = 0.0_f64;
    for (m, g) in comp.mu.iter().zip(g_mu) {
        if *m > 0.0 || *g > 0.0 {
            norm = norm.max(g.abs());
        }
    }
    for (row, g_row) in comp.infectivity.iter().zip(g_a) {
        for (a, g) in row.iter().zip(g_row) {
            if *a > 0.0 || *g > 0.0 {
                norm = norm.max(g.abs());
            }
        }
    }
    norm
}

/// Projected gradient ascent with Armijo backtracking on one component.
/// Returns the step-size memory to seed the next M-step.
fn ascend_component(
    comp: &mut HawkesParams,
    terms: &[Term],
    rho: &[f64],
    cfg: &EmConfig,
    mut step: f64,
) -> f64 {
    if rho.iter().all(|r| *r == 0.0) {
        return step; // nothing is this component's responsibility
    }
    let mut q0 = q_value(comp, terms, rho);
    for _ in 0..cfg.mstep_steps {
        let (g_mu, g_a) = q_gradient(comp, terms, rho);
        if projected_norm(comp, &g_mu, &g_a) <= cfg.mstep_tol {
            break;
        }
        let mut accepted = false;
        while step >= 1e-16 {
            let mut trial = comp.clone();
            for (t, g) in trial.mu.iter_mut().zip(&g_mu) {
                *t = (*t + step * g).max(0.0);
            }
            for (t_row, g_row) in trial.infectivity.iter_mut().zip(&g_a) {
                for (t, g) in t_row.iter_mut().zip(g_row) {
                    *t = (*t + step * g).max(0.0);
                }
            }
            // First-order predicted gain along the projection arc; zero
            // means every direction is blocked by the constraint.
            let mut gain = 0.0;
            for ((t, c0), g) in trial.mu.iter().zip(&comp.mu).zip(&g_mu) {
                gain += g * (t - c0);
            }
            for ((t_row, c_row), g_row) in
                trial.infectivity.iter().zip(&comp.infectivity).zip(&g_a)
            {
                for ((t, c0), g) in t_row.iter().zip(c_row).zip(g_row) {
                    gain += g * (t - c0);
                }
            }
            if gain <= 0.0 {
                break;
            }
            let qt = q_value(&trial, terms, rho);
            if qt.is_finite() && qt >= q0 + 1e-4 * gain {
                *comp = trial;
                q0 = qt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (step * 2.0).min(1e8);
    }
    step
}

/// Run weighted EM from `init`. See the module docs for the objective.
pub(crate) fn fit_weighted(
    terms: &[Term],
    init: &MixtureModel,
    cfg: &EmConfig,
) -> Result<EmOutcome> {
    init.validate()?;
    let k = init.num_components();
    let c = init.num_types();
    for term in terms {
        if term.seq.num_types != c {
            return Err(Error::TypeCountMismatch {
                left: term.seq.num_types,
                right: c,
            });
        }
    }
    let norm: f64 = terms
        .iter()
        .map(|t| t.like_weight + t.bonus_weight)
        .sum();
    if !(norm > 0.0) {
        return Err(Error::InvalidParams(
            "fitting needs positive total weight".into(),
        ));
    }

    let n = terms.len();
    let mut model = init.clone();
    let mut steps = vec![0.1_f64; k];
    let mut logliks = vec![vec![0.0_f64; k]; n];
    let mut gamma = vec![vec![0.0_f64; k]; n];
    let mut eta = vec![vec![0.0_f64; k]; n];
    let mut rho = vec![0.0_f64; n];
    let mut scratch = vec![0.0_f64; k];

    let mut prev_j = f64::NEG_INFINITY;
    let mut trace = Vec::with_capacity(cfg.max_iters + 1);
    let mut monotone = true;
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..cfg.max_iters {
        iterations = it + 1;

        // E-step and objective at the current model.
        let mut j = 0.0_f64;
        for (term, (ll_row, (g_row, e_row))) in terms
            .iter()
            .zip(logliks.iter_mut().zip(gamma.iter_mut().zip(eta.iter_mut())))
        {
            for (l, comp) in ll_row.iter_mut().zip(&model.components) {
                *l = comp.loglik_scaled(term.seq, term.base_scale)?;
            }
            if term.like_weight > 0.0 {
                for ((s, w), l) in scratch.iter_mut().zip(&model.weights).zip(ll_row.iter()) {
                    *s = if *w == 0.0 { f64::NEG_INFINITY } else { w.ln() + l };
                }
                let log_p = logsumexp(&scratch);
                if log_p == f64::NEG_INFINITY {
                    return Err(Error::NonFiniteObjective(format!(
                        "sequence `{}` has zero likelihood under every component",
                        term.seq.id
                    )));
                }
                j += term.like_weight * log_p;
                softmax_into(&scratch, g_row);
            } else {
                g_row.fill(0.0);
            }
            if term.bonus_weight > 0.0 {
                let lse = logsumexp(ll_row);
                if lse == f64::NEG_INFINITY {
                    return Err(Error::NonFiniteObjective(format!(
                        "sequence `{}` has zero likelihood under every component",
                        term.seq.id
                    )));
                }
                j += term.bonus_weight * lse;
                softmax_into(ll_row, e_row);
            } else {
                e_row.fill(0.0);
            }
        }
        if !j.is_finite() {
            return Err(Error::NonFiniteObjective(format!(
                "objective evaluated to {j}"
            )));
        }
        trace.push(j);
        if j < prev_j - 1e-8 * prev_j.abs().max(1.0) {
            monotone = false;
            debug_assert!(monotone, "EM objective decreased: {prev_j} -> {j}");
        }
        if it > 0 && (j - prev_j).abs() <= cfg.tol * prev_j.abs().max(1.0) {
            converged = true;
            break;
        }
        prev_j = j;

        // Exact M-step for the mixture weights.
        let like_total: f64 = terms.iter().map(|t| t.like_weight).sum();
        if like_total > 0.0 {
            for ki in 0..k {
                model.weights[ki] = terms
                    .iter()
                    .zip(&gamma)
                    .map(|(t, g)| t.like_weight * g[ki])
                    .sum::<f64>()
                    / like_total;
            }
        }

        // Partial M-step for each component's (mu, A).
        for ki in 0..k {
            for (r, (term, (g_row, e_row))) in rho
                .iter_mut()
                .zip(terms.iter().zip(gamma.iter().zip(eta.iter())))
            {
                *r = (term.like_weight * g_row[ki] + term.bonus_weight * e_row[ki]) / norm;
            }
            steps[ki] = ascend_component(&mut model.components[ki], terms, &rho, cfg, steps[ki]);
        }
    }

    let final_j = objective(&model, terms)?;
    trace.push(final_j);
    if final_j < prev_j - 1e-8 * prev_j.abs().max(1.0) {
        monotone = false;
    }
    Ok(EmOutcome {
        model,
        objective: final_j,
        objectives: trace,
        iterations,
        monotone,
        converged,
    })
}

/// K-means++-style seeding on per-sequence type-frequency histograms.
///
/// Centers are sampled with the usual distance-squared weighting (scaled by
/// the sequence weights), every sequence joins its nearest center, and each
/// cluster's base rates are set to its members' empirical type rates
/// (events of a type per unit of observed time), floored away from zero so
/// no event starts with zero intensity. Infectivity starts uniform at
/// `0.1 / C` (mildly subcritical) and the mixture weights start uniform.
/// Deterministic given the seed.
pub(crate) fn seeded_init(
    seqs: &[&EventSequence],
    weights: &[f64],
    k: usize,
    decay: f64,
    seed: u64,
) -> Result<MixtureModel> {
    if seqs.is_empty() {
        return Err(Error::NotEnoughSequences { needed: 1, got: 0 });
    }
    let c = seqs[0].num_types;
    let n = seqs.len();
    let mut rng = stream_rng(seed, INIT_STREAM);

    let hists: Vec<Vec<f64>> = seqs
        .iter()
        .map(|s| {
            let mut h = vec![0.0_f64; c];
            for ev in &s.events {
                h[ev.kind] += 1.0;
            }
            let total = s.len().max(1) as f64;
            for x in &mut h {
                *x /= total;
            }
            h
        })
        .collect();

    let dist2 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    };

    let sample_weighted = |ws: &[f64], rng: &mut rand_chacha::ChaCha8Rng| -> usize {
        let total: f64 = ws.iter().sum();
        if total <= 0.0 {
            return rng.random_range(0..ws.len());
        }
        let pick: f64 = rng.random::<f64>() * total;
        let mut cum = 0.0;
        for (i, w) in ws.iter().enumerate() {
            cum += w;
            if pick < cum {
                return i;
            }
        }
        ws.len() - 1
    };

    let mut centers = vec![sample_weighted(weights, &mut rng)];
    while centers.len() < k {
        let scores: Vec<f64> = (0..n)
            .map(|i| {
                let d = centers
                    .iter()
                    .map(|&ci| dist2(&hists[i], &hists[ci]))
                    .fold(f64::INFINITY, f64::min);
                d * weights[i]
            })
            .collect();
        centers.push(sample_weighted(&scores, &mut rng));
    }

    let assignment: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (ci, &center) in centers.iter().enumerate() {
                let d = dist2(&hists[i], &hists[center]);
                if d < best_d {
                    best_d = d;
                    best = ci;
                }
            }
            best
        })
        .collect();

    // Weighted global and per-cluster empirical type rates.
    let mut global_counts = vec![0.0_f64; c];
    let mut global_time = 0.0_f64;
    let mut cluster_counts = vec![vec![0.0_f64; c]; k];
    let mut cluster_time = vec![0.0_f64; k];
    for ((seq, &cluster), &w) in seqs.iter().zip(&assignment).zip(weights) {
        for ev in &seq.events {
            global_counts[ev.kind] += w;
            cluster_counts[cluster][ev.kind] += w;
        }
        global_time += w * seq.horizon;
        cluster_time[cluster] += w * seq.horizon;
    }
    let global_rates: Vec<f64> = global_counts
        .iter()
        .map(|&x| if global_time > 0.0 { x / global_time } else { 0.0 })
        .collect();
    let global_mean = global_rates.iter().sum::<f64>() / c as f64;
    let floor = (0.01 * global_mean).max(1e-8);

    let mut components = Vec::with_capacity(k);
    for ki in 0..k {
        let mu: Vec<f64> = if cluster_time[ki] > 0.0 {
            cluster_counts[ki]
                .iter()
                .map(|&x| (x / cluster_time[ki]).max(floor))
                .collect()
        } else {
            // Empty cluster: fall back to global rates, spread so identical
            // components cannot lock EM into a symmetric fixed point.
            let spread = 0.7 + 0.6 * (ki as f64 + 1.0) / (k as f64 + 1.0);
            global_rates.iter().map(|&x| (x * spread).max(floor)).collect()
        };
        let params = HawkesParams {
            mu,
            infectivity: vec![vec![0.1 / c as f64; c]; c],
            decay,
        };
        params.validate()?;
        components.push(params);
    }
    MixtureModel::new(components, vec![1.0 / k as f64; k])
}
