//! Easy-set selection for the self-paced loops.
//!
//! Given per-candidate easiness scores and a budget `L`, the minimizer of
//! the selection subproblem is winner-take-all: flag exactly the `L`
//! smallest scores (for the adversarial loop) or the `L` largest (for the
//! classic easy-first curriculum), breaking ties toward the lower index.
//! The threshold `zeta` is pinned to the score at the selection boundary,
//! which makes `w_n = 1  <=>  easiness_n <= zeta` hold exactly, modulo
//! boundary ties resolved by index.

use log::warn;

use crate::error::{Error, Result};
use crate::model::{EventSequence, MixtureModel};

/// Outcome of one selection step.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionState {
    /// `selected[n]` is the binary weight of candidate `n`.
    pub selected: Vec<bool>,
    /// The easiness score of each candidate, in candidate order.
    pub easiness: Vec<f64>,
    /// Score at the selection boundary (the last score inside the set).
    pub zeta: f64,
    /// Number of candidates selected.
    pub budget: usize,
    /// Outer-loop iteration this selection belongs to (for reporting).
    pub iteration: usize,
}

/// Number of candidates to flag this round:
/// `floor(fraction * sum_k pi_k^2 * n_candidates)`, clamped to `[1, n]`.
///
/// The `sum pi^2` factor shrinks the budget when the mixture is spread over
/// many components: with many clusters a random pairing rarely lands inside
/// one cluster, so fewer candidates per round should make the cut.
pub fn selection_budget(mix_weights: &[f64], n_candidates: usize, fraction: f64) -> usize {
    let purity: f64 = mix_weights.iter().map(|w| w * w).sum();
    let raw = (fraction * purity * n_candidates as f64).floor() as usize;
    raw.clamp(1, n_candidates.max(1))
}

/// Flag the `budget` smallest scores. Ties at the boundary go to the lower
/// index. `budget` is clamped to the number of finitely-scored candidates
/// (infinite scores mark candidates that must never be selected).
pub fn select_from_easiness(easiness: &[f64], budget: usize, iteration: usize) -> SelectionState {
    rank_and_flag(easiness, budget, iteration, /* smallest_first = */ true)
}

/// Flag the `budget` *largest* scores instead — the classic self-paced
/// (easy-first) rule. Infinite scores still sort last and are only flagged
/// when nothing finite remains.
pub fn select_top_from_easiness(
    easiness: &[f64],
    budget: usize,
    iteration: usize,
) -> SelectionState {
    rank_and_flag(easiness, budget, iteration, /* smallest_first = */ false)
}

fn rank_and_flag(
    easiness: &[f64],
    budget: usize,
    iteration: usize,
    smallest_first: bool,
) -> SelectionState {
    let n = easiness.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let cmp = easiness[a].total_cmp(&easiness[b]);
        let cmp = if smallest_first { cmp } else { cmp.reverse() };
        cmp.then(a.cmp(&b))
    });
    // Never hand out a positively-infinite "smallest" or negatively-infinite
    // "largest": those scores mark unusable candidates.
    let usable = order
        .iter()
        .filter(|&&i| {
            if smallest_first {
                easiness[i] < f64::INFINITY
            } else {
                easiness[i] > f64::NEG_INFINITY
            }
        })
        .count();
    // With nothing usable left (possible only in the easy-first variant once
    // just empty sequences remain) the flags fall back to index order so the
    // caller still makes progress.
    let take = budget.min(if usable > 0 { usable } else { n });
    let mut selected = vec![false; n];
    for &i in order.iter().take(take) {
        selected[i] = true;
    }
    let zeta = if take > 0 {
        easiness[order[take - 1]]
    } else {
        f64::NAN
    };
    SelectionState {
        selected,
        easiness: easiness.to_vec(),
        zeta,
        budget: take,
        iteration,
    }
}

/// Score every candidate under `model` and flag the hardest-to-explain ones.
///
/// Easiness is the smooth per-event score `logsumexp_k l_k / I` (component
/// log-likelihoods only — the mixture weights do not enter), with
/// superposed candidates evaluated at doubled base rates when
/// `rate_correction` is on. Empty candidates have no per-event scale, score
/// `+inf`, and are never selected.
pub fn select_easy(
    candidates: &[EventSequence],
    model: &MixtureModel,
    fraction: f64,
    iteration: usize,
    rate_correction: bool,
) -> Result<SelectionState> {
    if candidates.is_empty() {
        return Err(Error::NotEnoughSequences { needed: 1, got: 0 });
    }
    let mut easiness = Vec::with_capacity(candidates.len());
    let mut n_empty = 0_usize;
    for cand in candidates {
        if cand.is_empty() {
            n_empty += 1;
            easiness.push(f64::INFINITY);
            continue;
        }
        let scale = super::base_scale_for(cand.origin, rate_correction);
        let mut logliks = Vec::with_capacity(model.num_components());
        for comp in &model.components {
            logliks.push(comp.loglik_scaled(cand, scale)?);
        }
        easiness.push(crate::math::logsumexp(&logliks) / cand.len() as f64);
    }
    if n_empty == candidates.len() {
        return Err(Error::InvalidParams(
            "every candidate is empty; nothing can be selected".into(),
        ));
    }
    let budget = selection_budget(&model.weights, candidates.len(), fraction);
    let state = select_from_easiness(&easiness, budget, iteration);
    if state.budget < budget {
        warn!(
            "selection budget {budget} clamped to {} usable candidates",
            state.budget
        );
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_the_single_smallest() {
        let state = select_from_easiness(&[-1.0, -5.0, -3.0], 1, 0);
        assert_eq!(state.selected, vec![false, true, false]);
        assert_eq!(state.zeta, -5.0);
        assert_eq!(state.budget, 1);
    }

    #[test]
    fn boundary_ties_go_to_the_lower_index() {
        let state = select_from_easiness(&[-2.0, -2.0, -2.0, -1.0], 2, 0);
        assert_eq!(state.selected, vec![true, true, false, false]);
        assert_eq!(state.zeta, -2.0);
    }

    #[test]
    fn selected_iff_at_most_zeta_up_to_boundary_ties() {
        let scores = [0.3, -0.7, 0.1, -0.2, 0.9, -0.4];
        let state = select_from_easiness(&scores, 3, 0);
        for (i, &s) in scores.iter().enumerate() {
            if s < state.zeta {
                assert!(state.selected[i]);
            }
            if s > state.zeta {
                assert!(!state.selected[i]);
            }
        }
        assert_eq!(state.selected.iter().filter(|&&x| x).count(), 3);
    }

    #[test]
    fn infinite_scores_are_never_flagged() {
        let state = select_from_easiness(&[f64::INFINITY, -1.0, f64::INFINITY], 3, 0);
        assert_eq!(state.selected, vec![false, true, false]);
        assert_eq!(state.budget, 1);
    }

    #[test]
    fn top_selection_reverses_the_order() {
        let state = select_top_from_easiness(&[-1.0, -5.0, -3.0], 1, 0);
        assert_eq!(state.selected, vec![true, false, false]);
        assert_eq!(state.zeta, -1.0);
    }

    #[test]
    fn budget_formula_matches_hand_value() {
        // Uniform two-component mixture: sum pi^2 = 1/2, so a quarter of
        // 100 candidates scaled by 1/2 gives 12.
        assert_eq!(selection_budget(&[0.5, 0.5], 100, 0.25), 12);
        // Single component: plain floor of the fraction.
        assert_eq!(selection_budget(&[1.0], 100, 0.25), 25);
        // Clamped up to one...
        assert_eq!(selection_budget(&[0.5, 0.5], 2, 0.25), 1);
        // ...and never above the candidate count.
        assert_eq!(selection_budget(&[1.0], 3, 2.0), 3);
    }
}
