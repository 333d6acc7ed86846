//! Cross-checks of the closed-form likelihood machinery against
//! independent numerical oracles.

mod common;

use common::{loglik_by_quadrature, random_params, random_sequence};
use mixhp::augment::stitch;
use mixhp::math::logsumexp;
use mixhp::model::{EventSequence, HawkesParams, MixtureModel};
use proptest::prelude::*;

#[test]
fn closed_form_matches_quadrature_across_random_instances() {
    for seed in 0..40_u64 {
        let num_types = 1 + (seed % 3) as usize;
        let params = random_params(num_types, seed + 1);
        let seq = random_sequence(num_types, 10, 4.0 + (seed % 5) as f64, seed + 1000);
        let closed = params.loglik(&seq).unwrap();
        let numeric = loglik_by_quadrature(&params, &seq, 1e-10);
        let rel = (closed - numeric).abs() / closed.abs().max(1.0);
        assert!(
            rel < 1e-6,
            "instance {seed}: closed form {closed} vs quadrature {numeric} (rel {rel:.2e})"
        );
    }
}

#[test]
fn stitched_sequences_still_match_quadrature() {
    for seed in 0..12_u64 {
        let num_types = 1 + (seed % 2) as usize;
        let params = random_params(num_types, seed + 7);
        let a = random_sequence(num_types, 6, 3.0, seed + 100);
        let b = random_sequence(num_types, 6, 4.0, seed + 200);
        let cat = stitch(&a, &b).unwrap();
        let closed = params.loglik(&cat).unwrap();
        let numeric = loglik_by_quadrature(&params, &cat, 1e-10);
        let rel = (closed - numeric).abs() / closed.abs().max(1.0);
        assert!(rel < 1e-6, "instance {seed}: rel {rel:.2e}");
    }
}

#[test]
fn quiet_prefix_adds_exactly_its_compensator() {
    // Stitching an empty stretch in front of a sequence cannot change the
    // event terms (there is nothing earlier to excite them), so the
    // log-likelihood drops by exactly the base-rate mass of the prefix.
    let params = random_params(2, 3);
    let quiet = EventSequence::new("quiet", vec![], 5.0, 2).unwrap();
    let busy = random_sequence(2, 8, 6.0, 4);
    let cat = stitch(&quiet, &busy).unwrap();
    let expected = params.loglik(&busy).unwrap() + params.loglik(&quiet).unwrap();
    let got = params.loglik(&cat).unwrap();
    assert!(
        (got - expected).abs() < 1e-9,
        "quiet prefix: {got} vs {expected}"
    );
}

#[test]
fn mixture_loglik_combines_quadrature_component_scores() {
    let comp_a = random_params(2, 21);
    let mut comp_b = random_params(2, 22);
    comp_b.decay = comp_a.decay; // mixtures share one kernel decay
    let model = MixtureModel::new(vec![comp_a.clone(), comp_b.clone()], vec![0.3, 0.7]).unwrap();
    let seq = random_sequence(2, 9, 5.0, 23);
    let oracle = logsumexp(&[
        0.3_f64.ln() + loglik_by_quadrature(&comp_a, &seq, 1e-10),
        0.7_f64.ln() + loglik_by_quadrature(&comp_b, &seq, 1e-10),
    ]);
    let got = model.loglik(&seq).unwrap();
    assert!(
        (got - oracle).abs() / oracle.abs().max(1.0) < 1e-6,
        "mixture: {got} vs {oracle}"
    );
}

/// Build a small mixture and sequence from raw integers; proptest shrinks
/// over the integers, keeping every generated case valid.
fn arb_mixture_case() -> impl Strategy<Value = (MixtureModel, EventSequence)> {
    (1_usize..4, 1_usize..4, 0_u64..5_000, 1_usize..12).prop_map(
        |(num_components, num_types, seed, max_events)| {
            let mut components: Vec<HawkesParams> = (0..num_components)
                .map(|k| random_params(num_types, seed * 7 + k as u64))
                .collect();
            let shared_decay = components[0].decay;
            for comp in &mut components {
                comp.decay = shared_decay;
            }
            // Unnormalized pseudo-random weights from the seed, normalized.
            let raw: Vec<f64> = (0..num_components)
                .map(|k| 1.0 + ((seed + k as u64) % 9) as f64)
                .collect();
            let total: f64 = raw.iter().sum();
            let weights = raw.into_iter().map(|w| w / total).collect();
            let model = MixtureModel::new(components, weights).unwrap();
            let seq = random_sequence(num_types, max_events, 5.0, seed + 31);
            (model, seq)
        },
    )
}

proptest! {
    /// The hard easiness (best single component) never exceeds the smooth
    /// easiness (log-sum over components), and the two differ by at most
    /// `ln K / I` — the smooth score can only gain the log of the component
    /// count, spread per event.
    #[test]
    fn smooth_easiness_is_sandwiched_above_hard((model, seq) in arb_mixture_case()) {
        prop_assume!(!seq.is_empty());
        let hard = model.easiness_hard(&seq).unwrap();
        let smooth = model.easiness_smooth(&seq).unwrap();
        let gap = (model.num_components() as f64).ln() / seq.len() as f64;
        prop_assert!(smooth >= hard - 1e-12, "smooth {smooth} below hard {hard}");
        prop_assert!(
            smooth <= hard + gap + 1e-12,
            "smooth {smooth} above hard {hard} + {gap}"
        );
    }

    /// Mixture weights scale the likelihood but must not touch easiness:
    /// easiness ranks how well any component explains the data, not how
    /// probable the component is a priori.
    #[test]
    fn easiness_ignores_mixture_weights((model, seq) in arb_mixture_case()) {
        prop_assume!(!seq.is_empty());
        prop_assume!(model.num_components() >= 2);
        let mut skewed = model.clone();
        let k = skewed.num_components();
        skewed.weights = vec![0.0; k];
        skewed.weights[0] = 0.9;
        skewed.weights[k - 1] += 0.1;
        prop_assert!(
            (model.easiness_smooth(&seq).unwrap() - skewed.easiness_smooth(&seq).unwrap()).abs()
                < 1e-12
        );
        prop_assert!(
            (model.easiness_hard(&seq).unwrap() - skewed.easiness_hard(&seq).unwrap()).abs()
                < 1e-12
        );
        // The mixture log-likelihood, by contrast, does move.
        prop_assume!((model.weights[0] - 0.9).abs() > 1e-3);
        let seq_ll = model.loglik(&seq).unwrap();
        let skew_ll = skewed.loglik(&seq).unwrap();
        // Equal only in the degenerate case of identical component scores;
        // allow it, but the values must both be finite.
        prop_assert!(seq_ll.is_finite() && skew_ll.is_finite());
    }
}
