//! Independent oracles the integration tests check library results against.
//!
//! Everything here is deliberately brute force: numerical quadrature where
//! the library uses closed forms, finite differences where it uses analytic
//! gradients, exhaustive enumeration where it sorts. Slow and simple, so a
//! shared bug with the library code is unlikely.

// Each test target compiles this module separately and uses its own slice
// of the toolkit.
#![allow(dead_code)]

use mixhp::model::{EventSequence, HawkesParams, MixtureModel};
use mixhp::simulate::{simulate_mixture, SimConfig};

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 30)
}

/// Log-likelihood by quadrature: sum the log-intensities at the events and
/// integrate the total intensity numerically, segment by segment between
/// events (the intensity is smooth inside each segment and jumps at event
/// times). Uses only [`HawkesParams::intensity`], which the closed-form
/// log-likelihood never calls.
pub fn loglik_by_quadrature(params: &HawkesParams, seq: &EventSequence, tol: f64) -> f64 {
    let mut event_term = 0.0;
    for ev in &seq.events {
        event_term += params.intensity(seq, ev.time, ev.kind).unwrap().ln();
    }
    let total = |t: f64| -> f64 {
        (0..params.num_types())
            .map(|c| params.intensity(seq, t, c).unwrap())
            .sum()
    };
    let mut cuts = Vec::with_capacity(seq.len() + 2);
    cuts.push(0.0);
    cuts.extend(seq.events.iter().map(|ev| ev.time));
    cuts.push(seq.horizon);
    let mut compensator = 0.0;
    for pair in cuts.windows(2) {
        compensator += adaptive_simpson(&total, pair[0], pair[1], tol / seq.len().max(1) as f64);
    }
    event_term - compensator
}

/// Central-difference gradient of `f` at `x` with a relative step.
pub fn central_difference(f: &mut impl FnMut(f64) -> f64, x: f64, step: f64) -> f64 {
    let h = step * x.abs().max(1.0);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Exhaustively find the cheapest way to flag exactly `budget` of the
/// scores (the subset with the smallest sum). Returns the minimal total and
/// the lexicographically-smallest optimal flag vector, for comparison with
/// the sorting-based selection. Only sensible for small `n`.
pub fn brute_force_selection(easiness: &[f64], budget: usize) -> (f64, Vec<bool>) {
    let n = easiness.len();
    assert!(n <= 20, "exhaustive enumeration is exponential");
    assert!(budget <= n);
    let mut best_cost = f64::INFINITY;
    let mut best_mask: u32 = 0;
    for mask in 0..(1_u32 << n) {
        if mask.count_ones() as usize != budget {
            continue;
        }
        let cost: f64 = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| easiness[i])
            .sum();
        // Strict improvement keeps the first (lexicographically smallest
        // by low index, since low bits enumerate first) optimal mask.
        if cost < best_cost - 1e-12 {
            best_cost = cost;
            best_mask = mask;
        }
    }
    let flags = (0..n).map(|i| best_mask & (1 << i) != 0).collect();
    (best_cost, flags)
}

/// A deterministic single-component generator and a sample from it.
pub fn one_component_dataset(
    mu: Vec<f64>,
    infectivity: Vec<Vec<f64>>,
    decay: f64,
    horizon: f64,
    n: usize,
    seed: u64,
) -> Vec<EventSequence> {
    let params = HawkesParams::new(mu, infectivity, decay).unwrap();
    let model = MixtureModel::new(vec![params], vec![1.0]).unwrap();
    let cfg = SimConfig {
        model,
        n_sequences: n,
        horizon,
        seed,
        max_events: 100_000,
    };
    simulate_mixture(&cfg).unwrap().sequences
}

/// Pseudo-random parameter sets for oracle sweeps: small, strictly positive,
/// subcritical. Deterministic in `seed`.
pub fn random_params(num_types: usize, seed: u64) -> HawkesParams {
    // A tiny xorshift keeps the oracle free of the crate's own RNG stack.
    let mut state = seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1_u64 << 53) as f64
    };
    let mu: Vec<f64> = (0..num_types).map(|_| 0.1 + 0.5 * next()).collect();
    let infectivity: Vec<Vec<f64>> = (0..num_types)
        .map(|_| {
            (0..num_types)
                .map(|_| 0.4 * next() / num_types as f64)
                .collect()
        })
        .collect();
    let decay = 0.5 + 1.5 * next();
    HawkesParams::new(mu, infectivity, decay).unwrap()
}

/// Pseudo-random valid event sequences for oracle sweeps; deterministic in
/// `seed`. Events are spread over `(0, horizon)` with random types.
pub fn random_sequence(num_types: usize, max_events: usize, horizon: f64, seed: u64) -> EventSequence {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1_u64 << 53) as f64
    };
    let n_events = (next() * (max_events + 1) as f64) as usize;
    let mut times: Vec<f64> = (0..n_events).map(|_| next() * horizon * 0.999 + 1e-4).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let events = times
        .into_iter()
        .map(|time| mixhp::model::Event {
            time,
            kind: (next() * num_types as f64) as usize % num_types,
        })
        .collect();
    EventSequence::new(format!("rand-{seed}"), events, horizon, num_types).unwrap()
}
