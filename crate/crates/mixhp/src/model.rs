//! Multivariate Hawkes processes with exponential kernels, and finite
//! mixtures of them.
//!
//! A process over event types `c = 0..C-1` on a window `[0, T]` has
//! conditional intensity
//!
//! ```text
//! lambda_c(t) = mu_c + sum_{i: t_i < t} a[c][c_i] * beta * exp(-beta (t - t_i))
//! ```
//!
//! where `mu_c >= 0` are base rates, `a[c][c']` is the nonnegative
//! infectivity of type `c'` events on type `c`, and `beta > 0` is a decay
//! rate shared by all type pairs. Each kernel integrates to `a[c][c']`, so
//! the infectivity entry is the expected number of direct type-`c` offspring
//! of one type-`c'` event.
//!
//! Because the kernel is exponential the compensator has a closed form, and
//! the exact log-likelihood of a sequence `(t_i, c_i)` is
//!
//! ```text
//! log L = sum_i log lambda_{c_i}(t_i)
//!         - T * sum_c mu_c
//!         - sum_i (sum_c a[c][c_i]) * (1 - exp(-beta (T - t_i)))
//! ```
//!
//! The event term is evaluated with a direct O(I^2) double loop over event
//! pairs; sequences in this crate's domain are short, and the quadratic loop
//! is the reference the complexity probes in `evaluate` assume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{logsumexp, spectral_radius};

/// How a sequence came to exist. Augmented sequences remember which
/// construction produced them because the two constructions yield processes
/// with different base-rate scales (see `augment`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Recorded or simulated directly.
    Observed,
    /// Merge of two sequences onto a shared clock.
    Superposed,
    /// Concatenation of two sequences end to end.
    Stitched,
}

/// A single timestamped, typed event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: usize,
}

/// A finite event sequence observed on `[0, horizon]`.
///
/// Invariants (enforced by [`EventSequence::new`] and checked by
/// [`EventSequence::validate`]): times are finite, strictly increasing, and
/// lie in `(0, horizon]`; every `kind` is below `num_types`. The empty
/// sequence is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSequence {
    pub id: String,
    pub events: Vec<Event>,
    pub horizon: f64,
    pub num_types: usize,
    pub origin: Origin,
}

impl EventSequence {
    pub fn new(
        id: impl Into<String>,
        events: Vec<Event>,
        horizon: f64,
        num_types: usize,
    ) -> Result<Self> {
        Self::with_origin(id, events, horizon, num_types, Origin::Observed)
    }

    pub fn with_origin(
        id: impl Into<String>,
        events: Vec<Event>,
        horizon: f64,
        num_types: usize,
        origin: Origin,
    ) -> Result<Self> {
        let seq = Self {
            id: id.into(),
            events,
            horizon,
            num_types,
            origin,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidSequence {
                id: self.id.clone(),
                reason,
            })
        };
        if self.num_types == 0 {
            return fail("num_types must be at least 1".into());
        }
        if !self.horizon.is_finite() || self.horizon < 0.0 {
            return fail(format!("horizon {} is not a finite nonnegative number", self.horizon));
        }
        let mut prev = 0.0_f64;
        for (i, ev) in self.events.iter().enumerate() {
            if !ev.time.is_finite() {
                return fail(format!("event {i} has non-finite time"));
            }
            if ev.time <= 0.0 {
                return fail(format!("event {i} at t = {} is not strictly positive", ev.time));
            }
            if i > 0 && ev.time <= prev {
                return fail(format!(
                    "event {i} at t = {} does not come strictly after its predecessor (t = {prev})",
                    ev.time
                ));
            }
            if ev.time > self.horizon {
                return fail(format!(
                    "event {i} at t = {} lies beyond the horizon {}",
                    ev.time, self.horizon
                ));
            }
            if ev.kind >= self.num_types {
                return fail(format!(
                    "event {i} has type {} but the sequence has {} types",
                    ev.kind, self.num_types
                ));
            }
            prev = ev.time;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Parameters of one multivariate Hawkes process: base rates `mu`, the
/// infectivity matrix (row = receiving type, column = source type), and the
/// shared kernel decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HawkesParams {
    pub mu: Vec<f64>,
    pub infectivity: Vec<Vec<f64>>,
    pub decay: f64,
}

impl HawkesParams {
    pub fn new(mu: Vec<f64>, infectivity: Vec<Vec<f64>>, decay: f64) -> Result<Self> {
        let params = Self {
            mu,
            infectivity,
            decay,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.is_empty() {
            return Err(Error::InvalidParams("mu must be nonempty".into()));
        }
        if self.mu.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidParams(
                "base rates must be finite and nonnegative".into(),
            ));
        }
        let c = self.mu.len();
        if self.infectivity.len() != c
            || self.infectivity.iter().any(|row| row.len() != c)
        {
            return Err(Error::InvalidParams(format!(
                "infectivity must be a {c}x{c} matrix"
            )));
        }
        if self
            .infectivity
            .iter()
            .flatten()
            .any(|a| !a.is_finite() || *a < 0.0)
        {
            return Err(Error::InvalidParams(
                "infectivity entries must be finite and nonnegative".into(),
            ));
        }
        if !self.decay.is_finite() || self.decay <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "decay must be finite and positive, got {}",
                self.decay
            )));
        }
        Ok(())
    }

    pub fn num_types(&self) -> usize {
        self.mu.len()
    }

    /// Spectral radius of the infectivity matrix. The process is stationary
    /// (event cascades die out) exactly when this is below one; callers that
    /// simulate haywire parameter sets are protected by the simulator's
    /// event cap rather than by a hard rejection here.
    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.infectivity)
    }

    pub fn is_stationary(&self) -> bool {
        self.spectral_radius() < 1.0
    }

    /// Conditional intensity `lambda_kind(t)` given the events of `seq`
    /// strictly before `t`. An event exactly at `t` does not contribute,
    /// matching the likelihood convention that the intensity at an event
    /// time is determined by the strict past.
    pub fn intensity(&self, seq: &EventSequence, t: f64, kind: usize) -> Result<f64> {
        if kind >= self.num_types() {
            return Err(Error::KindOutOfRange {
                kind,
                num_types: self.num_types(),
            });
        }
        if seq.num_types != self.num_types() {
            return Err(Error::TypeCountMismatch {
                left: seq.num_types,
                right: self.num_types(),
            });
        }
        if !t.is_finite() || t < 0.0 || t > seq.horizon {
            return Err(Error::TimeOutOfWindow {
                t,
                horizon: seq.horizon,
            });
        }
        let row = &self.infectivity[kind];
        let mut lambda = self.mu[kind];
        for ev in &seq.events {
            if ev.time >= t {
                break;
            }
            lambda += row[ev.kind] * self.decay * (-self.decay * (t - ev.time)).exp();
        }
        Ok(lambda)
    }

    /// Exact log-likelihood of `seq` under this process. Events with zero
    /// intensity make the result `-inf`; use [`HawkesParams::loglik_strict`]
    /// to turn that case into an error instead.
    pub fn loglik(&self, seq: &EventSequence) -> Result<f64> {
        self.loglik_scaled(seq, 1.0)
    }

    /// Like [`HawkesParams::loglik`], but fails with
    /// [`Error::SingularLikelihood`] when some event has zero intensity.
    pub fn loglik_strict(&self, seq: &EventSequence) -> Result<f64> {
        if seq.num_types != self.num_types() {
            return Err(Error::TypeCountMismatch {
                left: seq.num_types,
                right: self.num_types(),
            });
        }
        for (i, ev) in seq.events.iter().enumerate() {
            if self.intensity(seq, ev.time, ev.kind)? == 0.0 {
                return Err(Error::SingularLikelihood {
                    index: i,
                    t: ev.time,
                });
            }
        }
        self.loglik(seq)
    }

    /// Log-likelihood with the base rates scaled by `base_scale`. The
    /// learning loop uses this to evaluate superposed sequences, whose
    /// ground-truth law doubles the base rates while keeping the
    /// infectivity; everything else calls it with scale 1.
    pub(crate) fn loglik_scaled(&self, seq: &EventSequence, base_scale: f64) -> Result<f64> {
        if seq.num_types != self.num_types() {
            return Err(Error::TypeCountMismatch {
                left: seq.num_types,
                right: self.num_types(),
            });
        }
        let beta = self.decay;
        // Column sums of the infectivity: total expected offspring of one
        // source event, used by the compensator.
        let c = self.num_types();
        let mut colsum = vec![0.0_f64; c];
        for row in &self.infectivity {
            for (s, a) in colsum.iter_mut().zip(row) {
                *s += a;
            }
        }

        let mut event_term = 0.0_f64;
        for (i, ev) in seq.events.iter().enumerate() {
            let row = &self.infectivity[ev.kind];
            let mut lambda = base_scale * self.mu[ev.kind];
            for prev in &seq.events[..i] {
                lambda += row[prev.kind] * beta * (-beta * (ev.time - prev.time)).exp();
            }
            event_term += lambda.ln();
            if event_term == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
        }

        let mu_total: f64 = self.mu.iter().sum();
        let mut compensator = base_scale * mu_total * seq.horizon;
        for ev in &seq.events {
            compensator += colsum[ev.kind] * (1.0 - (-beta * (seq.horizon - ev.time)).exp());
        }
        Ok(event_term - compensator)
    }
}

/// A finite mixture of Hawkes processes sharing the type set and kernel
/// decay: a sequence is drawn by sampling component `k` with probability
/// `weights[k]` and then simulating that component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub components: Vec<HawkesParams>,
    pub weights: Vec<f64>,
}

impl MixtureModel {
    pub fn new(components: Vec<HawkesParams>, weights: Vec<f64>) -> Result<Self> {
        let model = Self {
            components,
            weights,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidParams("mixture needs at least one component".into()));
        }
        if self.weights.len() != self.components.len() {
            return Err(Error::InvalidParams(format!(
                "{} weights for {} components",
                self.weights.len(),
                self.components.len()
            )));
        }
        for params in &self.components {
            params.validate()?;
        }
        let c = self.components[0].num_types();
        let beta = self.components[0].decay;
        for params in &self.components[1..] {
            if params.num_types() != c {
                return Err(Error::InvalidParams(
                    "components must share one type set".into(),
                ));
            }
            if params.decay != beta {
                return Err(Error::InvalidParams(
                    "components must share one kernel decay".into(),
                ));
            }
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParams(
                "mixture weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidParams(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn num_types(&self) -> usize {
        self.components[0].num_types()
    }

    pub fn decay(&self) -> f64 {
        self.components[0].decay
    }

    /// Per-component log-likelihoods of `seq`.
    pub fn component_logliks(&self, seq: &EventSequence) -> Result<Vec<f64>> {
        self.components.iter().map(|p| p.loglik(seq)).collect()
    }

    /// Mixture log-likelihood `log sum_k weights[k] * L_k(seq)`, evaluated in
    /// log space. Components with zero weight drop out exactly; the result
    /// is `-inf` only when every positive-weight component assigns zero
    /// likelihood.
    pub fn loglik(&self, seq: &EventSequence) -> Result<f64> {
        let logliks = self.component_logliks(seq)?;
        let terms: Vec<f64> = logliks
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| if *w == 0.0 { f64::NEG_INFINITY } else { w.ln() + l })
            .collect();
        Ok(logsumexp(&terms))
    }

    /// Best single-component log-likelihood per event:
    /// `max_k (1/I) log L_k(seq)`. Undefined (an error) for empty sequences.
    pub fn easiness_hard(&self, seq: &EventSequence) -> Result<f64> {
        if seq.is_empty() {
            return Err(Error::EmptySequence);
        }
        let logliks = self.component_logliks(seq)?;
        let best = logliks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(best / seq.len() as f64)
    }

    /// Smooth-max relaxation of [`MixtureModel::easiness_hard`]:
    /// `(1/I) log sum_k L_k(seq)`. Ignores the mixture weights, so it upper
    /// bounds the hard variant by at most `log(K) / I`.
    pub fn easiness_smooth(&self, seq: &EventSequence) -> Result<f64> {
        if seq.is_empty() {
            return Err(Error::EmptySequence);
        }
        let logliks = self.component_logliks(seq)?;
        Ok(logsumexp(&logliks) / seq.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    fn seq(events: &[(f64, usize)], horizon: f64, num_types: usize) -> EventSequence {
        EventSequence::new(
            "s",
            events
                .iter()
                .map(|&(time, kind)| Event { time, kind })
                .collect(),
            horizon,
            num_types,
        )
        .unwrap()
    }

    #[test]
    fn sequence_validation_rejects_bad_inputs() {
        // Non-increasing times.
        assert!(EventSequence::new(
            "x",
            vec![Event { time: 1.0, kind: 0 }, Event { time: 1.0, kind: 0 }],
            5.0,
            1
        )
        .is_err());
        // Event at t = 0.
        assert!(EventSequence::new("x", vec![Event { time: 0.0, kind: 0 }], 5.0, 1).is_err());
        // Event beyond the horizon.
        assert!(EventSequence::new("x", vec![Event { time: 6.0, kind: 0 }], 5.0, 1).is_err());
        // Type out of range.
        assert!(EventSequence::new("x", vec![Event { time: 1.0, kind: 2 }], 5.0, 2).is_err());
        // Empty sequence is fine, including with a zero-length window.
        assert!(EventSequence::new("x", vec![], 0.0, 3).is_ok());
    }

    #[test]
    fn params_validation_rejects_bad_inputs() {
        assert!(HawkesParams::new(vec![0.5], vec![vec![0.2]], 1.0).is_ok());
        assert!(HawkesParams::new(vec![-0.5], vec![vec![0.2]], 1.0).is_err());
        assert!(HawkesParams::new(vec![0.5], vec![vec![0.2, 0.1]], 1.0).is_err());
        assert!(HawkesParams::new(vec![0.5], vec![vec![-0.2]], 1.0).is_err());
        assert!(HawkesParams::new(vec![0.5], vec![vec![0.2]], 0.0).is_err());
    }

    #[test]
    fn intensity_with_no_history_is_the_base_rate() {
        let p = HawkesParams::new(vec![0.7, 0.2], vec![vec![0.0; 2]; 2], 2.0).unwrap();
        let s = seq(&[], 10.0, 2);
        assert_eq!(p.intensity(&s, 3.0, 0).unwrap(), 0.7);
        assert_eq!(p.intensity(&s, 3.0, 1).unwrap(), 0.2);
    }

    #[test]
    fn intensity_single_excitation_hand_value() {
        // mu = 0.5, a = 0.2, beta = 1, one event at t = 1, same type:
        // lambda(2) = 0.5 + 0.2 * 1 * exp(-1).
        let p = HawkesParams::new(vec![0.5], vec![vec![0.2]], 1.0).unwrap();
        let s = seq(&[(1.0, 0)], 10.0, 1);
        let expect = 0.5 + 0.2 * (-1.0_f64).exp();
        assert!(approx_eq(p.intensity(&s, 2.0, 0).unwrap(), expect, 1e-15));
        // The event at exactly t = 1 does not see itself.
        assert_eq!(p.intensity(&s, 1.0, 0).unwrap(), 0.5);
    }

    #[test]
    fn intensity_domain_errors() {
        let p = HawkesParams::new(vec![0.5], vec![vec![0.2]], 1.0).unwrap();
        let s = seq(&[], 10.0, 1);
        assert!(matches!(
            p.intensity(&s, 3.0, 1),
            Err(Error::KindOutOfRange { .. })
        ));
        assert!(matches!(
            p.intensity(&s, -0.1, 0),
            Err(Error::TimeOutOfWindow { .. })
        ));
        assert!(matches!(
            p.intensity(&s, 10.5, 0),
            Err(Error::TimeOutOfWindow { .. })
        ));
    }

    #[test]
    fn loglik_of_empty_sequence_is_minus_compensator() {
        // No events: log L = -T * sum(mu) = -10 for mu sums of 1 on T = 10.
        let p = HawkesParams::new(vec![0.6, 0.4], vec![vec![0.3; 2]; 2], 1.5).unwrap();
        let s = seq(&[], 10.0, 2);
        assert!(approx_eq(p.loglik(&s).unwrap(), -10.0, 1e-15));
    }

    #[test]
    fn loglik_single_event_no_excitation() {
        // A = 0: log L = ln(mu_c1) - T * sum(mu).
        let p = HawkesParams::new(vec![0.5, 0.25], vec![vec![0.0; 2]; 2], 1.0).unwrap();
        let s = seq(&[(2.0, 1)], 8.0, 2);
        let expect = 0.25_f64.ln() - 8.0 * 0.75;
        assert!(approx_eq(p.loglik(&s).unwrap(), expect, 1e-15));
    }

    #[test]
    fn loglik_two_event_hand_value() {
        // mu = (0.5), a = 0.4, beta = 2, events at 1 and 2, T = 3.
        // lambda(1) = 0.5
        // lambda(2) = 0.5 + 0.4 * 2 * exp(-2)
        // compensator = 0.5 * 3 + 0.4 * (1 - exp(-4)) + 0.4 * (1 - exp(-2))
        let p = HawkesParams::new(vec![0.5], vec![vec![0.4]], 2.0).unwrap();
        let s = seq(&[(1.0, 0), (2.0, 0)], 3.0, 1);
        let lambda2 = 0.5 + 0.8 * (-2.0_f64).exp();
        let comp = 1.5 + 0.4 * (1.0 - (-4.0_f64).exp()) + 0.4 * (1.0 - (-2.0_f64).exp());
        let expect = 0.5_f64.ln() + lambda2.ln() - comp;
        assert!(approx_eq(p.loglik(&s).unwrap(), expect, 1e-14));
    }

    #[test]
    fn zero_intensity_event_gives_neg_infinity_or_strict_error() {
        // mu_1 = 0 and nothing excites type 1, but an event of type 1 occurs.
        let p = HawkesParams::new(vec![0.5, 0.0], vec![vec![0.0; 2]; 2], 1.0).unwrap();
        let s = seq(&[(1.0, 1)], 4.0, 2);
        assert_eq!(p.loglik(&s).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(
            p.loglik_strict(&s),
            Err(Error::SingularLikelihood { index: 0, .. })
        ));
    }

    #[test]
    fn mixture_with_one_component_matches_component() {
        let p = HawkesParams::new(vec![0.5], vec![vec![0.3]], 1.0).unwrap();
        let m = MixtureModel::new(vec![p.clone()], vec![1.0]).unwrap();
        let s = seq(&[(0.5, 0), (2.0, 0)], 4.0, 1);
        assert!(approx_eq(m.loglik(&s).unwrap(), p.loglik(&s).unwrap(), 1e-15));
    }

    #[test]
    fn mixture_of_identical_components_matches_component() {
        let p = HawkesParams::new(vec![0.5], vec![vec![0.3]], 1.0).unwrap();
        let m = MixtureModel::new(vec![p.clone(), p.clone()], vec![0.5, 0.5]).unwrap();
        let s = seq(&[(0.5, 0), (2.0, 0)], 4.0, 1);
        // 0.5 L + 0.5 L = L exactly.
        assert!(approx_eq(m.loglik(&s).unwrap(), p.loglik(&s).unwrap(), 1e-12));
    }

    #[test]
    fn zero_weight_component_drops_out() {
        let good = HawkesParams::new(vec![0.5], vec![vec![0.3]], 1.0).unwrap();
        // The dead component would give -inf on any nonempty sequence.
        let dead = HawkesParams::new(vec![0.0], vec![vec![0.0]], 1.0).unwrap();
        let m = MixtureModel::new(vec![good.clone(), dead], vec![1.0, 0.0]).unwrap();
        let s = seq(&[(1.0, 0)], 4.0, 1);
        assert!(approx_eq(m.loglik(&s).unwrap(), good.loglik(&s).unwrap(), 1e-15));
    }

    #[test]
    fn easiness_hard_single_component_is_per_event_loglik() {
        let p = HawkesParams::new(vec![0.5], vec![vec![0.3]], 1.0).unwrap();
        let m = MixtureModel::new(vec![p.clone()], vec![1.0]).unwrap();
        let s = seq(&[(0.5, 0), (1.5, 0), (2.5, 0)], 4.0, 1);
        let expect = p.loglik(&s).unwrap() / 3.0;
        assert!(approx_eq(m.easiness_hard(&s).unwrap(), expect, 1e-15));
    }

    #[test]
    fn easiness_is_invariant_to_component_order() {
        let p1 = HawkesParams::new(vec![0.5, 0.1], vec![vec![0.3; 2]; 2], 1.0).unwrap();
        let p2 = HawkesParams::new(vec![0.1, 0.6], vec![vec![0.1; 2]; 2], 1.0).unwrap();
        let m12 = MixtureModel::new(vec![p1.clone(), p2.clone()], vec![0.3, 0.7]).unwrap();
        let m21 = MixtureModel::new(vec![p2, p1], vec![0.7, 0.3]).unwrap();
        let s = seq(&[(1.0, 0), (2.0, 1)], 5.0, 2);
        assert_eq!(m12.easiness_hard(&s).unwrap(), m21.easiness_hard(&s).unwrap());
        assert!(approx_eq(
            m12.easiness_smooth(&s).unwrap(),
            m21.easiness_smooth(&s).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn easiness_smooth_equal_components_adds_log_k_over_i() {
        let p = HawkesParams::new(vec![0.5], vec![vec![0.3]], 1.0).unwrap();
        let m = MixtureModel::new(vec![p; 3], vec![1.0 / 3.0; 3]).unwrap();
        let s = seq(&[(0.5, 0), (1.5, 0)], 4.0, 1);
        let hard = m.easiness_hard(&s).unwrap();
        let smooth = m.easiness_smooth(&s).unwrap();
        assert!(approx_eq(smooth, hard + 3.0_f64.ln() / 2.0, 1e-12));
    }

    #[test]
    fn easiness_of_empty_sequence_is_an_error() {
        let p = HawkesParams::new(vec![0.5], vec![vec![0.3]], 1.0).unwrap();
        let m = MixtureModel::new(vec![p], vec![1.0]).unwrap();
        let s = seq(&[], 4.0, 1);
        assert!(matches!(m.easiness_hard(&s), Err(Error::EmptySequence)));
        assert!(matches!(m.easiness_smooth(&s), Err(Error::EmptySequence)));
    }

    #[test]
    fn repeating_a_pattern_without_interaction_keeps_easiness_fixed() {
        // With A = 0 events do not interact, so tiling the same pattern r
        // times over an r-times-longer window multiplies both the
        // log-likelihood and the event count by r.
        let p = HawkesParams::new(vec![0.4, 0.3], vec![vec![0.0; 2]; 2], 1.0).unwrap();
        let m = MixtureModel::new(vec![p], vec![1.0]).unwrap();
        let pattern = [(0.5, 0), (1.25, 1), (1.75, 0)];
        let base_t = 2.0;
        let mut values = Vec::new();
        for r in 1..=4 {
            let mut events = Vec::new();
            for rep in 0..r {
                for &(t, kind) in &pattern {
                    events.push((t + rep as f64 * base_t, kind));
                }
            }
            let s = seq(&events, base_t * r as f64, 2);
            values.push(m.easiness_hard(&s).unwrap());
        }
        for v in &values[1..] {
            assert!(approx_eq(*v, values[0], 1e-12));
        }
    }

    #[test]
    fn mixture_validation_rejects_mismatched_components() {
        let p1 = HawkesParams::new(vec![0.5], vec![vec![0.3]], 1.0).unwrap();
        let p2 = HawkesParams::new(vec![0.5, 0.1], vec![vec![0.1; 2]; 2], 1.0).unwrap();
        let p3 = HawkesParams::new(vec![0.5], vec![vec![0.3]], 2.0).unwrap();
        assert!(MixtureModel::new(vec![p1.clone(), p2], vec![0.5, 0.5]).is_err());
        assert!(MixtureModel::new(vec![p1.clone(), p3], vec![0.5, 0.5]).is_err());
        assert!(MixtureModel::new(vec![p1.clone()], vec![0.9]).is_err());
        assert!(MixtureModel::new(vec![p1], vec![1.0]).is_ok());
    }
}
