//! Sequence augmentation: build synthetic training sequences out of pairs of
//! observed ones.
//!
//! Two constructions are offered. *Superposition* merges two sequences onto
//! a shared clock; if both parents follow Hawkes processes with the same
//! infectivity and decay, the merge is again such a process whose base rates
//! are the sum of the parents' (the cluster-process view: immigrant streams
//! add, offspring behavior is unchanged). *Stitching* plays one sequence
//! after the other on a concatenated window; for matching parents this
//! approximates a single longer draw of the same process, up to the decayed
//! influence across the seam.
//!
//! Pairs whose parents came from different mixture components produce
//! sequences that are not Hawkes at all — deliberately so: the learning loop
//! in `learn` leans on the contrast between the two kinds of candidates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Event, EventSequence, Origin};

/// Which pair construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMethod {
    Superpose,
    Stitch,
}

impl std::fmt::Display for AugmentMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AugmentMethod::Superpose => "superpose",
            AugmentMethod::Stitch => "stitch",
        })
    }
}

fn check_shared_types(a: &EventSequence, b: &EventSequence) -> Result<()> {
    if a.num_types != b.num_types {
        return Err(Error::TypeCountMismatch {
            left: a.num_types,
            right: b.num_types,
        });
    }
    Ok(())
}

/// Restore strict time ordering after a merge or shift by nudging any tied
/// or out-of-order time up to the next representable float. Returns the
/// largest time seen so the caller can widen the window if a nudge at the
/// very edge pushed past it.
fn enforce_strict_order(events: &mut [Event]) -> f64 {
    let mut last = 0.0_f64;
    for ev in events.iter_mut() {
        if ev.time <= last {
            ev.time = last.next_up();
        }
        last = ev.time;
    }
    last
}

/// Merge two sequences onto a shared clock: the union of both event lists,
/// time-ordered, on the window `[0, max(T_a, T_b)]`.
///
/// Tied times keep `a`'s event first and nudge the other up by one float
/// step, preserving strict ordering without moving any event measurably.
pub fn superpose(a: &EventSequence, b: &EventSequence) -> Result<EventSequence> {
    check_shared_types(a, b)?;
    let mut events = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.events.len() && j < b.events.len() {
        // `<=` keeps the first argument's event ahead on ties.
        if a.events[i].time <= b.events[j].time {
            events.push(a.events[i]);
            i += 1;
        } else {
            events.push(b.events[j]);
            j += 1;
        }
    }
    events.extend_from_slice(&a.events[i..]);
    events.extend_from_slice(&b.events[j..]);

    let mut horizon = a.horizon.max(b.horizon);
    let last = enforce_strict_order(&mut events);
    if last > horizon {
        horizon = last; // a nudge exactly at the horizon edge
    }
    EventSequence::with_origin(
        format!("sup({},{})", a.id, b.id),
        events,
        horizon,
        a.num_types,
        Origin::Superposed,
    )
}

/// Play `b` after `a`: `b`'s events are shifted by `a`'s horizon and the
/// window becomes `[0, T_a + T_b]`.
pub fn stitch(a: &EventSequence, b: &EventSequence) -> Result<EventSequence> {
    check_shared_types(a, b)?;
    let mut events = Vec::with_capacity(a.len() + b.len());
    events.extend_from_slice(&a.events);
    events.extend(b.events.iter().map(|ev| Event {
        time: a.horizon + ev.time,
        kind: ev.kind,
    }));

    let mut horizon = a.horizon + b.horizon;
    let last = enforce_strict_order(&mut events);
    if last > horizon {
        horizon = last; // float rounding at the seam or the far edge
    }
    EventSequence::with_origin(
        format!("cat({},{})", a.id, b.id),
        events,
        horizon,
        a.num_types,
        Origin::Stitched,
    )
}

/// Draw `count` index pairs `(i, j)`, `i != j`, uniformly with replacement
/// from `0..n`. Both orders are equally likely, so the pairs are uniform
/// over unordered distinct pairs while still carrying an order for
/// order-sensitive constructions.
pub fn sample_pairs(n: usize, count: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(Error::NotEnoughSequences { needed: 2, got: n });
    }
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n - 1);
        let j = if j >= i { j + 1 } else { j };
        pairs.push((i, j));
    }
    Ok(pairs)
}

/// Build `count` candidate sequences by applying `method` to random pairs of
/// originals. Also returns the parent index pairs, which diagnostics use to
/// relate candidates back to the originals' cluster labels.
pub fn make_candidates_with_pairs(
    originals: &[EventSequence],
    method: AugmentMethod,
    count: usize,
    rng: &mut impl Rng,
) -> Result<(Vec<EventSequence>, Vec<(usize, usize)>)> {
    let pairs = sample_pairs(originals.len(), count, rng)?;
    let mut candidates = Vec::with_capacity(count);
    for &(i, j) in &pairs {
        let cand = match method {
            AugmentMethod::Superpose => superpose(&originals[i], &originals[j])?,
            AugmentMethod::Stitch => stitch(&originals[i], &originals[j])?,
        };
        candidates.push(cand);
    }
    Ok((candidates, pairs))
}

/// [`make_candidates_with_pairs`] without the provenance.
pub fn make_candidates(
    originals: &[EventSequence],
    method: AugmentMethod,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<EventSequence>> {
    make_candidates_with_pairs(originals, method, count, rng).map(|(c, _)| c)
}
