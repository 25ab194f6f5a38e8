//! Seeded random models for property tests and the acceptance runs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::act::OutcomeSpace;
use crate::event::{Event, StateSpace};
use crate::model::{GsleuModel, Level};
use crate::rational::{int, q, Q};

/// Random valid model on `n` states and `m` outcomes with between 1 and
/// `max_levels` levels. Supports are a random ordered split of the states,
/// probabilities have small denominators, and every level ranks outcomes
/// by one shared random permutation.
pub fn random_model<R: Rng>(rng: &mut R, n: usize, m: usize, max_levels: usize) -> GsleuModel {
    assert!(n >= 1 && m >= 2 && max_levels >= 1);
    let space = StateSpace::new((1..=n).map(|i| format!("s{i}"))).unwrap();
    let outcomes = OutcomeSpace::new((0..m).map(outcome_label)).unwrap();
    let depth = rng.gen_range(1..=max_levels.min(n));
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(depth - 1).collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);

    let mut levels = Vec::with_capacity(depth);
    let mut start = 0;
    for &end in &cuts {
        let block = &states[start..end];
        start = end;
        let weights: Vec<i64> = block.iter().map(|_| rng.gen_range(1..=4)).collect();
        let total: i64 = weights.iter().sum();
        let mut prob = vec![int(0); n];
        for (&s, &w) in block.iter().zip(&weights) {
            prob[s] = q(w, total);
        }
        levels.push(Level::new(
            Event::from_indices(&space, block.iter().copied()),
            prob,
            ranked_utility(rng, &perm),
        ));
    }
    GsleuModel::new(space, outcomes, levels).expect("construction is valid")
}

/// Strictly increasing integer utilities placed along `perm` (worst first).
fn ranked_utility<R: Rng>(rng: &mut R, perm: &[usize]) -> Vec<Q> {
    let mut values = vec![int(0); perm.len()];
    let mut v = rng.gen_range(0..=2);
    for &o in perm {
        values[o] = int(v);
        v += rng.gen_range(1..=3);
    }
    values
}

/// One level over `atoms` equally likely states with utilities in `[0, 1]`
/// on a grid of halves, so the utility range is exactly 1.
pub fn fine_model<R: Rng>(rng: &mut R, atoms: usize, m: usize) -> GsleuModel {
    assert!(atoms >= 1 && m >= 2);
    let space = StateSpace::new((1..=atoms).map(|i| format!("s{i}"))).unwrap();
    let outcomes = OutcomeSpace::new((0..m).map(outcome_label)).unwrap();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let mut utility = vec![int(0); m];
    for (rank, &o) in perm.iter().enumerate() {
        utility[o] = q(rank as i64, (m - 1) as i64);
    }
    let prob = vec![q(1, atoms as i64); atoms];
    let level = Level::new(Event::full(&space), prob, utility);
    GsleuModel::new(space, outcomes, vec![level]).expect("construction is valid")
}

/// Positive affine map `x ↦ a·x + b` with small rational coefficients.
pub fn random_affine<R: Rng>(rng: &mut R) -> (Q, Q) {
    let a = q(rng.gen_range(1..=9), rng.gen_range(1..=5));
    let b = q(rng.gen_range(-9..=9), rng.gen_range(1..=5));
    (a, b)
}

fn outcome_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("o{i}")
    }
}
