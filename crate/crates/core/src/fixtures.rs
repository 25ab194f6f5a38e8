//! Canonical fixtures shared by tests, examples and the CLI test-suite.

use std::sync::Arc;

use crate::act::OutcomeSpace;
use crate::event::{Event, StateSpace};
use crate::model::{GsleuModel, Level};
use crate::rational::{int, q};

/// Four states, three outcomes, three levels with supports `{s1,s2}`, `{s3}`, `{s4}`.
pub fn m0() -> GsleuModel {
    let space = StateSpace::new(["s1", "s2", "s3", "s4"]).unwrap();
    let outcomes = OutcomeSpace::new(["a", "b", "c"]).unwrap();
    let levels = vec![
        Level::new(
            Event::from_indices(&space, [0, 1]),
            vec![q(1, 2), q(1, 2), int(0), int(0)],
            vec![int(0), int(1), int(2)],
        ),
        Level::new(
            Event::from_indices(&space, [2]),
            vec![int(0), int(0), int(1), int(0)],
            vec![int(0), int(3), int(4)],
        ),
        Level::new(
            Event::from_indices(&space, [3]),
            vec![int(0), int(0), int(0), int(1)],
            vec![int(0), int(1), int(2)],
        ),
    ];
    GsleuModel::new(space, outcomes, levels).expect("fixture is valid")
}

/// Subsets of `{a,b,c,d,e}` listed from least to most probable.
///
/// The order is a qualitative probability (it satisfies de Finetti's
/// additivity on disjoint unions) yet no probability vector represents it.
const KPS_ORDER: [&str; 32] = [
    "", "a", "e", "d", "ae", "ad", "b", "ab", "de", "ade", "be", "bd", "abe", "c", "abd", "bde",
    "ac", "ce", "abde", "cd", "ace", "acd", "bc", "abc", "cde", "acde", "bce", "bcd", "abce",
    "abcd", "bcde", "abcde",
];

/// The five-state space and its non-representable order, worst first.
pub fn kps_order() -> (Arc<StateSpace>, Vec<Event>) {
    let space = StateSpace::new(["a", "b", "c", "d", "e"]).unwrap();
    let order = KPS_ORDER
        .iter()
        .map(|word| {
            Event::from_labels(&space, word.chars().map(|c| c.to_string())).unwrap()
        })
        .collect();
    (space, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kps_order_is_a_permutation_of_the_powerset() {
        let (space, order) = kps_order();
        let mut bits: Vec<u64> = order.iter().map(Event::bits).collect();
        bits.sort_unstable();
        bits.dedup();
        assert_eq!(bits.len(), 32);
        assert_eq!(order.last().unwrap(), &Event::full(&space));
    }

    #[test]
    fn kps_order_is_additive() {
        let (_, order) = kps_order();
        let pos = |bits: u64| order.iter().position(|e| e.bits() == bits).unwrap();
        for b in 0..32u64 {
            for c in 0..32u64 {
                for d in 0..32u64 {
                    if d & (b | c) != 0 {
                        continue;
                    }
                    assert_eq!(pos(b) >= pos(c), pos(b | d) >= pos(c | d));
                }
            }
        }
    }
}
