//! Outcome spaces and simple acts.
//!
//! Outcomes are opaque labels: any cardinal structure lives in the utility
//! tables of a model. An act is a total map from states to outcomes, stored
//! as one outcome index per state.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::event::{same_space, Event, StateSpace};

/// Default cap on `m^n` for exhaustive act enumeration.
pub const DEFAULT_ACT_CAP: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl OutcomeSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::Parse(
                "outcome space needs at least two outcomes".into(),
            ));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate outcome label {label:?}")));
            }
        }
        Ok(Arc::new(OutcomeSpace { labels, index }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, outcome: usize) -> &str {
        &self.labels[outcome]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

pub(crate) fn same_outcomes(a: &Arc<OutcomeSpace>, b: &Arc<OutcomeSpace>) -> bool {
    Arc::ptr_eq(a, b) || a.labels == b.labels
}

#[derive(Clone)]
pub struct Act {
    space: Arc<StateSpace>,
    outcomes: Arc<OutcomeSpace>,
    assignment: Vec<usize>,
}

impl Act {
    pub fn new(
        space: &Arc<StateSpace>,
        outcomes: &Arc<OutcomeSpace>,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != space.len() {
            return Err(Error::Parse(format!(
                "act assigns {} states, space has {}",
                assignment.len(),
                space.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&o| o >= outcomes.len()) {
            return Err(Error::UnknownOutcome(format!("#{bad}")));
        }
        Ok(Act {
            space: Arc::clone(space),
            outcomes: Arc::clone(outcomes),
            assignment,
        })
    }

    /// Builds an act from outcome labels listed in canonical state order.
    pub fn from_labels<S: AsRef<str>>(
        space: &Arc<StateSpace>,
        outcomes: &Arc<OutcomeSpace>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let assignment = labels
            .into_iter()
            .map(|l| {
                let l = l.as_ref();
                outcomes
                    .index_of(l)
                    .ok_or_else(|| Error::UnknownOutcome(l.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Act::new(space, outcomes, assignment)
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn outcome_space(&self) -> &Arc<OutcomeSpace> {
        &self.outcomes
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn at(&self, state: usize) -> usize {
        self.assignment[state]
    }

    pub fn label_at(&self, state: usize) -> &str {
        self.outcomes.label(self.assignment[state])
    }

    pub fn is_constant(&self) -> Option<usize> {
        let first = self.assignment[0];
        self.assignment.iter().all(|&o| o == first).then_some(first)
    }

    /// Position of this act in the lexicographic enumeration of all acts.
    pub fn index(&self) -> usize {
        encode(&self.assignment, self.outcomes.len())
    }

    pub(crate) fn check_compatible(&self, other: &Act) -> Result<()> {
        if same_space(&self.space, &other.space) && same_outcomes(&self.outcomes, &other.outcomes)
        {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub(crate) fn check_event(&self, event: &Event) -> Result<()> {
        if same_space(&self.space, event.space()) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

impl PartialEq for Act {
    fn eq(&self, other: &Self) -> bool {
        self.assignment == other.assignment
            && same_space(&self.space, &other.space)
            && same_outcomes(&self.outcomes, &other.outcomes)
    }
}

impl Eq for Act {}

impl fmt::Debug for Act {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Act {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = (0..self.assignment.len()).map(|s| self.label_at(s)).collect();
        write!(f, "({})", labels.join(","))
    }
}

/// `f` on `event`, `h` elsewhere.
pub fn compose(f: &Act, event: &Event, h: &Act) -> Result<Act> {
    f.check_compatible(h)?;
    f.check_event(event)?;
    let assignment = (0..f.assignment.len())
        .map(|s| {
            if event.contains(s) {
                f.assignment[s]
            } else {
                h.assignment[s]
            }
        })
        .collect();
    Ok(Act {
        space: Arc::clone(&f.space),
        outcomes: Arc::clone(&f.outcomes),
        assignment,
    })
}

pub fn constant_act(
    outcome: &str,
    space: &Arc<StateSpace>,
    outcomes: &Arc<OutcomeSpace>,
) -> Result<Act> {
    let o = outcomes
        .index_of(outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;
    Ok(constant_by_index(o, space, outcomes))
}

pub(crate) fn constant_by_index(
    outcome: usize,
    space: &Arc<StateSpace>,
    outcomes: &Arc<OutcomeSpace>,
) -> Act {
    Act {
        space: Arc::clone(space),
        outcomes: Arc::clone(outcomes),
        assignment: vec![outcome; space.len()],
    }
}

/// `m^n`, saturating.
pub fn act_count(states: usize, outcomes: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..states {
        total = total.saturating_mul(outcomes as u128);
    }
    total
}

pub(crate) fn check_act_cap(states: usize, outcomes: usize, cap: u128) -> Result<usize> {
    let count = act_count(states, outcomes);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "act enumeration m^n",
            required: count,
            cap,
        });
    }
    Ok(count as usize)
}

/// All `m^n` acts in lexicographic assignment order (first state most significant).
pub fn enumerate_acts(
    space: &Arc<StateSpace>,
    outcomes: &Arc<OutcomeSpace>,
    cap: u128,
) -> Result<Vec<Act>> {
    let count = check_act_cap(space.len(), outcomes.len(), cap)?;
    Ok((0..count)
        .map(|i| Act {
            space: Arc::clone(space),
            outcomes: Arc::clone(outcomes),
            assignment: decode(i, space.len(), outcomes.len()),
        })
        .collect())
}

pub(crate) fn encode(assignment: &[usize], m: usize) -> usize {
    assignment.iter().fold(0usize, |acc, &o| acc * m + o)
}

pub(crate) fn decode(mut index: usize, n: usize, m: usize) -> Vec<usize> {
    let mut assignment = vec![0; n];
    for slot in assignment.iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
    assignment
}

/// Index arithmetic over the canonical act enumeration, used by the bulk
/// checkers to compose acts without materializing them.
#[derive(Debug, Clone)]
pub(crate) struct ActIndexer {
    pub n: usize,
    pub m: usize,
    /// `m^(n-1-s)` for each state `s`.
    weights: Vec<usize>,
    pub count: usize,
}

impl ActIndexer {
    pub fn new(n: usize, m: usize) -> Self {
        let mut weights = vec![1usize; n];
        for s in (0..n.saturating_sub(1)).rev() {
            weights[s] = weights[s + 1] * m;
        }
        let count = if n == 0 { 1 } else { weights[0] * m };
        ActIndexer {
            n,
            m,
            weights,
            count,
        }
    }

    pub fn digit(&self, act: usize, state: usize) -> usize {
        (act / self.weights[state]) % self.m
    }

    pub fn constant(&self, outcome: usize) -> usize {
        self.weights.iter().map(|w| w * outcome).sum()
    }

    /// Index of the act equal to `f` on `bits` and `h` elsewhere.
    pub fn compose(&self, f: usize, bits: u64, h: usize) -> usize {
        let mut out = h;
        let mut rest = bits;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let fd = self.digit(f, s);
            let hd = self.digit(h, s);
            out = out + fd * self.weights[s] - hd * self.weights[s];
        }
        out
    }

    pub fn assignment(&self, act: usize) -> Vec<usize> {
        decode(act, self.n, self.m)
    }
}
