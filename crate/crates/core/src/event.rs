//! Finite state spaces and events.
//!
//! The event algebra is always the full powerset of the state space. An
//! [`Event`] is a bitset over state indices together with a handle on the
//! space it belongs to; operations between events of different spaces fail
//! with [`Error::SpaceMismatch`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Upper bound imposed by the `u64` bitset representation.
pub const MAX_STATES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Parse("state space needs at least one state".into()));
        }
        if labels.len() > MAX_STATES {
            return Err(Error::CapExceeded {
                what: "state count",
                required: labels.len() as u128,
                cap: MAX_STATES as u128,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate state label {label:?}")));
            }
        }
        Ok(Arc::new(StateSpace { labels, index }))
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

    pub fn label(&self, state: usize) -> &str {
        &self.labels[state]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Bitset of every state.
    pub fn full_bits(&self) -> u64 {
        full_mask(self.len())
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> bool {
    Arc::ptr_eq(a, b) || a.labels == b.labels
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
    Complement,
    SymmetricDifference,
}

#[derive(Clone)]
pub struct Event {
    space: Arc<StateSpace>,
    bits: u64,
}

impl Event {
    pub fn empty(space: &Arc<StateSpace>) -> Self {
        Event {
            space: Arc::clone(space),
            bits: 0,
        }
    }

    pub fn full(space: &Arc<StateSpace>) -> Self {
        Event {
            space: Arc::clone(space),
            bits: space.full_bits(),
        }
    }

    pub fn from_bits(space: &Arc<StateSpace>, bits: u64) -> Self {
        debug_assert_eq!(bits & !space.full_bits(), 0, "bits outside the space");
        Event {
            space: Arc::clone(space),
            bits: bits & space.full_bits(),
        }
    }

    pub fn from_indices(space: &Arc<StateSpace>, states: impl IntoIterator<Item = usize>) -> Self {
        let bits = states.into_iter().fold(0u64, |acc, s| {
            assert!(s < space.len(), "state index {s} out of range");
            acc | (1 << s)
        });
        Event {
            space: Arc::clone(space),
            bits,
        }
    }

    pub fn from_labels<S: AsRef<str>>(
        space: &Arc<StateSpace>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let mut bits = 0u64;
        for label in labels {
            let label = label.as_ref();
            let i = space
                .index_of(label)
                .ok_or_else(|| Error::UnknownState(label.to_string()))?;
            bits |= 1 << i;
        }
        Ok(Event {
            space: Arc::clone(space),
            bits,
        })
    }

    /// Parses the table-key form: comma-joined labels, `""` for the empty event.
    pub fn parse_key(space: &Arc<StateSpace>, key: &str) -> Result<Self> {
        if key.trim().is_empty() {
            return Ok(Event::empty(space));
        }
        Event::from_labels(space, key.split(',').map(str::trim))
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, state: usize) -> bool {
        state < 64 && self.bits & (1 << state) != 0
    }

    /// Member state indices in canonical order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        bit_indices(self.bits)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members().map(|s| self.space.label(s)).collect()
    }

    /// Comma-joined member labels in canonical state order.
    pub fn key(&self) -> String {
        self.labels().join(",")
    }

    fn check(&self, other: &Event) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn with_bits(&self, bits: u64) -> Event {
        Event {
            space: Arc::clone(&self.space),
            bits,
        }
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self.with_bits(self.bits | other.bits))
    }

    pub fn intersect(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self.with_bits(self.bits & other.bits))
    }

    pub fn difference(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self.with_bits(self.bits & !other.bits))
    }

    pub fn symmetric_difference(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self.with_bits(self.bits ^ other.bits))
    }

    pub fn complement(&self) -> Event {
        self.with_bits(!self.bits & self.space.full_bits())
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    pub fn is_disjoint(&self, other: &Event) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits & other.bits == 0)
    }

    pub fn same_space(&self, other: &Event) -> bool {
        same_space(&self.space, &other.space)
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && same_space(&self.space, &other.space)
    }
}

impl Eq for Event {}

impl std::hash::Hash for Event {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

/// Applies `op` to `a` and, for binary operations, `b`.
pub fn set_op(op: SetOp, a: &Event, b: Option<&Event>) -> Result<Event> {
    match (op, b) {
        (SetOp::Complement, None) => Ok(a.complement()),
        (SetOp::Complement, Some(_)) => Err(Error::Parse("complement takes one argument".into())),
        (_, None) => Err(Error::Parse(format!("{op:?} takes two arguments"))),
        (SetOp::Union, Some(b)) => a.union(b),
        (SetOp::Intersect, Some(b)) => a.intersect(b),
        (SetOp::Difference, Some(b)) => a.difference(b),
        (SetOp::SymmetricDifference, Some(b)) => a.symmetric_difference(b),
    }
}

pub(crate) fn bit_indices(bits: u64) -> impl Iterator<Item = usize> {
    let mut rest = bits;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

/// All submasks of `mask`, including `0` and `mask` itself, in increasing order.
pub(crate) fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == mask {
            None
        } else {
            Some((current.wrapping_sub(mask)) & mask)
        };
        Some(current)
    })
}

/// Every event of the powerset, in increasing bit order.
pub fn powerset(space: &Arc<StateSpace>) -> impl Iterator<Item = Event> + '_ {
    submasks(space.full_bits()).map(move |bits| Event::from_bits(space, bits))
}

pub type Partition = Vec<Event>;

/// Restricted-growth-string enumeration of the set partitions of an event.
///
/// Blocks are numbered in order of first appearance, so the first partition
/// is the single block and, when `max_blocks` allows it, the last one is the
/// partition into singletons.
pub struct PartitionIter {
    space: Arc<StateSpace>,
    members: Vec<usize>,
    max_blocks: usize,
    rgs: Vec<usize>,
    done: bool,
}

impl PartitionIter {
    pub fn new(event: &Event, max_blocks: usize) -> Result<Self> {
        if event.is_empty() {
            return Err(Error::EmptyEvent);
        }
        if max_blocks == 0 {
            return Err(Error::Parse("max_blocks must be at least 1".into()));
        }
        let members: Vec<usize> = event.members().collect();
        Ok(PartitionIter {
            space: Arc::clone(event.space()),
            rgs: vec![0; members.len()],
            members,
            max_blocks,
            done: false,
        })
    }

    /// Current restricted growth string as block masks over state indices.
    fn blocks(&self) -> Vec<u64> {
        let count = self.rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![0u64; count];
        for (slot, &state) in self.rgs.iter().zip(&self.members) {
            blocks[*slot] |= 1 << state;
        }
        blocks
    }

    fn advance(&mut self) {
        let len = self.rgs.len();
        // Rightmost position that can still grow.
        for i in (1..len).rev() {
            let prefix_max = self.rgs[..i].iter().copied().max().unwrap_or(0);
            let limit = (prefix_max + 1).min(self.max_blocks - 1);
            if self.rgs[i] < limit {
                self.rgs[i] += 1;
                for slot in &mut self.rgs[i + 1..] {
                    *slot = 0;
                }
                return;
            }
        }
        self.done = true;
    }

    pub(crate) fn next_masks(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let blocks = self.blocks();
        self.advance();
        Some(blocks)
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let masks = self.next_masks()?;
        Some(
            masks
                .into_iter()
                .map(|bits| Event::from_bits(&self.space, bits))
                .collect(),
        )
    }
}

/// Every partition of `event` into at most `max_blocks` nonempty blocks.
pub fn enumerate_partitions(event: &Event, max_blocks: usize) -> Result<Vec<Partition>> {
    Ok(PartitionIter::new(event, max_blocks)?.collect())
}

/// Number of partitions of a `k`-set into at most `max_blocks` blocks
/// (a partial sum of Stirling numbers of the second kind).
pub fn partition_count(k: usize, max_blocks: usize) -> u128 {
    // stirling[j] = S(i, j) for the current row i.
    let mut stirling = vec![0u128; k + 1];
    stirling[0] = 1;
    for i in 1..=k {
        for j in (1..=i).rev() {
            stirling[j] = stirling[j]
                .saturating_mul(j as u128)
                .saturating_add(stirling[j - 1]);
        }
        stirling[0] = 0;
    }
    if k == 0 {
        return 1;
    }
    stirling[1..=max_blocks.min(k)]
        .iter()
        .fold(0u128, |acc, v| acc.saturating_add(*v))
}

pub fn bell(k: usize) -> u128 {
    partition_count(k, k.max(1))
}
