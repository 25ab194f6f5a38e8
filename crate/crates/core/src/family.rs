//! Explicit preference families: for every event, a total preorder over the
//! full act enumeration, plus an optional unconditional order.
//!
//! Preorders are stored as dense ranks (higher is better), so two events carry
//! the same preorder exactly when their rank vectors are equal. That makes the
//! definitional nullity test (`⪰_{A∖B}` agrees with `⪰_A`) a vector comparison.

use std::collections::HashMap;
use std::sync::Arc;

use crate::act::{check_act_cap, Act, ActIndexer, OutcomeSpace};
use crate::engine::{lex_vector, level_value};
use crate::error::{Error, Result};
use crate::event::{Event, StateSpace};
use crate::model::GsleuModel;

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceTable {
    space: Arc<StateSpace>,
    outcomes: Arc<OutcomeSpace>,
    /// Dense ranks indexed by event bitmask, then by canonical act index.
    ranks: Vec<Vec<u32>>,
    unconditional: Option<Vec<u32>>,
}

/// Dense ranks of `values`: equal values share a rank, the smallest gets 0.
pub(crate) fn dense_rank<T: Ord>(values: &[T]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]));
    let mut ranks = vec![0u32; values.len()];
    let mut current = 0u32;
    for w in 0..order.len() {
        if w > 0 && values[order[w]] != values[order[w - 1]] {
            current += 1;
        }
        ranks[order[w]] = current;
    }
    ranks
}

/// Naming used by table files: acts are `f1, f2, …` in canonical order.
pub fn act_name(index: usize) -> String {
    format!("f{}", index + 1)
}

impl PreferenceTable {
    /// Builds a table from per-event ranks (any order-compatible integers).
    pub fn from_ranks(
        space: &Arc<StateSpace>,
        outcomes: &Arc<OutcomeSpace>,
        ranks: Vec<Vec<u32>>,
        unconditional: Option<Vec<u32>>,
    ) -> Result<Self> {
        let count = check_act_cap(space.len(), outcomes.len(), u128::MAX)?;
        if ranks.len() != 1usize << space.len() {
            return Err(Error::IncompleteTable(format!(
                "expected {} events, found {}",
                1usize << space.len(),
                ranks.len()
            )));
        }
        for (bits, r) in ranks.iter().enumerate() {
            if r.len() != count {
                return Err(Error::IncompleteTable(format!(
                    "event {} ranks {} acts, expected {count}",
                    Event::from_bits(space, bits as u64),
                    r.len()
                )));
            }
        }
        if ranks[0].iter().any(|&x| x != ranks[0][0]) {
            return Err(Error::InvalidTable(
                "the preference indexed by the empty event must be degenerate".into(),
            ));
        }
        if let Some(u) = &unconditional {
            if u.len() != count {
                return Err(Error::IncompleteTable(
                    "unconditional order does not rank every act".into(),
                ));
            }
        }
        Ok(PreferenceTable {
            space: Arc::clone(space),
            outcomes: Arc::clone(outcomes),
            ranks: ranks.iter().map(|r| dense_rank(r)).collect(),
            unconditional: unconditional.map(|u| dense_rank(&u)),
        })
    }

    /// Builds a table from tiers (best first) of act indices. `None` marks the
    /// degenerate entry of `∅`. Every act must appear exactly once per event.
    pub fn from_tiers(
        space: &Arc<StateSpace>,
        outcomes: &Arc<OutcomeSpace>,
        tiers: Vec<Option<Vec<Vec<usize>>>>,
        unconditional: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let count = check_act_cap(space.len(), outcomes.len(), u128::MAX)?;
        let to_ranks = |tiers: &[Vec<usize>], what: &str| -> Result<Vec<u32>> {
            let mut ranks = vec![u32::MAX; count];
            let depth = tiers.len() as u32;
            for (t, tier) in tiers.iter().enumerate() {
                if tier.is_empty() {
                    return Err(Error::InvalidTable(format!("{what}: empty tier")));
                }
                for &a in tier {
                    if a >= count {
                        return Err(Error::InvalidTable(format!("{what}: unknown act #{a}")));
                    }
                    if ranks[a] != u32::MAX {
                        return Err(Error::InvalidTable(format!(
                            "{what}: act {} listed twice, so the order is not a total preorder",
                            act_name(a)
                        )));
                    }
                    ranks[a] = depth - 1 - t as u32;
                }
            }
            if let Some(missing) = ranks.iter().position(|&r| r == u32::MAX) {
                return Err(Error::InvalidTable(format!(
                    "{what}: act {} is not ranked, so the order is incomplete",
                    act_name(missing)
                )));
            }
            Ok(ranks)
        };
        if tiers.len() != 1usize << space.len() {
            return Err(Error::IncompleteTable(format!(
                "expected {} event entries, found {}",
                1usize << space.len(),
                tiers.len()
            )));
        }
        let mut ranks = Vec::with_capacity(tiers.len());
        for (bits, entry) in tiers.iter().enumerate() {
            let event = Event::from_bits(space, bits as u64);
            match (bits, entry) {
                (0, None) => ranks.push(vec![0; count]),
                (0, Some(t)) if t.len() == 1 => ranks.push(to_ranks(t, "empty event")?),
                (0, Some(_)) => {
                    return Err(Error::InvalidTable(
                        "the preference indexed by the empty event must be degenerate".into(),
                    ))
                }
                (_, None) => {
                    return Err(Error::InvalidTable(format!(
                        "only the empty event may be degenerate, not {event}"
                    )))
                }
                (_, Some(t)) => ranks.push(to_ranks(t, &format!("event {event}"))?),
            }
        }
        let unconditional = match unconditional {
            Some(t) => Some(to_ranks(&t, "unconditional order")?),
            None => None,
        };
        PreferenceTable::from_ranks(space, outcomes, ranks, unconditional)
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn outcomes(&self) -> &Arc<OutcomeSpace> {
        &self.outcomes
    }

    pub fn act_count(&self) -> usize {
        self.ranks[0].len()
    }

    pub fn act(&self, index: usize) -> Act {
        let indexer = self.indexer();
        Act::new(&self.space, &self.outcomes, indexer.assignment(index)).expect("index in range")
    }

    pub(crate) fn indexer(&self) -> ActIndexer {
        ActIndexer::new(self.space.len(), self.outcomes.len())
    }

    pub fn ranks(&self, bits: u64) -> &[u32] {
        &self.ranks[bits as usize]
    }

    pub fn unconditional(&self) -> Option<&[u32]> {
        self.unconditional.as_deref()
    }

    /// Replaces the preorder at one event.
    pub fn set_ranks(&mut self, bits: u64, ranks: Vec<u32>) {
        assert_eq!(ranks.len(), self.act_count());
        self.ranks[bits as usize] = dense_rank(&ranks);
    }

    pub fn set_unconditional(&mut self, ranks: Option<Vec<u32>>) {
        self.unconditional = ranks.map(|r| dense_rank(&r));
    }

    /// `f ⪰_A g`.
    pub fn weak(&self, bits: u64, f: usize, g: usize) -> bool {
        let r = &self.ranks[bits as usize];
        r[f] >= r[g]
    }

    pub fn strict(&self, bits: u64, f: usize, g: usize) -> bool {
        let r = &self.ranks[bits as usize];
        r[f] > r[g]
    }

    /// Tiers of act indices, best first.
    pub fn tiers(&self, bits: u64) -> Vec<Vec<usize>> {
        tiers_of(&self.ranks[bits as usize])
    }

    pub fn unconditional_tiers(&self) -> Option<Vec<Vec<usize>>> {
        self.unconditional.as_deref().map(tiers_of)
    }

    /// One id per event such that equal ids mean identical preorders.
    pub(crate) fn preorder_ids(&self) -> Vec<u32> {
        let mut seen: HashMap<&[u32], u32> = HashMap::new();
        self.ranks
            .iter()
            .map(|r| {
                let next = seen.len() as u32;
                *seen.entry(r.as_slice()).or_insert(next)
            })
            .collect()
    }

    /// First entry where two tables over the same spaces differ:
    /// `(event bits or None for the unconditional order, f, g)` with `f ⪰ g`
    /// in `self` but not in `other`, or the other way around.
    pub fn first_difference(&self, other: &PreferenceTable) -> Option<(Option<u64>, usize, usize)> {
        let pair = |a: &[u32], b: &[u32]| -> Option<(usize, usize)> {
            if a == b {
                return None;
            }
            for f in 0..a.len() {
                for g in 0..a.len() {
                    if (a[f] >= a[g]) != (b[f] >= b[g]) {
                        return Some((f, g));
                    }
                }
            }
            None
        };
        for bits in 0..self.ranks.len() {
            if let Some((f, g)) = pair(&self.ranks[bits], &other.ranks[bits]) {
                return Some((Some(bits as u64), f, g));
            }
        }
        match (&self.unconditional, &other.unconditional) {
            (Some(a), Some(b)) => pair(a, b).map(|(f, g)| (None, f, g)),
            (None, None) => None,
            _ => Some((None, 0, 0)),
        }
    }
}

fn tiers_of(ranks: &[u32]) -> Vec<Vec<usize>> {
    let depth = ranks.iter().max().map_or(0, |m| *m as usize + 1);
    let mut tiers = vec![Vec::new(); depth];
    for (a, &r) in ranks.iter().enumerate() {
        tiers[depth - 1 - r as usize].push(a);
    }
    tiers
}

/// Either a model, evaluated on demand, or an explicit table.
#[derive(Debug, Clone)]
pub enum PreferenceFamily {
    ModelBacked(GsleuModel),
    TableBacked(PreferenceTable),
}

impl PreferenceFamily {
    pub fn to_table(&self, cap: u128) -> Result<PreferenceTable> {
        match self {
            PreferenceFamily::ModelBacked(m) => derive_table(m, cap),
            PreferenceFamily::TableBacked(t) => Ok(t.clone()),
        }
    }
}

/// Ranks every act at every event, and unconditionally, under the model.
pub fn derive_table(model: &GsleuModel, cap: u128) -> Result<PreferenceTable> {
    let n = model.space().len();
    let count = check_act_cap(n, model.outcomes().len(), cap)?;
    let indexer = ActIndexer::new(n, model.outcomes().len());
    let assignments: Vec<Vec<usize>> = (0..count).map(|i| indexer.assignment(i)).collect();
    let mut cache: HashMap<(usize, u64), Vec<u32>> = HashMap::new();
    let mut ranks = Vec::with_capacity(1 << n);
    ranks.push(vec![0u32; count]);
    for bits in 1..(1u64 << n) {
        let k = model.class_index(bits).expect("supports cover the space");
        let carrier = bits & model.levels()[k].support.bits();
        let r = cache.entry((k, carrier)).or_insert_with(|| {
            let values: Vec<_> = assignments
                .iter()
                .map(|a| level_value(model, k, carrier, a))
                .collect();
            dense_rank(&values)
        });
        ranks.push(r.clone());
    }
    let lex: Vec<Vec<_>> = assignments.iter().map(|a| lex_vector(model, a)).collect();
    let unconditional = dense_rank(&lex);
    Ok(PreferenceTable {
        space: Arc::clone(model.space()),
        outcomes: Arc::clone(model.outcomes()),
        ranks,
        unconditional: Some(unconditional),
    })
}
