//! Simple lotteries over outcomes: the push-forward of a conditional measure
//! through an act, their expected-utility order, mixtures and realization of
//! a lottery by an act on the atoms of an event.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::act::{Act, OutcomeSpace};
use crate::engine::Comparison;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::model::{conditional_bits, GsleuModel};
use crate::rational::{self, format_rational, Q};

/// Non-redundant lottery: distinct outcomes (by index), positive weights, total one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lottery {
    outcomes: Arc<OutcomeSpace>,
    weights: BTreeMap<usize, Q>,
}

impl Lottery {
    pub fn outcome_space(&self) -> &Arc<OutcomeSpace> {
        &self.outcomes
    }

    /// `(outcome index, weight)` pairs in outcome order.
    pub fn weights(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.weights.iter().map(|(o, w)| (*o, w))
    }

    pub fn weight(&self, outcome: usize) -> Q {
        self.weights.get(&outcome).cloned().unwrap_or_else(rational::zero)
    }

    pub fn degenerate(outcomes: &Arc<OutcomeSpace>, outcome: usize) -> Self {
        Lottery {
            outcomes: Arc::clone(outcomes),
            weights: BTreeMap::from([(outcome, rational::one())]),
        }
    }

    pub fn from_labels<'a>(
        outcomes: &Arc<OutcomeSpace>,
        entries: impl IntoIterator<Item = (&'a str, Q)>,
    ) -> Result<Self> {
        let raw = entries
            .into_iter()
            .map(|(label, w)| {
                outcomes
                    .index_of(label)
                    .map(|o| (o, w))
                    .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        normalize_lottery(outcomes, raw)
    }

    pub fn expected_utility(&self, utility: &[Q]) -> Q {
        self.weights
            .iter()
            .fold(rational::zero(), |acc, (o, w)| acc + w * &utility[*o])
    }

    /// `{"a":"1/2","b":"1/2"}`-style pairs in outcome order.
    pub fn labeled(&self) -> Vec<(String, String)> {
        self.weights
            .iter()
            .map(|(o, w)| (self.outcomes.label(*o).to_string(), format_rational(w)))
            .collect()
    }
}

/// Merges repeated outcomes and drops zero weights.
pub fn normalize_lottery(outcomes: &Arc<OutcomeSpace>, raw: Vec<(usize, Q)>) -> Result<Lottery> {
    let mut weights: BTreeMap<usize, Q> = BTreeMap::new();
    let mut total = rational::zero();
    for (o, w) in raw {
        if o >= outcomes.len() {
            return Err(Error::UnknownOutcome(format!("#{o}")));
        }
        if w.is_negative() {
            return Err(Error::NotNormalized(format!(
                "negative weight {}",
                format_rational(&w)
            )));
        }
        total += &w;
        *weights.entry(o).or_insert_with(rational::zero) += w;
    }
    if total != rational::one() {
        return Err(Error::NotNormalized(format_rational(&total)));
    }
    weights.retain(|_, w| !w.is_zero());
    Ok(Lottery {
        outcomes: Arc::clone(outcomes),
        weights,
    })
}

/// `L_A^f = P_A ∘ f⁻¹`.
pub fn induced_lottery(model: &GsleuModel, event: &Event, f: &Act) -> Result<Lottery> {
    model.check_event(event)?;
    model.check_act(f)?;
    let k = model.class_index(event.bits()).ok_or(Error::EmptyEvent)?;
    let measure = conditional_bits(model, k, event.bits());
    let raw = measure
        .into_iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(s, p)| (f.at(s), p))
        .collect();
    normalize_lottery(model.outcomes(), raw)
}

/// Expected-utility order at the class of `A`.
pub fn lottery_compare(model: &GsleuModel, event: &Event, l1: &Lottery, l2: &Lottery) -> Result<Comparison> {
    model.check_event(event)?;
    let k = model.class_index(event.bits()).ok_or(Error::EmptyEvent)?;
    let utility = &model.levels()[k].utility;
    Ok(Comparison::from_ordering(
        l1.expected_utility(utility).cmp(&l2.expected_utility(utility)),
    ))
}

/// `ρ·L1 + (1-ρ)·L2`.
pub fn mix(rho: &Q, l1: &Lottery, l2: &Lottery) -> Result<Lottery> {
    if rho.is_negative() || *rho > rational::one() {
        return Err(Error::NotNormalized(format!(
            "mixture weight {} outside [0,1]",
            format_rational(rho)
        )));
    }
    let rest = rational::one() - rho;
    let raw = l1
        .weights()
        .map(|(o, w)| (o, rho * w))
        .chain(l2.weights().map(|(o, w)| (o, &rest * w)))
        .collect();
    normalize_lottery(&l1.outcomes, raw)
}

/// The unique `ρ` with `EU(ρ·L1 + (1-ρ)·L2) = EU(L3)`, for `L2 ≻ L3 ≻ L1`.
pub fn calibration_weight(
    model: &GsleuModel,
    event: &Event,
    l1: &Lottery,
    l2: &Lottery,
    l3: &Lottery,
) -> Result<Option<Q>> {
    model.check_event(event)?;
    let k = model.class_index(event.bits()).ok_or(Error::EmptyEvent)?;
    let u = &model.levels()[k].utility;
    let (e1, e2, e3) = (
        l1.expected_utility(u),
        l2.expected_utility(u),
        l3.expected_utility(u),
    );
    if !(e2 > e3 && e3 > e1) {
        return Ok(None);
    }
    // ρ·e1 + (1-ρ)·e2 = e3
    Ok(Some((&e2 - &e3) / (&e2 - &e1)))
}

/// An act inducing `L` at `A` that equals `fill` off `A`.
///
/// Outcomes are assigned in outcome order to groups of atoms of
/// `A ∩ support`, searched in state order; the first exact grouping wins.
/// States of `A` outside the support carry no mass and keep `fill`'s value.
pub fn act_from_lottery(model: &GsleuModel, event: &Event, lottery: &Lottery, fill: &Act) -> Result<Act> {
    model.check_event(event)?;
    model.check_act(fill)?;
    let k = model.class_index(event.bits()).ok_or(Error::EmptyEvent)?;
    let measure = conditional_bits(model, k, event.bits());
    let atoms: Vec<usize> = (0..measure.len()).filter(|&s| !measure[s].is_zero()).collect();
    let targets: Vec<(usize, Q)> = lottery.weights().map(|(o, w)| (o, w.clone())).collect();
    let mut assignment = fill.assignment().to_vec();
    let mut owner: Vec<Option<usize>> = vec![None; atoms.len()];
    if !assign_groups(&atoms, &measure, &targets, 0, &mut owner) {
        return Err(Error::AtomGranularity {
            event: event.to_string(),
        });
    }
    for (i, &s) in atoms.iter().enumerate() {
        assignment[s] = targets[owner[i].expect("every atom assigned")].0;
    }
    Act::new(model.space(), model.outcomes(), assignment)
}

/// Backtracking exact cover of the atoms by the target weights.
fn assign_groups(
    atoms: &[usize],
    measure: &[Q],
    targets: &[(usize, Q)],
    t: usize,
    owner: &mut Vec<Option<usize>>,
) -> bool {
    if t == targets.len() {
        return owner.iter().all(Option::is_some);
    }
    let free: Vec<usize> = (0..atoms.len()).filter(|&i| owner[i].is_none()).collect();
    fn pick(
        free: &[usize],
        start: usize,
        remaining: &Q,
        atoms: &[usize],
        measure: &[Q],
        targets: &[(usize, Q)],
        t: usize,
        owner: &mut Vec<Option<usize>>,
    ) -> bool {
        if remaining.is_zero() {
            return assign_groups(atoms, measure, targets, t + 1, owner);
        }
        for idx in start..free.len() {
            let i = free[idx];
            let p = &measure[atoms[i]];
            if p > remaining {
                continue;
            }
            owner[i] = Some(t);
            let next = remaining - p;
            if pick(free, idx + 1, &next, atoms, measure, targets, t, owner) {
                return true;
            }
            owner[i] = None;
        }
        false
    }
    pick(&free, 0, &targets[t].1, atoms, measure, targets, t, owner)
}
