//! The lexicographic representation: an ordered chain of levels, each with a
//! support, a probability on that support and a utility over outcomes.
//!
//! Level 1 is the highest class. Supports are pairwise disjoint and cover the
//! state space, so every nonempty event has a well-defined class: the first
//! level whose support it meets.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::act::OutcomeSpace;
use crate::error::{Error, Result};
use crate::event::{Event, StateSpace};
use crate::rational::{self, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub support: Event,
    /// One entry per state; zero off the support.
    pub prob: Vec<Q>,
    /// One entry per outcome.
    pub utility: Vec<Q>,
}

impl Level {
    pub fn new(support: Event, prob: Vec<Q>, utility: Vec<Q>) -> Self {
        Level {
            support,
            prob,
            utility,
        }
    }

    /// Probability of an event under this level's measure (unconditional).
    pub fn mass(&self, event: &Event) -> Q {
        rational::sum(event.members().map(|s| &self.prob[s]))
    }

    pub(crate) fn mass_bits(&self, bits: u64) -> Q {
        rational::sum(crate::event::bit_indices(bits).map(|s| &self.prob[s]))
    }
}

/// Class of an event: the level index (1-based) or the trivial class of `∅`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventClass {
    Level(usize),
    Trivial,
}

impl fmt::Display for EventClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventClass::Level(k) => write!(f, "{k}"),
            EventClass::Trivial => f.write_str("trivial"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NoLevels,
    DimensionMismatch,
    EmptySupport,
    SupportsNotDisjoint,
    SupportsDoNotCover,
    NonPositiveProbability,
    ProbabilityOffSupport,
    ProbabilityNotNormalized,
    ConstantUtility,
    OrdinalMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Level number (1-based) when the violation is local to a level.
    pub level: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Some(k) => write!(f, "level {k}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, level: Option<usize>, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            level,
            message: message.into(),
        });
    }
}

#[derive(Debug, Clone)]
pub struct GsleuModel {
    space: Arc<StateSpace>,
    outcomes: Arc<OutcomeSpace>,
    levels: Vec<Level>,
}

impl PartialEq for GsleuModel {
    fn eq(&self, other: &Self) -> bool {
        self.space.labels() == other.space.labels()
            && self.outcomes.labels() == other.outcomes.labels()
            && self.levels == other.levels
    }
}

/// `E_1 ⊋ E_2 ⊋ … ⊋ E_K`, with `E_k` the states outside every higher support.
#[derive(Debug, Clone, PartialEq)]
pub struct TopEventChain {
    pub events: Vec<Event>,
}

impl TopEventChain {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Top event of level `k` (1-based).
    pub fn top(&self, k: usize) -> &Event {
        &self.events[k - 1]
    }
}

impl GsleuModel {
    /// Builds a model without validating it; see [`validate_model`].
    pub fn new_unchecked(
        space: Arc<StateSpace>,
        outcomes: Arc<OutcomeSpace>,
        levels: Vec<Level>,
    ) -> Self {
        GsleuModel {
            space,
            outcomes,
            levels,
        }
    }

    /// Builds a model and rejects it unless every invariant holds.
    pub fn new(
        space: Arc<StateSpace>,
        outcomes: Arc<OutcomeSpace>,
        levels: Vec<Level>,
    ) -> Result<Self> {
        let model = GsleuModel::new_unchecked(space, outcomes, levels);
        let report = validate_model(&model);
        if report.is_valid() {
            Ok(model)
        } else {
            Err(Error::Validation(report.violations))
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn outcomes(&self) -> &Arc<OutcomeSpace> {
        &self.outcomes
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Level `k`, 1-based.
    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k - 1]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub(crate) fn check_event(&self, event: &Event) -> Result<()> {
        if crate::event::same_space(&self.space, event.space()) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub(crate) fn check_act(&self, act: &crate::act::Act) -> Result<()> {
        if crate::event::same_space(&self.space, act.space())
            && crate::act::same_outcomes(&self.outcomes, act.outcome_space())
        {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// 0-based level of a bitset, `None` for the empty set.
    pub(crate) fn class_index(&self, bits: u64) -> Option<usize> {
        self.levels
            .iter()
            .position(|level| level.support.bits() & bits != 0)
    }
}

pub fn validate_model(model: &GsleuModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = model.space.len();
    let m = model.outcomes.len();
    if model.levels.is_empty() {
        report.push(ViolationKind::NoLevels, None, "model has no levels");
        return report;
    }
    let mut covered = 0u64;
    for (i, level) in model.levels.iter().enumerate() {
        let k = Some(i + 1);
        if level.prob.len() != n || level.utility.len() != m {
            report.push(
                ViolationKind::DimensionMismatch,
                k,
                format!(
                    "expected {n} probabilities and {m} utilities, found {} and {}",
                    level.prob.len(),
                    level.utility.len()
                ),
            );
            continue;
        }
        if !crate::event::same_space(&model.space, level.support.space()) {
            report.push(
                ViolationKind::DimensionMismatch,
                k,
                "support lives on another state space",
            );
            continue;
        }
        let support = level.support.bits();
        if support == 0 {
            report.push(ViolationKind::EmptySupport, k, "support is empty");
        }
        if covered & support != 0 {
            let overlap = Event::from_bits(&model.space, covered & support);
            report.push(
                ViolationKind::SupportsNotDisjoint,
                k,
                format!("supports not disjoint: {overlap} already belongs to a higher level"),
            );
        }
        covered |= support;
        for s in 0..n {
            let p = &level.prob[s];
            if level.support.contains(s) {
                if !p.is_positive() {
                    report.push(
                        ViolationKind::NonPositiveProbability,
                        k,
                        format!(
                            "probability of support state {} must be positive, found {}",
                            model.space.label(s),
                            rational::format_rational(p)
                        ),
                    );
                }
            } else if !p.is_zero() {
                report.push(
                    ViolationKind::ProbabilityOffSupport,
                    k,
                    format!(
                        "state {} is off the support but has probability {}",
                        model.space.label(s),
                        rational::format_rational(p)
                    ),
                );
            }
        }
        let total = level.mass(&level.support);
        if total != rational::one() {
            report.push(
                ViolationKind::ProbabilityNotNormalized,
                k,
                format!(
                    "probability not normalized: support mass is {}",
                    rational::format_rational(&total)
                ),
            );
        }
        if level.utility.iter().all(|u| *u == level.utility[0]) {
            report.push(
                ViolationKind::ConstantUtility,
                k,
                "utility is constant; constant acts must be strictly ranked",
            );
        }
    }
    if covered != model.space.full_bits() {
        let missing = Event::from_bits(&model.space, model.space.full_bits() & !covered);
        report.push(
            ViolationKind::SupportsDoNotCover,
            None,
            format!("supports do not cover the state space: {missing} belongs to no level"),
        );
    }
    // Constant acts must be ranked identically at every level.
    let dims_ok = model
        .levels
        .iter()
        .all(|l| l.utility.len() == m && l.prob.len() == n);
    if dims_ok {
        let first = &model.levels[0].utility;
        for (i, level) in model.levels.iter().enumerate().skip(1) {
            if let Some((a, b)) = ordinal_break(first, &level.utility) {
                report.push(
                    ViolationKind::OrdinalMismatch,
                    Some(i + 1),
                    format!(
                        "utility orders outcomes {} and {} differently from level 1",
                        model.outcomes.label(a),
                        model.outcomes.label(b)
                    ),
                );
            }
        }
    }
    report
}

/// First outcome pair ordered differently by the two utility tables.
pub(crate) fn ordinal_break(u: &[Q], v: &[Q]) -> Option<(usize, usize)> {
    for a in 0..u.len() {
        for b in a + 1..u.len() {
            if u[a].cmp(&u[b]) != v[a].cmp(&v[b]) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn class_of(model: &GsleuModel, event: &Event) -> Result<EventClass> {
    model.check_event(event)?;
    Ok(match model.class_index(event.bits()) {
        Some(i) => EventClass::Level(i + 1),
        None => EventClass::Trivial,
    })
}

/// `P_A`, extended to the whole space by zero.
pub fn conditional_measure(model: &GsleuModel, event: &Event) -> Result<Vec<Q>> {
    model.check_event(event)?;
    let k = model.class_index(event.bits()).ok_or(Error::EmptyEvent)?;
    Ok(conditional_bits(model, k, event.bits()))
}

pub(crate) fn conditional_bits(model: &GsleuModel, k: usize, bits: u64) -> Vec<Q> {
    let level = &model.levels[k];
    let carrier = bits & level.support.bits();
    let total = level.mass_bits(carrier);
    (0..model.space.len())
        .map(|s| {
            if carrier & (1 << s) != 0 {
                &level.prob[s] / &total
            } else {
                rational::zero()
            }
        })
        .collect()
}

pub fn top_event_chain(model: &GsleuModel) -> TopEventChain {
    let mut remaining = model.space.full_bits();
    let events = model
        .levels
        .iter()
        .map(|level| {
            let e = Event::from_bits(&model.space, remaining);
            remaining &= !level.support.bits();
            e
        })
        .collect();
    TopEventChain { events }
}
