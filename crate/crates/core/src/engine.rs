//! Forward evaluation of a model: indexed preferences, the lexicographic
//! unconditional order, nullity, qualitative probability, dominance between
//! events and the class partition.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::act::{enumerate_acts, Act};
use crate::error::{Error, Result};
use crate::event::{powerset, Event};
use crate::model::{class_of, conditional_measure, top_event_chain, EventClass, GsleuModel};
use crate::rational::{self, Q};

/// Outcome of comparing `f` against `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    StrictlyPrefer,
    Indifferent,
    StrictlyDisprefer,
}

impl Comparison {
    pub fn from_ordering(ord: Ordering) -> Self {
        match ord {
            Ordering::Greater => Comparison::StrictlyPrefer,
            Ordering::Equal => Comparison::Indifferent,
            Ordering::Less => Comparison::StrictlyDisprefer,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Comparison::StrictlyPrefer => Comparison::StrictlyDisprefer,
            Comparison::Indifferent => Comparison::Indifferent,
            Comparison::StrictlyDisprefer => Comparison::StrictlyPrefer,
        }
    }

    /// `f ⪰ g`.
    pub fn is_weak(self) -> bool {
        self != Comparison::StrictlyDisprefer
    }

    pub fn is_strict(self) -> bool {
        self == Comparison::StrictlyPrefer
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::StrictlyPrefer => "≻",
            Comparison::Indifferent => "∼",
            Comparison::StrictlyDisprefer => "≺",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Comparison::StrictlyPrefer => "StrictlyPrefer",
            Comparison::Indifferent => "Indifferent",
            Comparison::StrictlyDisprefer => "StrictlyDisprefer",
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The preference indexed by `∅` ranks every act equally; it gets its own value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexedComparison {
    Degenerate,
    Decided(Comparison),
}

impl IndexedComparison {
    pub fn is_weak(self) -> bool {
        match self {
            IndexedComparison::Degenerate => true,
            IndexedComparison::Decided(c) => c.is_weak(),
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, IndexedComparison::Decided(Comparison::StrictlyPrefer))
    }

    /// The degenerate preference treats every pair as indifferent.
    pub fn comparison(self) -> Comparison {
        match self {
            IndexedComparison::Degenerate => Comparison::Indifferent,
            IndexedComparison::Decided(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexVerdict {
    pub ordering: Comparison,
    /// 1-based level at which the expected utilities first differ.
    pub deciding_level: Option<usize>,
}

/// Unnormalized expected utility of an assignment over `bits` at level `k` (0-based).
pub(crate) fn level_value(model: &GsleuModel, k: usize, bits: u64, assignment: &[usize]) -> Q {
    let level = &model.levels()[k];
    let carrier = bits & level.support.bits();
    let mut total = rational::zero();
    for s in crate::event::bit_indices(carrier) {
        total += &level.prob[s] * &level.utility[assignment[s]];
    }
    total
}

/// Expected utility vector over the top-event chain, one entry per level.
pub(crate) fn lex_vector(model: &GsleuModel, assignment: &[usize]) -> Vec<Q> {
    // E_k carries all of level k's mass, so no normalization is needed.
    let full = model.space().full_bits();
    (0..model.depth())
        .map(|k| level_value(model, k, full, assignment))
        .collect()
}

pub(crate) fn lex_compare_vectors(a: &[Q], b: &[Q]) -> (Comparison, Option<usize>) {
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            ord => return (Comparison::from_ordering(ord), Some(k + 1)),
        }
    }
    (Comparison::Indifferent, None)
}

/// `∫ u_k(f) dP_A`, requiring `A` to be of class `k`.
pub fn level_eu(model: &GsleuModel, k: usize, event: &Event, f: &Act) -> Result<Q> {
    model.check_act(f)?;
    let class = class_of(model, event)?;
    if class != EventClass::Level(k) {
        return Err(Error::ClassMismatch {
            expected: k,
            actual: class.to_string(),
        });
    }
    let measure = conditional_measure(model, event)?;
    let utility = &model.level(k).utility;
    let mut total = rational::zero();
    for (s, p) in measure.iter().enumerate() {
        if !p.is_zero() {
            total += p * &utility[f.at(s)];
        }
    }
    Ok(total)
}

pub fn indexed_prefer(model: &GsleuModel, event: &Event, f: &Act, g: &Act) -> Result<IndexedComparison> {
    model.check_event(event)?;
    model.check_act(f)?;
    model.check_act(g)?;
    let Some(k) = model.class_index(event.bits()) else {
        return Ok(IndexedComparison::Degenerate);
    };
    let a = level_value(model, k, event.bits(), f.assignment());
    let b = level_value(model, k, event.bits(), g.assignment());
    Ok(IndexedComparison::Decided(Comparison::from_ordering(a.cmp(&b))))
}

pub fn lex_prefer(model: &GsleuModel, f: &Act, g: &Act) -> Result<LexVerdict> {
    model.check_act(f)?;
    model.check_act(g)?;
    let (ordering, deciding_level) =
        lex_compare_vectors(&lex_vector(model, f.assignment()), &lex_vector(model, g.assignment()));
    Ok(LexVerdict {
        ordering,
        deciding_level,
    })
}

/// The lexicographic rule evaluated literally as a pair of quantified
/// statements over the top-event chain: `f ⪰ g` iff every chain event where
/// `g` wins is contained in a chain event where `f` wins.
pub fn lex_prefer_bruteforce(model: &GsleuModel, f: &Act, g: &Act) -> Result<Comparison> {
    let chain = top_event_chain(model);
    let mut verdicts = Vec::with_capacity(chain.len());
    for e in &chain.events {
        verdicts.push(indexed_prefer(model, e, f, g)?.comparison());
    }
    let weakly = |wins: Comparison, loses: Comparison| {
        chain.events.iter().enumerate().all(|(i, e)| {
            verdicts[i] != loses
                || chain
                    .events
                    .iter()
                    .enumerate()
                    .any(|(j, e2)| verdicts[j] == wins && e.is_subset(e2).unwrap())
        })
    };
    let f_over_g = weakly(Comparison::StrictlyPrefer, Comparison::StrictlyDisprefer);
    let g_over_f = weakly(Comparison::StrictlyDisprefer, Comparison::StrictlyPrefer);
    Ok(match (f_over_g, g_over_f) {
        (true, true) => Comparison::Indifferent,
        (true, false) => Comparison::StrictlyPrefer,
        (false, true) => Comparison::StrictlyDisprefer,
        (false, false) => unreachable!("the lexicographic rule is complete on a finite chain"),
    })
}

fn check_subset(inner: &Event, outer: &Event) -> Result<()> {
    if inner.is_subset(outer)? {
        Ok(())
    } else {
        Err(Error::NotSubset {
            inner: inner.to_string(),
            outer: outer.to_string(),
        })
    }
}

/// Whether `B ⊆ A` is null at `A`: it carries no mass at the class of `A`.
pub fn is_null_at(model: &GsleuModel, b: &Event, a: &Event) -> Result<bool> {
    model.check_event(a)?;
    check_subset(b, a)?;
    Ok(match model.class_index(a.bits()) {
        None => true,
        Some(k) => model.levels()[k].mass_bits(b.bits()).is_zero(),
    })
}

/// Whether `⪰_A` and `⪰_B` rank every pair of acts identically.
pub fn agreement(model: &GsleuModel, a: &Event, b: &Event) -> Result<bool> {
    model.check_event(a)?;
    model.check_event(b)?;
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ok(true),
        (true, false) | (false, true) => return Ok(false),
        _ => {}
    }
    Ok(class_of(model, a)? == class_of(model, b)?
        && conditional_measure(model, a)? == conditional_measure(model, b)?)
}

/// Agreement decided by comparing the two preorders on every act pair.
pub fn agreement_by_enumeration(model: &GsleuModel, a: &Event, b: &Event, cap: u128) -> Result<bool> {
    let acts = enumerate_acts(model.space(), model.outcomes(), cap)?;
    for f in &acts {
        for g in &acts {
            if indexed_prefer(model, a, f, g)?.is_weak() != indexed_prefer(model, b, f, g)?.is_weak() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `P_A(B)` against `P_A(C)`.
pub fn qual_prob_compare(model: &GsleuModel, a: &Event, b: &Event, c: &Event) -> Result<Comparison> {
    model.check_event(a)?;
    check_subset(b, a)?;
    check_subset(c, a)?;
    let k = model.class_index(a.bits()).ok_or(Error::EmptyEvent)?;
    let level = &model.levels()[k];
    Ok(Comparison::from_ordering(
        level.mass_bits(b.bits()).cmp(&level.mass_bits(c.bits())),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    ADominates,
    BDominates,
    Equivalent,
}

/// `A ≫ B`, `B ≫ A` or `A ≈ B`, decided by class index (`∅` is lowest).
pub fn dominance(model: &GsleuModel, a: &Event, b: &Event) -> Result<Dominance> {
    let ca = class_of(model, a)?;
    let cb = class_of(model, b)?;
    Ok(match ca.cmp(&cb) {
        Ordering::Less => Dominance::ADominates,
        Ordering::Greater => Dominance::BDominates,
        Ordering::Equal => Dominance::Equivalent,
    })
}

/// Default cap on the number of states for powerset enumeration.
pub const DEFAULT_EVENT_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassPartition {
    /// `classes[k - 1]` holds the events of class `k`, in increasing bit order.
    pub classes: Vec<Vec<Event>>,
    pub trivial: Event,
}

impl ClassPartition {
    pub fn class_of(&self, event: &Event) -> EventClass {
        if event.is_empty() {
            return EventClass::Trivial;
        }
        for (i, class) in self.classes.iter().enumerate() {
            if class.iter().any(|e| e == event) {
                return EventClass::Level(i + 1);
            }
        }
        EventClass::Trivial
    }
}

pub fn class_partition(model: &GsleuModel, max_states: usize) -> Result<ClassPartition> {
    let n = model.space().len();
    if n > max_states {
        return Err(Error::CapExceeded {
            what: "powerset enumeration (states)",
            required: n as u128,
            cap: max_states as u128,
        });
    }
    let mut classes = vec![Vec::new(); model.depth()];
    for e in powerset(model.space()) {
        if let Some(k) = model.class_index(e.bits()) {
            classes[k].push(e);
        }
    }
    Ok(ClassPartition {
        classes,
        trivial: Event::empty(model.space()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskPair {
    pub j: usize,
    pub k: usize,
    pub ordinally_equivalent: bool,
    pub affinely_related: bool,
    /// `(α, β)` with `u_j = α·u_k + β`, when one exists.
    pub witness: Option<(Q, Q)>,
}

/// Affine map `(α, β)`, `α > 0`, with `u = α·v + β`, if one exists.
pub(crate) fn affine_witness(u: &[Q], v: &[Q]) -> Option<(Q, Q)> {
    let (a, b) = (0..v.len())
        .flat_map(|a| (a + 1..v.len()).map(move |b| (a, b)))
        .find(|&(a, b)| v[a] != v[b])?;
    let alpha = (&u[a] - &u[b]) / (&v[a] - &v[b]);
    if !alpha.is_positive() {
        return None;
    }
    let beta = &u[a] - &alpha * &v[a];
    u.iter()
        .zip(v)
        .all(|(x, y)| *x == &alpha * y + &beta)
        .then_some((alpha, beta))
}

pub fn risk_profile(model: &GsleuModel) -> Vec<RiskPair> {
    let mut out = Vec::new();
    for j in 1..=model.depth() {
        for k in j + 1..=model.depth() {
            let uj = &model.level(j).utility;
            let uk = &model.level(k).utility;
            let witness = affine_witness(uj, uk);
            out.push(RiskPair {
                j,
                k,
                ordinally_equivalent: crate::model::ordinal_break(uj, uk).is_none(),
                affinely_related: witness.is_some(),
                witness,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::constant_act;
    use crate::fixtures::m0;
    use crate::rational::{int, q};

    fn act(m: &GsleuModel, labels: &str) -> Act {
        Act::from_labels(m.space(), m.outcomes(), labels.chars().map(|c| c.to_string())).unwrap()
    }

    fn ev(m: &GsleuModel, labels: &[&str]) -> Event {
        Event::from_labels(m.space(), labels.iter().copied()).unwrap()
    }

    #[test]
    fn level_expected_utilities() {
        let m = m0();
        let f = act(&m, "baca");
        assert_eq!(level_eu(&m, 1, &Event::full(m.space()), &f).unwrap(), q(1, 2));
        assert_eq!(level_eu(&m, 2, &ev(&m, &["s3", "s4"]), &f).unwrap(), int(4));
        let a = constant_act("a", m.space(), m.outcomes()).unwrap();
        for e in powerset(m.space()).skip(1) {
            let k = match class_of(&m, &e).unwrap() {
                EventClass::Level(k) => k,
                EventClass::Trivial => unreachable!(),
            };
            assert_eq!(level_eu(&m, k, &e, &a).unwrap(), int(0));
        }
        assert!(matches!(
            level_eu(&m, 1, &ev(&m, &["s3"]), &f),
            Err(Error::ClassMismatch { expected: 1, .. })
        ));
    }

    #[test]
    fn indexed_examples() {
        let m = m0();
        let f = act(&m, "baca");
        let g = act(&m, "abac");
        assert_eq!(
            indexed_prefer(&m, &ev(&m, &["s3", "s4"]), &f, &g).unwrap(),
            IndexedComparison::Decided(Comparison::StrictlyPrefer)
        );
        assert_eq!(
            indexed_prefer(&m, &ev(&m, &["s1", "s2"]), &f, &g).unwrap(),
            IndexedComparison::Decided(Comparison::Indifferent)
        );
        assert_eq!(
            indexed_prefer(&m, &ev(&m, &[]), &f, &g).unwrap(),
            IndexedComparison::Degenerate
        );
    }

    #[test]
    fn lexicographic_examples() {
        let m = m0();
        let f = act(&m, "baca");
        let g = act(&m, "abac");
        assert_eq!(
            lex_prefer(&m, &f, &g).unwrap(),
            LexVerdict {
                ordering: Comparison::StrictlyPrefer,
                deciding_level: Some(2)
            }
        );
        let h = act(&m, "aaab");
        let a = constant_act("a", m.space(), m.outcomes()).unwrap();
        assert_eq!(lex_prefer(&m, &h, &a).unwrap().deciding_level, Some(3));
        assert_eq!(
            lex_prefer(&m, &f, &f).unwrap(),
            LexVerdict {
                ordering: Comparison::Indifferent,
                deciding_level: None
            }
        );
        assert_eq!(lex_prefer_bruteforce(&m, &f, &g).unwrap(), Comparison::StrictlyPrefer);
        assert_eq!(lex_prefer_bruteforce(&m, &f, &f).unwrap(), Comparison::Indifferent);
    }

    #[test]
    fn sign_pattern_zero_plus_minus() {
        // Levels tie, then f wins, then g wins: f is strictly preferred.
        let m = m0();
        let f = act(&m, "aaca");
        let g = act(&m, "aaac");
        let lv = |x: &Act| lex_vector(&m, x.assignment());
        assert_eq!(lv(&f)[0], lv(&g)[0]);
        assert!(lv(&f)[1] > lv(&g)[1]);
        assert!(lv(&f)[2] < lv(&g)[2]);
        assert_eq!(lex_prefer_bruteforce(&m, &f, &g).unwrap(), Comparison::StrictlyPrefer);
    }

    #[test]
    fn nullity_examples() {
        let m = m0();
        assert!(is_null_at(&m, &ev(&m, &["s3"]), &ev(&m, &["s2", "s3"])).unwrap());
        assert!(!is_null_at(&m, &ev(&m, &["s2"]), &ev(&m, &["s2", "s3"])).unwrap());
        assert!(is_null_at(&m, &ev(&m, &[]), &ev(&m, &[])).unwrap());
        assert!(matches!(
            is_null_at(&m, &ev(&m, &["s1"]), &ev(&m, &["s2"])),
            Err(Error::NotSubset { .. })
        ));
    }

    #[test]
    fn nullity_matches_agreement_definition() {
        let m = m0();
        for a in powerset(m.space()) {
            for b in powerset(m.space()).filter(|b| b.is_subset(&a).unwrap()) {
                let rest = a.difference(&b).unwrap();
                assert_eq!(
                    is_null_at(&m, &b, &a).unwrap(),
                    agreement(&m, &rest, &a).unwrap(),
                    "B={b} A={a}"
                );
            }
        }
    }

    #[test]
    fn agreement_examples_and_enumeration() {
        let m = m0();
        assert!(agreement(&m, &ev(&m, &["s2", "s3"]), &ev(&m, &["s2"])).unwrap());
        assert!(!agreement(&m, &ev(&m, &["s1", "s2"]), &ev(&m, &["s3", "s4"])).unwrap());
        let s = Event::full(m.space());
        assert!(agreement(&m, &s, &s).unwrap());
        let events: Vec<Event> = powerset(m.space()).collect();
        for (i, a) in events.iter().enumerate() {
            for b in &events[i..] {
                assert_eq!(
                    agreement(&m, a, b).unwrap(),
                    agreement_by_enumeration(&m, a, b, 1000).unwrap(),
                    "{a} {b}"
                );
            }
        }
    }

    #[test]
    fn qualitative_probability_examples() {
        let m = m0();
        let a = ev(&m, &["s1", "s2", "s3"]);
        assert_eq!(
            qual_prob_compare(&m, &a, &ev(&m, &["s1"]), &ev(&m, &["s2"])).unwrap(),
            Comparison::Indifferent
        );
        assert_eq!(
            qual_prob_compare(&m, &a, &ev(&m, &["s1"]), &ev(&m, &["s3"])).unwrap(),
            Comparison::StrictlyPrefer
        );
        assert_eq!(
            qual_prob_compare(&m, &a, &ev(&m, &[]), &ev(&m, &[])).unwrap(),
            Comparison::Indifferent
        );
    }

    #[test]
    fn qualitative_probability_matches_bets() {
        let m = m0();
        let best = constant_act("c", m.space(), m.outcomes()).unwrap();
        let worst = constant_act("a", m.space(), m.outcomes()).unwrap();
        for a in powerset(m.space()).skip(1) {
            for b in powerset(m.space()).filter(|b| b.is_subset(&a).unwrap()) {
                for c in powerset(m.space()).filter(|c| c.is_subset(&a).unwrap()) {
                    let fb = crate::act::compose(&best, &b, &worst).unwrap();
                    let fc = crate::act::compose(&best, &c, &worst).unwrap();
                    assert_eq!(
                        qual_prob_compare(&m, &a, &b, &c).unwrap(),
                        indexed_prefer(&m, &a, &fb, &fc).unwrap().comparison()
                    );
                }
            }
        }
    }

    #[test]
    fn dominance_examples() {
        let m = m0();
        assert_eq!(
            dominance(&m, &ev(&m, &["s1"]), &ev(&m, &["s3"])).unwrap(),
            Dominance::ADominates
        );
        assert_eq!(
            dominance(&m, &ev(&m, &["s1"]), &ev(&m, &["s2", "s3"])).unwrap(),
            Dominance::Equivalent
        );
        assert_eq!(
            dominance(&m, &ev(&m, &["s4"]), &ev(&m, &[])).unwrap(),
            Dominance::ADominates
        );
    }

    #[test]
    fn dominance_matches_nullity_definition() {
        let m = m0();
        let events: Vec<Event> = powerset(m.space()).collect();
        for a in &events {
            for b in &events {
                let u = a.union(b).unwrap();
                let a_over_b = events.iter().any(|c| {
                    u.is_subset(c).unwrap()
                        && !is_null_at(&m, a, c).unwrap()
                        && is_null_at(&m, b, c).unwrap()
                });
                assert_eq!(
                    a_over_b,
                    dominance(&m, a, b).unwrap() == Dominance::ADominates,
                    "{a} {b}"
                );
            }
        }
    }

    #[test]
    fn class_partition_counts() {
        let m = m0();
        let p = class_partition(&m, DEFAULT_EVENT_CAP).unwrap();
        let sizes: Vec<usize> = p.classes.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![12, 2, 1]);
        assert!(p.trivial.is_empty());
        assert!(p.classes[0].contains(&Event::full(m.space())));
        assert_eq!(p.classes[1], vec![ev(&m, &["s3"]), ev(&m, &["s3", "s4"])]);
        assert!(matches!(
            class_partition(&m, 3),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn risk_profiles() {
        let m = m0();
        let report = risk_profile(&m);
        let pair = |j, k| report.iter().find(|r| r.j == j && r.k == k).unwrap();
        assert!(pair(1, 3).affinely_related);
        assert_eq!(pair(1, 3).witness, Some((int(1), int(0))));
        assert!(pair(1, 2).ordinally_equivalent);
        assert!(!pair(1, 2).affinely_related);
        let u: Vec<Q> = vec![int(0), int(1), int(2)];
        let v: Vec<Q> = u.iter().map(|x| int(2) * x + int(5)).collect();
        assert_eq!(affine_witness(&v, &u), Some((int(2), int(5))));
        let neg: Vec<Q> = u.iter().map(|x| -x).collect();
        assert_eq!(affine_witness(&neg, &u), None);
    }
}
