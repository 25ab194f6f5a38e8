//! Conditioning from the unconditional order alone.
//!
//! The Savage conditional compares `fAh` with `gAh`. The strong conditional
//! also asks that the strict ranking survive perturbing either side to a
//! constant on each cell of some finite partition of `A`.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::act::{check_act_cap, compose, constant_by_index, Act, ActIndexer};
use crate::engine::{lex_compare_vectors, lex_vector, level_value, Comparison};
use crate::error::{Error, Result};
use crate::event::{bit_indices, submasks, Event, Partition};
use crate::family::{derive_table, PreferenceTable};
use crate::model::{conditional_bits, GsleuModel};
use crate::rational::{self, Q};

/// Largest `3^|A|` the partition search will take on.
pub const PARTITION_WORK_CAP: u128 = 43_046_721;

/// Fewest cells, at most `max_blocks`, partitioning `mask` into sets for
/// which `good` holds. The singleton partition is tried first.
pub(crate) fn min_good_partition(
    mask: u64,
    max_blocks: usize,
    good: impl Fn(u64) -> bool,
) -> Option<Vec<u64>> {
    let members: Vec<usize> = bit_indices(mask).collect();
    let k = members.len();
    if k == 0 {
        return Some(Vec::new());
    }
    if k <= max_blocks && members.iter().all(|&s| good(1 << s)) {
        return Some(members.iter().map(|&s| 1u64 << s).collect());
    }
    let expand = |x: usize| -> u64 {
        bit_indices(x as u64).fold(0, |acc, i| acc | (1u64 << members[i]))
    };
    let size = 1usize << k;
    let ok: Vec<bool> = (0..size).map(|x| x != 0 && good(expand(x))).collect();
    // best[x]: fewest good cells covering x, with the cell holding x's lowest member.
    let mut best = vec![usize::MAX; size];
    let mut choice = vec![0usize; size];
    best[0] = 0;
    for x in 1..size {
        let low = x & x.wrapping_neg();
        let rest = x ^ low;
        for sub in submasks(rest as u64) {
            let cell = sub as usize | low;
            if ok[cell] && best[x ^ cell] != usize::MAX && best[x ^ cell] + 1 < best[x] {
                best[x] = best[x ^ cell] + 1;
                choice[x] = cell;
            }
        }
    }
    let full = size - 1;
    if best[full] == usize::MAX || best[full] > max_blocks {
        return None;
    }
    let mut cells = Vec::new();
    let mut x = full;
    while x != 0 {
        cells.push(expand(choice[x]));
        x ^= choice[x];
    }
    cells.sort_unstable();
    Some(cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningVerdict {
    pub savage_strict: bool,
    pub strong_strict: bool,
    /// First constant, best first, for which no partition works.
    pub failing_constant: Option<String>,
    /// One working partition per constant, when the strong test passes.
    pub witness_partitions: Vec<(String, Partition)>,
    /// Some constant needed a partition coarser than the singletons.
    pub coarser_only: bool,
}

impl ConditioningVerdict {
    pub fn witness_partition(&self) -> Option<&Partition> {
        self.witness_partitions.first().map(|(_, p)| p)
    }
}

fn check_nonempty(model: &GsleuModel, a: &Event, f: &Act, g: &Act) -> Result<()> {
    model.check_event(a)?;
    model.check_act(f)?;
    model.check_act(g)?;
    if a.is_empty() {
        return Err(Error::EmptyEvent);
    }
    Ok(())
}

/// Lexicographic comparison of `Σ_{s∈A} p_k(s)(u_k(f(s)) − u_k(g(s)))` over the levels.
pub fn savage_conditional(model: &GsleuModel, a: &Event, f: &Act, g: &Act) -> Result<Comparison> {
    check_nonempty(model, a, f, g)?;
    for k in 0..model.depth() {
        let diff = level_value(model, k, a.bits(), f.assignment())
            - level_value(model, k, a.bits(), g.assignment());
        if !diff.is_zero() {
            return Ok(if diff.is_positive() {
                Comparison::StrictlyPrefer
            } else {
                Comparison::StrictlyDisprefer
            });
        }
    }
    Ok(Comparison::Indifferent)
}

fn partition_budget_check(a: &Event) -> Result<()> {
    let work = 3u128.pow(a.len() as u32);
    if work > PARTITION_WORK_CAP {
        return Err(Error::CapExceeded {
            what: "partition search",
            required: work,
            cap: PARTITION_WORK_CAP,
        });
    }
    Ok(())
}

/// Constant outcomes ordered best first under the unconditional order, ties by index.
fn constants_best_first(model: &GsleuModel) -> Vec<usize> {
    let n = model.space().len();
    let vectors: Vec<Vec<Q>> = (0..model.outcomes().len())
        .map(|o| lex_vector(model, &vec![o; n]))
        .collect();
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&x, &y| vectors[y].cmp(&vectors[x]).then(x.cmp(&y)));
    order
}

/// The strong conditional test with `h = g`: for every constant `k` some
/// partition of `A` into at most `partition_budget` cells has, on each cell
/// `C`, both `k C (fAg) ≻ g` and `fAg ≻ k C g`.
pub fn strong_conditional_strict(
    model: &GsleuModel,
    a: &Event,
    f: &Act,
    g: &Act,
    partition_budget: usize,
) -> Result<ConditioningVerdict> {
    check_nonempty(model, a, f, g)?;
    partition_budget_check(a)?;
    let savage_strict = savage_conditional(model, a, f, g)? == Comparison::StrictlyPrefer;
    let mut verdict = ConditioningVerdict {
        savage_strict,
        strong_strict: false,
        failing_constant: None,
        witness_partitions: Vec::new(),
        coarser_only: false,
    };
    if !savage_strict {
        return Ok(verdict);
    }
    let fag = compose(f, a, g)?;
    let fag_v = lex_vector(model, fag.assignment());
    let g_v = lex_vector(model, g.assignment());
    let beats = |x: &[Q], y: &[Q]| lex_compare_vectors(x, y).0 == Comparison::StrictlyPrefer;
    for o in constants_best_first(model) {
        let k = constant_by_index(o, model.space(), model.outcomes());
        let good = |cell: u64| {
            let c = Event::from_bits(model.space(), cell);
            let up = compose(&k, &c, &fag).expect("same spaces");
            let down = compose(&k, &c, g).expect("same spaces");
            beats(&lex_vector(model, up.assignment()), &g_v)
                && beats(&fag_v, &lex_vector(model, down.assignment()))
        };
        match min_good_partition(a.bits(), partition_budget, good) {
            Some(cells) => {
                if cells.len() < a.len() {
                    verdict.coarser_only = true;
                }
                let partition = cells
                    .into_iter()
                    .map(|b| Event::from_bits(model.space(), b))
                    .collect();
                verdict
                    .witness_partitions
                    .push((model.outcomes().label(o).to_string(), partition));
            }
            None => {
                verdict.failing_constant = Some(model.outcomes().label(o).to_string());
                verdict.witness_partitions.clear();
                verdict.coarser_only = false;
                return Ok(verdict);
            }
        }
    }
    verdict.strong_strict = true;
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservabilityClass {
    Equivalent,
    FinenessFailure,
    Anomaly,
}

#[derive(Debug, Clone)]
pub struct ObservabilityInstance {
    pub event: Event,
    pub f: Act,
    pub g: Act,
    pub indexed_strict: bool,
    pub strong_strict: bool,
    pub class: ObservabilityClass,
    /// Whether `max atom probability × range(u_k) < gap` at the class level of the event.
    pub fine: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ObservabilityReport {
    pub instances: u64,
    pub equivalent: u64,
    pub fineness_failures: u64,
    pub anomalies: u64,
    /// Instances where the fineness condition held.
    pub fine_instances: u64,
    /// Fine instances classified Equivalent.
    pub fine_equivalent: u64,
    /// `strong ⇒ savage` or `indexed strict ⇒ savage` broken.
    pub implication_failures: u64,
    pub indexed_strict: u64,
    pub strong_strict: u64,
    /// Up to `sample_limit` FinenessFailure entries and every Anomaly entry.
    pub samples: Vec<ObservabilityInstance>,
}

/// Fineness of one instance at level `k`: the largest atom of `P_A` times the
/// utility range stays below the conditional expected utility gap.
fn fineness(model: &GsleuModel, k: usize, a: u64, f: &[usize], g: &[usize]) -> bool {
    let p = conditional_bits(model, k, a);
    let u = &model.levels()[k].utility;
    let max_atom = p.iter().max().cloned().unwrap_or_else(rational::zero);
    let range = u.iter().max().unwrap() - u.iter().min().unwrap();
    let eu = |x: &[usize]| -> Q { p.iter().enumerate().map(|(s, w)| w * &u[x[s]]).sum() };
    let gap = (eu(f) - eu(g)).abs();
    max_atom * range < gap
}

/// Classifies every nonempty `A` and ordered pair `(f, g)` drawn from `scope`
/// (all acts when `None`).
pub fn observability_check(
    model: &GsleuModel,
    scope: Option<&[Act]>,
    act_cap: u128,
    sample_limit: usize,
) -> Result<ObservabilityReport> {
    let n = model.space().len();
    check_act_cap(n, model.outcomes().len(), act_cap)?;
    if 3u128.pow(n as u32) > PARTITION_WORK_CAP {
        return Err(Error::CapExceeded {
            what: "partition search",
            required: 3u128.pow(n as u32),
            cap: PARTITION_WORK_CAP,
        });
    }
    let ix = ActIndexer::new(n, model.outcomes().len());
    let acts: Vec<usize> = match scope {
        Some(list) => {
            for f in list {
                model.check_act(f)?;
            }
            list.iter().map(Act::index).collect()
        }
        None => (0..ix.count).collect(),
    };
    // Exhaustive runs rank everything once; scoped runs evaluate on demand.
    let oracle = match scope {
        None => Oracle::Table(derive_table(model, act_cap)?),
        Some(_) => Oracle::Lazy(model, RefCell::new(HashMap::new())),
    };
    let constants: Vec<usize> = constants_best_first(model)
        .into_iter()
        .map(|o| ix.constant(o))
        .collect();
    let mut report = ObservabilityReport::default();
    for a in submasks(model.space().full_bits()).skip(1) {
        let k = model.class_index(a).expect("nonempty events have a class");
        for &f in &acts {
            for &g in &acts {
                if f == g {
                    continue;
                }
                report.instances += 1;
                let indexed = oracle.indexed_strict(&ix, k, a, f, g);
                let fag = ix.compose(f, a, g);
                let better = |x: usize, y: usize| oracle.better(&ix, x, y);
                let savage = better(fag, g);
                let strong = savage && strong_bulk(&ix, &better, &constants, a, fag, g);
                report.indexed_strict += indexed as u64;
                report.strong_strict += strong as u64;
                if (strong && !savage) || (indexed && !savage) {
                    report.implication_failures += 1;
                }
                let fine = indexed
                    && fineness(model, k, a, &ix.assignment(f), &ix.assignment(g));
                report.fine_instances += fine as u64;
                let class = if strong == indexed {
                    ObservabilityClass::Equivalent
                } else if indexed && !fine {
                    ObservabilityClass::FinenessFailure
                } else {
                    ObservabilityClass::Anomaly
                };
                if fine && class == ObservabilityClass::Equivalent {
                    report.fine_equivalent += 1;
                }
                match class {
                    ObservabilityClass::Equivalent => report.equivalent += 1,
                    ObservabilityClass::FinenessFailure => report.fineness_failures += 1,
                    ObservabilityClass::Anomaly => report.anomalies += 1,
                }
                let keep = match class {
                    ObservabilityClass::Equivalent => false,
                    ObservabilityClass::FinenessFailure => {
                        (report.fineness_failures as usize) <= sample_limit
                    }
                    ObservabilityClass::Anomaly => true,
                };
                if keep {
                    report.samples.push(ObservabilityInstance {
                        event: Event::from_bits(model.space(), a),
                        f: Act::new(model.space(), model.outcomes(), ix.assignment(f))?,
                        g: Act::new(model.space(), model.outcomes(), ix.assignment(g))?,
                        indexed_strict: indexed,
                        strong_strict: strong,
                        class,
                        fine,
                    });
                }
            }
        }
    }
    Ok(report)
}

enum Oracle<'a> {
    Table(PreferenceTable),
    Lazy(&'a GsleuModel, RefCell<HashMap<usize, Vec<Q>>>),
}

impl Oracle<'_> {
    /// `x ≻ y` unconditionally.
    fn better(&self, ix: &ActIndexer, x: usize, y: usize) -> bool {
        match self {
            Oracle::Table(t) => {
                let u = t.unconditional().expect("derived tables carry the order");
                u[x] > u[y]
            }
            Oracle::Lazy(model, memo) => {
                let mut memo = memo.borrow_mut();
                for act in [x, y] {
                    memo.entry(act)
                        .or_insert_with(|| lex_vector(model, &ix.assignment(act)));
                }
                memo[&x] > memo[&y]
            }
        }
    }

    /// `f ≻_A g`, with `k` the 0-based class of `A`.
    fn indexed_strict(&self, ix: &ActIndexer, k: usize, a: u64, f: usize, g: usize) -> bool {
        match self {
            Oracle::Table(t) => t.strict(a, f, g),
            Oracle::Lazy(model, _) => {
                level_value(model, k, a, &ix.assignment(f)) > level_value(model, k, a, &ix.assignment(g))
            }
        }
    }
}

/// The strong test on act indices, given the strict unconditional order.
fn strong_bulk(
    ix: &ActIndexer,
    better: &dyn Fn(usize, usize) -> bool,
    constants: &[usize],
    a: u64,
    fag: usize,
    g: usize,
) -> bool {
    constants.iter().all(|&c| {
        let good = |cell: u64| better(ix.compose(c, cell, fag), g) && better(fag, ix.compose(c, cell, g));
        min_good_partition(a, usize::MAX, good).is_some()
    })
}

/// Strong test verdicts for every pair of acts at `A`, against a table's
/// unconditional order. Used to cross-check the single-shot path.
pub fn strong_matrix(table: &PreferenceTable, a: &Event) -> Option<Vec<Vec<bool>>> {
    let uncond = table.unconditional()?;
    let ix = table.indexer();
    let constants: Vec<usize> = (0..table.outcomes().len()).map(|o| ix.constant(o)).collect();
    let count = table.act_count();
    Some(
        (0..count)
            .map(|f| {
                (0..count)
                    .map(|g| {
                        let fag = ix.compose(f, a.bits(), g);
                        let better = |x: usize, y: usize| uncond[x] > uncond[y];
                        better(fag, g) && strong_bulk(&ix, &better, &constants, a.bits(), fag, g)
                    })
                    .collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{indexed_prefer, IndexedComparison};
    use crate::fixtures::m0;

    fn act(m: &GsleuModel, labels: &[&str]) -> Act {
        Act::from_labels(m.space(), m.outcomes(), labels).unwrap()
    }

    fn event(m: &GsleuModel, labels: &[&str]) -> Event {
        Event::from_labels(m.space(), labels).unwrap()
    }

    #[test]
    fn savage_examples() {
        let m = m0();
        let f = act(&m, &["b", "a", "c", "a"]);
        let g = act(&m, &["a", "b", "a", "c"]);
        let a = event(&m, &["s3", "s4"]);
        assert_eq!(savage_conditional(&m, &a, &f, &g).unwrap(), Comparison::StrictlyPrefer);
        let f2 = act(&m, &["b", "a", "c", "a"]);
        let g2 = act(&m, &["b", "a", "a", "a"]);
        let wedge = event(&m, &["s1", "s3"]);
        assert_eq!(savage_conditional(&m, &wedge, &f2, &g2).unwrap(), Comparison::StrictlyPrefer);
        assert_eq!(savage_conditional(&m, &a, &f, &f).unwrap(), Comparison::Indifferent);
        assert!(matches!(
            savage_conditional(&m, &Event::empty(m.space()), &f, &g),
            Err(Error::EmptyEvent)
        ));
    }

    #[test]
    fn savage_matches_composition_for_any_h() {
        let m = m0();
        let a = event(&m, &["s1", "s3"]);
        let f = act(&m, &["c", "a", "b", "a"]);
        let g = act(&m, &["a", "c", "c", "b"]);
        let expected = savage_conditional(&m, &a, &f, &g).unwrap();
        for h in crate::act::enumerate_acts(m.space(), m.outcomes(), 1000).unwrap() {
            let fh = compose(&f, &a, &h).unwrap();
            let gh = compose(&g, &a, &h).unwrap();
            assert_eq!(crate::engine::lex_prefer(&m, &fh, &gh).unwrap().ordering, expected);
        }
    }

    #[test]
    fn wedge_fails_strong_test_at_c() {
        let m = m0();
        let wedge = event(&m, &["s1", "s3"]);
        let f = act(&m, &["b", "a", "c", "a"]);
        let g = act(&m, &["b", "a", "a", "a"]);
        let v = strong_conditional_strict(&m, &wedge, &f, &g, 2).unwrap();
        assert!(v.savage_strict);
        assert!(!v.strong_strict);
        assert_eq!(v.failing_constant.as_deref(), Some("c"));
        assert!(matches!(
            indexed_prefer(&m, &wedge, &f, &g).unwrap(),
            IndexedComparison::Decided(Comparison::Indifferent)
        ));
    }

    #[test]
    fn identical_acts_are_not_strict() {
        let m = m0();
        let f = act(&m, &["b", "a", "c", "a"]);
        let v = strong_conditional_strict(&m, &event(&m, &["s2"]), &f, &f, 4).unwrap();
        assert!(!v.savage_strict && !v.strong_strict && v.failing_constant.is_none());
    }

    #[test]
    fn partition_search_prefers_few_cells() {
        // Only the full set and {0} are good: no partition of {0,1,2} except the whole.
        let cells = min_good_partition(0b111, 3, |c| c == 0b111 || c == 0b001).unwrap();
        assert_eq!(cells, vec![0b111]);
        assert!(min_good_partition(0b111, 3, |c| c == 0b001).is_none());
        let cells = min_good_partition(0b1011, 2, |c| c == 0b0011 || c == 0b1000).unwrap();
        assert_eq!(cells, vec![0b0011, 0b1000]);
        assert!(min_good_partition(0b1011, 1, |c| c == 0b0011 || c == 0b1000).is_none());
    }

    #[test]
    fn single_shot_matches_bulk() {
        let m = m0();
        let table = derive_table(&m, 1000).unwrap();
        let acts = crate::act::enumerate_acts(m.space(), m.outcomes(), 1000).unwrap();
        for labels in [vec!["s1", "s3"], vec!["s3", "s4"], vec!["s2"]] {
            let a = event(&m, &labels);
            let matrix = strong_matrix(&table, &a).unwrap();
            for f in acts.iter().step_by(7) {
                for g in acts.iter().step_by(5) {
                    let v = strong_conditional_strict(&m, &a, f, g, a.len()).unwrap();
                    assert_eq!(v.strong_strict, matrix[f.index()][g.index()], "{a} {f} {g}");
                }
            }
        }
    }

    #[test]
    fn m0_has_no_anomalies() {
        let report = observability_check(&m0(), None, 1000, 5).unwrap();
        assert_eq!(report.anomalies, 0);
        assert_eq!(report.implication_failures, 0);
        assert_eq!(report.instances, 15 * 81 * 80);
        assert!(report.samples.len() <= 5);
    }
}
