//! Reconstructs a lexicographic model from an explicit preference table.
//!
//! Stages: hierarchy from nullity, a measure per class from bets on the
//! best and worst constants, then a utility per class from every comparison
//! indexed by an event of that class. The assembled model is always checked
//! against the input by re-deriving the whole table.

use std::collections::HashSet;

use num_traits::Zero;

use crate::act::ActIndexer;
use crate::axioms::{canonical_chain, check_table, AxiomId, AxiomStatus, CheckOptions};
use crate::engine::ClassPartition;
use crate::error::{Error, Result};
use crate::event::{bit_indices, submasks, Event};
use crate::family::{act_name, derive_table, PreferenceTable};
use crate::feasibility::{
    irreducible_infeasible_subsystem, normalized_key, solve, ConstraintSystem, FeasibilityResult,
    Relation,
};
use crate::model::{GsleuModel, Level};
use crate::rational::{self, q, Q};

#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub check: CheckOptions,
    /// Utility candidates tried per class when the first utility solve fails.
    pub retry_cap: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            check: CheckOptions::default(),
            retry_cap: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDiagnostics {
    pub level: usize,
    pub events: usize,
    pub atoms: Vec<String>,
    pub measure_constraints: usize,
    pub utility_constraints: usize,
    /// Utility candidates tried after the first solve failed.
    pub retries: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynthesisDiagnostics {
    pub classes: Vec<ClassDiagnostics>,
    pub lp_solves: usize,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub model: GsleuModel,
    pub diagnostics: SynthesisDiagnostics,
    pub verified: bool,
}

/// Builds a system while dropping rows that are positive multiples of earlier ones.
struct Rows {
    sys: ConstraintSystem,
    seen: HashSet<(Vec<Q>, Q, Relation)>,
}

impl Rows {
    fn new(variables: Vec<String>) -> Self {
        Rows {
            sys: ConstraintSystem::new(variables),
            seen: HashSet::new(),
        }
    }

    fn add(&mut self, dense: Vec<Q>, relation: Relation, rhs: Q, label: impl FnOnce() -> String) {
        match normalized_key(&dense, &rhs) {
            Some((key, r)) => {
                if !self.seen.insert((key, r, relation)) {
                    return;
                }
            }
            None => {
                let holds = match relation {
                    Relation::Ge => rational::zero() >= rhs,
                    Relation::Gt => rational::zero() > rhs,
                    Relation::Eq => rhs.is_zero(),
                };
                if holds {
                    return;
                }
            }
        }
        let coeffs = dense
            .into_iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .collect();
        self.sys.add_labeled(coeffs, relation, rhs, Some(label()));
    }
}

struct Ctx<'a> {
    t: &'a PreferenceTable,
    ix: ActIndexer,
    ids: Vec<u32>,
    /// Constant outcomes grouped into tiers at `S`, worst first.
    outcome_tiers: Vec<Vec<usize>>,
    best: usize,
    worst: usize,
}

impl<'a> Ctx<'a> {
    fn new(t: &'a PreferenceTable) -> Self {
        let ix = t.indexer();
        let ids = t.preorder_ids();
        let full = t.space().full_bits();
        let r = t.ranks(full);
        let m = t.outcomes().len();
        let mut outcome_tiers: Vec<Vec<usize>> = Vec::new();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&o| (r[ix.constant(o)], o));
        for o in order {
            match outcome_tiers.last_mut() {
                Some(tier) if r[ix.constant(tier[0])] == r[ix.constant(o)] => tier.push(o),
                _ => outcome_tiers.push(vec![o]),
            }
        }
        let best = ix.constant(outcome_tiers.last().unwrap()[0]);
        let worst = ix.constant(outcome_tiers[0][0]);
        Ctx {
            t,
            ix,
            ids,
            outcome_tiers,
            best,
            worst,
        }
    }

    fn null(&self, b: u64, a: u64) -> bool {
        self.ids[(a & !b) as usize] == self.ids[a as usize]
    }

    /// States of `top` whose singleton is non-null at `top`.
    fn atoms(&self, top: u64) -> u64 {
        bit_indices(top)
            .filter(|&s| !self.null(1 << s, top))
            .fold(0, |acc, s| acc | (1 << s))
    }

    fn label(&self, bits: u64) -> String {
        Event::from_bits(self.t.space(), bits).to_string()
    }
}

/// Runs the gate axioms; any violation stops synthesis.
fn precheck(table: &PreferenceTable, opts: &CheckOptions) -> Result<()> {
    let mut ids = vec![
        AxiomId::P1_5,
        AxiomId::P2_5,
        AxiomId::P3_5,
        AxiomId::P4_5,
        AxiomId::P5_5,
        AxiomId::SE,
    ];
    if table.unconditional().is_some() {
        ids.push(AxiomId::P0_5);
    }
    let failed: Vec<String> = ids
        .into_iter()
        .map(|id| check_table(table, id, opts))
        .filter(|r| r.status == AxiomStatus::Violated)
        .map(|r| match r.witnesses.first() {
            Some(w) => format!("{} ({} failures, first at clause {:?})", r.id, r.failures, w.clause),
            None => r.id.to_string(),
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::AxiomPrecheckFailed(failed.join("; ")))
    }
}

/// Classes of nonempty events under `≈`, ordered by `≫` (highest first).
/// `A ≫ B` is read off at `A ∪ B`: `A` non-null there and `B` null.
pub fn infer_hierarchy(table: &PreferenceTable) -> Result<ClassPartition> {
    let ctx = Ctx::new(table);
    hierarchy(&ctx)
}

fn hierarchy(ctx: &Ctx) -> Result<ClassPartition> {
    let dom = |a: u64, b: u64| {
        let u = a | b;
        !ctx.null(a, u) && ctx.null(b, u)
    };
    let mut classes: Vec<Vec<u64>> = Vec::new();
    for e in submasks(ctx.t.space().full_bits()).skip(1) {
        match classes
            .iter_mut()
            .find(|c| !dom(e, c[0]) && !dom(c[0], e))
        {
            Some(c) => c.push(e),
            None => classes.push(vec![e]),
        }
    }
    classes.sort_by(|x, y| {
        if dom(x[0], y[0]) {
            std::cmp::Ordering::Less
        } else if dom(y[0], x[0]) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let space = ctx.t.space();
    Ok(ClassPartition {
        classes: classes
            .into_iter()
            .map(|c| c.into_iter().map(|b| Event::from_bits(space, b)).collect())
            .collect(),
        trivial: Event::empty(space),
    })
}

fn class_top(partition: &ClassPartition, k: usize) -> Result<u64> {
    let class = partition
        .classes
        .get(k.wrapping_sub(1))
        .ok_or_else(|| Error::Parse(format!("no class {k}")))?;
    Ok(class.iter().fold(0, |acc, e| acc | e.bits()))
}

/// Probability on the atoms of class `k` matching the bets `best B worst`
/// ranked at the class's top event.
pub fn infer_measure(table: &PreferenceTable, k: usize, partition: &ClassPartition) -> Result<Vec<Q>> {
    let ctx = Ctx::new(table);
    let top = class_top(partition, k)?;
    let (p, _) = measure(&ctx, top)?;
    Ok(p)
}

fn bet_tiers(ctx: &Ctx, top: u64, atoms: u64) -> Vec<Vec<u64>> {
    let r = ctx.t.ranks(top);
    let mut bets: Vec<(u32, u64)> = submasks(atoms)
        .map(|b| (r[ctx.ix.compose(ctx.best, b, ctx.worst)], b))
        .collect();
    bets.sort();
    let mut tiers: Vec<Vec<u64>> = Vec::new();
    let mut last = None;
    for (rank, b) in bets {
        if last == Some(rank) {
            tiers.last_mut().unwrap().push(b);
        } else {
            tiers.push(vec![b]);
            last = Some(rank);
        }
    }
    tiers
}

/// Adds `p(B) ~ p(C)` rows for a worst-first tiering of subsets of `atoms`.
fn add_qualitative_rows(rows: &mut Rows, vars: &[usize], tiers: &[Vec<u64>], name: &dyn Fn(u64) -> String) {
    let n = vars.len();
    let indicator = |b: u64| -> Vec<Q> {
        vars.iter()
            .map(|&s| if b & (1 << s) != 0 { rational::one() } else { rational::zero() })
            .collect()
    };
    let diff = |x: u64, y: u64| -> Vec<Q> {
        indicator(x).into_iter().zip(indicator(y)).map(|(a, b)| a - b).collect()
    };
    for (t, tier) in tiers.iter().enumerate() {
        let rep = tier[0];
        for &b in &tier[1..] {
            rows.add(diff(b, rep), Relation::Eq, rational::zero(), || {
                format!("p({}) = p({})", name(b), name(rep))
            });
        }
        if t + 1 < tiers.len() {
            let up = tiers[t + 1][0];
            rows.add(diff(up, rep), Relation::Gt, rational::zero(), || {
                format!("p({}) > p({})", name(up), name(rep))
            });
        }
    }
    rows.add(vec![rational::one(); n], Relation::Eq, rational::one(), || "total mass".into());
}

fn measure(ctx: &Ctx, top: u64) -> Result<(Vec<Q>, usize)> {
    let atoms = ctx.atoms(top);
    let vars: Vec<usize> = bit_indices(atoms).collect();
    let space = ctx.t.space();
    let mut rows = Rows::new(vars.iter().map(|&s| format!("p_{}", space.label(s))).collect());
    let tiers = bet_tiers(ctx, top, atoms);
    add_qualitative_rows(&mut rows, &vars, &tiers, &|b| ctx.label(b));
    for (i, &s) in vars.iter().enumerate() {
        let mut e = vec![rational::zero(); vars.len()];
        e[i] = rational::one();
        rows.add(e, Relation::Gt, rational::zero(), || format!("{} is an atom", space.label(s)));
    }
    let count = rows.sys.len();
    let p = solve_or_certify(&rows.sys, &format!("bets on {} admit no probability", ctx.label(top)))?;
    Ok((spread(&vars, &p, space.len()), count))
}

fn spread(vars: &[usize], values: &[Q], n: usize) -> Vec<Q> {
    let mut out = vec![rational::zero(); n];
    for (&s, v) in vars.iter().zip(values) {
        out[s] = v.clone();
    }
    out
}

fn solve_or_certify(sys: &ConstraintSystem, reason: &str) -> Result<Vec<Q>> {
    match solve(sys)? {
        FeasibilityResult::Feasible { assignment, .. } => Ok(assignment),
        FeasibilityResult::Infeasible => {
            let certificate = irreducible_infeasible_subsystem(sys)?.unwrap_or_else(|| sys.clone());
            Err(Error::Unrepresentable {
                reason: reason.to_string(),
                certificate: Box::new(certificate),
            })
        }
    }
}

/// A probability on the states named by `tiers` (worst first, each tier a
/// set of equally likely events) reproducing the order, or `Unrepresentable`
/// with an infeasible subsystem as certificate.
pub fn measure_from_qualitative_order(space: &std::sync::Arc<crate::event::StateSpace>, tiers: &[Vec<Event>]) -> Result<Vec<Q>> {
    let support = tiers.iter().flatten().fold(0u64, |acc, e| acc | e.bits());
    let vars: Vec<usize> = bit_indices(support).collect();
    let mut rows = Rows::new(vars.iter().map(|&s| format!("p_{}", space.label(s))).collect());
    let bits: Vec<Vec<u64>> = tiers
        .iter()
        .map(|t| t.iter().map(Event::bits).collect())
        .collect();
    add_qualitative_rows(&mut rows, &vars, &bits, &|b| Event::from_bits(space, b).to_string());
    for (i, &s) in vars.iter().enumerate() {
        let mut e = vec![rational::zero(); vars.len()];
        e[i] = rational::one();
        rows.add(e, Relation::Ge, rational::zero(), || format!("p_{} nonnegative", space.label(s)));
    }
    let p = solve_or_certify(&rows.sys, "the qualitative order is not additively representable")?;
    Ok(spread(&vars, &p, space.len()))
}

/// Distinct restrictions to `carrier`, as canonical act indices (worst
/// constant off the carrier), sorted worst first and grouped into tiers.
fn restricted_tiers(ctx: &Ctx, event: u64, carrier: u64) -> Vec<Vec<usize>> {
    let r = ctx.t.ranks(event);
    let mut seen = vec![false; ctx.ix.count];
    let mut reps: Vec<usize> = Vec::new();
    for f in 0..ctx.ix.count {
        let rep = ctx.ix.compose(f, carrier, ctx.worst);
        if !seen[rep] {
            seen[rep] = true;
            reps.push(rep);
        }
    }
    reps.sort_by_key(|&a| (r[a], a));
    let mut tiers: Vec<Vec<usize>> = Vec::new();
    for a in reps {
        match tiers.last_mut() {
            Some(t) if r[t[0]] == r[a] => t.push(a),
            _ => tiers.push(vec![a]),
        }
    }
    tiers
}

/// One representative event per distinct carrier among the class's events.
fn carriers(class: &[Event], atoms: u64) -> Vec<(u64, u64)> {
    let mut seen = HashSet::new();
    class
        .iter()
        .filter_map(|e| {
            let c = e.bits() & atoms;
            seen.insert(c).then_some((e.bits(), c))
        })
        .collect()
}

/// Where each outcome's utility comes from: a fixed value or a variable.
#[derive(Clone)]
enum Slot {
    Var(usize),
    Fixed(Q),
}

fn utility_layout(ctx: &Ctx) -> (Vec<Slot>, usize) {
    let tiers = &ctx.outcome_tiers;
    let last = tiers.len() - 1;
    let mut layout = vec![Slot::Fixed(rational::zero()); ctx.t.outcomes().len()];
    for (t, tier) in tiers.iter().enumerate() {
        for &o in tier {
            layout[o] = if t == 0 {
                Slot::Fixed(rational::zero())
            } else if t == last {
                Slot::Fixed(rational::one())
            } else {
                Slot::Var(t - 1)
            };
        }
    }
    (layout, last.saturating_sub(1))
}

/// Utility of class `k` given its measure, normalized to 0 on the worst and
/// 1 on the best constant.
pub fn infer_utility(
    table: &PreferenceTable,
    k: usize,
    partition: &ClassPartition,
    measure: &[Q],
) -> Result<Vec<Q>> {
    let ctx = Ctx::new(table);
    let top = class_top(partition, k)?;
    let atoms = ctx.atoms(top);
    let (u, _) = utility_given_measure(&ctx, &partition.classes[k - 1], atoms, measure)?;
    Ok(u)
}

fn utility_given_measure(ctx: &Ctx, class: &[Event], atoms: u64, p: &[Q]) -> Result<(Vec<Q>, ConstraintSystem)> {
    let (layout, vars) = utility_layout(ctx);
    let names: Vec<String> = (0..vars)
        .map(|i| format!("u_tier{}", i + 2))
        .collect();
    let mut rows = Rows::new(names);
    // Consecutive tier variables are strictly increasing.
    for i in 0..vars {
        let mut lo = vec![rational::zero(); vars];
        lo[i] = rational::one();
        rows.add(lo.clone(), Relation::Gt, rational::zero(), || "above worst".into());
        let mut hi = vec![rational::zero(); vars];
        hi[i] = -rational::one();
        if i + 1 < vars {
            hi[i + 1] = rational::one();
            rows.add(hi, Relation::Gt, rational::zero(), || "tiers increase".into());
        } else {
            rows.add(hi, Relation::Gt, -rational::one(), || "below best".into());
        }
    }
    let row = |hi: usize, lo: usize, carrier: u64| -> (Vec<Q>, Q) {
        let mut coeffs = vec![rational::zero(); vars];
        let mut constant = rational::zero();
        for s in bit_indices(carrier) {
            for (act, sign) in [(hi, 1i64), (lo, -1i64)] {
                let w = &p[s] * q(sign, 1);
                match &layout[ctx.ix.digit(act, s)] {
                    Slot::Var(v) => coeffs[*v] += w,
                    Slot::Fixed(fixed) => constant += w * fixed,
                }
            }
        }
        (coeffs, -constant)
    };
    for (event, carrier) in carriers(class, atoms) {
        emit_tier_rows(ctx, &mut rows, event, carrier, &row);
    }
    let sys = rows.sys;
    match solve(&sys)? {
        FeasibilityResult::Feasible { assignment, .. } => {
            let u = layout
                .iter()
                .map(|l| match l {
                    Slot::Var(v) => assignment[*v].clone(),
                    Slot::Fixed(fixed) => fixed.clone(),
                })
                .collect();
            Ok((u, sys))
        }
        FeasibilityResult::Infeasible => {
            let certificate = irreducible_infeasible_subsystem(&sys)?.unwrap_or_else(|| sys.clone());
            Err(Error::Unrepresentable {
                reason: "no utility reproduces the class's comparisons under the inferred measure"
                    .into(),
                certificate: Box::new(certificate),
            })
        }
    }
}

fn emit_tier_rows(
    ctx: &Ctx,
    rows: &mut Rows,
    event: u64,
    carrier: u64,
    row: &dyn Fn(usize, usize, u64) -> (Vec<Q>, Q),
) {
    let tiers = restricted_tiers(ctx, event, carrier);
    for (t, tier) in tiers.iter().enumerate() {
        let rep = tier[0];
        for &a in &tier[1..] {
            let (c, rhs) = row(a, rep, carrier);
            rows.add(c, Relation::Eq, rhs, || {
                format!("{} ~ {} at {}", act_name(a), act_name(rep), ctx.label(event))
            });
        }
        if t + 1 < tiers.len() {
            let up = tiers[t + 1][0];
            let (c, rhs) = row(up, rep, carrier);
            rows.add(c, Relation::Gt, rhs, || {
                format!("{} > {} at {}", act_name(up), act_name(rep), ctx.label(event))
            });
        }
    }
}

/// Measure on the atoms reproducing every comparison of the class for a fixed utility.
fn measure_given_utility(ctx: &Ctx, class: &[Event], top: u64, atoms: u64, u: &[Q]) -> Result<Option<Vec<Q>>> {
    let vars: Vec<usize> = bit_indices(atoms).collect();
    let pos: Vec<Option<usize>> = (0..ctx.t.space().len())
        .map(|s| vars.iter().position(|&v| v == s))
        .collect();
    let space = ctx.t.space();
    let mut rows = Rows::new(vars.iter().map(|&s| format!("p_{}", space.label(s))).collect());
    add_qualitative_rows(&mut rows, &vars, &bet_tiers(ctx, top, atoms), &|b| ctx.label(b));
    for i in 0..vars.len() {
        let mut e = vec![rational::zero(); vars.len()];
        e[i] = rational::one();
        rows.add(e, Relation::Gt, rational::zero(), || "atom".into());
    }
    let row = |hi: usize, lo: usize, carrier: u64| -> (Vec<Q>, Q) {
        let mut coeffs = vec![rational::zero(); vars.len()];
        for s in bit_indices(carrier) {
            let i = pos[s].expect("carriers lie inside the atoms");
            coeffs[i] += &u[ctx.ix.digit(hi, s)] - &u[ctx.ix.digit(lo, s)];
        }
        (coeffs, rational::zero())
    };
    for (event, carrier) in carriers(class, atoms) {
        emit_tier_rows(ctx, &mut rows, event, carrier, &row);
    }
    Ok(solve(&rows.sys)?
        .assignment()
        .map(|p| spread(&vars, p, space.len())))
}

/// Strictly increasing tuples of `len` fractions in `(0, 1)`, grouped by the
/// largest denominator used, smallest first.
fn utility_candidates(len: usize, cap: usize) -> Vec<Vec<Q>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out: Vec<Vec<Q>> = Vec::new();
    let mut seen = HashSet::new();
    let mut d = 2i64;
    while out.len() < cap && d <= 64 {
        let mut fractions: Vec<Q> = (2..=d)
            .flat_map(|den| (1..den).map(move |num| q(num, den)))
            .collect();
        fractions.sort();
        fractions.dedup();
        let mut combo = Vec::new();
        increasing(&fractions, 0, len, &mut combo, &mut |c| {
            if out.len() < cap && seen.insert(c.to_vec()) {
                out.push(c.to_vec());
            }
        });
        d += 1;
    }
    out
}

fn increasing(items: &[Q], from: usize, len: usize, combo: &mut Vec<Q>, emit: &mut dyn FnMut(&[Q])) {
    if combo.len() == len {
        emit(combo);
        return;
    }
    for i in from..items.len() {
        combo.push(items[i].clone());
        increasing(items, i + 1, len, combo, emit);
        combo.pop();
    }
}

/// Full pipeline: gate axioms, hierarchy, per-class measure and utility,
/// assembly, and verification against the input table.
pub fn synthesize(table: &PreferenceTable, opts: &SynthesisOptions) -> Result<SynthesisResult> {
    precheck(table, &opts.check)?;
    let ctx = Ctx::new(table);
    let partition = hierarchy(&ctx)?;
    let full = table.space().full_bits();
    let chain = canonical_chain(&ctx.ids, full);
    if chain.len() != partition.classes.len() {
        return Err(Error::AxiomPrecheckFailed(format!(
            "{} event classes but a top-event chain of length {}",
            partition.classes.len(),
            chain.len()
        )));
    }
    let mut diagnostics = SynthesisDiagnostics::default();
    let mut levels = Vec::with_capacity(chain.len());
    for (i, class) in partition.classes.iter().enumerate() {
        let top = class.iter().fold(0, |acc, e| acc | e.bits());
        let atoms = ctx.atoms(top);
        let (p, measure_constraints) = measure(&ctx, top)?;
        diagnostics.lp_solves += 1;
        let mut retries = 0;
        let (p, u, utility_constraints) = match utility_given_measure(&ctx, class, atoms, &p) {
            Ok((u, sys)) => {
                diagnostics.lp_solves += 1;
                (p, u, sys.len())
            }
            Err(first @ Error::Unrepresentable { .. }) => {
                diagnostics.lp_solves += 1;
                let (layout, vars) = utility_layout(&ctx);
                let mut found = None;
                for cand in utility_candidates(vars, opts.retry_cap) {
                    retries += 1;
                    diagnostics.lp_solves += 1;
                    let u: Vec<Q> = layout
                        .iter()
                        .map(|l| match l {
                            Slot::Var(v) => cand[*v].clone(),
                            Slot::Fixed(fixed) => fixed.clone(),
                        })
                        .collect();
                    if let Some(p) = measure_given_utility(&ctx, class, top, atoms, &u)? {
                        found = Some((p, u));
                        break;
                    }
                }
                match found {
                    Some((p, u)) => (p, u, 0),
                    None => return Err(first),
                }
            }
            Err(e) => return Err(e),
        };
        diagnostics.classes.push(ClassDiagnostics {
            level: i + 1,
            events: class.len(),
            atoms: bit_indices(atoms).map(|s| table.space().label(s).to_string()).collect(),
            measure_constraints,
            utility_constraints,
            retries,
        });
        levels.push(Level::new(Event::from_bits(table.space(), atoms), p, u));
    }
    let model = GsleuModel::new(
        std::sync::Arc::clone(table.space()),
        std::sync::Arc::clone(table.outcomes()),
        levels,
    )?;
    let mut derived = derive_table(&model, opts.check.act_cap)?;
    if table.unconditional().is_none() {
        derived.set_unconditional(None);
    }
    if let Some((event, f, g)) = table.first_difference(&derived) {
        return Err(Error::VerificationFailed {
            event: event.map_or_else(|| "unconditional".to_string(), |b| ctx.label(b)),
            f: act_name(f),
            g: act_name(g),
        });
    }
    Ok(SynthesisResult {
        model,
        diagnostics,
        verified: true,
    })
}
