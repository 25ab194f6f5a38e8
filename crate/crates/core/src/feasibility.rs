//! Exact rational linear feasibility with weak, strict and equality rows.
//!
//! Strict rows `a·x > b` become `a·x - ε ≥ b` and the solver maximizes `ε`
//! (capped at 1) with a dense-tableau simplex under Bland's rule. Systems here
//! have few variables and many rows, so the simplex runs on the dual: its
//! tableau has one row per primal variable. The primal point is read back from
//! the simplex multipliers and re-checked against every constraint.

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, parse_rational, Q};

pub const MAX_VARIABLES: usize = 32;
pub const MAX_CONSTRAINTS: usize = 5000;
/// Fourier–Motzkin is only used as an oracle on small systems.
pub const FM_MAX_VARIABLES: usize = 8;
const FM_MAX_ROWS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Gt,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
        }
    }

    fn parse(text: &str) -> Result<Self> {
        match text {
            ">=" | "≥" => Ok(Relation::Ge),
            ">" => Ok(Relation::Gt),
            "=" | "==" => Ok(Relation::Eq),
            other => Err(Error::MalformedSystem(format!("unknown relation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse coefficients as `(variable index, value)`.
    pub coeffs: Vec<(usize, Q)>,
    pub relation: Relation,
    pub rhs: Q,
    pub label: Option<String>,
}

impl Constraint {
    pub fn lhs(&self, x: &[Q]) -> Q {
        self.coeffs
            .iter()
            .fold(rational::zero(), |acc, (i, a)| acc + a * &x[*i])
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Gt => lhs > self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSystem {
    pub variables: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Self {
        ConstraintSystem {
            variables: variables.into_iter().map(Into::into).collect(),
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) -> usize {
        self.add_labeled(coeffs, relation, rhs, None)
    }

    pub fn add_labeled(
        &mut self,
        coeffs: Vec<(usize, Q)>,
        relation: Relation,
        rhs: Q,
        label: Option<String>,
    ) -> usize {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
            label,
        });
        self.constraints.len() - 1
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn subsystem(&self, indices: &[usize]) -> ConstraintSystem {
        ConstraintSystem {
            variables: self.variables.clone(),
            constraints: indices.iter().map(|&i| self.constraints[i].clone()).collect(),
        }
    }

    pub fn is_satisfied_by(&self, x: &[Q]) -> bool {
        x.len() == self.variables.len() && self.constraints.iter().all(|c| c.holds(x))
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (i, name) in self.variables.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(Error::MalformedSystem(format!("duplicate variable {name:?}")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            for (v, _) in &c.coeffs {
                if *v >= self.variables.len() {
                    return Err(Error::MalformedSystem(format!(
                        "constraint {i} references undeclared variable index {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_caps(&self) -> Result<()> {
        if self.variables.len() > MAX_VARIABLES {
            return Err(Error::CapExceeded {
                what: "constraint system variables",
                required: self.variables.len() as u128,
                cap: MAX_VARIABLES as u128,
            });
        }
        if self.constraints.len() > MAX_CONSTRAINTS {
            return Err(Error::CapExceeded {
                what: "constraint system rows",
                required: self.constraints.len() as u128,
                cap: MAX_CONSTRAINTS as u128,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let constraints: Vec<Value> = self
            .constraints
            .iter()
            .map(|c| {
                let mut coeffs = Map::new();
                for (v, a) in &c.coeffs {
                    coeffs.insert(self.variables[*v].clone(), json!(format_rational(a)));
                }
                let mut obj = Map::new();
                obj.insert("coeffs".into(), Value::Object(coeffs));
                obj.insert("relation".into(), json!(c.relation.symbol()));
                obj.insert("rhs".into(), json!(format_rational(&c.rhs)));
                if let Some(label) = &c.label {
                    obj.insert("label".into(), json!(label));
                }
                Value::Object(obj)
            })
            .collect();
        json!({ "variables": self.variables, "constraints": constraints })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::MalformedSystem(msg.to_string());
        let variables: Vec<String> = value
            .get("variables")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing variables array"))?
            .iter()
            .map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad("variable names must be strings")))
            .collect::<Result<_>>()?;
        let index: HashMap<&str, usize> = variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut sys = ConstraintSystem::new(variables.clone());
        let rows = value
            .get("constraints")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing constraints array"))?;
        for row in rows {
            let coeffs_obj = row
                .get("coeffs")
                .and_then(Value::as_object)
                .ok_or_else(|| bad("constraint without coeffs"))?;
            let mut coeffs = Vec::new();
            for (name, a) in coeffs_obj {
                let v = *index
                    .get(name.as_str())
                    .ok_or_else(|| Error::MalformedSystem(format!("undeclared variable {name:?}")))?;
                let a = a.as_str().ok_or_else(|| bad("coefficients must be rational strings"))?;
                coeffs.push((v, parse_rational(a).map_err(Error::MalformedSystem)?));
            }
            let relation = Relation::parse(
                row.get("relation")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("constraint without relation"))?,
            )?;
            let rhs = parse_rational(
                row.get("rhs")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("constraint without rhs"))?,
            )
            .map_err(Error::MalformedSystem)?;
            let label = row.get("label").and_then(Value::as_str).map(str::to_string);
            sys.add_labeled(coeffs, relation, rhs, label);
        }
        sys.validate()?;
        Ok(sys)
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            let terms: Vec<String> = c
                .coeffs
                .iter()
                .map(|(v, a)| format!("{}·{}", format_rational(a), self.variables[*v]))
                .collect();
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            write!(f, "{lhs} {} {}", c.relation.symbol(), format_rational(&c.rhs))?;
            if let Some(label) = &c.label {
                write!(f, "    [{label}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityResult {
    Feasible {
        assignment: Vec<Q>,
        /// Smallest margin over the strict rows; `None` when there are none.
        slack: Option<Q>,
    },
    Infeasible,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }

    pub fn assignment(&self) -> Option<&[Q]> {
        match self {
            FeasibilityResult::Feasible { assignment, .. } => Some(assignment),
            FeasibilityResult::Infeasible => None,
        }
    }
}

/// A row `a·z ≥ h` over the extended variables `z = (x, ε)`.
struct Row {
    coeffs: Vec<Q>,
    rhs: Q,
}

pub fn solve(sys: &ConstraintSystem) -> Result<FeasibilityResult> {
    sys.validate()?;
    sys.check_caps()?;
    let n = sys.variables.len();
    let strict = sys.constraints.iter().any(|c| c.relation == Relation::Gt);
    let width = n + usize::from(strict);

    let mut rows = Vec::new();
    for c in &sys.constraints {
        let mut coeffs = vec![rational::zero(); width];
        for (v, a) in &c.coeffs {
            coeffs[*v] += a;
        }
        match c.relation {
            Relation::Ge => rows.push(Row { coeffs, rhs: c.rhs.clone() }),
            Relation::Gt => {
                coeffs[n] = -rational::one();
                rows.push(Row { coeffs, rhs: c.rhs.clone() });
            }
            Relation::Eq => {
                let neg = coeffs.iter().map(|a| -a).collect();
                rows.push(Row { coeffs, rhs: c.rhs.clone() });
                rows.push(Row { coeffs: neg, rhs: -c.rhs.clone() });
            }
        }
    }
    if strict {
        let mut coeffs = vec![rational::zero(); width];
        coeffs[n] = -rational::one();
        rows.push(Row { coeffs, rhs: -rational::one() });
    }

    let z = if width == 0 {
        Some(Vec::new())
    } else {
        let mut objective = vec![rational::zero(); width];
        if strict {
            objective[n] = rational::one();
        }
        maximize(&rows, &objective)
    };

    let Some(z) = z else {
        return Ok(FeasibilityResult::Infeasible);
    };
    // The optimizer of the extended system satisfies every extended row.
    for row in &rows {
        let lhs = row.coeffs.iter().zip(&z).fold(rational::zero(), |acc, (a, x)| acc + a * x);
        if lhs < row.rhs {
            if width == 0 {
                return Ok(FeasibilityResult::Infeasible);
            }
            panic!("simplex returned a point outside the feasible region");
        }
    }
    if strict && !z[n].is_positive() {
        return Ok(FeasibilityResult::Infeasible);
    }
    let assignment: Vec<Q> = z[..n].to_vec();
    assert!(
        sys.is_satisfied_by(&assignment),
        "feasible point failed re-substitution"
    );
    let slack = sys
        .constraints
        .iter()
        .filter(|c| c.relation == Relation::Gt)
        .map(|c| c.lhs(&assignment) - &c.rhs)
        .min();
    Ok(FeasibilityResult::Feasible { assignment, slack })
}

/// Maximizes `c·z` subject to `rows` (all `≥`), `z` free. Returns the
/// optimizer, or `None` when the rows are infeasible. The caller guarantees
/// the objective is bounded on the feasible region.
fn maximize(rows: &[Row], objective: &[Q]) -> Option<Vec<Q>> {
    // Dual: minimize -h·y subject to Gᵀy = -c, y ≥ 0.
    let width = objective.len();
    let m = rows.len();
    let cols = m + width; // structural columns, then one artificial per row
    let mut sign = vec![rational::one(); width];
    let mut tableau: Vec<Vec<Q>> = Vec::with_capacity(width);
    for i in 0..width {
        let mut line = vec![rational::zero(); cols + 1];
        let mut rhs = -objective[i].clone();
        let flip = rhs.is_negative();
        if flip {
            sign[i] = -rational::one();
            rhs = -rhs;
        }
        for (j, row) in rows.iter().enumerate() {
            line[j] = if flip { -row.coeffs[i].clone() } else { row.coeffs[i].clone() };
        }
        line[m + i] = rational::one();
        line[cols] = rhs;
        tableau.push(line);
    }
    let mut basis: Vec<usize> = (m..cols).collect();

    let phase1: Vec<Q> = (0..cols)
        .map(|j| if j >= m { rational::one() } else { rational::zero() })
        .collect();
    run_simplex(&mut tableau, &mut basis, &phase1, cols)?;
    let infeasibility = basis
        .iter()
        .zip(&tableau)
        .filter(|(b, _)| **b >= m)
        .fold(rational::zero(), |acc, (_, line)| acc + &line[cols]);
    if infeasibility.is_positive() {
        // The dual is infeasible and the primal is bounded, so the primal is empty.
        return None;
    }
    // Drive zero-level artificials out of the basis where possible.
    for r in 0..width {
        if basis[r] >= m {
            if let Some(j) = (0..m).find(|&j| !tableau[r][j].is_zero()) {
                pivot(&mut tableau, &mut basis, r, j);
            }
        }
    }

    let phase2: Vec<Q> = (0..cols)
        .map(|j| if j < m { -rows[j].rhs.clone() } else { rational::zero() })
        .collect();
    // Unbounded dual means an infeasible primal.
    run_simplex(&mut tableau, &mut basis, &phase2, m)?;

    // Simplex multipliers π = c_B B⁻¹, read off the artificial columns.
    let z = (0..width)
        .map(|i| {
            let pi = basis
                .iter()
                .zip(&tableau)
                .fold(rational::zero(), |acc, (b, line)| acc + &phase2[*b] * &line[m + i]);
            -(&sign[i] * pi)
        })
        .collect();
    Some(z)
}

/// Minimizes `cost` with Bland's rule; only columns `< entering_limit` may
/// enter. Returns `None` when the objective is unbounded below.
fn run_simplex(
    tableau: &mut [Vec<Q>],
    basis: &mut [usize],
    cost: &[Q],
    entering_limit: usize,
) -> Option<()> {
    let rhs = tableau.first().map_or(0, |line| line.len() - 1);
    loop {
        let mut entering = None;
        for j in 0..entering_limit {
            if basis.contains(&j) {
                continue;
            }
            let mut reduced = cost[j].clone();
            for (b, line) in basis.iter().zip(tableau.iter()) {
                if !line[j].is_zero() && !cost[*b].is_zero() {
                    reduced -= &cost[*b] * &line[j];
                }
            }
            if reduced.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            return Some(());
        };
        let mut leaving: Option<(usize, Q)> = None;
        for (r, line) in tableau.iter().enumerate() {
            if line[j].is_positive() {
                let ratio = &line[rhs] / &line[j];
                let better = match &leaving {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && basis[r] < basis[*best_r])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        let (r, _) = leaving?;
        pivot(tableau, basis, r, j);
    }
}

fn pivot(tableau: &mut [Vec<Q>], basis: &mut [usize], r: usize, j: usize) {
    let p = tableau[r][j].clone();
    for x in tableau[r].iter_mut() {
        if !x.is_zero() {
            *x /= &p;
        }
    }
    let pivot_row = tableau[r].clone();
    for (i, line) in tableau.iter_mut().enumerate() {
        if i == r || line[j].is_zero() {
            continue;
        }
        let factor = line[j].clone();
        for (x, y) in line.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &factor * y;
            }
        }
    }
    basis[r] = j;
}

/// Deletion filter: drops constraints one at a time while the rest stays
/// infeasible. Returns `None` when the system is feasible.
pub fn irreducible_infeasible_subsystem(sys: &ConstraintSystem) -> Result<Option<ConstraintSystem>> {
    if solve(sys)?.is_feasible() {
        return Ok(None);
    }
    let mut keep: Vec<usize> = (0..sys.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        if solve(&sys.subsystem(&trial))?.is_feasible() {
            i += 1;
        } else {
            keep = trial;
        }
    }
    Ok(Some(sys.subsystem(&keep)))
}

/// `a·x ≥ b` or `a·x > b` in dense form.
#[derive(Clone)]
struct FmRow {
    a: Vec<Q>,
    strict: bool,
    b: Q,
}

/// Feasibility by Fourier–Motzkin elimination, tracking strictness.
pub fn fourier_motzkin_feasible(sys: &ConstraintSystem) -> Result<bool> {
    sys.validate()?;
    let n = sys.variables.len();
    if n > FM_MAX_VARIABLES {
        return Err(Error::CapExceeded {
            what: "Fourier-Motzkin variables",
            required: n as u128,
            cap: FM_MAX_VARIABLES as u128,
        });
    }
    let dense = |c: &Constraint| {
        let mut a = vec![rational::zero(); n];
        for (v, x) in &c.coeffs {
            a[*v] += x;
        }
        a
    };
    let mut equalities: Vec<(Vec<Q>, Q)> = Vec::new();
    let mut rows: Vec<FmRow> = Vec::new();
    for c in &sys.constraints {
        let a = dense(c);
        match c.relation {
            Relation::Eq => equalities.push((a, c.rhs.clone())),
            Relation::Ge | Relation::Gt => rows.push(FmRow {
                a,
                strict: c.relation == Relation::Gt,
                b: c.rhs.clone(),
            }),
        }
    }
    // Substitute equalities away first.
    while let Some((a, b)) = equalities.pop() {
        let Some(j) = (0..n).find(|&j| !a[j].is_zero()) else {
            if !b.is_zero() {
                return Ok(false);
            }
            continue;
        };
        let aj = a[j].clone();
        let substitute = |row_a: &mut Vec<Q>, row_b: &mut Q| {
            let factor = &row_a[j] / &aj;
            if factor.is_zero() {
                return;
            }
            for (x, y) in row_a.iter_mut().zip(&a) {
                *x -= &factor * y;
            }
            *row_b -= &factor * &b;
        };
        for (ea, eb) in equalities.iter_mut() {
            substitute(ea, eb);
        }
        for row in rows.iter_mut() {
            substitute(&mut row.a, &mut row.b);
        }
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    loop {
        rows = fm_normalize(rows);
        let Some(rows_ok) = fm_trivial_check(&mut rows) else {
            return Ok(false);
        };
        rows = rows_ok;
        if remaining.is_empty() || rows.is_empty() {
            return Ok(true);
        }
        // Eliminate the variable producing the fewest new rows.
        let (pos, j) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &j)| {
                let p = rows.iter().filter(|r| r.a[j].is_positive()).count();
                let q = rows.iter().filter(|r| r.a[j].is_negative()).count();
                (p * q, pos, j)
            })
            .min()
            .map(|(_, pos, j)| (pos, j))
            .unwrap();
        remaining.remove(pos);
        let (upper, rest): (Vec<FmRow>, Vec<FmRow>) =
            rows.into_iter().partition(|r| r.a[j].is_negative());
        let (lower, mut next): (Vec<FmRow>, Vec<FmRow>) =
            rest.into_iter().partition(|r| r.a[j].is_positive());
        for lo in &lower {
            for up in &upper {
                let s = lo.a[j].clone();
                let t = -up.a[j].clone();
                let a: Vec<Q> = lo.a.iter().zip(&up.a).map(|(x, y)| x / &s + y / &t).collect();
                next.push(FmRow {
                    a,
                    strict: lo.strict || up.strict,
                    b: &lo.b / &s + &up.b / &t,
                });
            }
        }
        if next.len() > FM_MAX_ROWS {
            return Err(Error::CapExceeded {
                what: "Fourier-Motzkin rows",
                required: next.len() as u128,
                cap: FM_MAX_ROWS as u128,
            });
        }
        rows = next;
    }
}

/// Drops rows with an all-zero left side, or reports a contradiction.
fn fm_trivial_check(rows: &mut Vec<FmRow>) -> Option<Vec<FmRow>> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows.drain(..) {
        if row.a.iter().all(Zero::is_zero) {
            let ok = if row.strict { row.b.is_negative() } else { !row.b.is_positive() };
            if !ok {
                return None;
            }
        } else {
            out.push(row);
        }
    }
    Some(out)
}

/// Scales each row so its first nonzero coefficient is ±1 and keeps only the
/// tightest row for each left side.
fn fm_normalize(rows: Vec<FmRow>) -> Vec<FmRow> {
    let mut best: HashMap<Vec<Q>, (Q, bool)> = HashMap::new();
    let mut order = Vec::new();
    let mut trivial = Vec::new();
    for row in rows {
        let Some(lead) = row.a.iter().find(|x| !x.is_zero()).map(|x| x.abs()) else {
            trivial.push(row);
            continue;
        };
        let a: Vec<Q> = row.a.iter().map(|x| x / &lead).collect();
        let b = &row.b / &lead;
        match best.get_mut(&a) {
            Some((cur_b, cur_strict)) => {
                if b > *cur_b {
                    *cur_b = b;
                    *cur_strict = row.strict;
                } else if b == *cur_b {
                    *cur_strict |= row.strict;
                }
            }
            None => {
                order.push(a.clone());
                best.insert(a, (b, row.strict));
            }
        }
    }
    let mut out = trivial;
    for a in order {
        let (b, strict) = best.remove(&a).unwrap();
        out.push(FmRow { a, strict, b });
    }
    out
}

/// Scales a coefficient vector so that it is primitive for deduplication:
/// first nonzero entry has absolute value one.
pub(crate) fn normalized_key(coeffs: &[Q], rhs: &Q) -> Option<(Vec<Q>, Q)> {
    let lead = coeffs.iter().find(|x| !x.is_zero())?.abs();
    Some((coeffs.iter().map(|x| x / &lead).collect(), rhs / &lead))
}

impl fmt::Display for FeasibilityResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibilityResult::Infeasible => f.write_str("infeasible"),
            FeasibilityResult::Feasible { assignment, slack } => {
                let xs: Vec<String> = assignment.iter().map(format_rational).collect();
                write!(f, "feasible ({})", xs.join(", "))?;
                if let Some(s) = slack {
                    write!(f, " slack {}", format_rational(s))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn sys1(rows: &[(i64, Relation, i64)]) -> ConstraintSystem {
        let mut s = ConstraintSystem::new(["x"]);
        for (a, rel, b) in rows {
            s.add(vec![(0, int(*a))], *rel, int(*b));
        }
        s
    }

    #[test]
    fn pinned_point() {
        let s = sys1(&[(1, Relation::Ge, 0), (-1, Relation::Ge, 0)]);
        assert_eq!(
            solve(&s).unwrap(),
            FeasibilityResult::Feasible {
                assignment: vec![int(0)],
                slack: None
            }
        );
        assert!(fourier_motzkin_feasible(&s).unwrap());
    }

    #[test]
    fn strict_contradiction() {
        let s = sys1(&[(1, Relation::Gt, 0), (-1, Relation::Gt, 0)]);
        assert_eq!(solve(&s).unwrap(), FeasibilityResult::Infeasible);
        assert!(!fourier_motzkin_feasible(&s).unwrap());
        let t = sys1(&[(1, Relation::Gt, 0), (-1, Relation::Ge, 0)]);
        assert_eq!(solve(&t).unwrap(), FeasibilityResult::Infeasible);
        assert!(!fourier_motzkin_feasible(&t).unwrap());
    }

    #[test]
    fn simplex_slack() {
        let mut s = ConstraintSystem::new(["p1", "p2"]);
        s.add(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        s.add(vec![(0, int(1)), (1, int(-1))], Relation::Gt, int(0));
        s.add(vec![(1, int(1))], Relation::Gt, int(0));
        let FeasibilityResult::Feasible { assignment, slack } = solve(&s).unwrap() else {
            panic!("expected feasible");
        };
        assert!(s.is_satisfied_by(&assignment));
        // The most interior point equalizes both margins: p2 = 1/3, p1 = 2/3.
        assert_eq!(assignment, vec![q(2, 3), q(1, 3)]);
        assert_eq!(slack, Some(q(1, 3)));
        assert_eq!(&assignment[0] - &assignment[1], slack.unwrap());
    }

    #[test]
    fn weak_system_empty() {
        let mut s = ConstraintSystem::new(["x", "y"]);
        s.add(vec![(0, int(1)), (1, int(1))], Relation::Ge, int(2));
        s.add(vec![(0, int(-1))], Relation::Ge, int(0));
        s.add(vec![(1, int(-1))], Relation::Ge, int(0));
        assert_eq!(solve(&s).unwrap(), FeasibilityResult::Infeasible);
        let iis = irreducible_infeasible_subsystem(&s).unwrap().unwrap();
        assert_eq!(iis.len(), 3);
        assert!(!fourier_motzkin_feasible(&iis).unwrap());
    }

    #[test]
    fn deletion_filter_isolates_core() {
        let mut s = ConstraintSystem::new(["x", "y"]);
        s.add(vec![(1, int(1))], Relation::Ge, int(-5));
        s.add(vec![(0, int(1))], Relation::Gt, int(3));
        s.add(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(7));
        s.add(vec![(0, int(-1))], Relation::Ge, int(-3));
        let iis = irreducible_infeasible_subsystem(&s).unwrap().unwrap();
        assert_eq!(iis.len(), 2);
        assert!(!solve(&iis).unwrap().is_feasible());
        for i in 0..iis.len() {
            let rest: Vec<usize> = (0..iis.len()).filter(|&j| j != i).collect();
            assert!(solve(&iis.subsystem(&rest)).unwrap().is_feasible());
        }
    }

    #[test]
    fn constant_rows_and_empty_systems() {
        let empty = ConstraintSystem::new(Vec::<String>::new());
        assert!(solve(&empty).unwrap().is_feasible());
        let mut bad = ConstraintSystem::new(Vec::<String>::new());
        bad.add(vec![], Relation::Ge, int(1));
        assert_eq!(solve(&bad).unwrap(), FeasibilityResult::Infeasible);
        let mut s = ConstraintSystem::new(["x"]);
        s.add(vec![], Relation::Gt, int(-1));
        assert!(solve(&s).unwrap().is_feasible());
    }

    #[test]
    fn malformed_and_caps() {
        let mut s = ConstraintSystem::new(["x"]);
        s.add(vec![(3, int(1))], Relation::Ge, int(0));
        assert!(matches!(solve(&s), Err(Error::MalformedSystem(_))));
        let wide = ConstraintSystem::new((0..40).map(|i| format!("x{i}")));
        assert!(matches!(solve(&wide), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn json_round_trip() {
        let mut s = ConstraintSystem::new(["p", "q"]);
        s.add_labeled(
            vec![(0, q(1, 2)), (1, int(-1))],
            Relation::Gt,
            int(0),
            Some("p over q".into()),
        );
        s.add(vec![(1, int(1))], Relation::Eq, q(1, 3));
        let back = ConstraintSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn deterministic() {
        let mut s = ConstraintSystem::new(["x", "y", "z"]);
        s.add(vec![(0, int(1)), (1, int(2)), (2, int(-1))], Relation::Gt, int(1));
        s.add(vec![(0, int(-1)), (1, int(1))], Relation::Ge, int(-2));
        s.add(vec![(2, int(1))], Relation::Eq, int(3));
        assert_eq!(solve(&s).unwrap(), solve(&s).unwrap());
    }
}
