//! Exact rational linear programming.
//!
//! All variables are non-negative with no upper bound. Problems are solved by
//! the two-phase primal simplex method on a tableau whose rows are stored
//! sparsely. The entering column is the most negative reduced cost; after a
//! run of degenerate pivots both choices switch to Bland's smallest-index
//! rule until the objective moves again, so the method always terminates.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("duplicate LP variable {0:?}")]
    DuplicateVariable(String),
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub label: String,
    /// Sorted by variable, no zero coefficients, no repeated variables.
    pub terms: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, values: &[Rational]) -> Rational {
        self.terms.iter().map(|(v, c)| c * &values[*v]).sum()
    }
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    names: Vec<String>,
    index: HashMap<String, VarId>,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            names: Vec::new(),
            index: HashMap::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> Result<VarId, LpError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(LpError::DuplicateVariable(name));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.objective.push(Rational::zero());
        Ok(id)
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.names[var]
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn set_objective(&mut self, var: VarId, coef: Rational) {
        self.objective[var] = coef;
    }

    pub fn objective_coef(&self, var: VarId) -> &Rational {
        &self.objective[var]
    }

    /// Adds a row; repeated variables are merged and zero terms dropped.
    pub fn add_constraint(
        &mut self,
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        let mut merged: Vec<(VarId, Rational)> = terms.into_iter().collect();
        merged.sort_by_key(|(v, _)| *v);
        let mut out: Vec<(VarId, Rational)> = Vec::with_capacity(merged.len());
        for (v, c) in merged {
            assert!(v < self.names.len(), "constraint references unknown variable {v}");
            match out.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint {
            label: label.into(),
            terms: out,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn evaluate_objective(&self, values: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(values)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| c * x)
            .sum()
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |f: &mut fmt::Formatter<'_>, c: &Rational, v: VarId| -> fmt::Result {
            if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if a == Rational::one() {
                write!(f, "{}", self.names[v])
            } else {
                write!(f, "{} {}", a, self.names[v])
            }
        };
        writeln!(
            f,
            "{} ({} variables, {} rows)",
            match self.sense {
                Sense::Maximize => "maximize",
                Sense::Minimize => "minimize",
            },
            self.names.len(),
            self.constraints.len()
        )?;
        write!(f, "  objective:")?;
        for (v, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                term(f, c, v)?;
            }
        }
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for row in &self.constraints {
            write!(f, "  {}:", row.label)?;
            if row.terms.is_empty() {
                write!(f, " 0")?;
            }
            for (v, c) in &row.terms {
                term(f, c, *v)?;
            }
            writeln!(f, " {} {}", row.relation, row.rhs)?;
        }
        writeln!(f, "all variables >= 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per variable; meaningful only when optimal.
    pub values: Vec<Rational>,
    pub objective_value: Rational,
    pub pivots: usize,
}

impl LpSolution {
    /// Wraps an arbitrary point so it can be handed to [`check_solution`].
    pub fn from_point(lp: &LinearProgram, values: Vec<Rational>) -> Self {
        LpSolution {
            status: LpStatus::Optimal,
            objective_value: lp.evaluate_objective(&values),
            values,
            pivots: 0,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, lp: &LinearProgram, name: &str) -> Option<&Rational> {
        lp.var(name).map(|v| &self.values[v])
    }
}

/// Verifies non-negativity, every constraint and the recorded objective
/// value of `solution`, returning a description of each violation.
pub fn check_solution(lp: &LinearProgram, solution: &LpSolution) -> Result<(), Vec<String>> {
    let mut problems = Vec::new();
    if solution.values.len() != lp.num_vars() {
        return Err(vec![format!(
            "expected {} values, got {}",
            lp.num_vars(),
            solution.values.len()
        )]);
    }
    for (v, x) in solution.values.iter().enumerate() {
        if x.is_negative() {
            problems.push(format!("{} = {} is negative", lp.names[v], x));
        }
    }
    for row in &lp.constraints {
        let lhs = row.lhs(&solution.values);
        if !row.relation.holds(&lhs, &row.rhs) {
            problems.push(format!(
                "{}: {} {} {} fails",
                row.label, lhs, row.relation, row.rhs
            ));
        }
    }
    let objective = lp.evaluate_objective(&solution.values);
    if objective != solution.objective_value {
        problems.push(format!(
            "objective value {} differs from evaluated {}",
            solution.objective_value, objective
        ));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}

type SparseRow = Vec<(u32, Rational)>;

/// Consecutive degenerate pivots after which pricing falls back to Bland's
/// rule until the objective strictly improves.
const DEGENERATE_STALL_LIMIT: usize = 50;

fn entry(row: &SparseRow, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&(col as u32), |(c, _)| *c)
        .ok()
        .map(|i| &row[i].1)
}

/// `row - factor * pivot`, both sorted by column.
fn sub_scaled(row: &SparseRow, factor: &Rational, pivot: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_pivot = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_pivot {
            out.push((pivot[j].0, -(factor * &pivot[j].1)));
            j += 1;
        } else {
            let v = &row[i].1 - factor * &pivot[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

struct Tableau {
    rows: Vec<SparseRow>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs of the current objective; entering candidates are negative.
    cost: Vec<Rational>,
    /// Current objective value.
    value: Rational,
    blocked: Vec<bool>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let mut prow = std::mem::take(&mut self.rows[r]);
        let p = entry(&prow, c).expect("pivot on zero entry").clone();
        if p != Rational::one() {
            for (_, v) in prow.iter_mut() {
                *v = &*v / &p;
            }
            self.rhs[r] = &self.rhs[r] / &p;
        }
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            if let Some(a) = entry(&self.rows[i], c).cloned() {
                self.rows[i] = sub_scaled(&self.rows[i], &a, &prow);
                if !prhs.is_zero() {
                    self.rhs[i] = &self.rhs[i] - &a * &prhs;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (j, v) in &prow {
                self.cost[*j as usize] = &self.cost[*j as usize] - &f * v;
            }
            self.value = &self.value - &f * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    fn run(&mut self) -> Outcome {
        let mut stalled = 0;
        loop {
            let bland = stalled >= DEGENERATE_STALL_LIMIT;
            let candidates = (0..self.cost.len()).filter(|&j| !self.blocked[j] && self.cost[j].is_negative());
            let entering = if bland {
                candidates.min()
            } else {
                candidates.min_by(|&a, &b| self.cost[a].cmp(&self.cost[b]).then(a.cmp(&b)))
            };
            let Some(c) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let Some(a) = entry(&self.rows[i], c) else { continue };
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, ratio)) => {
                    if ratio.is_zero() {
                        stalled += 1;
                    } else {
                        stalled = 0;
                    }
                    self.pivot(r, c)
                }
                None => return Outcome::Unbounded,
            }
        }
    }

    /// Installs `costs` (per column, for maximization) as the objective and
    /// prices out the basic columns.
    fn set_objective(&mut self, costs: &[Rational]) {
        self.cost = costs.iter().map(|c| -c).collect();
        self.value = Rational::zero();
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if self.cost[b].is_zero() {
                continue;
            }
            let f = self.cost[b].clone();
            for (j, v) in &self.rows[i] {
                self.cost[*j as usize] = &self.cost[*j as usize] - &f * v;
            }
            self.value = &self.value - &f * &self.rhs[i];
        }
    }
}

type NormalizedRow = (Vec<(VarId, Rational)>, Relation, Rational);

pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_vars();
    let m = lp.constraints.len();

    // Normalize to non-negative right-hand sides and count auxiliary columns.
    let mut rows: Vec<NormalizedRow> = Vec::with_capacity(m);
    for c in &lp.constraints {
        if c.rhs.is_negative() {
            rows.push((
                c.terms.iter().map(|(v, a)| (*v, -a)).collect(),
                c.relation.flipped(),
                -&c.rhs,
            ));
        } else {
            rows.push((c.terms.clone(), c.relation, c.rhs.clone()));
        }
    }
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let first_art = n + slack_count;
    let total = first_art + art_count;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cost: vec![Rational::zero(); total],
        value: Rational::zero(),
        blocked: vec![false; total],
        pivots: 0,
    };
    let (mut next_slack, mut next_art) = (n, first_art);
    for (terms, rel, rhs) in rows {
        let mut row: SparseRow = terms.into_iter().map(|(v, a)| (v as u32, a)).collect();
        let basic = match rel {
            Relation::Le => {
                row.push((next_slack as u32, Rational::one()));
                next_slack += 1;
                next_slack - 1
            }
            Relation::Ge => {
                row.push((next_slack as u32, -Rational::one()));
                next_slack += 1;
                row.push((next_art as u32, Rational::one()));
                next_art += 1;
                next_art - 1
            }
            Relation::Eq => {
                row.push((next_art as u32, Rational::one()));
                next_art += 1;
                next_art - 1
            }
        };
        tab.rows.push(row);
        tab.rhs.push(rhs);
        tab.basis.push(basic);
    }

    if art_count > 0 {
        let mut phase_one = vec![Rational::zero(); total];
        for c in phase_one.iter_mut().skip(first_art) {
            *c = -Rational::one();
        }
        tab.set_objective(&phase_one);
        if tab.value.is_negative() {
            tab.run();
        }
        if tab.value.is_negative() {
            return LpSolution {
                status: LpStatus::Infeasible,
                values: vec![Rational::zero(); n],
                objective_value: Rational::zero(),
                pivots: tab.pivots,
            };
        }
        // Drive zero-level artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= first_art {
                let col = tab.rows[i]
                    .iter()
                    .map(|(c, _)| *c as usize)
                    .find(|&c| c < first_art);
                match col {
                    Some(c) => tab.pivot(i, c),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for row in tab.rows.iter_mut() {
            row.retain(|(c, _)| (*c as usize) < first_art);
        }
        for b in tab.blocked.iter_mut().skip(first_art) {
            *b = true;
        }
    }

    let sign = match lp.sense {
        Sense::Maximize => Rational::one(),
        Sense::Minimize => -Rational::one(),
    };
    let mut costs = vec![Rational::zero(); total];
    for (v, c) in lp.objective.iter().enumerate() {
        costs[v] = c * &sign;
    }
    tab.set_objective(&costs);
    let outcome = tab.run();

    let mut values = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            values[b] = tab.rhs[i].clone();
        }
    }
    match outcome {
        Outcome::Optimal => LpSolution {
            status: LpStatus::Optimal,
            objective_value: lp.evaluate_objective(&values),
            values,
            pivots: tab.pivots,
        },
        Outcome::Unbounded => LpSolution {
            status: LpStatus::Unbounded,
            objective_value: Rational::zero(),
            values,
            pivots: tab.pivots,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn single_upper_bound() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x").unwrap();
        lp.set_objective(x, q(1));
        lp.add_constraint("cap", [(x, q(1))], Relation::Le, q(5));
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.values[x], q(5));
        assert!(check_solution(&lp, &sol).is_ok());
    }

    #[test]
    fn negative_bound_is_infeasible() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x").unwrap();
        lp.set_objective(x, q(1));
        lp.add_constraint("neg", [(x, q(1))], Relation::Le, q(-1));
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn fractional_optimum() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x").unwrap();
        let y = lp.add_var("y").unwrap();
        lp.set_objective(x, q(1));
        lp.set_objective(y, q(1));
        lp.add_constraint("sum", [(x, q(1)), (y, q(1))], Relation::Le, Rational::new(3, 2));
        lp.add_constraint("x", [(x, q(1))], Relation::Le, q(1));
        lp.add_constraint("y", [(y, q(1))], Relation::Le, q(1));
        let sol = solve_lp(&lp);
        assert_eq!(sol.objective_value, Rational::new(3, 2));
        assert!(check_solution(&lp, &sol).is_ok());
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x").unwrap();
        let y = lp.add_var("y").unwrap();
        lp.set_objective(x, q(1));
        lp.add_constraint("d", [(x, q(1)), (y, q(-1))], Relation::Le, q(2));
        assert_eq!(solve_lp(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_ge_rows_with_minimize() {
        // min 2x + 3y  s.t. x + y = 4, x >= 1, y >= 2  -> x = 2, y = 2, obj 10.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x").unwrap();
        let y = lp.add_var("y").unwrap();
        lp.set_objective(x, q(2));
        lp.set_objective(y, q(3));
        lp.add_constraint("sum", [(x, q(1)), (y, q(1))], Relation::Eq, q(4));
        lp.add_constraint("xlo", [(x, q(1))], Relation::Ge, q(1));
        lp.add_constraint("ylo", [(y, q(1))], Relation::Ge, q(2));
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective_value, q(10));
        assert_eq!(sol.values, vec![q(2), q(2)]);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x").unwrap();
        let y = lp.add_var("y").unwrap();
        lp.set_objective(x, q(1));
        lp.add_constraint("a", [(x, q(1)), (y, q(1))], Relation::Eq, q(3));
        lp.add_constraint("b", [(x, q(2)), (y, q(2))], Relation::Eq, q(6));
        lp.add_constraint("empty", Vec::new(), Relation::Eq, q(0));
        let sol = solve_lp(&lp);
        assert_eq!(sol.objective_value, q(3));
        assert!(check_solution(&lp, &sol).is_ok());
    }

    #[test]
    fn check_solution_lists_violated_row() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x").unwrap();
        lp.add_constraint("x_le_5", [(x, q(1))], Relation::Le, q(5));
        assert!(check_solution(&lp, &LpSolution::from_point(&lp, vec![q(3)])).is_ok());
        let err = check_solution(&lp, &LpSolution::from_point(&lp, vec![q(6)])).unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].starts_with("x_le_5"));
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        lp.add_var("x").unwrap();
        assert_eq!(lp.add_var("x"), Err(LpError::DuplicateVariable("x".into())));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let v: Vec<VarId> = (0..4).map(|i| lp.add_var(format!("x{i}")).unwrap()).collect();
        let c = [Rational::new(-3, 4), q(150), Rational::new(-1, 50), q(6)];
        for (i, ci) in c.iter().enumerate() {
            lp.set_objective(v[i], ci.clone());
        }
        lp.add_constraint(
            "r1",
            [(v[0], Rational::new(1, 4)), (v[1], q(-60)), (v[2], Rational::new(-1, 25)), (v[3], q(9))],
            Relation::Le,
            q(0),
        );
        lp.add_constraint(
            "r2",
            [(v[0], Rational::new(1, 2)), (v[1], q(-90)), (v[2], Rational::new(-1, 50)), (v[3], q(3))],
            Relation::Le,
            q(0),
        );
        lp.add_constraint("r3", [(v[2], q(1))], Relation::Le, q(1));
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective_value, Rational::new(-1, 20));
    }

    /// Dense `max c.x, A x <= b, x >= 0` with non-negative data.
    #[derive(Debug, Clone)]
    struct Packing {
        a: Vec<Vec<i64>>,
        b: Vec<i64>,
        c: Vec<i64>,
    }

    fn packing() -> impl Strategy<Value = Packing> {
        (1usize..5, 1usize..5).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(proptest::collection::vec(0i64..6, n), m),
                proptest::collection::vec(1i64..20, m),
                proptest::collection::vec(-3i64..8, n),
            )
                .prop_map(|(mut a, b, c)| {
                    // Every column needs a positive entry to keep the primal bounded.
                    for j in 0..c.len() {
                        if a.iter().all(|row| row[j] == 0) {
                            let m = a.len();
                            a[j % m][j] = 1;
                        }
                    }
                    Packing { a, b, c }
                })
        })
    }

    fn primal(p: &Packing, row_order: &[usize], col_order: &[usize]) -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let vars: Vec<VarId> = col_order.iter().map(|j| lp.add_var(format!("x{j}")).unwrap()).collect();
        for (pos, &j) in col_order.iter().enumerate() {
            lp.set_objective(vars[pos], q(p.c[j]));
        }
        for &i in row_order {
            let terms = col_order.iter().enumerate().map(|(pos, &j)| (vars[pos], q(p.a[i][j])));
            lp.add_constraint(format!("r{i}"), terms, Relation::Le, q(p.b[i]));
        }
        lp
    }

    fn dual(p: &Packing) -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let ys: Vec<VarId> = (0..p.b.len()).map(|i| lp.add_var(format!("y{i}")).unwrap()).collect();
        for (i, &y) in ys.iter().enumerate() {
            lp.set_objective(y, q(p.b[i]));
        }
        for j in 0..p.c.len() {
            let terms = ys.iter().enumerate().map(|(i, &y)| (y, q(p.a[i][j])));
            lp.add_constraint(format!("c{j}"), terms, Relation::Ge, q(p.c[j]));
        }
        lp
    }

    proptest! {
        #[test]
        fn strong_duality_holds(p in packing()) {
            let rows: Vec<usize> = (0..p.b.len()).collect();
            let cols: Vec<usize> = (0..p.c.len()).collect();
            let lp = primal(&p, &rows, &cols);
            let primal_sol = solve_lp(&lp);
            prop_assert_eq!(primal_sol.status, LpStatus::Optimal);
            prop_assert!(check_solution(&lp, &primal_sol).is_ok());
            let d = dual(&p);
            let dual_sol = solve_lp(&d);
            prop_assert_eq!(dual_sol.status, LpStatus::Optimal);
            prop_assert!(check_solution(&d, &dual_sol).is_ok());
            prop_assert_eq!(primal_sol.objective_value, dual_sol.objective_value);
        }

        #[test]
        fn optimum_invariant_under_permutation(p in packing(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rows: Vec<usize> = (0..p.b.len()).collect();
            let mut cols: Vec<usize> = (0..p.c.len()).collect();
            let base = solve_lp(&primal(&p, &rows, &cols)).objective_value;
            rows.shuffle(&mut rng);
            cols.shuffle(&mut rng);
            let permuted = solve_lp(&primal(&p, &rows, &cols)).objective_value;
            prop_assert_eq!(base, permuted);
        }
    }
}
