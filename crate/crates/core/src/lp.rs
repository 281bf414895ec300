//! Exact linear programming over the rationals.
//!
//! All variables carry an implicit lower bound of zero. [`lp_maximize`] runs a
//! dense two-phase simplex with Bland's rule, so degenerate vertices (common
//! for state polytopes of finite logics) cannot make it cycle.
//!
//! [`enumerate_vertices`] is exhaustive: with `n` variables, equality rows of
//! rank `r` and `m` inequality rows (including the `n` sign constraints) it
//! solves `C(m, n - r)` square systems. That is a few hundred solves for the
//! pentagon logic and stays tractable up to roughly 20 variables and 30
//! constraints; it is not meant for anything larger.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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

    fn flipped(self) -> Self {
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

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self {
            coefficients,
            relation,
            rhs,
        }
    }

    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        self.relation.holds(&dot(&self.coefficients, point), &self.rhs)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint row {row} has {found} coefficients, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("objective has {found} coefficients, expected {expected}")]
    ObjectiveMismatch { expected: usize, found: usize },
    #[error("program has no constraints")]
    NoConstraints,
    #[error("program has no variables")]
    NoVariables,
    #[error("polytope is unbounded in direction of variable `{variable}`")]
    Unbounded { variable: String },
    #[error("linear program is {0}, no optimal face exists")]
    NotOptimal(LpStatus),
}

/// Feasible region `{x >= 0 : constraints}` in H-representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Polytope {
    pub fn new(variables: Vec<String>, constraints: Vec<Constraint>) -> Result<Self, LpError> {
        if variables.is_empty() {
            return Err(LpError::NoVariables);
        }
        if constraints.is_empty() {
            return Err(LpError::NoConstraints);
        }
        for (row, c) in constraints.iter().enumerate() {
            if c.coefficients.len() != variables.len() {
                return Err(LpError::DimensionMismatch {
                    row,
                    expected: variables.len(),
                    found: c.coefficients.len(),
                });
            }
        }
        Ok(Self {
            variables,
            constraints,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn dimension(&self) -> usize {
        self.variables.len()
    }

    /// Exact membership test, sign constraints included.
    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.dimension()
            && point.iter().all(|x| !x.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(point))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    region: Polytope,
    objective: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(
        variables: Vec<String>,
        objective: Vec<Rational>,
        constraints: Vec<Constraint>,
    ) -> Result<Self, LpError> {
        let region = Polytope::new(variables, constraints)?;
        Self::over(region, objective)
    }

    pub fn over(region: Polytope, objective: Vec<Rational>) -> Result<Self, LpError> {
        if objective.len() != region.dimension() {
            return Err(LpError::ObjectiveMismatch {
                expected: region.dimension(),
                found: objective.len(),
            });
        }
        Ok(Self { region, objective })
    }

    pub fn region(&self) -> &Polytope {
        &self.region
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Dense simplex tableau; the last entry of every row is the right-hand side.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rational {
        self.rows[row].last().expect("tableau row has a rhs")
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (x, p) in r.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[Rational], col: usize) -> Rational {
        self.rows
            .iter()
            .zip(&self.basis)
            .fold(cost[col].clone(), |acc, (r, &b)| acc - &cost[b] * &r[col])
    }

    fn objective_value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, &b)| acc + &cost[b] * self.rhs(i))
    }

    /// Maximizes `cost . x` using columns `< eligible`. Returns `false` when unbounded.
    fn maximize(&mut self, cost: &[Rational], eligible: usize) -> bool {
        loop {
            // Bland: lowest-index improving column enters.
            let entering = (0..eligible)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j).is_positive());
            let Some(col) = entering else {
                return true;
            };
            // Bland: among minimum ratios, the row whose basic variable has the lowest index leaves.
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if !r[col].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / &r[col];
                let better = match &leaving {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Exact optimum of `lp`, maximizing.
pub fn lp_maximize(lp: &LinearProgram) -> LpOutcome {
    let n = lp.region.dimension();
    let constraints = &lp.region.constraints;
    let m = constraints.len();

    // Normalize to nonnegative right-hand sides.
    let normalized: Vec<(Vec<Rational>, Relation, Rational)> = constraints
        .iter()
        .map(|c| {
            if c.rhs.is_negative() {
                (
                    c.coefficients.iter().map(|x| -x).collect(),
                    c.relation.flipped(),
                    -c.rhs.clone(),
                )
            } else {
                (c.coefficients.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();

    let n_slack = normalized
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let n_art = normalized
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let art_start = n + n_slack;
    let width = art_start + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n, art_start);
    for (coeffs, rel, rhs) in normalized {
        let mut row = vec![Rational::zero(); width + 1];
        row[..n].clone_from_slice(&coeffs);
        row[width] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }
    let mut tableau = Tableau { rows, basis };

    if n_art > 0 {
        let mut phase_one = vec![Rational::zero(); width];
        for c in phase_one.iter_mut().skip(art_start) {
            *c = -Rational::one();
        }
        // Phase one is bounded above by zero.
        tableau.maximize(&phase_one, width);
        if tableau.objective_value(&phase_one).is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-valued) artificials out of the basis; drop redundant rows.
        let mut row = 0;
        while row < tableau.rows.len() {
            if tableau.basis[row] >= art_start {
                match (0..art_start).find(|&j| !tableau.rows[row][j].is_zero()) {
                    Some(col) => tableau.pivot(row, col),
                    None => {
                        tableau.rows.remove(row);
                        tableau.basis.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }
        for r in tableau.rows.iter_mut() {
            let rhs = r[width].clone();
            r.truncate(art_start);
            r.push(rhs);
        }
    }

    let mut cost = vec![Rational::zero(); art_start];
    cost[..n].clone_from_slice(&lp.objective);
    if !tableau.maximize(&cost, art_start) {
        return LpOutcome::Unbounded;
    }

    let mut point = vec![Rational::zero(); n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            point[b] = tableau.rhs(i).clone();
        }
    }
    LpOutcome::Optimal {
        value: dot(&lp.objective, &point),
        point,
    }
}

/// Row-reduces `rows` (augmented with rhs) in place and returns the rank of the coefficient part.
fn row_reduce(rows: &mut [Vec<Rational>], ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        for x in rows[rank].iter_mut() {
            *x /= &p;
        }
        let pivot_row = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && !r[col].is_zero() {
                let factor = r[col].clone();
                for (x, p) in r.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The unique solution of a square-or-taller linear system, if there is one.
fn solve_unique(mut rows: Vec<Vec<Rational>>, n: usize) -> Option<Vec<Rational>> {
    let rank = row_reduce(&mut rows, n);
    if rank < n {
        return None;
    }
    // Remaining rows are zero on the left; any nonzero rhs means inconsistency.
    if rows[n..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some(rows[..n].iter().map(|r| r[n].clone()).collect())
}

/// All vertices of a bounded polytope, sorted and deduplicated.
///
/// Boundedness is established first by maximizing each coordinate (the sign
/// constraints already bound them below). An empty polytope yields an empty list.
pub fn enumerate_vertices(polytope: &Polytope) -> Result<Vec<Vec<Rational>>, LpError> {
    let n = polytope.dimension();
    for (j, name) in polytope.variables.iter().enumerate() {
        let mut direction = vec![Rational::zero(); n];
        direction[j] = Rational::one();
        let lp = LinearProgram::over(polytope.clone(), direction)?;
        match lp_maximize(&lp) {
            LpOutcome::Optimal { .. } => {}
            LpOutcome::Infeasible => return Ok(Vec::new()),
            LpOutcome::Unbounded => {
                return Err(LpError::Unbounded {
                    variable: name.clone(),
                })
            }
        }
    }

    let augmented = |coeffs: &[Rational], rhs: &Rational| {
        let mut row = coeffs.to_vec();
        row.push(rhs.clone());
        row
    };
    let equalities: Vec<Vec<Rational>> = polytope
        .constraints
        .iter()
        .filter(|c| c.relation == Relation::Eq)
        .map(|c| augmented(&c.coefficients, &c.rhs))
        .collect();
    let mut inequalities: Vec<Vec<Rational>> = polytope
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .map(|c| augmented(&c.coefficients, &c.rhs))
        .collect();
    for j in 0..n {
        let mut row = vec![Rational::zero(); n + 1];
        row[j] = Rational::one();
        inequalities.push(row);
    }

    let eq_rank = row_reduce(&mut equalities.clone(), n);
    let free = n - eq_rank;

    let mut vertices = BTreeSet::new();
    for active in (0..inequalities.len()).combinations(free) {
        let mut system = equalities.clone();
        system.extend(active.iter().map(|&i| inequalities[i].clone()));
        if system.len() < n {
            continue;
        }
        if let Some(point) = solve_unique(system, n) {
            if polytope.contains(&point) {
                vertices.insert(point);
            }
        }
    }
    Ok(vertices.into_iter().collect())
}

/// Every vertex of the feasible region at which the objective attains its optimum.
pub fn optimal_face(lp: &LinearProgram) -> Result<Vec<Vec<Rational>>, LpError> {
    let outcome = lp_maximize(lp);
    let LpOutcome::Optimal { value, .. } = outcome else {
        return Err(LpError::NotOptimal(outcome.status()));
    };
    Ok(enumerate_vertices(&lp.region)?
        .into_iter()
        .filter(|v| dot(&lp.objective, v) == value)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn row(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn one_variable_box() {
        let lp = LinearProgram::new(
            names(1),
            row(&[1]),
            vec![Constraint::new(row(&[1]), Relation::Le, int(1))],
        )
        .unwrap();
        assert_eq!(
            lp_maximize(&lp),
            LpOutcome::Optimal {
                value: int(1),
                point: vec![int(1)]
            }
        );
    }

    #[test]
    fn simplex_face() {
        let lp = LinearProgram::new(
            names(2),
            row(&[1, 1]),
            vec![Constraint::new(row(&[1, 1]), Relation::Le, int(1))],
        )
        .unwrap();
        assert_eq!(lp_maximize(&lp).value(), Some(&int(1)));
    }

    #[test]
    fn reports_infeasible_and_unbounded() {
        let infeasible = LinearProgram::new(
            names(1),
            row(&[1]),
            vec![
                Constraint::new(row(&[1]), Relation::Le, int(1)),
                Constraint::new(row(&[1]), Relation::Ge, int(2)),
            ],
        )
        .unwrap();
        assert_eq!(lp_maximize(&infeasible).status(), LpStatus::Infeasible);

        let unbounded = LinearProgram::new(
            names(2),
            row(&[1, 0]),
            vec![Constraint::new(row(&[0, 1]), Relation::Le, int(3))],
        )
        .unwrap();
        assert_eq!(lp_maximize(&unbounded).status(), LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_and_equalities() {
        // x + y = 3, -x <= -1 (x >= 1), maximize y - x
        let lp = LinearProgram::new(
            names(2),
            row(&[-1, 1]),
            vec![
                Constraint::new(row(&[1, 1]), Relation::Eq, int(3)),
                Constraint::new(row(&[-1, 0]), Relation::Le, int(-1)),
            ],
        )
        .unwrap();
        assert_eq!(
            lp_maximize(&lp),
            LpOutcome::Optimal {
                value: int(1),
                point: vec![int(1), int(2)]
            }
        );
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let lp = LinearProgram::new(
            names(2),
            row(&[2, 1]),
            vec![
                Constraint::new(row(&[1, 1]), Relation::Eq, int(1)),
                Constraint::new(row(&[2, 2]), Relation::Eq, int(2)),
            ],
        )
        .unwrap();
        assert_eq!(lp_maximize(&lp).value(), Some(&int(2)));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = LinearProgram::new(
            names(2),
            row(&[1, 1]),
            vec![Constraint::new(row(&[1]), Relation::Le, int(1))],
        )
        .unwrap_err();
        assert_eq!(
            err,
            LpError::DimensionMismatch {
                row: 0,
                expected: 2,
                found: 1
            }
        );
        assert_eq!(
            LinearProgram::new(names(1), row(&[1]), vec![]).unwrap_err(),
            LpError::NoConstraints
        );
        assert!(matches!(
            LinearProgram::new(
                names(1),
                row(&[1, 2]),
                vec![Constraint::new(row(&[1]), Relation::Le, int(1))]
            ),
            Err(LpError::ObjectiveMismatch { .. })
        ));
    }

    #[test]
    fn unit_interval_vertices() {
        let p = Polytope::new(
            names(1),
            vec![Constraint::new(row(&[1]), Relation::Le, int(1))],
        )
        .unwrap();
        assert_eq!(enumerate_vertices(&p).unwrap(), vec![vec![int(0)], vec![int(1)]]);
    }

    #[test]
    fn two_simplex_vertices() {
        let p = Polytope::new(
            names(3),
            vec![Constraint::new(row(&[1, 1, 1]), Relation::Eq, int(1))],
        )
        .unwrap();
        let v = enumerate_vertices(&p).unwrap();
        assert_eq!(
            v,
            vec![row(&[0, 0, 1]), row(&[0, 1, 0]), row(&[1, 0, 0])]
        );
    }

    #[test]
    fn unbounded_polytope_is_an_error() {
        let p = Polytope::new(
            names(2),
            vec![Constraint::new(row(&[1, -1]), Relation::Le, int(0))],
        )
        .unwrap();
        assert!(matches!(
            enumerate_vertices(&p),
            Err(LpError::Unbounded { .. })
        ));
    }

    #[test]
    fn infeasible_polytope_has_no_vertices() {
        let p = Polytope::new(
            names(1),
            vec![Constraint::new(row(&[1]), Relation::Le, int(-1))],
        )
        .unwrap();
        assert!(enumerate_vertices(&p).unwrap().is_empty());
    }

    #[test]
    fn optimal_faces() {
        let interval = LinearProgram::new(
            names(1),
            row(&[1]),
            vec![Constraint::new(row(&[1]), Relation::Le, int(1))],
        )
        .unwrap();
        assert_eq!(optimal_face(&interval).unwrap(), vec![vec![int(1)]]);

        let simplex = LinearProgram::new(
            names(3),
            row(&[1, 1, 0]),
            vec![Constraint::new(row(&[1, 1, 1]), Relation::Eq, int(1))],
        )
        .unwrap();
        assert_eq!(
            optimal_face(&simplex).unwrap(),
            vec![row(&[0, 1, 0]), row(&[1, 0, 0])]
        );

        let unbounded = LinearProgram::new(
            names(1),
            row(&[1]),
            vec![Constraint::new(row(&[1]), Relation::Ge, int(0))],
        )
        .unwrap();
        assert_eq!(
            optimal_face(&unbounded).unwrap_err(),
            LpError::NotOptimal(LpStatus::Unbounded)
        );
    }

    #[test]
    fn fractional_vertex() {
        // 2x + y <= 2, x + 2y <= 2: optimum of x + y at (2/3, 2/3).
        let lp = LinearProgram::new(
            names(2),
            row(&[1, 1]),
            vec![
                Constraint::new(row(&[2, 1]), Relation::Le, int(2)),
                Constraint::new(row(&[1, 2]), Relation::Le, int(2)),
            ],
        )
        .unwrap();
        assert_eq!(
            lp_maximize(&lp),
            LpOutcome::Optimal {
                value: rat(4, 3),
                point: vec![rat(2, 3), rat(2, 3)]
            }
        );
        assert_eq!(optimal_face(&lp).unwrap(), vec![vec![rat(2, 3), rat(2, 3)]]);
    }
}
