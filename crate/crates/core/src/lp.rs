//! Linear feasibility by phase-1 simplex on a dense tableau with Bland's rule.
//!
//! A feasible problem yields a witness point; an infeasible one yields a
//! Farkas certificate `w` with `Σ w_r a_r = 0`, `w_r >= 0` on `<=` rows and
//! `Σ w_r b_r < 0`. Both are re-checked by substitution, independently of the
//! tableau, before being returned.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::scalar::{is_negligible, max_of, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowKind {
    /// `a . x <= b`
    Le,
    /// `a . x = b`
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub coeffs: Vec<T>,
    pub kind: RowKind,
    pub rhs: T,
}

/// `{x in R^n : every row holds}` with free variables.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityProblem<T> {
    n_vars: usize,
    rows: Vec<LinearConstraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Feasible { witness: Vec<T> },
    Infeasible { certificate: Vec<T> },
}

impl<T> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&[T]> {
        match self {
            LpOutcome::Feasible { witness } => Some(witness),
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

impl<T: Scalar> FeasibilityProblem<T> {
    pub fn new(n_vars: usize) -> Self {
        FeasibilityProblem {
            n_vars,
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn rows(&self) -> &[LinearConstraint<T>] {
        &self.rows
    }

    pub fn add_le(&mut self, coeffs: Vec<T>, rhs: T) -> Result<()> {
        check_dim(self.n_vars, coeffs.len())?;
        self.rows.push(LinearConstraint {
            coeffs,
            kind: RowKind::Le,
            rhs,
        });
        Ok(())
    }

    pub fn add_eq(&mut self, coeffs: Vec<T>, rhs: T) -> Result<()> {
        check_dim(self.n_vars, coeffs.len())?;
        self.rows.push(LinearConstraint {
            coeffs,
            kind: RowKind::Eq,
            rhs,
        });
        Ok(())
    }

    /// `a_r . x - b_r` for each row.
    pub fn residuals(&self, x: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|r| {
                r.coeffs
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, v)| acc + a.clone() * v.clone())
                    - r.rhs.clone()
            })
            .collect()
    }

    /// Indices of rows violated by `x` (exact in rational mode).
    pub fn violated_rows(&self, x: &[T]) -> Vec<usize> {
        self.residuals(x)
            .into_iter()
            .zip(&self.rows)
            .enumerate()
            .filter(|(_, (res, row))| {
                let scale = max_of(row.rhs.abs(), T::one());
                match row.kind {
                    RowKind::Le => res.is_positive() && !is_negligible(res, &scale),
                    RowKind::Eq => !is_negligible(res, &scale),
                }
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn satisfies(&self, x: &[T]) -> bool {
        x.len() == self.n_vars && self.violated_rows(x).is_empty()
    }

    /// Checks a Farkas certificate for infeasibility.
    pub fn certifies_infeasible(&self, w: &[T]) -> bool {
        if w.len() != self.rows.len() {
            return false;
        }
        let scale = T::one();
        for (wr, row) in w.iter().zip(&self.rows) {
            if row.kind == RowKind::Le && wr.is_negative() && !is_negligible(wr, &scale) {
                return false;
            }
        }
        for j in 0..self.n_vars {
            let s = w
                .iter()
                .zip(&self.rows)
                .fold(T::zero(), |acc, (wr, row)| acc + wr.clone() * row.coeffs[j].clone());
            if !is_negligible(&s, &scale) {
                return false;
            }
        }
        let rhs = w
            .iter()
            .zip(&self.rows)
            .fold(T::zero(), |acc, (wr, row)| acc + wr.clone() * row.rhs.clone());
        rhs.is_negative() && !is_negligible(&rhs, &scale)
    }

    /// Phase-1 simplex. Fails only if the result does not survive its own
    /// substitution check (possible in float mode).
    pub fn solve(&self) -> Result<LpOutcome<T>> {
        let outcome = Tableau::build(self).run();
        let ok = match &outcome {
            LpOutcome::Feasible { witness } => self.satisfies(witness),
            LpOutcome::Infeasible { certificate } => self.certifies_infeasible(certificate),
        };
        if ok {
            Ok(outcome)
        } else {
            Err(Error::ConstraintViolation("simplex result failed verification".into()))
        }
    }
}

struct Tableau<T> {
    /// `rows x (cols + 1)`, last column is the right-hand side.
    a: Vec<Vec<T>>,
    /// Reduced costs, last entry is minus the objective value.
    cost: Vec<T>,
    basis: Vec<usize>,
    cols: usize,
    n_vars: usize,
    /// Column of the initial basic variable of each row and its phase-1 cost.
    initial: Vec<(usize, bool)>,
    /// `-1` where the row was negated to make its rhs nonnegative.
    flip: Vec<bool>,
}

impl<T: Scalar> Tableau<T> {
    fn build(problem: &FeasibilityProblem<T>) -> Self {
        let m = problem.rows.len();
        let n = problem.n_vars;
        let n_slack = problem.rows.iter().filter(|r| r.kind == RowKind::Le).count();
        let flip: Vec<bool> = problem.rows.iter().map(|r| r.rhs.is_negative()).collect();
        let n_art = problem
            .rows
            .iter()
            .zip(&flip)
            .filter(|(r, &f)| r.kind == RowKind::Eq || f)
            .count();
        let cols = 2 * n + n_slack + n_art;
        let mut a = vec![vec![T::zero(); cols + 1]; m];
        let mut basis = vec![0; m];
        let mut initial = vec![(0, false); m];
        let mut next_slack = 2 * n;
        let mut next_art = 2 * n + n_slack;
        for (r, row) in problem.rows.iter().enumerate() {
            let sign = if flip[r] { -T::one() } else { T::one() };
            for (j, c) in row.coeffs.iter().enumerate() {
                a[r][2 * j] = sign.clone() * c.clone();
                a[r][2 * j + 1] = -(sign.clone() * c.clone());
            }
            a[r][cols] = sign.clone() * row.rhs.clone();
            if row.kind == RowKind::Le {
                a[r][next_slack] = sign.clone();
                if !flip[r] {
                    basis[r] = next_slack;
                    initial[r] = (next_slack, false);
                }
                next_slack += 1;
            }
            if row.kind == RowKind::Eq || flip[r] {
                a[r][next_art] = T::one();
                basis[r] = next_art;
                initial[r] = (next_art, true);
                next_art += 1;
            }
        }
        // phase-1 cost: 1 on artificials, reduced by the artificial rows
        let mut cost = vec![T::zero(); cols + 1];
        for j in 2 * n + n_slack..cols {
            cost[j] = T::one();
        }
        for r in 0..m {
            if initial[r].1 {
                for j in 0..=cols {
                    if !a[r][j].is_zero() {
                        cost[j] = cost[j].clone() - a[r][j].clone();
                    }
                }
            }
        }
        Tableau {
            a,
            cost,
            basis,
            cols,
            n_vars: n,
            initial,
            flip,
        }
    }

    fn run(mut self) -> LpOutcome<T> {
        let one = T::one();
        loop {
            // Bland: smallest entering index with negative reduced cost
            let entering = (0..self.cols).find(|&j| {
                let d = &self.cost[j];
                d.is_negative() && !is_negligible(d, &one)
            });
            let Some(j) = entering else { break };
            let mut leaving: Option<(usize, T)> = None;
            for r in 0..self.a.len() {
                let coef = &self.a[r][j];
                if !coef.is_positive() || is_negligible(coef, &one) {
                    continue;
                }
                let ratio = self.a[r][self.cols].clone() / coef.clone();
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio || (ratio == best_ratio && self.basis[r] < self.basis[best]) {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            // phase-1 objective is bounded below, so a leaving row exists
            let Some((r, _)) = leaving else { break };
            self.pivot(r, j);
        }
        let objective = -self.cost[self.cols].clone();
        if is_negligible(&objective, &one) || !objective.is_positive() {
            let mut values = vec![T::zero(); self.cols];
            for (r, &b) in self.basis.iter().enumerate() {
                values[b] = self.a[r][self.cols].clone();
            }
            let witness = (0..self.n_vars)
                .map(|j| values[2 * j].clone() - values[2 * j + 1].clone())
                .collect();
            LpOutcome::Feasible { witness }
        } else {
            let certificate = self
                .initial
                .iter()
                .zip(&self.flip)
                .map(|(&(col, artificial), &flipped)| {
                    let c = if artificial { T::one() } else { T::zero() };
                    let y = c - self.cost[col].clone();
                    if flipped {
                        y
                    } else {
                        -y
                    }
                })
                .collect();
            LpOutcome::Infeasible { certificate }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.a[r][j].clone();
        for c in 0..=self.cols {
            if !self.a[r][c].is_zero() {
                self.a[r][c] = self.a[r][c].clone() / piv.clone();
            }
        }
        let support: Vec<usize> = (0..=self.cols).filter(|&c| !self.a[r][c].is_zero()).collect();
        let pivot_row = self.a[r].clone();
        for (k, row) in self.a.iter_mut().enumerate() {
            if k == r || row[j].is_zero() {
                continue;
            }
            let factor = row[j].clone();
            for &c in &support {
                row[c] = row[c].clone() - factor.clone() * pivot_row[c].clone();
            }
            row[j] = T::zero();
        }
        if !self.cost[j].is_zero() {
            let factor = self.cost[j].clone();
            for &c in &support {
                self.cost[c] = self.cost[c].clone() - factor.clone() * pivot_row[c].clone();
            }
            self.cost[j] = T::zero();
        }
        self.basis[r] = j;
    }
}
