//! A small dense two-phase simplex solver.
//!
//! Problems are given in equality form `A x = b, x >= 0`. Pivoting follows
//! Bland's rule, which cannot cycle; the feasibility problems built by the
//! geometry module are highly degenerate (most right-hand sides are zero).

use std::fmt::Write as _;

use crate::{Error, Result};

/// Feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// `A x = b` with `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    n_vars: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn add_equality(&mut self, coeffs: Vec<f64>, rhs: f64) -> Result<()> {
        if coeffs.len() != self.n_vars {
            return Err(Error::domain(format!(
                "constraint has {} coefficients, program has {} variables",
                coeffs.len(),
                self.n_vars
            )));
        }
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        Ok(())
    }

    /// A feasible point, or `None` when the constraints are inconsistent.
    pub fn find_feasible(&self) -> Result<Option<Vec<f64>>> {
        match self.phase_one()? {
            None => Ok(None),
            Some(t) => Ok(Some(t.point(self.n_vars))),
        }
    }

    pub fn minimize(&self, cost: &[f64]) -> Result<LpOutcome> {
        if cost.len() != self.n_vars {
            return Err(Error::domain(
                "cost vector length differs from variable count",
            ));
        }
        let Some(mut t) = self.phase_one()? else {
            return Ok(LpOutcome::Infeasible);
        };
        t.set_objective(cost);
        if !t.iterate(self.n_vars).map_err(|e| self.annotate(e))? {
            return Ok(LpOutcome::Unbounded);
        }
        let point = t.point(self.n_vars);
        let value = point.iter().zip(cost).map(|(x, c)| x * c).sum();
        Ok(LpOutcome::Optimal { value, point })
    }

    pub fn maximize(&self, gain: &[f64]) -> Result<LpOutcome> {
        let negated: Vec<f64> = gain.iter().map(|g| -g).collect();
        Ok(match self.minimize(&negated)? {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal {
                value: -value,
                point,
            },
            other => other,
        })
    }

    /// Human-readable dump of the constraint system, attached to solver errors.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let terms: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, c)| format!("{c:+.17e}*x{j}"))
                .collect();
            let _ = writeln!(s, "{} = {b:.17e}", terms.join(" "));
        }
        s
    }

    fn annotate(&self, e: Error) -> Error {
        match e {
            Error::Numeric { message } => Error::Numeric {
                message: format!("{message}; constraints:\n{}", self.dump()),
            },
            other => other,
        }
    }

    /// Runs phase one and returns a tableau whose basis is feasible and free
    /// of artificial columns, or `None` if the system is infeasible.
    fn phase_one(&self) -> Result<Option<Tableau>> {
        let n = self.n_vars;
        let m = self.rows.len();
        let width = n + m + 1;
        let mut a = Vec::with_capacity(m);
        for (i, (row, &b)) in self.rows.iter().zip(&self.rhs).enumerate() {
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            let mut r = vec![0.0; width];
            for (dst, src) in r.iter_mut().zip(row) {
                *dst = sign * src;
            }
            r[n + i] = 1.0;
            r[width - 1] = sign * b;
            a.push(r);
        }
        let mut obj = vec![0.0; width];
        for r in &a {
            for j in 0..n {
                obj[j] -= r[j];
            }
            obj[width - 1] -= r[width - 1];
        }
        let mut t = Tableau {
            a,
            obj,
            basis: (n..n + m).collect(),
        };
        // Phase one is bounded below by zero.
        t.iterate(n + m).map_err(|e| self.annotate(e))?;
        let infeasibility = -t.obj[width - 1];
        let scale = 1.0 + self.rhs.iter().map(|b| b.abs()).sum::<f64>();
        if infeasibility > LP_TOL * scale {
            return Ok(None);
        }
        t.drop_artificials(n);
        Ok(Some(t))
    }
}

struct Tableau {
    /// Constraint rows; the last column is the right-hand side.
    a: Vec<Vec<f64>>,
    /// Reduced costs; the last entry is minus the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        let rhs = self.rhs_col();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
                if row[rhs] < 0.0 && row[rhs] > -LP_TOL {
                    row[rhs] = 0.0;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Pivots until optimal (`Ok(true)`) or unbounded (`Ok(false)`). Only
    /// columns `< n_enter` may enter the basis.
    fn iterate(&mut self, n_enter: usize) -> Result<bool> {
        let rhs = self.rhs_col();
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..n_enter).find(|&j| self.obj[j] < -LP_TOL) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[c] > LP_TOL {
                    let ratio = row[rhs] / row[c];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, c);
        }
        Err(Error::numeric(format!(
            "simplex did not terminate within {MAX_PIVOTS} pivots"
        )))
    }

    /// Removes artificial columns (indices `>= n`) after a successful phase one.
    fn drop_artificials(&mut self, n: usize) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= n {
                match (0..n).find(|&j| self.a[i][j].abs() > LP_TOL) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        // Redundant row.
                        self.a.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let rhs = self.rhs_col();
        for row in self.a.iter_mut() {
            let b = row[rhs];
            row.truncate(n);
            row.push(b);
        }
        self.obj = vec![0.0; n + 1];
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let rhs = self.rhs_col();
        self.obj[..cost.len()].copy_from_slice(cost);
        self.obj[rhs] = 0.0;
        for (row, &b) in self.a.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, v) in self.obj.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
    }

    fn point(&self, n: usize) -> Vec<f64> {
        let rhs = self.rhs_col();
        let mut x = vec![0.0; n];
        for (row, &b) in self.a.iter().zip(&self.basis) {
            if b < n {
                x[b] = row[rhs].max(0.0);
            }
        }
        x
    }
}
