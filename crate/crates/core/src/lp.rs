//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Small problems only: the whole tableau is kept in memory and every pivot
//! touches every entry.

use crate::error::{param, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize c·x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, constraints: Vec::new() }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_dimensions(&self) -> Result<()> {
        let n = self.num_vars();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return param(format!("constraint {i} has {} coefficients, expected {n}", c.coeffs.len()));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return param(format!("constraint {i} has a non-finite entry"));
            }
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
    tol: f64,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64], obj_rhs: &mut f64) {
        let inv = 1.0 / self.rows[r][c];
        for a in self.rows[r].iter_mut() {
            *a *= inv;
        }
        self.rhs[r] *= inv;
        self.rows[r][c] = 1.0;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r];
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (a, p) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * p;
                }
                row[c] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (a, p) in obj.iter_mut().zip(&pivot_row) {
                *a -= f * p;
            }
            obj[c] = 0.0;
            *obj_rhs -= f * pivot_rhs;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs Bland's rule on columns `< allowed` until optimal.
    fn optimize(&mut self, obj: &mut [f64], obj_rhs: &mut f64, allowed: usize) -> Result<()> {
        loop {
            let Some(c) = (0..allowed).find(|&j| obj[j] < -self.tol) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a > self.tol {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - self.tol || (ratio <= lr + self.tol && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c, obj, obj_rhs);
        }
    }
}

/// Solves `lp` by the two-phase method.
///
/// Phase one minimizes the sum of artificial variables; a positive optimum
/// means infeasible. Artificial variables left in the basis at zero level
/// are pivoted out, or their row is dropped as redundant.
pub fn simplex_solve(lp: &LinearProgram, tol: f64) -> Result<LpSolution> {
    lp.check_dimensions()?;
    let n = lp.num_vars();
    let m = lp.constraints.len();

    let mut slack_cols = 0;
    let mut art_cols = 0;
    for c in &lp.constraints {
        let rel = normalized_relation(c);
        if rel != Relation::Eq {
            slack_cols += 1;
        }
        if rel != Relation::Le {
            art_cols += 1;
        }
    }
    let first_art = n + slack_cols;
    let cols = first_art + art_cols;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n, first_art);
    for c in &lp.constraints {
        let flip = c.rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let rel = normalized_relation(c);
        let mut row = vec![0.0; cols];
        for (a, &v) in row.iter_mut().zip(&c.coeffs) {
            *a = sign * v;
        }
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
        rhs.push(sign * c.rhs);
    }
    let mut t = Tableau { rows, rhs, basis, cols, tol, pivots: 0 };

    // phase one
    let mut obj = vec![0.0; cols];
    let mut obj_rhs = 0.0;
    obj[first_art..].fill(1.0);
    for (i, &b) in t.basis.iter().enumerate() {
        if b >= first_art {
            for (o, a) in obj.iter_mut().zip(&t.rows[i]) {
                *o -= a;
            }
            obj_rhs -= t.rhs[i];
        }
    }
    t.optimize(&mut obj, &mut obj_rhs, cols)?;
    let scale = 1.0 + t.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if -obj_rhs > tol.max(1e-9) * scale * 10.0 {
        return Err(Error::Infeasible);
    }
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= first_art {
            match (0..first_art).find(|&j| t.rows[i][j].abs() > tol) {
                Some(j) => {
                    let mut dummy = vec![0.0; cols];
                    let mut dummy_rhs = 0.0;
                    t.pivot(i, j, &mut dummy, &mut dummy_rhs);
                }
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // phase two
    let mut obj = vec![0.0; t.cols];
    obj[..n].copy_from_slice(&lp.objective);
    let mut obj_rhs = 0.0;
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = obj[b];
        if cb != 0.0 {
            for (o, a) in obj.iter_mut().zip(&t.rows[i]) {
                *o -= cb * a;
            }
            obj_rhs -= cb * t.rhs[i];
        }
    }
    t.optimize(&mut obj, &mut obj_rhs, first_art)?;

    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x, pivots: t.pivots })
}

fn normalized_relation(c: &Constraint) -> Relation {
    match (c.relation, c.rhs < 0.0) {
        (r, false) => r,
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (Relation::Eq, true) => Relation::Eq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Ge, 1.0);
        let s = simplex_solve(&lp, 1e-9).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12 && (s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binding_aggregate() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 0.0], Relation::Ge, 1.0);
        lp.constrain(vec![0.0, 1.0], Relation::Ge, 1.0);
        lp.constrain(vec![1.0, 1.0], Relation::Ge, 3.0);
        let s = simplex_solve(&lp, 1e-9).unwrap();
        assert!((s.value - 3.0).abs() < 1e-12);
        assert!(s.x[0] >= 1.0 - 1e-12 && s.x[1] >= 1.0 - 1e-12);
    }

    #[test]
    fn maximization_with_le_rows() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
        let mut lp = LinearProgram::new(vec![-3.0, -5.0]);
        lp.constrain(vec![1.0, 0.0], Relation::Le, 4.0);
        lp.constrain(vec![0.0, 2.0], Relation::Le, 12.0);
        lp.constrain(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = simplex_solve(&lp, 1e-9).unwrap();
        assert!((s.value + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x - y s.t. x + y = 2, -x <= -0.5 (x >= 0.5)
        let mut lp = LinearProgram::new(vec![1.0, -1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 2.0);
        lp.constrain(vec![-1.0, 0.0], Relation::Le, -0.5);
        let s = simplex_solve(&lp, 1e-9).unwrap();
        assert!((s.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.constrain(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = simplex_solve(&lp, 1e-9).unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        lp.constrain(vec![1.0], Relation::Ge, 2.0);
        assert!(matches!(simplex_solve(&lp, 1e-9), Err(Error::Infeasible)));

        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.constrain(vec![1.0, -1.0], Relation::Le, 1.0);
        assert!(matches!(simplex_solve(&lp, 1e-9), Err(Error::Unbounded)));
    }

    #[test]
    fn dimension_mismatch() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Relation::Ge, 1.0);
        assert!(matches!(simplex_solve(&lp, 1e-9), Err(Error::Parameter(_))));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland terminates.
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.constrain(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.constrain(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.constrain(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = simplex_solve(&lp, 1e-12).unwrap();
        assert!((s.value + 0.05).abs() < 1e-9);
    }
}
