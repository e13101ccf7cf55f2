//! Dense two-phase tableau simplex over exact rationals with Bland's rule.
//!
//! Solves `maximize c.x + c0` subject to `A x <= b`, `x >= 0`.

use super::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// One row `sum a_j x_j <= b`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs in the `z_j - c_j` convention, plus the objective value.
    cost: Vec<Rational>,
    value: Rational,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        self.pivots += 1;
        let inv = self.rows[r][col].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for &j in &nz {
                self.rows[i][j] = &self.rows[i][j] - &(&f * &prow[j]);
            }
            self.rhs[i] = &self.rhs[i] - &(&f * &prhs);
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for &j in &nz {
                self.cost[j] = &self.cost[j] - &(&f * &prow[j]);
            }
            self.value = &self.value - &(&f * &prhs);
        }
        self.basis[r] = col;
    }

    /// Bland's rule: lowest-index improving column, ties in the ratio test
    /// broken by lowest basic variable.  Returns false when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.cost[j].signum() < 0) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if a.signum() <= 0 {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

/// Maximises `objective . x + offset` over `rows`, `x >= 0` with `n` variables.
pub fn solve_lp(n: usize, objective: &[(usize, Rational)], offset: &Rational, rows: &[Row]) -> (LpResult, usize) {
    let m = rows.len();
    let neg_rows: Vec<usize> = (0..m).filter(|&i| rows[i].rhs.signum() < 0).collect();
    let n_art = neg_rows.len();
    let width = n + m + n_art;
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cost: vec![Rational::zero(); width],
        value: Rational::zero(),
        pivots: 0,
    };
    let mut art = 0;
    for (i, row) in rows.iter().enumerate() {
        let mut dense = vec![Rational::zero(); width];
        for (j, a) in &row.coeffs {
            dense[*j] = &dense[*j] + a;
        }
        dense[n + i] = Rational::one();
        let mut rhs = row.rhs.clone();
        if rhs.signum() < 0 {
            for v in dense.iter_mut() {
                if !v.is_zero() {
                    *v = -&*v;
                }
            }
            rhs = -rhs;
            let col = n + m + art;
            dense[col] = Rational::one();
            t.basis.push(col);
            art += 1;
        } else {
            t.basis.push(n + i);
        }
        t.rows.push(dense);
        t.rhs.push(rhs);
    }

    if n_art > 0 {
        // phase 1: maximise -(sum of artificials)
        for j in n + m..width {
            t.cost[j] = Rational::one();
        }
        for &i in &neg_rows {
            for j in 0..width {
                if !t.rows[i][j].is_zero() {
                    t.cost[j] = &t.cost[j] - &t.rows[i][j];
                }
            }
            t.value = &t.value - &t.rhs[i];
        }
        t.optimize(width);
        if t.value.signum() != 0 {
            return (LpResult::Infeasible, t.pivots);
        }
        // drive remaining artificials out of the basis or drop redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
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
        for row in t.rows.iter_mut() {
            row.truncate(n + m);
        }
    }

    // phase 2
    let width = n + m;
    t.cost = vec![Rational::zero(); width];
    t.value = Rational::zero();
    for (j, c) in objective {
        t.cost[*j] = &t.cost[*j] - c;
    }
    for i in 0..t.rows.len() {
        let b = t.basis[i];
        if t.cost[b].is_zero() {
            continue;
        }
        let f = t.cost[b].clone();
        for j in 0..width {
            if !t.rows[i][j].is_zero() {
                t.cost[j] = &t.cost[j] - &(&f * &t.rows[i][j]);
            }
        }
        t.value = &t.value - &(&f * &t.rhs[i]);
    }
    if !t.optimize(width) {
        return (LpResult::Unbounded, t.pivots);
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].clone();
        }
    }
    let value = objective.iter().fold(offset.clone(), |acc, (j, c)| &acc + &(c * &x[*j]));
    (LpResult::Optimal { x, value }, t.pivots)
}
