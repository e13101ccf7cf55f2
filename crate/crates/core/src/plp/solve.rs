//! Branch enumeration over `max`/`min` nodes.
//!
//! In a branch, a node `max(e_1, ..., e_k)` with chosen child `i` is
//! replaced by `e_i` and the rows `e_j <= e_i` are added (dually for `min`).
//! Every feasible point lies in some branch whose linearisation agrees with
//! the piecewise program there, so the maximum over branches is the exact
//! optimum.  Structurally equal nodes share one choice.

use std::collections::{BTreeMap, HashMap};

use super::expr::{Affine, Expr, Extremum};
use super::rational::Rational;
use super::simplex::{solve_lp, LpResult, Row};
use super::{PLProgram, PlpError, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Optimal { value: Rational, witness: BTreeMap<String, Rational> },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLSolution {
    pub outcome: Outcome,
    /// Number of branches enumerated, the product of node arities.
    pub branches: usize,
    pub feasible_branches: usize,
    pub pivots: usize,
}

impl PLSolution {
    pub fn optimum(&self) -> Option<&Rational> {
        match &self.outcome {
            Outcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Column layout: nonnegative variables take one column, free ones two.
struct Columns {
    pos: Vec<usize>,
    neg: Vec<Option<usize>>,
    width: usize,
}

impl Columns {
    fn new(p: &PLProgram) -> Self {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut width = 0;
        for v in &p.vars {
            pos.push(width);
            width += 1;
            if v.nonneg {
                neg.push(None);
            } else {
                neg.push(Some(width));
                width += 1;
            }
        }
        Self { pos, neg, width }
    }

    fn coeffs(&self, a: &Affine) -> Vec<(usize, Rational)> {
        let mut out = Vec::with_capacity(a.coeffs.len());
        for (i, c) in &a.coeffs {
            out.push((self.pos[*i], c.clone()));
            if let Some(n) = self.neg[*i] {
                out.push((n, -c));
            }
        }
        out
    }

    fn point(&self, cols: &[Rational]) -> Vec<Rational> {
        (0..self.pos.len())
            .map(|i| match self.neg[i] {
                Some(n) => &cols[self.pos[i]] - &cols[n],
                None => cols[self.pos[i]].clone(),
            })
            .collect()
    }
}

/// Adds `a <= 0` to `rows`; returns false if it is a violated constant row.
fn push_le_zero(rows: &mut Vec<Row>, cols: &Columns, a: &Affine) -> bool {
    if a.is_constant() {
        return a.constant.signum() <= 0;
    }
    let row = Row { coeffs: cols.coeffs(a), rhs: -&a.constant };
    if !rows.contains(&row) {
        rows.push(row);
    }
    true
}

pub fn solve(p: &PLProgram) -> Result<PLSolution, PlpError> {
    let mut nodes: Vec<&Expr> = Vec::new();
    p.objective.collect_nodes(&mut nodes);
    for c in &p.constraints {
        c.lhs.collect_nodes(&mut nodes);
        c.rhs.collect_nodes(&mut nodes);
    }
    let index: HashMap<&Expr, usize> = nodes.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let arity: Vec<usize> = nodes
        .iter()
        .map(|e| match e {
            Expr::Node(_, es) => es.len(),
            _ => unreachable!("only nodes are collected"),
        })
        .collect();
    let branches: usize = arity.iter().product();
    let cols = Columns::new(p);

    let mut choice = vec![0usize; nodes.len()];
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut feasible_branches = 0;
    let mut pivots = 0;
    let mut unbounded = false;
    for _ in 0..branches {
        let choose = |e: &Expr| choice[index[e]];
        let mut rows = Vec::new();
        let mut ok = true;
        for (k, node) in nodes.iter().enumerate() {
            let Expr::Node(kind, es) = node else { unreachable!() };
            let chosen = es[choice[k]].linearize(choose);
            for (j, e) in es.iter().enumerate() {
                if j == choice[k] {
                    continue;
                }
                let other = e.linearize(choose);
                let diff = match kind {
                    Extremum::Max => other.minus(&chosen),
                    Extremum::Min => chosen.minus(&other),
                };
                ok &= push_le_zero(&mut rows, &cols, &diff);
            }
        }
        for c in &p.constraints {
            let diff = c.lhs.linearize(choose).minus(&c.rhs.linearize(choose));
            ok &= match c.rel {
                Relation::Le => push_le_zero(&mut rows, &cols, &diff),
                Relation::Ge => push_le_zero(&mut rows, &cols, &diff.scaled(&-Rational::one())),
                Relation::Eq => {
                    push_le_zero(&mut rows, &cols, &diff)
                        && push_le_zero(&mut rows, &cols, &diff.scaled(&-Rational::one()))
                }
            };
        }
        if ok {
            let obj = p.objective.linearize(choose);
            let (res, piv) = solve_lp(cols.width, &cols.coeffs(&obj), &obj.constant, &rows);
            pivots += piv;
            match res {
                LpResult::Optimal { x, value } => {
                    feasible_branches += 1;
                    if best.as_ref().map_or(true, |(v, _)| value > *v) {
                        best = Some((value, cols.point(&x)));
                    }
                }
                LpResult::Unbounded => {
                    feasible_branches += 1;
                    unbounded = true;
                }
                LpResult::Infeasible => {}
            }
        }
        // next branch, mixed radix
        for k in 0..choice.len() {
            choice[k] += 1;
            if choice[k] < arity[k] {
                break;
            }
            choice[k] = 0;
        }
    }

    let outcome = if unbounded {
        Outcome::Unbounded
    } else {
        match best {
            None => Outcome::Infeasible,
            Some((value, x)) => {
                if !p.is_feasible(&x) {
                    return Err(PlpError::WitnessRejected(format!("{}: witness infeasible", p.name)));
                }
                let got = p.objective.eval(&x);
                if got != value {
                    return Err(PlpError::WitnessRejected(format!(
                        "{}: objective {got} but branch value {value}",
                        p.name
                    )));
                }
                let witness = p.vars.iter().map(|v| v.name.clone()).zip(x).collect();
                Outcome::Optimal { value, witness }
            }
        }
    };
    Ok(PLSolution { outcome, branches, feasible_branches, pivots })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCheck {
    pub feasible: bool,
    pub objective: Rational,
}

impl WitnessCheck {
    pub fn attains(&self, claimed: &Rational) -> bool {
        self.feasible && self.objective == *claimed
    }
}

/// Evaluates the piecewise program at a named point.  Every variable must be
/// given and no other names may appear.
pub fn check_witness(p: &PLProgram, point: &BTreeMap<String, Rational>) -> Result<WitnessCheck, PlpError> {
    if let Some(name) = point.keys().find(|n| p.var_index(n).is_none()) {
        return Err(PlpError::UnknownVariable(name.clone()));
    }
    let mut x = Vec::with_capacity(p.vars.len());
    for v in &p.vars {
        match point.get(&v.name) {
            Some(val) => x.push(val.clone()),
            None => return Err(PlpError::MissingVariable(v.name.clone())),
        }
    }
    Ok(WitnessCheck { feasible: p.is_feasible(&x), objective: p.objective.eval(&x) })
}
