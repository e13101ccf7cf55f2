//! Exact maximisation of piecewise-linear programs.
//!
//! Every `max`/`min` node is resolved by branching on the child that
//! attains it, which turns the program into finitely many ordinary linear
//! programs; each is solved exactly by the rational simplex in [`simplex`].

pub mod expr;
pub mod parse;
pub mod programs;
pub mod rational;
pub mod simplex;
pub mod solve;

pub use expr::{Affine, Expr, Extremum};
pub use parse::parse_program;
pub use programs::{paper_programs, BundledProgram, BUNDLED_PROGRAMS};
pub use rational::Rational;
pub use solve::{check_witness, solve, Outcome, PLSolution, WitnessCheck};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlpError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no value given for variable `{0}`")]
    MissingVariable(String),
    #[error("solver witness failed re-evaluation: {0}")]
    WitnessRejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub nonneg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: Expr,
    pub rel: Relation,
    pub rhs: Expr,
}

impl Constraint {
    pub fn holds(&self, x: &[Rational]) -> bool {
        let (l, r) = (self.lhs.eval(x), self.rhs.eval(x));
        match self.rel {
            Relation::Le => l <= r,
            Relation::Ge => l >= r,
            Relation::Eq => l == r,
        }
    }
}

/// `maximize objective` subject to `constraints`, with a sign flag per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLProgram {
    pub name: String,
    pub vars: Vec<Variable>,
    pub objective: Expr,
    pub constraints: Vec<Constraint>,
}

impl PLProgram {
    pub fn parse(name: &str, src: &str) -> Result<Self, PlpError> {
        parse_program(name, src)
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Sign constraints and every explicit constraint hold at `x`.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        self.vars.iter().zip(x).all(|(v, xi)| !v.nonneg || xi.signum() >= 0)
            && self.constraints.iter().all(|c| c.holds(x))
    }
}
