//! Piecewise-linear expressions over indexed variables.

use std::collections::BTreeMap;
use std::fmt;

use super::rational::Rational;

/// `constant + sum coeff_i x_i`, zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Affine {
    pub coeffs: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

impl Affine {
    pub fn constant(c: Rational) -> Self {
        Self { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(index: usize) -> Self {
        Self { coeffs: BTreeMap::from([(index, Rational::one())]), constant: Rational::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Affine, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (i, c) in &other.coeffs {
            let entry = self.coeffs.entry(*i).or_default();
            *entry = &*entry + &(c * k);
            if entry.is_zero() {
                self.coeffs.remove(i);
            }
        }
        self.constant = &self.constant + &(&other.constant * k);
    }

    pub fn scaled(&self, k: &Rational) -> Affine {
        let mut out = Affine::default();
        out.add_scaled(self, k);
        out
    }

    pub fn minus(&self, other: &Affine) -> Affine {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().fold(self.constant.clone(), |acc, (i, c)| &acc + &(c * &x[*i]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extremum {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Affine(Affine),
    Sum(Vec<Expr>),
    Scale(Rational, Box<Expr>),
    Node(Extremum, Vec<Expr>),
}

impl Expr {
    pub fn constant(c: Rational) -> Self {
        Expr::Affine(Affine::constant(c))
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match self {
            Expr::Affine(a) if a.is_constant() => Some(&a.constant),
            _ => None,
        }
    }

    /// Sum that folds affine parts together.
    pub fn add(self, other: Expr) -> Expr {
        match (self, other) {
            (Expr::Affine(mut a), Expr::Affine(b)) => {
                a.add_scaled(&b, &Rational::one());
                Expr::Affine(a)
            }
            (Expr::Sum(mut xs), Expr::Sum(ys)) => {
                xs.extend(ys);
                Expr::Sum(xs)
            }
            (Expr::Sum(mut xs), y) => {
                xs.push(y);
                Expr::Sum(xs)
            }
            (x, y) => Expr::Sum(vec![x, y]),
        }
    }

    pub fn scale(self, k: &Rational) -> Expr {
        match self {
            Expr::Affine(a) => Expr::Affine(a.scaled(k)),
            Expr::Scale(c, e) => Expr::Scale(&c * k, e),
            e if *k == Rational::one() => e,
            e => Expr::Scale(k.clone(), Box::new(e)),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        match self {
            Expr::Affine(a) => a.eval(x),
            Expr::Sum(es) => es.iter().fold(Rational::zero(), |acc, e| &acc + &e.eval(x)),
            Expr::Scale(k, e) => k * &e.eval(x),
            Expr::Node(kind, es) => {
                let vals = es.iter().map(|e| e.eval(x));
                match kind {
                    Extremum::Max => vals.reduce(Rational::max).expect("nonempty"),
                    Extremum::Min => vals.reduce(Rational::min).expect("nonempty"),
                }
            }
        }
    }

    /// Every Max/Min node, children before parents, each listed once.
    pub fn collect_nodes<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Affine(_) => {}
            Expr::Sum(es) => es.iter().for_each(|e| e.collect_nodes(out)),
            Expr::Scale(_, e) => e.collect_nodes(out),
            Expr::Node(_, es) => {
                es.iter().for_each(|e| e.collect_nodes(out));
                if !out.contains(&self) {
                    out.push(self);
                }
            }
        }
    }

    /// The affine form obtained by replacing each node with the child chosen
    /// for it by `choose`.
    pub fn linearize<F: Fn(&Expr) -> usize + Copy>(&self, choose: F) -> Affine {
        match self {
            Expr::Affine(a) => a.clone(),
            Expr::Sum(es) => {
                let mut out = Affine::default();
                for e in es {
                    out.add_scaled(&e.linearize(choose), &Rational::one());
                }
                out
            }
            Expr::Scale(k, e) => e.linearize(choose).scaled(k),
            Expr::Node(_, es) => es[choose(self)].linearize(choose),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

fn write_affine(f: &mut fmt::Formatter<'_>, a: &Affine, names: &[String]) -> fmt::Result {
    let mut first = true;
    for (i, c) in &a.coeffs {
        let sep = if first { "" } else { " + " };
        write!(f, "{sep}{c}*{}", names[*i])?;
        first = false;
    }
    if first || !a.constant.is_zero() {
        let sep = if first { "" } else { " + " };
        write!(f, "{sep}{}", a.constant)?;
    }
    Ok(())
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Affine(a) => write_affine(f, a, self.names),
            Expr::Sum(es) => {
                for (k, e) in es.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{}", e.display(self.names))?;
                }
                Ok(())
            }
            Expr::Scale(k, e) => write!(f, "{k}*({})", e.display(self.names)),
            Expr::Node(kind, es) => {
                write!(f, "{}(", if *kind == Extremum::Max { "max" } else { "min" })?;
                for (k, e) in es.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", e.display(self.names))?;
                }
                write!(f, ")")
            }
        }
    }
}
