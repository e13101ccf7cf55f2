//! Text format for piecewise-linear programs.
//!
//! ```text
//! # comment
//! var x >= 0;          # nonnegative variable
//! var y;               # free variable
//! def s := x + 2*y;    # named sub-expression, expanded where used
//! maximize min(x, 1 - x) + s/3;
//! subject to x + y <= 1;
//! subject to max(x, y) >= 1/4;
//! ```
//!
//! Products need one constant factor and divisors must be constant, so
//! `p/q` works as a rational literal.  Relations are `<=`, `>=` and `==`.

use std::collections::HashMap;

use super::expr::{Affine, Expr, Extremum};
use super::rational::Rational;
use super::{Constraint, PLProgram, PlpError, Relation, Variable};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(i64),
    Sym(&'static str),
}

const SYMBOLS: [&str; 12] = [":=", "<=", ">=", "==", "+", "-", "*", "/", "(", ")", ",", ";"];

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, PlpError> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let line_no = lineno + 1;
        let code = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = code.chars().collect();
        let mut i = 0;
        'outer: while i < chars.len() {
            let ch = chars[i];
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            if ch.is_ascii_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), line_no));
                continue;
            }
            if ch.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text
                    .parse()
                    .map_err(|_| PlpError::Parse { line: line_no, msg: format!("number too large: {text}") })?;
                out.push((Tok::Num(n), line_no));
                continue;
            }
            for sym in SYMBOLS {
                let len = sym.len();
                if i + len <= chars.len() && chars[i..i + len].iter().collect::<String>() == sym {
                    out.push((Tok::Sym(sym), line_no));
                    i += len;
                    continue 'outer;
                }
            }
            return Err(PlpError::Parse { line: line_no, msg: format!("unexpected character {ch:?}") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: Vec<Variable>,
    var_index: HashMap<String, usize>,
    defs: HashMap<String, Expr>,
    program: &'a str,
}

const KEYWORDS: [&str; 7] = ["var", "def", "maximize", "subject", "to", "max", "min"];

impl Parser<'_> {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PlpError> {
        Err(PlpError::Parse { line: self.line(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek() == Some(&Tok::Sym(match_sym(s))) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), PlpError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), PlpError> {
        match self.next() {
            Some(Tok::Ident(w)) if w == kw => Ok(()),
            _ => {
                self.pos -= 1;
                self.err(format!("expected `{kw}`"))
            }
        }
    }

    fn ident(&mut self) -> Result<String, PlpError> {
        match self.next() {
            Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()) => Ok(w),
            _ => {
                self.pos -= 1;
                self.err("expected a name")
            }
        }
    }

    fn declare(&mut self, name: &str) -> Result<(), PlpError> {
        if self.var_index.contains_key(name) || self.defs.contains_key(name) {
            return self.err(format!("`{name}` declared twice"));
        }
        Ok(())
    }

    fn program(mut self) -> Result<PLProgram, PlpError> {
        let mut objective = None;
        let mut constraints = Vec::new();
        while let Some(tok) = self.next() {
            match tok {
                Tok::Ident(w) if w == "var" => {
                    let name = self.ident()?;
                    self.declare(&name)?;
                    let nonneg = if self.eat_sym(">=") {
                        match self.next() {
                            Some(Tok::Num(0)) => true,
                            _ => return self.err("variables may only be declared `>= 0`"),
                        }
                    } else {
                        false
                    };
                    self.var_index.insert(name.clone(), self.vars.len());
                    self.vars.push(Variable { name, nonneg });
                }
                Tok::Ident(w) if w == "def" => {
                    let name = self.ident()?;
                    self.declare(&name)?;
                    self.expect_sym(":=")?;
                    let e = self.expr()?;
                    self.defs.insert(name, e);
                }
                Tok::Ident(w) if w == "maximize" => {
                    if objective.is_some() {
                        return self.err("more than one objective");
                    }
                    objective = Some(self.expr()?);
                }
                Tok::Ident(w) if w == "subject" => {
                    self.expect_keyword("to")?;
                    let lhs = self.expr()?;
                    let rel = match self.next() {
                        Some(Tok::Sym("<=")) => Relation::Le,
                        Some(Tok::Sym(">=")) => Relation::Ge,
                        Some(Tok::Sym("==")) => Relation::Eq,
                        _ => {
                            self.pos -= 1;
                            return self.err("expected `<=`, `>=` or `==`");
                        }
                    };
                    let rhs = self.expr()?;
                    constraints.push(Constraint { lhs, rel, rhs });
                }
                _ => {
                    self.pos -= 1;
                    return self.err("expected `var`, `def`, `maximize` or `subject to`");
                }
            }
            self.expect_sym(";")?;
        }
        let Some(objective) = objective else {
            return Err(PlpError::Parse { line: self.line(), msg: "missing `maximize`".into() });
        };
        Ok(PLProgram { name: self.program.to_string(), vars: self.vars, objective, constraints })
    }

    fn expr(&mut self) -> Result<Expr, PlpError> {
        let mut acc = self.term()?;
        loop {
            if self.eat_sym("+") {
                acc = acc.add(self.term()?);
            } else if self.eat_sym("-") {
                acc = acc.add(self.term()?.scale(&-Rational::one()));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, PlpError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_sym("*") {
                let rhs = self.unary()?;
                acc = match (acc.as_constant().cloned(), rhs.as_constant().cloned()) {
                    (Some(k), _) => rhs.scale(&k),
                    (None, Some(k)) => acc.scale(&k),
                    _ => return self.err("product of two non-constant expressions"),
                };
            } else if self.eat_sym("/") {
                let rhs = self.unary()?;
                match rhs.as_constant() {
                    Some(k) if !k.is_zero() => acc = acc.scale(&k.recip()),
                    Some(_) => return self.err("division by zero"),
                    None => return self.err("division by a non-constant expression"),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, PlpError> {
        if self.eat_sym("-") {
            return Ok(self.unary()?.scale(&-Rational::one()));
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, PlpError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(Expr::constant(Rational::from_int(n))),
            Some(Tok::Sym("(")) => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Some(Tok::Ident(w)) if w == "max" || w == "min" => {
                let kind = if w == "max" { Extremum::Max } else { Extremum::Min };
                self.expect_sym("(")?;
                let mut args = vec![self.expr()?];
                while self.eat_sym(",") {
                    args.push(self.expr()?);
                }
                self.expect_sym(")")?;
                if args.len() < 2 {
                    return self.err(format!("`{w}` needs at least two arguments"));
                }
                Ok(Expr::Node(kind, args))
            }
            Some(Tok::Ident(w)) => {
                if let Some(&i) = self.var_index.get(&w) {
                    Ok(Expr::Affine(Affine::var(i)))
                } else if let Some(e) = self.defs.get(&w) {
                    Ok(e.clone())
                } else {
                    self.pos -= 1;
                    self.err(format!("unknown name `{w}`"))
                }
            }
            _ => {
                self.pos -= 1;
                self.err("expected an expression")
            }
        }
    }
}

fn match_sym(s: &str) -> &'static str {
    SYMBOLS.iter().copied().find(|x| *x == s).expect("known symbol")
}

pub fn parse_program(name: &str, src: &str) -> Result<PLProgram, PlpError> {
    let parser = Parser {
        toks: tokenize(src)?,
        pos: 0,
        vars: Vec::new(),
        var_index: HashMap::new(),
        defs: HashMap::new(),
        program: name,
    };
    parser.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn parses_small_program() {
        let p = parse_program(
            "t",
            "# demo\nvar x >= 0; var y;\ndef s := x + 2*y;\nmaximize min(x, 1 - x) + s/3 - 1/6*y;\nsubject to x + y <= 1;\nsubject to max(x, y) == 1/4;\n",
        )
        .unwrap();
        assert_eq!(p.vars.len(), 2);
        assert!(p.vars[0].nonneg && !p.vars[1].nonneg);
        assert_eq!(p.constraints.len(), 2);
        assert_eq!(p.constraints[1].rel, Relation::Eq);
        // min(1/4, 3/4) + (1/4 + 1)/3 - 1/12
        assert_eq!(p.objective.eval(&[q(1, 4), q(1, 2)]), q(1, 4) + q(5, 12) - q(1, 12));
    }

    #[test]
    fn precedence_and_literals() {
        let p = parse_program("t", "var x >= 0; maximize 1/2*(x - 3) - -x*2/3 + 2*(1/4);").unwrap();
        assert_eq!(p.objective.eval(&[q(3, 1)]), q(2, 1) + q(1, 2));
    }

    #[test]
    fn reports_errors_with_lines() {
        let cases = [
            ("var x >= 0;\nmaximize x*x;", 2),
            ("var x >= 0;\nmaximize y;", 2),
            ("var x >= 0;\nvar x;\nmaximize x;", 2),
            ("var x >= 1;\nmaximize x;", 1),
            ("var x >= 0;\nmaximize x / 0;", 2),
            ("var x >= 0;\nmaximize max(x);", 2),
            ("var x >= 0;\nsubject to x < 1;", 2),
            ("var x >= 0;", 1),
            ("var x >= 0;\nmaximize x $ 1;", 2),
        ];
        for (src, line) in cases {
            match parse_program("t", src) {
                Err(PlpError::Parse { line: l, .. }) => assert_eq!(l, line, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }
}
