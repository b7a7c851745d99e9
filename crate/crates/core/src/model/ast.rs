//! Abstract syntax of the arithmetic fragment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Terms: variables, numerals, registered unary function applications, sums
/// and products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Num(u64),
    Var(String),
    App(String, Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

/// Comparison operators of the fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Lt,
}

/// Formulas over [`Term`]: falsity, comparisons, the propositional
/// connectives (negation is kept as a node but evaluates as implication
/// into falsity), and quantifiers with an optional strict numeric bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    False,
    Cmp(CmpOp, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall {
        var: String,
        bound: Option<Term>,
        body: Box<Formula>,
    },
    Exists {
        var: String,
        bound: Option<Term>,
        body: Box<Formula>,
    },
}

impl Term {
    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Num(_) | Term::Var(_) => {}
            Term::App(name, arg) => {
                out.insert(name.clone());
                arg.collect_symbols(out);
            }
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Num(_) => {}
            Term::Var(v) => {
                if !bound.iter().any(|b| b == v) {
                    out.insert(v.clone());
                }
            }
            Term::App(_, arg) => arg.collect_free(bound, out),
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    fn substitute(&self, map: &BTreeMap<String, u64>) -> Term {
        match self {
            Term::Num(v) => Term::Num(*v),
            Term::Var(v) => match map.get(v) {
                Some(&value) => Term::Num(value),
                None => Term::Var(v.clone()),
            },
            Term::App(name, arg) => Term::App(name.clone(), Box::new(arg.substitute(map))),
            Term::Add(a, b) => Term::Add(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Term::Mul(a, b) => Term::Mul(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
        }
    }
}

impl Formula {
    /// All function symbols mentioned anywhere in the formula.
    pub fn function_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_symbols(&mut out);
        out
    }

    fn walk_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::False => {}
            Formula::Cmp(_, a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Formula::Not(p) => p.walk_symbols(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk_symbols(out);
                b.walk_symbols(out);
            }
            Formula::Forall { bound, body, .. } | Formula::Exists { bound, body, .. } => {
                if let Some(t) = bound {
                    t.collect_symbols(out);
                }
                body.walk_symbols(out);
            }
        }
    }

    /// Free variables of the formula.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_free(&mut Vec::new(), &mut out);
        out
    }

    fn walk_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::False => {}
            Formula::Cmp(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(p) => p.walk_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk_free(bound, out);
                b.walk_free(bound, out);
            }
            Formula::Forall { var, bound: b, body } | Formula::Exists { var, bound: b, body } => {
                if let Some(t) = b {
                    t.collect_free(bound, out);
                }
                bound.push(var.clone());
                body.walk_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Replace free variables by numerals; quantifiers shadow as usual.
    pub fn substitute(&self, map: &BTreeMap<String, u64>) -> Formula {
        match self {
            Formula::False => Formula::False,
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, a.substitute(map), b.substitute(map)),
            Formula::Not(p) => Formula::Not(Box::new(p.substitute(map))),
            Formula::And(a, b) => Formula::And(
                Box::new(a.substitute(map)),
                Box::new(b.substitute(map)),
            ),
            Formula::Or(a, b) => Formula::Or(
                Box::new(a.substitute(map)),
                Box::new(b.substitute(map)),
            ),
            Formula::Implies(a, b) => Formula::Implies(
                Box::new(a.substitute(map)),
                Box::new(b.substitute(map)),
            ),
            Formula::Forall { var, bound, body } => {
                let bound = bound.as_ref().map(|t| t.substitute(map));
                let mut inner = map.clone();
                inner.remove(var);
                Formula::Forall {
                    var: var.clone(),
                    bound,
                    body: Box::new(body.substitute(&inner)),
                }
            }
            Formula::Exists { var, bound, body } => {
                let bound = bound.as_ref().map(|t| t.substitute(map));
                let mut inner = map.clone();
                inner.remove(var);
                Formula::Exists {
                    var: var.clone(),
                    bound,
                    body: Box::new(body.substitute(&inner)),
                }
            }
        }
    }
}

// Term printing precedence: sums 1, products 2, applications and leaves 3.
fn fmt_term(t: &Term, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Num(v) => write!(f, "{v}"),
        Term::Var(v) => write!(f, "{v}"),
        Term::App(name, arg) => {
            write!(f, "{name}(")?;
            fmt_term(arg, 1, f)?;
            write!(f, ")")
        }
        Term::Add(a, b) => {
            if ctx > 1 {
                write!(f, "(")?;
            }
            fmt_term(a, 1, f)?;
            write!(f, "+")?;
            fmt_term(b, 2, f)?;
            if ctx > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Term::Mul(a, b) => {
            if ctx > 2 {
                write!(f, "(")?;
            }
            fmt_term(a, 2, f)?;
            write!(f, "*")?;
            fmt_term(b, 3, f)?;
            if ctx > 2 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, 1, f)
    }
}

// Formula printing contexts: 0 tail (nothing follows), 1 implication right,
// 2 disjunction left, 3 conjunction operand, 4 negation operand.
fn fmt_formula(p: &Formula, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        Formula::False => write!(f, "false"),
        Formula::Cmp(op, a, b) => {
            let sym = match op {
                CmpOp::Eq => "=",
                CmpOp::Lt => "<",
            };
            write!(f, "{a} {sym} {b}")
        }
        Formula::Not(inner) => {
            write!(f, "~")?;
            match &**inner {
                // comparisons are printed parenthesised under negation for
                // readability; the grammar would not require it
                Formula::Cmp(..) => {
                    write!(f, "(")?;
                    fmt_formula(inner, 0, f)?;
                    write!(f, ")")
                }
                _ => fmt_formula(inner, 4, f),
            }
        }
        Formula::And(a, b) => {
            if ctx > 3 {
                write!(f, "(")?;
            }
            fmt_formula(a, 3, f)?;
            write!(f, " /\\ ")?;
            fmt_formula(b, 4, f)?;
            if ctx > 3 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Formula::Or(a, b) => {
            if ctx > 2 {
                write!(f, "(")?;
            }
            fmt_formula(a, 2, f)?;
            write!(f, " \\/ ")?;
            fmt_formula(b, 3, f)?;
            if ctx > 2 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Formula::Implies(a, b) => {
            if ctx > 1 {
                write!(f, "(")?;
            }
            fmt_formula(a, 2, f)?;
            write!(f, " -> ")?;
            fmt_formula(b, 0, f)?;
            if ctx > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Formula::Forall { var, bound, body } | Formula::Exists { var, bound, body } => {
            if ctx > 0 {
                write!(f, "(")?;
            }
            let word = if matches!(p, Formula::Forall { .. }) {
                "forall"
            } else {
                "exists"
            };
            write!(f, "{word} {var}")?;
            if let Some(t) = bound {
                write!(f, "<{t}")?;
            }
            write!(f, ". ")?;
            fmt_formula(body, 0, f)?;
            if ctx > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}
