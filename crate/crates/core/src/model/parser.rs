//! Concrete syntax for the arithmetic fragment.
//!
//! ```text
//! formula := impl
//! impl    := disj ["->" impl]
//! disj    := conj {"\/" conj}
//! conj    := neg {"/\" neg}
//! neg     := "~" neg | atom
//! atom    := "false" | term ("="|"<") term | quant | "(" formula ")"
//! quant   := ("forall"|"exists") ident ["<" term] "." formula
//! term    := addend {"+" addend}
//! addend  := factor {"*" factor}
//! factor  := numeral | ident ["(" term ")"] | "(" term ")"
//! ```
//!
//! Quantifier bodies extend as far right as possible. Parenthesised terms
//! are accepted on input although the printer rarely needs them.

use crate::error::{Error, Result};
use crate::model::ast::{CmpOp, Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Arrow,  // ->
    OrOp,   // \/
    AndOp,  // /\
    Tilde,
    Eq,
    Lt,
    Dot,
    LParen,
    RParen,
    Plus,
    Star,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        loop {
            while self.src[self.pos..].starts_with(char::is_whitespace) {
                self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
            }
            let start = self.pos;
            let rest = &self.src[self.pos..];
            let Some(c) = rest.chars().next() else {
                return Ok(out);
            };
            let tok = if rest.starts_with("->") {
                self.pos += 2;
                Tok::Arrow
            } else if rest.starts_with("\\/") {
                self.pos += 2;
                Tok::OrOp
            } else if rest.starts_with("/\\") {
                self.pos += 2;
                Tok::AndOp
            } else if c.is_ascii_digit() {
                let len = rest.chars().take_while(|c| c.is_ascii_digit()).count();
                self.pos += len;
                let text = &rest[..len];
                Tok::Num(text.parse().map_err(|_| Error::Parse {
                    pos: start,
                    message: format!("numeral `{text}` out of range"),
                })?)
            } else if c.is_ascii_alphabetic() || c == '_' {
                let len = rest
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                    .count();
                self.pos += len;
                Tok::Ident(rest[..len].to_string())
            } else {
                self.pos += c.len_utf8();
                match c {
                    '~' => Tok::Tilde,
                    '=' => Tok::Eq,
                    '<' => Tok::Lt,
                    '.' => Tok::Dot,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '+' => Tok::Plus,
                    '*' => Tok::Star,
                    _ => {
                        return Err(Error::Parse {
                            pos: start,
                            message: format!("unexpected character `{c}`"),
                        })
                    }
                }
            };
            out.push((start, tok));
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.here(),
            message: message.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::OrOp) {
            let rhs = self.conj()?;
            acc = Formula::Or(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut acc = self.neg()?;
        while self.eat(&Tok::AndOp) {
            let rhs = self.neg()?;
            acc = Formula::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn neg(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Tilde) {
            Ok(Formula::Not(Box::new(self.neg()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.keyword("false") {
            return Ok(Formula::False);
        }
        if self.keyword("forall") {
            return self.quant(true);
        }
        if self.keyword("exists") {
            return self.quant(false);
        }
        // a comparison, or a parenthesised formula; disambiguate by
        // backtracking over the term attempt
        let save = self.pos;
        if let Ok(lhs) = self.term() {
            let op = if self.eat(&Tok::Eq) {
                Some(CmpOp::Eq)
            } else if self.eat(&Tok::Lt) {
                Some(CmpOp::Lt)
            } else {
                None
            };
            if let Some(op) = op {
                let rhs = self.term()?;
                return Ok(Formula::Cmp(op, lhs, rhs));
            }
        }
        self.pos = save;
        if self.eat(&Tok::LParen) {
            let inner = self.formula()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        self.err("expected a formula")
    }

    fn quant(&mut self, universal: bool) -> Result<Formula> {
        let var = match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                name
            }
            _ => return self.err("expected a variable name"),
        };
        let bound = if self.eat(&Tok::Lt) {
            Some(self.term()?)
        } else {
            None
        };
        self.expect(&Tok::Dot, "`.` after the quantified variable")?;
        let body = Box::new(self.formula()?);
        Ok(if universal {
            Formula::Forall { var, bound, body }
        } else {
            Formula::Exists { var, bound, body }
        })
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.addend()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.addend()?;
            acc = Term::Add(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn addend(&mut self) -> Result<Term> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.factor()?;
            acc = Term::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Term::Num(v))
            }
            Some(Tok::Ident(name)) => {
                if name == "false" || name == "forall" || name == "exists" {
                    return self.err(format!("keyword `{name}` cannot start a term"));
                }
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let arg = self.term()?;
                    self.expect(&Tok::RParen, "`)` after function argument")?;
                    Ok(Term::App(name, Box::new(arg)))
                } else {
                    Ok(Term::Var(name))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.err("expected a term"),
        }
    }
}

/// Parse a formula from its concrete syntax.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = parser.formula()?;
    if parser.pos != parser.toks.len() {
        return parser.err("trailing input after formula");
    }
    Ok(f)
}
