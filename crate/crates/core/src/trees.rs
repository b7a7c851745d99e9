//! Labelled n-trees: the good and very-good predicates, the cover of the
//! one-point space, and the shape/data encoding into naturals.
//!
//! A tree is either `nil` or a node carrying `n >= 2` subtrees and `n`
//! sequence labels; all nodes of one tree share the same arity. Goodness
//! asks that all distinct label pairs join to the top element and that
//! top-labelled children are good; very-goodness additionally asks for a
//! top-labelled very good child. On closed-form labels both predicates are
//! decided by direct recursion, and they serve as the oracles against which
//! the primitive-recursive characterisations (see [`crate::prcodes`]) are
//! checked.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::codec;
use crate::error::{Error, Result};
use crate::omega::{Bit, Omega};

pub use crate::codec::{list_decode, list_encode};

/// An n-tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Tree {
    Nil,
    Node {
        subtrees: Vec<Tree>,
        labels: Vec<Omega>,
    },
}

/// Code of a tree's shape under the list codec. A node's code is strictly
/// greater than each child's code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShapeCode(pub BigUint);

impl fmt::Display for ShapeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Tree {
    /// Build a node, enforcing the structural invariants: arity at least 2,
    /// as many labels as subtrees, and homogeneous arity across the tree.
    pub fn node(subtrees: Vec<Tree>, labels: Vec<Omega>) -> Result<Tree> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::InvalidArity { arity: n });
        }
        if subtrees.len() != n {
            return Err(Error::MalformedTree(format!(
                "{} subtrees with {} labels",
                subtrees.len(),
                n
            )));
        }
        for sub in &subtrees {
            if let Some(m) = sub.arity() {
                if m != n {
                    return Err(Error::MalformedTree(format!(
                        "subtree of arity {m} under node of arity {n}"
                    )));
                }
            }
        }
        Ok(Tree::Node { subtrees, labels })
    }

    /// Arity of the tree; `None` for `nil`.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Tree::Nil => None,
            Tree::Node { labels, .. } => Some(labels.len()),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Tree::Nil => true,
            Tree::Node { subtrees, labels } => {
                labels.iter().all(Omega::is_closed) && subtrees.iter().all(Tree::is_closed)
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Nil => 0,
            Tree::Node { subtrees, .. } => {
                1 + subtrees.iter().map(Tree::depth).max().unwrap_or(0)
            }
        }
    }

    /// Shape code: `nil` encodes the empty list; a node encodes the list of
    /// its children's shape codes.
    pub fn shape(&self) -> ShapeCode {
        match self {
            Tree::Nil => ShapeCode(codec::list_encode(&[])),
            Tree::Node { subtrees, .. } => {
                let children: Vec<BigUint> =
                    subtrees.iter().map(|t| t.shape().0).collect();
                ShapeCode(codec::list_encode(&children))
            }
        }
    }

    /// The data sequence of the tree at position `j`.
    ///
    /// A node of arity `n` splits positions as `j = 2nk + 2i` (label track
    /// `i` at index `k`) or `j = 2nk + 2i + 1` (child `i`'s data at `k`),
    /// with `0 <= i < n`; track `i` carries the label at 0-based position
    /// `i`. The data of `nil` is constantly 0.
    pub fn data_at(&self, j: u64) -> Result<Bit> {
        match self {
            Tree::Nil => Ok(0),
            Tree::Node { subtrees, labels } => {
                let n = labels.len() as u64;
                let k = j / (2 * n);
                let rem = j % (2 * n);
                let i = (rem / 2) as usize;
                if rem.is_multiple_of(2) {
                    labels[i].eval_at(k)
                } else {
                    subtrees[i].data_at(k)
                }
            }
        }
    }

    /// Whether the tree is good: all distinct label pairs join to the top
    /// element, and children under a top label are good. Requires closed
    /// labels.
    pub fn is_good(&self) -> Result<bool> {
        match self {
            Tree::Nil => Ok(true),
            Tree::Node { subtrees, labels } => {
                let n = labels.len();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if !labels[i].join(&labels[j]).is_one()? {
                            return Ok(false);
                        }
                    }
                }
                for (label, sub) in labels.iter().zip(subtrees) {
                    if label.is_one()? && !sub.is_good()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Whether the tree is very good: good, with a top-labelled very good
    /// child. Requires closed labels.
    pub fn is_very_good(&self) -> Result<bool> {
        match self {
            Tree::Nil => Ok(true),
            Tree::Node { subtrees, labels } => {
                if !self.is_good()? {
                    return Ok(false);
                }
                for (label, sub) in labels.iter().zip(subtrees) {
                    if label.is_one()? && sub.is_very_good()? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Whether 0 lies in the cover of the tree: the cover of `nil` is the
    /// whole one-point space, and a node covers 0 when some top-labelled
    /// child does. Requires closed labels.
    pub fn cover0(&self) -> Result<bool> {
        match self {
            Tree::Nil => Ok(true),
            Tree::Node { subtrees, labels } => {
                for (label, sub) in labels.iter().zip(subtrees) {
                    if label.is_one()? && sub.cover0()? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Paths (as 0-based branch index lists) from the root to every `nil`
    /// leaf reachable through top labels only. Requires closed labels.
    pub fn reachable_nil_paths(&self) -> Result<Vec<Vec<usize>>> {
        fn go(t: &Tree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
            match t {
                Tree::Nil => out.push(path.clone()),
                Tree::Node { subtrees, labels } => {
                    for (i, (label, sub)) in labels.iter().zip(subtrees).enumerate() {
                        if label.is_one()? {
                            path.push(i);
                            go(sub, path, out)?;
                            path.pop();
                        }
                    }
                }
            }
            Ok(())
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out)?;
        Ok(out)
    }

    /// Number of `nil` leaves.
    pub fn nil_leaf_count(&self) -> usize {
        match self {
            Tree::Nil => 1,
            Tree::Node { subtrees, .. } => subtrees.iter().map(Tree::nil_leaf_count).sum(),
        }
    }
}

impl fmt::Display for Tree {
    /// Concrete syntax: `nil` or `Tr(t1,...,tn;o1,...,on)` with labels in
    /// the sequence syntax, no whitespace.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Nil => write!(f, "nil"),
            Tree::Node { subtrees, labels } => {
                write!(f, "Tr(")?;
                for (i, t) in subtrees.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ";")?;
                for (i, o) in labels.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{o}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct TreeParser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> TreeParser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.input[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.input[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn tree(&mut self) -> Result<Tree> {
        if self.eat("nil") {
            return Ok(Tree::Nil);
        }
        self.expect("Tr(")?;
        let mut subtrees = vec![self.tree()?];
        while self.eat(",") {
            subtrees.push(self.tree()?);
        }
        self.expect(";")?;
        let mut labels = vec![self.omega()?];
        while self.eat(",") {
            labels.push(self.omega()?);
        }
        self.expect(")")?;
        Tree::node(subtrees, labels)
    }

    fn omega(&mut self) -> Result<Omega> {
        self.skip_ws();
        if self.eat("one") {
            return Ok(Omega::ConstOne);
        }
        if self.eat("zf:") {
            let start = self.pos;
            while self.input[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected digits after `zf:`");
            }
            let k: u64 = self.input[start..self.pos]
                .parse()
                .map_err(|_| Error::Parse {
                    pos: start,
                    message: "switch point out of range".to_string(),
                })?;
            return Ok(Omega::ZeroFrom(k));
        }
        self.err("expected `one` or `zf:<k>`")
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tree> {
        let mut p = TreeParser { input: s, pos: 0 };
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input after tree");
        }
        Ok(t)
    }
}
