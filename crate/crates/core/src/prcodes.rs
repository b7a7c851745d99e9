//! Primitive-recursive characterisations of goodness and very-goodness over
//! the shape/data encoding.
//!
//! Everything here reads a tree only through its shape code and its data
//! sequence, never through the tree structure directly; agreement with the
//! direct recursive predicates is what the oracle tests check.
//!
//! For a shape `s` of arity `n` with children `s_1 .. s_n`, the goodness
//! clause bound is `b(s) = sum_i b(s_i) + n(n-1)` with `b(nil) = 0`, and a
//! tree is good iff for every clause `l < b(S(T))`:
//!
//! ```text
//! (c(l) = 1 -> forall i. D(T)(f(l, i)) = 1)
//!     -> forall i. not (D(T)(g0(l, i)) = 0 and D(T)(g1(l, i)) = 0)
//! ```
//!
//! Clauses `l < sum_i b(s_i)` are *recursive*: they re-index a child clause
//! into the parent's data region and guard it with the child's label track
//! (flag `c = 1`). The remaining `n(n-1)` clauses are *pair* clauses
//! (flag `c = 0`, premise vacuous): clause `p = l - sum_i b(s_i)` checks the
//! ordered distinct pair `(l0, l1')` with `l0 = p div (n-1)`,
//! `l1 = p mod (n-1)` and `l1' = l1` when `l1 < l0`, else `l1 + 1` — a
//! bijection onto the ordered distinct label pairs.
//!
//! The very-goodness clauses enumerate the candidate witness chains: each
//! clause picks a branch and, for non-`nil` children, a chain below it, so
//! the bound is `vb(s) = sum_i max(1, vb(s_i))` with `vb(nil) = 0` (a `nil`
//! child contributes the single chain that stops there). A clause's track is
//! all ones exactly when every label along its chain is the top element.
//! Since a chain alone does not see the pairwise label joins off the chain,
//! `eval_very_good_via_codes` conjoins the goodness formula; `nil` itself
//! has no chain clause and is special-cased to very good.
//!
//! The `forall i` quantifiers are decided by scanning a finite prefix. Label
//! tracks and the straight-through `g` tracks stabilise by
//! [`stabilization_bound`], but the interleaved `f` tracks halve their input
//! index per nesting level, so the scan uses the deeper [`check_bound`],
//! which doubles per level instead.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::codec;
use crate::error::{Error, Result};
use crate::omega::Bit;
use crate::trees::{ShapeCode, Tree};

/// A total position map into a tree's data sequence.
#[derive(Clone)]
pub struct Track(Arc<dyn Fn(u64) -> u64 + Send + Sync>);

impl Track {
    fn new(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Track {
        Track(Arc::new(f))
    }

    fn constant(v: u64) -> Track {
        Track::new(move |_| v)
    }

    /// Position addressed for quantifier index `i`.
    pub fn at(&self, i: u64) -> u64 {
        (self.0)(i)
    }
}

impl std::fmt::Debug for Track {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let head: Vec<u64> = (0..6).map(|i| self.at(i)).collect();
        write!(f, "Track{head:?}...")
    }
}

/// One clause of the goodness formula.
#[derive(Clone, Debug)]
pub struct GoodClause {
    pub index: u64,
    /// 1 for recursive clauses, 0 for pair clauses.
    pub c_flag: Bit,
    pub f_track: Track,
    pub g0_track: Track,
    pub g1_track: Track,
}

/// One candidate witness chain of the very-goodness formula.
#[derive(Clone, Debug)]
pub struct VGoodClause {
    pub index: u64,
    pub f_track: Track,
}

/// Shape decoded back into its tree of arities. Total: every natural
/// decodes, because the list codec is a bijection.
enum ShapeTree {
    Leaf,
    Node(Vec<ShapeTree>),
}

fn decode_shape(code: &BigUint) -> ShapeTree {
    let parts = codec::list_decode(code);
    if parts.is_empty() {
        ShapeTree::Leaf
    } else {
        ShapeTree::Node(parts.iter().map(decode_shape).collect())
    }
}

fn good_bound_of(st: &ShapeTree) -> u64 {
    match st {
        ShapeTree::Leaf => 0,
        ShapeTree::Node(children) => {
            let n = children.len() as u64;
            children.iter().map(good_bound_of).sum::<u64>() + n * (n - 1)
        }
    }
}

fn vgood_bound_of(st: &ShapeTree) -> u64 {
    match st {
        ShapeTree::Leaf => 0,
        ShapeTree::Node(children) => children
            .iter()
            .map(|c| vgood_bound_of(c).max(1))
            .sum::<u64>(),
    }
}

/// Locate `l` in the concatenation of per-child clause ranges; returns the
/// 0-based child index and the offset within that child's range.
fn locate(l: u64, sizes: &[u64]) -> (usize, u64) {
    let mut acc = 0;
    for (k, &size) in sizes.iter().enumerate() {
        if l < acc + size {
            return (k, l - acc);
        }
        acc += size;
    }
    unreachable!("clause index within bound")
}

fn good_clause_of(l: u64, st: &ShapeTree) -> GoodClause {
    let ShapeTree::Node(children) = st else {
        unreachable!("nil has clause bound 0")
    };
    let n = children.len() as u64;
    let child_bounds: Vec<u64> = children.iter().map(good_bound_of).collect();
    let recursive_total: u64 = child_bounds.iter().sum();

    if l >= recursive_total {
        // Pair clause: vacuous premise, conclusion asserts the join of the
        // ordered distinct pair (l0, l1') is the top element.
        let p = l - recursive_total;
        let l0 = p / (n - 1);
        let l1 = p % (n - 1);
        let l1p = if l1 < l0 { l1 } else { l1 + 1 };
        return GoodClause {
            index: l,
            c_flag: 0,
            f_track: Track::constant(0),
            g0_track: Track::new(move |i| 2 * n * i + 2 * l0),
            g1_track: Track::new(move |i| 2 * n * i + 2 * l1p),
        };
    }

    // Recursive clause: child k's clause l', premise guarded by label k.
    let (k, lp) = locate(l, &child_bounds);
    let inner = good_clause_of(lp, &children[k]);
    let kk = k as u64;
    let f_track = if inner.c_flag == 1 {
        // Even inputs scan label k; odd inputs follow the child's premise
        // track through the child's data region.
        let inner_f = inner.f_track.clone();
        Track::new(move |i| {
            if i % 2 == 0 {
                2 * n * (i / 2) + 2 * kk
            } else {
                2 * n * inner_f.at((i - 1) / 2) + 2 * kk + 1
            }
        })
    } else {
        // Child clause has a vacuous premise; only the label needs scanning.
        Track::new(move |i| 2 * n * i + 2 * kk)
    };
    let g0 = inner.g0_track.clone();
    let g1 = inner.g1_track.clone();
    GoodClause {
        index: l,
        c_flag: 1,
        f_track,
        g0_track: Track::new(move |i| 2 * n * g0.at(i) + 2 * kk + 1),
        g1_track: Track::new(move |i| 2 * n * g1.at(i) + 2 * kk + 1),
    }
}

fn vgood_clause_of(l: u64, st: &ShapeTree) -> VGoodClause {
    let ShapeTree::Node(children) = st else {
        unreachable!("nil has chain bound 0")
    };
    let n = children.len() as u64;
    let sizes: Vec<u64> = children.iter().map(|c| vgood_bound_of(c).max(1)).collect();
    let (k, lp) = locate(l, &sizes);
    let kk = k as u64;
    let f_track = match &children[k] {
        // Chain stops at a nil child: every index scans label k.
        ShapeTree::Leaf => Track::new(move |i| 2 * n * i + 2 * kk),
        child => {
            let inner = vgood_clause_of(lp, child).f_track;
            Track::new(move |i| {
                if i % 2 == 0 {
                    2 * n * (i / 2) + 2 * kk
                } else {
                    2 * n * inner.at((i - 1) / 2) + 2 * kk + 1
                }
            })
        }
    };
    VGoodClause { index: l, f_track }
}

/// Number of goodness clauses of a shape.
pub fn good_bound(s: &ShapeCode) -> u64 {
    good_bound_of(&decode_shape(&s.0))
}

/// Number of witness-chain clauses of a shape.
pub fn vgood_bound(s: &ShapeCode) -> u64 {
    vgood_bound_of(&decode_shape(&s.0))
}

/// The goodness clause `l` of shape `s`.
pub fn good_clause(l: u64, s: &ShapeCode) -> Result<GoodClause> {
    let st = decode_shape(&s.0);
    let bound = good_bound_of(&st);
    if l >= bound {
        return Err(Error::ClauseIndexOutOfRange { index: l, bound });
    }
    Ok(good_clause_of(l, &st))
}

/// The witness-chain clause `l` of shape `s`.
pub fn vgood_clause(l: u64, s: &ShapeCode) -> Result<VGoodClause> {
    let st = decode_shape(&s.0);
    let bound = vgood_bound_of(&st);
    if l >= bound {
        return Err(Error::ClauseIndexOutOfRange { index: l, bound });
    }
    Ok(vgood_clause_of(l, &st))
}

fn require_closed(t: &Tree) -> Result<()> {
    if t.is_closed() {
        Ok(())
    } else {
        Err(Error::RequiresClosedForm)
    }
}

/// Index from which every label track of the tree is constant in its own
/// index: 0 for `nil`, otherwise one past the largest label switch point or
/// child bound.
pub fn stabilization_bound(t: &Tree) -> Result<u64> {
    match t {
        Tree::Nil => Ok(0),
        Tree::Node { subtrees, labels } => {
            require_closed(t)?;
            let mut max = 0;
            for label in labels {
                max = max.max(label.stabilization_point()?);
            }
            for sub in subtrees {
                max = max.max(stabilization_bound(sub)?);
            }
            Ok(1 + max)
        }
    }
}

/// Scan bound for the clause quantifiers. Interleaved premise tracks reach
/// child index `i` only at input `2i + 1`, so this doubles per level where
/// [`stabilization_bound`] adds one; any zero in any clause track of the
/// tree shows up below this bound.
pub fn check_bound(t: &Tree) -> Result<u64> {
    match t {
        Tree::Nil => Ok(0),
        Tree::Node { subtrees, labels } => {
            require_closed(t)?;
            let mut max = 0;
            for label in labels {
                max = max.max(label.stabilization_point()?);
            }
            for sub in subtrees {
                max = max.max(check_bound(sub)?);
            }
            Ok(2 * (1 + max))
        }
    }
}

/// Evaluate the goodness formula over (shape, data) only; agrees with
/// [`Tree::is_good`] on closed forms.
pub fn eval_good_via_codes(t: &Tree) -> Result<bool> {
    require_closed(t)?;
    let st = decode_shape(&t.shape().0);
    let bound = good_bound_of(&st);
    let scan = check_bound(t)?;
    for l in 0..bound {
        let clause = good_clause_of(l, &st);
        let premise = if clause.c_flag == 1 {
            all_ones(t, &clause.f_track, scan)?
        } else {
            true
        };
        if premise {
            for i in 0..scan {
                let a = t.data_at(clause.g0_track.at(i))?;
                let b = t.data_at(clause.g1_track.at(i))?;
                if a == 0 && b == 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Evaluate the very-goodness characterisation over (shape, data) only;
/// agrees with [`Tree::is_very_good`] on closed forms. `nil` is very good
/// but has chain bound 0, so it is answered directly.
pub fn eval_very_good_via_codes(t: &Tree) -> Result<bool> {
    if matches!(t, Tree::Nil) {
        return Ok(true);
    }
    require_closed(t)?;
    if !eval_good_via_codes(t)? {
        return Ok(false);
    }
    exists_witness_chain(t)
}

/// The bare chain existential: some clause track is all ones.
pub(crate) fn exists_witness_chain(t: &Tree) -> Result<bool> {
    let st = decode_shape(&t.shape().0);
    let bound = vgood_bound_of(&st);
    let scan = check_bound(t)?;
    for l in 0..bound {
        let clause = vgood_clause_of(l, &st);
        if all_ones(t, &clause.f_track, scan)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn all_ones(t: &Tree, track: &Track, scan: u64) -> Result<bool> {
    for i in 0..scan {
        if t.data_at(track.at(i))? != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}
