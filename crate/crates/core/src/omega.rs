//! The lattice of decreasing binary sequences.
//!
//! Elements come in two tiers. Closed forms (`ConstOne`, `ZeroFrom`) make
//! every lattice question decidable: a decreasing binary sequence that is
//! eventually zero is `ZeroFrom(k)` for its switch point `k`, and the only
//! other decreasing sequence is the constant-one top element. Opaque
//! sequences wrap an arbitrary total generator behind a memo cache; they
//! exist so that fuelled search and the realizer combinators can be
//! exercised on genuinely non-inspectable data.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

/// A binary digit. Values are always 0 or 1.
pub type Bit = u8;

type Gen = dyn Fn(u64) -> Result<u64> + Send + Sync;

/// An opaque decreasing binary sequence: a total generator plus a memo cache
/// recording the inspected prefix. All accesses go through the cache, so
/// generator misbehaviour (a non-bit value, or a rise after a zero) is
/// detected deterministically at the first index that exhibits it.
///
/// Concurrent `eval_at` calls on one value are linearized by the cache lock.
#[derive(Clone)]
pub struct OpaqueSeq {
    inner: Arc<OpaqueInner>,
}

struct OpaqueInner {
    gen: Box<Gen>,
    memo: Mutex<Vec<Bit>>,
}

impl OpaqueSeq {
    fn new(gen: Box<Gen>) -> Self {
        OpaqueSeq {
            inner: Arc::new(OpaqueInner {
                gen,
                memo: Mutex::new(Vec::new()),
            }),
        }
    }

    /// Number of indices inspected so far.
    pub fn inspected_depth(&self) -> u64 {
        self.inner.memo.lock().unwrap().len() as u64
    }

    fn eval_at(&self, i: u64) -> Result<Bit> {
        let mut memo = self.inner.memo.lock().unwrap();
        while (memo.len() as u64) <= i {
            let idx = memo.len() as u64;
            let raw = (self.inner.gen)(idx)?;
            if raw > 1 {
                return Err(Error::MalformedSequence {
                    index: idx,
                    detail: format!("generator produced non-bit value {raw}"),
                });
            }
            let bit = raw as Bit;
            if let Some(&prev) = memo.last() {
                if bit > prev {
                    return Err(Error::MalformedSequence {
                        index: idx,
                        detail: "sequence rises after a zero".to_string(),
                    });
                }
            }
            memo.push(bit);
        }
        Ok(memo[i as usize])
    }
}

/// An element of the lattice of decreasing binary sequences.
#[derive(Clone)]
pub enum Omega {
    /// The top element: constantly 1.
    ConstOne,
    /// 1 at indices below `k`, 0 from `k` on. `ZeroFrom(0)` is the bottom.
    ZeroFrom(u64),
    /// Fuel-inspectable sequence backed by a generator.
    Opaque(OpaqueSeq),
}

/// Outcome of a fuelled zero search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Minimal index carrying a zero.
    Found(u64),
    /// Every inspected index below the fuel was 1.
    NotFoundWithin(u64),
}

impl Omega {
    /// Wrap a total generator as an opaque sequence.
    pub fn opaque<F>(gen: F) -> Omega
    where
        F: Fn(u64) -> u64 + Send + Sync + 'static,
    {
        Omega::Opaque(OpaqueSeq::new(Box::new(move |i| Ok(gen(i)))))
    }

    fn opaque_fallible<F>(gen: F) -> Omega
    where
        F: Fn(u64) -> Result<u64> + Send + Sync + 'static,
    {
        Omega::Opaque(OpaqueSeq::new(Box::new(gen)))
    }

    /// The bottom element (constantly 0).
    pub fn bottom() -> Omega {
        Omega::ZeroFrom(0)
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, Omega::Opaque(_))
    }

    /// The value of the sequence at index `i`.
    pub fn eval_at(&self, i: u64) -> Result<Bit> {
        match self {
            Omega::ConstOne => Ok(1),
            Omega::ZeroFrom(k) => Ok(if i < *k { 1 } else { 0 }),
            Omega::Opaque(seq) => seq.eval_at(i),
        }
    }

    /// Decidable equality with the top element; closed forms only.
    pub fn is_one(&self) -> Result<bool> {
        match self {
            Omega::ConstOne => Ok(true),
            Omega::ZeroFrom(_) => Ok(false),
            Omega::Opaque(_) => Err(Error::RequiresClosedForm),
        }
    }

    /// First index from which the sequence is constant; closed forms only.
    pub fn stabilization_point(&self) -> Result<u64> {
        match self {
            Omega::ConstOne => Ok(0),
            Omega::ZeroFrom(k) => Ok(*k),
            Omega::Opaque(_) => Err(Error::RequiresClosedForm),
        }
    }

    /// Pointwise maximum.
    pub fn join(&self, other: &Omega) -> Omega {
        match (self, other) {
            (Omega::ConstOne, _) | (_, Omega::ConstOne) => Omega::ConstOne,
            (Omega::ZeroFrom(a), Omega::ZeroFrom(b)) => Omega::ZeroFrom(*a.max(b)),
            (Omega::ZeroFrom(0), x) | (x, Omega::ZeroFrom(0)) => x.clone(),
            (a, b) => {
                let (a, b) = (a.clone(), b.clone());
                Omega::opaque_fallible(move |i| {
                    Ok(a.eval_at(i)?.max(b.eval_at(i)?) as u64)
                })
            }
        }
    }

    /// Join of a finite nonempty list; `None` on an empty slice.
    pub fn join_all(items: &[Omega]) -> Option<Omega> {
        let (first, rest) = items.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, x| acc.join(x)))
    }

    /// Pointwise minimum.
    pub fn meet(&self, other: &Omega) -> Omega {
        match (self, other) {
            (Omega::ConstOne, x) | (x, Omega::ConstOne) => x.clone(),
            (Omega::ZeroFrom(a), Omega::ZeroFrom(b)) => Omega::ZeroFrom(*a.min(b)),
            (Omega::ZeroFrom(0), _) | (_, Omega::ZeroFrom(0)) => Omega::bottom(),
            (a, b) => {
                let (a, b) = (a.clone(), b.clone());
                Omega::opaque_fallible(move |i| {
                    Ok(a.eval_at(i)?.min(b.eval_at(i)?) as u64)
                })
            }
        }
    }

    /// Fuelled search for the minimal zero. Fuel exhaustion is a value, not
    /// an error; only a misbehaving opaque generator can fail.
    pub fn search_zero(&self, fuel: u64) -> Result<SearchOutcome> {
        match self {
            Omega::ConstOne => Ok(SearchOutcome::NotFoundWithin(fuel)),
            Omega::ZeroFrom(k) => Ok(if *k < fuel {
                SearchOutcome::Found(*k)
            } else {
                SearchOutcome::NotFoundWithin(fuel)
            }),
            Omega::Opaque(seq) => {
                for i in 0..fuel {
                    if seq.eval_at(i)? == 0 {
                        return Ok(SearchOutcome::Found(i));
                    }
                }
                Ok(SearchOutcome::NotFoundWithin(fuel))
            }
        }
    }
}

/// Spread a sequence with at most one 1 over its residue classes mod `n`.
///
/// `one_pos` describes the sequence `g` with `g(p) = 1` exactly when
/// `one_pos = Some(p)`. Track `k` (0-based) is
/// `i -> 1 - max_{i' <= i} g(n * i' + k)`: constantly one unless the single
/// 1 sits in residue class `k`, in which case the track switches to zero at
/// `one_pos / n`. Every join of two distinct tracks is the top element.
pub fn llpo_split(one_pos: Option<u64>, n: usize) -> Result<Vec<Omega>> {
    if n < 2 {
        return Err(Error::InvalidArity { arity: n });
    }
    let mut tracks = vec![Omega::ConstOne; n];
    if let Some(p) = one_pos {
        let residue = (p % n as u64) as usize;
        tracks[residue] = Omega::ZeroFrom(p / n as u64);
    }
    Ok(tracks)
}

impl PartialEq for Omega {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Omega::ConstOne, Omega::ConstOne) => true,
            (Omega::ZeroFrom(a), Omega::ZeroFrom(b)) => a == b,
            (Omega::Opaque(a), Omega::Opaque(b)) => Arc::ptr_eq(&a.inner, &b.inner),
            _ => false,
        }
    }
}

impl fmt::Debug for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::ConstOne => write!(f, "ConstOne"),
            Omega::ZeroFrom(k) => write!(f, "ZeroFrom({k})"),
            Omega::Opaque(seq) => write!(f, "Opaque(depth={})", seq.inspected_depth()),
        }
    }
}

impl fmt::Display for Omega {
    /// The closed-form text syntax used by the tree serializer: `one` for
    /// the top element, `zf:<k>` for `ZeroFrom(k)`. Opaque values have no
    /// concrete syntax and render as `opaque`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::ConstOne => write!(f, "one"),
            Omega::ZeroFrom(k) => write!(f, "zf:{k}"),
            Omega::Opaque(_) => write!(f, "opaque"),
        }
    }
}

impl std::str::FromStr for Omega {
    type Err = Error;

    fn from_str(s: &str) -> Result<Omega> {
        let s = s.trim();
        if s == "one" {
            return Ok(Omega::ConstOne);
        }
        if let Some(k) = s.strip_prefix("zf:") {
            let k: u64 = k.parse().map_err(|_| Error::Parse {
                pos: 3,
                message: format!("invalid switch point `{k}`"),
            })?;
            return Ok(Omega::ZeroFrom(k));
        }
        Err(Error::Parse {
            pos: 0,
            message: format!("expected `one` or `zf:<k>`, got `{s}`"),
        })
    }
}
