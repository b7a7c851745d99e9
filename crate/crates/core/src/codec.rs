//! Pairing and list codes over the naturals.
//!
//! One codec serves the whole workbench: tree shapes, data addressing and the
//! second-algebra prefix coder all go through it. The list code is built from
//! the Cantor pairing `pair(a, b) = (a + b)(a + b + 1)/2 + b` as
//!
//! ```text
//! code([])        = 0
//! code(x :: rest) = pair(x, code(rest)) + 1
//! ```
//!
//! Since `pair(a, b) >= max(a, b)`, the `+ 1` makes a list's code strictly
//! greater than each of its elements and than the code of its tail. Decoding
//! is total: every natural decodes to some list, because `unpair(c - 1)`
//! yields a second component at most `c - 1`.
//!
//! Codes grow doubly exponentially in list length, so they are held as
//! [`BigUint`] throughout.

use num_bigint::BigUint;
use num_traits::Zero;

/// Cantor pairing.
pub fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    &s * (&s + 1u32) / 2u32 + b
}

/// Inverse of [`pair`]; total on all naturals.
pub fn unpair(c: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8c + 1) - 1) / 2) is the diagonal index.
    let w = ((c * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = &w * (&w + 1u32) / 2u32;
    let b = c - t;
    let a = w - &b;
    (a, b)
}

/// Encode a list of naturals; the code majorizes every element.
pub fn list_encode(xs: &[BigUint]) -> BigUint {
    match xs.split_first() {
        None => BigUint::zero(),
        Some((head, rest)) => pair(head, &list_encode(rest)) + 1u32,
    }
}

/// Decode a natural into a list. Total: naturals outside the image of a
/// shorter encoding still decode (the codec is a bijection with lists).
pub fn list_decode(c: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut cur = c.clone();
    while !cur.is_zero() {
        let (head, rest) = unpair(&(cur - 1u32));
        out.push(head);
        cur = rest;
    }
    out
}

/// Convenience encoder for small lists.
pub fn list_encode_u64(xs: &[u64]) -> BigUint {
    let xs: Vec<BigUint> = xs.iter().map(|&x| BigUint::from(x)).collect();
    list_encode(&xs)
}
