//! A desk-scale workbench for the combinatorics behind certain topological
//! models of constructive set theory: the lattice of decreasing binary
//! sequences, labelled n-trees with their goodness predicates and
//! primitive-recursive encodings, the cover topology of the one-point
//! space with its witness-manipulation algorithms, a certificate-producing
//! evaluator for an arithmetic fragment, and the dovetailing realizer
//! combinators over step-budgeted machines and second-algebra streams.
//!
//! Everything is exact and fuel-bounded; where a classical argument would
//! appeal to Markov's principle, the workbench runs a bounded search and
//! says so when the fuel runs out.

pub mod codec;
pub mod error;
pub mod model;
pub mod omega;
pub mod prcodes;
pub mod realize;
pub mod sampling;
pub mod topology;
pub mod trees;

pub use error::{Error, Result};
pub use omega::{llpo_split, Bit, Omega, SearchOutcome};
pub use trees::{ShapeCode, Tree};
