//! A certificate-producing evaluator for a first-order arithmetic fragment
//! interpreted over the one-point cover topology, with its concrete syntax.

pub mod ast;
pub mod eval;
pub mod parser;

pub use ast::{CmpOp, Formula, Term};
pub use eval::{
    choose_with_trees, classical_eval, eval_model, llpo_certificate, witness_bound, Env,
    FuncDef, Status,
};
pub use parser::parse_formula;
