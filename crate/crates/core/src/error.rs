//! Error type shared across the workbench.

use thiserror::Error;

/// Errors surfaced by the workbench operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An opaque sequence generator produced a non-bit value or broke
    /// antitonicity within the inspected prefix.
    #[error("malformed sequence at index {index}: {detail}")]
    MalformedSequence { index: u64, detail: String },

    /// The operation is only defined on closed-form sequences.
    #[error("operation requires a closed-form sequence")]
    RequiresClosedForm,

    /// Tree or split arity below 2.
    #[error("invalid arity {arity}: arity must be at least 2")]
    InvalidArity { arity: usize },

    /// Structural violation when building a tree.
    #[error("malformed tree: {0}")]
    MalformedTree(String),

    /// Clause index outside the clause bound of a shape.
    #[error("clause index {index} out of range (bound {bound})")]
    ClauseIndexOutOfRange { index: u64, bound: u64 },

    /// Two trees that must share an arity do not.
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    /// A reachable leaf of the tree has no assigned replacement.
    #[error("incomplete assignment: no tree assigned to reachable leaf path {path:?}")]
    IncompleteAssignment { path: Vec<usize> },

    /// A bounded linear search ran out of indices.
    #[error("search exhausted: no member found below bound {bound}")]
    SearchExhausted { bound: u64 },

    /// The witness replacement loop could not make progress.
    #[error("overlap bound violated: more distinct witnesses than the overlap bound allows")]
    OverlapBoundViolated,

    /// A choice instance had zero or too many witnesses.
    #[error("witness count violated at x = {x}: found {found}, allowed 1..={max}")]
    WitnessCountViolated { x: u64, found: usize, max: u64 },

    /// `witness_bound` was called on a formula that did not evaluate to Proven.
    #[error("formula is not proven; no witness bound available")]
    NotProven,

    /// A formula references a function symbol that is not registered.
    #[error("unknown function symbol `{name}`")]
    UnknownSymbol { name: String },

    /// A formula to be evaluated has a free variable.
    #[error("unbound variable `{name}`")]
    UnboundVariable { name: String },

    /// Term evaluation escaped the machine word range.
    #[error("arithmetic overflow while evaluating a term")]
    ArithmeticOverflow,

    /// Concrete-syntax error, with a byte position into the input.
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },

    /// A parameter combination outside an operation's contract.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Neither dovetailed algorithm halted within the step budget.
    #[error("dovetail budget {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    /// Second-algebra application found no answer within the oracle fuel.
    #[error("application undefined at input {input}: prefix fuel {fuel} exhausted")]
    K2Undefined { input: u64, fuel: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
