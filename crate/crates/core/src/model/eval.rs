//! Fuel-bounded, certificate-producing evaluation of the arithmetic
//! fragment over the one-point cover topology.
//!
//! Truth values are never materialised: a `Proven` status carries a good
//! tree covering the formula's truth value, `Refuted` carries a concrete
//! counterexample, and `Unknown` reports honest ignorance. Atoms and
//! bounded quantifiers are decided exactly. Unbounded existentials search
//! witnesses up to the fuel; unbounded universals are decided only when a
//! stabilization analysis shows the matrix's truth is eventually constant
//! in the quantified variable, and report `Unknown` otherwise.
//!
//! A disjunction (or a bounded existential, after unfolding) whose
//! disjuncts have the shape `forall x. g(n*x + c) = 0` for `c = 0 .. n-1`,
//! with `g` registered as unit-support and `n` the model arity, is proven
//! by the canonical residue-class certificate from [`llpo_certificate`]
//! rather than by proving one disjunct: this is the one syntactic pattern
//! where the evaluator can prove a classically contingent disjunction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::ast::{CmpOp, Formula, Term};
use crate::omega::llpo_split;
use crate::topology::{CoverCertificate, WitnessNote};
use crate::trees::Tree;

/// A registered unary function symbol. Both shapes are eventually constant,
/// which is what makes exact universal-quantifier decisions possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FuncDef {
    /// Value 1 at exactly the given position (none: constantly 0). The
    /// registration itself guarantees the at-most-one-support premise of
    /// the residue-class certificate.
    UnitSupport(Option<u64>),
    /// Explicit finite table with a constant tail.
    Table { values: Vec<u64>, tail: u64 },
}

impl FuncDef {
    pub fn constant(c: u64) -> FuncDef {
        FuncDef::Table {
            values: Vec::new(),
            tail: c,
        }
    }

    pub fn eval(&self, x: u64) -> u64 {
        match self {
            FuncDef::UnitSupport(pos) => matches!(pos, Some(p) if *p == x) as u64,
            FuncDef::Table { values, tail } => values
                .get(usize::try_from(x).unwrap_or(usize::MAX))
                .copied()
                .unwrap_or(*tail),
        }
    }

    /// Index from which the function is constant.
    pub fn stabilization_point(&self) -> u64 {
        match self {
            FuncDef::UnitSupport(None) => 0,
            FuncDef::UnitSupport(Some(p)) => p + 1,
            FuncDef::Table { values, .. } => values.len() as u64,
        }
    }

    /// The constant value taken beyond the stabilization point.
    pub fn tail(&self) -> u64 {
        match self {
            FuncDef::UnitSupport(_) => 0,
            FuncDef::Table { tail, .. } => *tail,
        }
    }
}

/// Evaluation environment: the model arity, the witness-search fuel, and
/// the registered function symbols.
#[derive(Clone, Debug)]
pub struct Env {
    arity: usize,
    fuel: u64,
    funcs: BTreeMap<String, FuncDef>,
}

impl Env {
    pub fn new(arity: usize, fuel: u64) -> Result<Env> {
        if arity < 2 {
            return Err(Error::InvalidArity { arity });
        }
        Ok(Env {
            arity,
            fuel,
            funcs: BTreeMap::new(),
        })
    }

    pub fn register(&mut self, name: impl Into<String>, def: FuncDef) -> &mut Self {
        self.funcs.insert(name.into(), def);
        self
    }

    pub fn with_func(mut self, name: impl Into<String>, def: FuncDef) -> Env {
        self.register(name, def);
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    pub fn with_fuel(mut self, fuel: u64) -> Env {
        self.fuel = fuel;
        self
    }

    pub fn func(&self, name: &str) -> Option<&FuncDef> {
        self.funcs.get(name)
    }
}

/// Result of evaluating a closed formula.
#[derive(Clone, Debug)]
pub enum Status {
    /// The formula holds in the model; the certificate tree is good and
    /// covers the formula's truth value.
    Proven(CoverCertificate),
    /// A finite counterexample was found; the formula is classically false.
    Refuted { counterexample: String },
    /// Fuel was exhausted before a verdict.
    Unknown { fuel_spent: u64 },
}

impl Status {
    pub fn is_proven(&self) -> bool {
        matches!(self, Status::Proven(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Status::Refuted { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Status::Unknown { .. })
    }

    pub fn certificate(&self) -> Option<&CoverCertificate> {
        match self {
            Status::Proven(cert) => Some(cert),
            _ => None,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            Status::Proven(_) => "proven",
            Status::Refuted { .. } => "refuted",
            Status::Unknown { .. } => "unknown",
        }
    }
}

type Binds = BTreeMap<String, u64>;

/// Bind `var` for the duration of `f`, restoring any shadowed binding.
fn with_bind<T>(
    binds: &mut Binds,
    var: &str,
    value: u64,
    f: impl FnOnce(&mut Binds) -> Result<T>,
) -> Result<T> {
    let prev = binds.insert(var.to_string(), value);
    let result = f(binds);
    match prev {
        Some(p) => binds.insert(var.to_string(), p),
        None => binds.remove(var),
    };
    result
}

fn eval_term(t: &Term, binds: &Binds, env: &Env) -> Result<u64> {
    match t {
        Term::Num(v) => Ok(*v),
        Term::Var(name) => binds
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundVariable { name: name.clone() }),
        Term::App(name, arg) => {
            let def = env
                .func(name)
                .ok_or_else(|| Error::UnknownSymbol { name: name.clone() })?;
            Ok(def.eval(eval_term(arg, binds, env)?))
        }
        Term::Add(a, b) => eval_term(a, binds, env)?
            .checked_add(eval_term(b, binds, env)?)
            .ok_or(Error::ArithmeticOverflow),
        Term::Mul(a, b) => eval_term(a, binds, env)?
            .checked_mul(eval_term(b, binds, env)?)
            .ok_or(Error::ArithmeticOverflow),
    }
}

/// Evaluate a closed formula in the model.
pub fn eval_model(f: &Formula, env: &Env) -> Result<Status> {
    for name in f.function_symbols() {
        if env.func(&name).is_none() {
            return Err(Error::UnknownSymbol { name });
        }
    }
    if let Some(name) = f.free_vars().into_iter().next() {
        return Err(Error::UnboundVariable { name });
    }
    eval_rec(f, &mut Binds::new(), env)
}

fn nil_cert(f: &Formula) -> CoverCertificate {
    CoverCertificate::nil(f.to_string())
}

fn eval_rec(f: &Formula, binds: &mut Binds, env: &Env) -> Result<Status> {
    match f {
        Formula::False => Ok(Status::Refuted {
            counterexample: "falsity".to_string(),
        }),
        Formula::Cmp(op, lhs, rhs) => {
            let a = eval_term(lhs, binds, env)?;
            let b = eval_term(rhs, binds, env)?;
            let holds = match op {
                CmpOp::Eq => a == b,
                CmpOp::Lt => a < b,
            };
            Ok(if holds {
                Status::Proven(nil_cert(f))
            } else {
                Status::Refuted {
                    counterexample: format!("{lhs} evaluates to {a}, {rhs} to {b}"),
                }
            })
        }
        Formula::Not(inner) => match eval_rec(inner, binds, env)? {
            Status::Proven(_) => Ok(Status::Refuted {
                counterexample: format!("{inner} is proven"),
            }),
            Status::Refuted { .. } => Ok(Status::Proven(nil_cert(f))),
            unknown => Ok(unknown),
        },
        Formula::And(lhs, rhs) => {
            let a = eval_rec(lhs, binds, env)?;
            if let Status::Refuted { counterexample } = a {
                return Ok(Status::Refuted { counterexample });
            }
            let b = eval_rec(rhs, binds, env)?;
            match (a, b) {
                (Status::Refuted { counterexample }, _)
                | (_, Status::Refuted { counterexample }) => {
                    Ok(Status::Refuted { counterexample })
                }
                (Status::Proven(ca), Status::Proven(cb)) => {
                    Ok(Status::Proven(ca.conjoin(&cb)?))
                }
                (Status::Unknown { fuel_spent }, _) | (_, Status::Unknown { fuel_spent }) => {
                    Ok(Status::Unknown { fuel_spent })
                }
            }
        }
        Formula::Or(_, _) => {
            let mut disjuncts = Vec::new();
            collect_disjuncts(f, &mut disjuncts);
            eval_disjunction(f, &disjuncts, binds, env)
        }
        Formula::Implies(lhs, rhs) => {
            let a = eval_rec(lhs, binds, env)?;
            if a.is_refuted() {
                return Ok(Status::Proven(nil_cert(f)));
            }
            let b = eval_rec(rhs, binds, env)?;
            match (a, b) {
                (_, Status::Proven(cert)) => Ok(Status::Proven(cert)),
                (Status::Proven(_), Status::Refuted { counterexample }) => {
                    Ok(Status::Refuted {
                        counterexample: format!("antecedent holds but {counterexample}"),
                    })
                }
                _ => Ok(Status::Unknown {
                    fuel_spent: env.fuel(),
                }),
            }
        }
        Formula::Forall {
            var,
            bound: Some(bound),
            body,
        } => {
            let limit = eval_term(bound, binds, env)?;
            let mut certs = Vec::new();
            let mut unknown = None;
            for c in 0..limit {
                let status = with_bind(binds, var, c, |b| eval_rec(body, b, env))?;
                match status {
                    Status::Refuted { counterexample } => {
                        return Ok(Status::Refuted {
                            counterexample: format!("{var} = {c}: {counterexample}"),
                        })
                    }
                    Status::Proven(cert) => certs.push(cert),
                    Status::Unknown { fuel_spent } => unknown = Some(fuel_spent),
                }
            }
            if let Some(fuel_spent) = unknown {
                return Ok(Status::Unknown { fuel_spent });
            }
            Ok(Status::Proven(fold_certificates(f, certs)?))
        }
        Formula::Exists {
            var,
            bound: Some(bound),
            body,
        } => {
            let limit = eval_term(bound, binds, env)?;
            // unfold into a disjunct list so the residue-class pattern is
            // recognised in its bounded-existential form as well; the
            // pattern needs exactly arity-many disjuncts
            if limit == env.arity() as u64 {
                let instances: Vec<Formula> = (0..limit)
                    .map(|c| {
                        let mut map = binds.clone();
                        map.insert(var.clone(), c);
                        body.substitute(&map)
                    })
                    .collect();
                if let Some(outcome) = try_llpo_hint(&instances, env) {
                    return Ok(Status::Proven(outcome?));
                }
            }
            let mut unknown = None;
            for c in 0..limit {
                let status = with_bind(binds, var, c, |b| eval_rec(body, b, env))?;
                match status {
                    Status::Proven(cert) => {
                        return Ok(Status::Proven(cert.with_witness(WitnessNote {
                            branch: None,
                            value: c,
                            claim: format!("{var} = {c} witnesses {f}"),
                        })))
                    }
                    Status::Unknown { fuel_spent } => unknown = Some(fuel_spent),
                    Status::Refuted { .. } => {}
                }
            }
            match unknown {
                Some(fuel_spent) => Ok(Status::Unknown { fuel_spent }),
                None => Ok(Status::Refuted {
                    counterexample: format!("all {limit} instances refuted"),
                }),
            }
        }
        Formula::Exists {
            var,
            bound: None,
            body,
        } => {
            for c in 0..env.fuel() {
                let status = with_bind(binds, var, c, |b| eval_rec(body, b, env))?;
                if let Status::Proven(cert) = status {
                    return Ok(Status::Proven(cert.with_witness(WitnessNote {
                        branch: None,
                        value: c,
                        claim: format!("{var} = {c} witnesses {f}"),
                    })));
                }
            }
            // an unbounded existential can never be refuted by search
            Ok(Status::Unknown {
                fuel_spent: env.fuel(),
            })
        }
        Formula::Forall {
            var,
            bound: None,
            body,
        } => {
            let closed_body = body.substitute(binds);
            if let Some(analysis) = stabilize(&closed_body, var, env) {
                let mut certs = Vec::new();
                for c in 0..analysis.bound {
                    let status = with_bind(binds, var, c, |b| eval_rec(body, b, env))?;
                    match status {
                        Status::Refuted { counterexample } => {
                            return Ok(Status::Refuted {
                                counterexample: format!("{var} = {c}: {counterexample}"),
                            })
                        }
                        Status::Proven(cert) => certs.push(cert),
                        Status::Unknown { fuel_spent } => {
                            return Ok(Status::Unknown { fuel_spent })
                        }
                    }
                }
                if analysis.eventual {
                    return Ok(Status::Proven(fold_certificates(f, certs)?));
                }
                // eventually false: the bound itself is a counterexample
                let status =
                    with_bind(binds, var, analysis.bound, |b| eval_rec(body, b, env))?;
                if status.is_refuted() {
                    return Ok(Status::Refuted {
                        counterexample: format!(
                            "{var} = {} refutes the matrix",
                            analysis.bound
                        ),
                    });
                }
                return Ok(Status::Unknown {
                    fuel_spent: env.fuel(),
                });
            }
            // no stabilization: fuel-bounded refutation search only
            for c in 0..env.fuel() {
                let status = with_bind(binds, var, c, |b| eval_rec(body, b, env))?;
                if let Status::Refuted { counterexample } = status {
                    return Ok(Status::Refuted {
                        counterexample: format!("{var} = {c}: {counterexample}"),
                    });
                }
            }
            Ok(Status::Unknown {
                fuel_spent: env.fuel(),
            })
        }
    }
}

fn collect_disjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Or(a, b) => {
            collect_disjuncts(a, out);
            collect_disjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn eval_disjunction(
    whole: &Formula,
    disjuncts: &[Formula],
    binds: &mut Binds,
    env: &Env,
) -> Result<Status> {
    let substituted: Vec<Formula> = disjuncts.iter().map(|d| d.substitute(binds)).collect();
    if let Some(outcome) = try_llpo_hint(&substituted, env) {
        return Ok(Status::Proven(outcome?));
    }
    let mut unknown = None;
    for (i, d) in disjuncts.iter().enumerate() {
        match eval_rec(d, binds, env)? {
            Status::Proven(cert) => {
                return Ok(Status::Proven(cert.with_witness(WitnessNote {
                    branch: None,
                    value: i as u64,
                    claim: format!("disjunct {i} of {whole} holds"),
                })))
            }
            Status::Unknown { fuel_spent } => unknown = Some(fuel_spent),
            Status::Refuted { .. } => {}
        }
    }
    match unknown {
        Some(fuel_spent) => Ok(Status::Unknown { fuel_spent }),
        None => Ok(Status::Refuted {
            counterexample: "every disjunct refuted".to_string(),
        }),
    }
}

fn fold_certificates(f: &Formula, certs: Vec<CoverCertificate>) -> Result<CoverCertificate> {
    let mut acc = nil_cert(f);
    for cert in certs {
        // decidable instances contribute trivial certificates; only
        // composite ones change the tree or carry witnesses
        if !matches!(cert.tree(), Tree::Nil) || !cert.witnesses().is_empty() {
            acc = acc.conjoin(&cert)?;
        }
    }
    Ok(acc)
}

/// A disjunct of the residue-class shape `forall x. g(n*x + c) = 0`.
struct ResidueDisjunct {
    func: String,
    modulus: u64,
    residue: u64,
}

fn match_residue_disjunct(f: &Formula) -> Option<ResidueDisjunct> {
    let Formula::Forall {
        var,
        bound: None,
        body,
    } = f
    else {
        return None;
    };
    let Formula::Cmp(CmpOp::Eq, Term::App(func, arg), Term::Num(0)) = &**body else {
        return None;
    };
    let (product, residue) = match &**arg {
        Term::Add(lhs, rhs) => match (&**lhs, &**rhs) {
            (m, Term::Num(c)) => (m, *c),
            (Term::Num(c), m) => (m, *c),
            _ => return None,
        },
        other => (other, 0),
    };
    let modulus = match product {
        Term::Mul(a, b) => match (&**a, &**b) {
            (Term::Num(n), Term::Var(v)) if v == var => *n,
            (Term::Var(v), Term::Num(n)) if v == var => *n,
            _ => return None,
        },
        _ => return None,
    };
    Some(ResidueDisjunct {
        func: func.clone(),
        modulus,
        residue,
    })
}

/// Recognise the full residue-class disjunction over a unit-support symbol
/// at the model arity and produce its canonical certificate.
fn try_llpo_hint(disjuncts: &[Formula], env: &Env) -> Option<Result<CoverCertificate>> {
    let n = disjuncts.len();
    if n != env.arity() {
        return None;
    }
    let mut func = None;
    for (c, d) in disjuncts.iter().enumerate() {
        let parsed = match_residue_disjunct(d)?;
        if parsed.modulus != n as u64 || parsed.residue != c as u64 {
            return None;
        }
        match &func {
            None => func = Some(parsed.func),
            Some(name) if *name == parsed.func => {}
            Some(_) => return None,
        }
    }
    let name = func?;
    let FuncDef::UnitSupport(pos) = env.func(&name)? else {
        return None;
    };
    Some(llpo_certificate(*pos, n, &name))
}

/// The canonical certificate for the residue-class disjunction of a
/// unit-support function: one `nil` child per residue class, labelled by
/// the split tracks; every top-labelled branch is annotated with the
/// disjunct it certifies.
pub fn llpo_certificate(
    one_pos: Option<u64>,
    n: usize,
    func_name: &str,
) -> Result<CoverCertificate> {
    let tracks = llpo_split(one_pos, n)?;
    let tree = Tree::node(vec![Tree::Nil; n], tracks.clone())?;
    let target = (0..n)
        .map(|c| format!("(forall x. {func_name}({n}*x+{c}) = 0)"))
        .collect::<Vec<_>>()
        .join(" \\/ ");
    let mut cert = CoverCertificate::new(tree, target)?;
    for (c, track) in tracks.iter().enumerate() {
        if track.is_one()? {
            cert = cert.with_witness(WitnessNote {
                branch: Some(c),
                value: c as u64,
                claim: format!("forall x. {func_name}({n}*x+{c}) = 0"),
            });
        }
    }
    Ok(cert)
}

/// Witness-bound extraction: the finite set of candidate witnesses named by
/// a proven formula's certificate annotations.
pub fn witness_bound(f: &Formula, env: &Env) -> Result<std::collections::BTreeSet<u64>> {
    match eval_model(f, env)? {
        Status::Proven(cert) => Ok(cert.witnesses().iter().map(|w| w.value).collect()),
        _ => Err(Error::NotProven),
    }
}

/// Bounded choice through the witness builder: for each `x < x_count` with
/// at least one and at most `k` witnesses `y < y_bound` in the table,
/// produce the chosen witness and a good tree of arity `max(2, ceil(n/k))`
/// that is very good only if the choice is correct.
pub fn choose_with_trees(
    table: &dyn Fn(u64, u64) -> bool,
    x_count: u64,
    y_bound: u64,
    k: u64,
    n: usize,
) -> Result<(Vec<u64>, Vec<Tree>)> {
    use crate::topology::{build_witness, SubsetFamily};

    let mut choices = Vec::new();
    let mut trees = Vec::new();
    for x in 0..x_count {
        let witnesses: Vec<u64> = (0..y_bound).filter(|&y| table(x, y)).collect();
        if witnesses.is_empty() || witnesses.len() as u64 > k {
            return Err(Error::WitnessCountViolated {
                x,
                found: witnesses.len(),
                max: k,
            });
        }
        let fam = SubsetFamily::from_indices(witnesses, y_bound);
        let start = Tree::node(vec![Tree::Nil; n], vec![crate::omega::Omega::ConstOne; n])?;
        let (j, tree) = build_witness(&start, &fam, k, n)?;
        choices.push(j);
        trees.push(tree);
    }
    Ok((choices, trees))
}

/// Direct classical evaluation of the bounded fragment; the independent
/// oracle for the soundness checks. Unbounded quantifiers are out of its
/// scope.
pub fn classical_eval(f: &Formula, env: &Env) -> Result<bool> {
    fn go(f: &Formula, binds: &mut Binds, env: &Env) -> Result<bool> {
        match f {
            Formula::False => Ok(false),
            Formula::Cmp(op, a, b) => {
                let x = eval_term(a, binds, env)?;
                let y = eval_term(b, binds, env)?;
                Ok(match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Lt => x < y,
                })
            }
            Formula::Not(p) => Ok(!go(p, binds, env)?),
            Formula::And(a, b) => Ok(go(a, binds, env)? && go(b, binds, env)?),
            Formula::Or(a, b) => Ok(go(a, binds, env)? || go(b, binds, env)?),
            Formula::Implies(a, b) => Ok(!go(a, binds, env)? || go(b, binds, env)?),
            Formula::Forall {
                var,
                bound: Some(t),
                body,
            } => {
                let limit = eval_term(t, binds, env)?;
                for c in 0..limit {
                    if !with_bind(binds, var, c, |b| go(body, b, env))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Exists {
                var,
                bound: Some(t),
                body,
            } => {
                let limit = eval_term(t, binds, env)?;
                for c in 0..limit {
                    if with_bind(binds, var, c, |b| go(body, b, env))? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall { bound: None, .. } | Formula::Exists { bound: None, .. } => {
                Err(Error::InvalidParameter(
                    "classical evaluation requires bounded quantifiers".to_string(),
                ))
            }
        }
    }
    go(f, &mut Binds::new(), env)
}

// ---------------------------------------------------------------------
// Stabilization analysis for unbounded universal quantifiers.
//
// Terms of the fragment are polynomials in the quantified variable once
// every function application has been pushed past its stabilization point,
// and polynomials with natural coefficients are monotone, so each atom's
// truth is eventually constant with a computable threshold. Nested
// quantifiers are handled only when bounded by variable-free terms; any
// other shape makes the analysis give up (and the evaluator answer
// Unknown).
// ---------------------------------------------------------------------

struct Stabilization {
    /// Truth of the matrix is constant for values >= this bound.
    bound: u64,
    /// The constant truth value beyond the bound.
    eventual: bool,
}

/// Little-endian polynomial with signed coefficients.
type Poly = Vec<i128>;

const SCAN_CAP: u64 = 1 << 20;

fn poly_add(a: &Poly, b: &Poly) -> Option<Poly> {
    let mut out = vec![0i128; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = x.checked_add(y)?;
    }
    Some(out)
}

fn poly_mul(a: &Poly, b: &Poly) -> Option<Poly> {
    if a.is_empty() || b.is_empty() {
        return Some(Vec::new());
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j].checked_add(x.checked_mul(y)?)?;
        }
    }
    Some(out)
}

fn poly_sub(a: &Poly, b: &Poly) -> Option<Poly> {
    let neg: Poly = b.iter().map(|&c| -c).collect();
    poly_add(a, &neg)
}

fn poly_eval(p: &Poly, x: u64) -> Option<i128> {
    let x = x as i128;
    let mut acc = 0i128;
    for &c in p.iter().rev() {
        acc = acc.checked_mul(x)?.checked_add(c)?;
    }
    Some(acc)
}

fn poly_trim(mut p: Poly) -> Poly {
    while matches!(p.last(), Some(0)) {
        p.pop();
    }
    p
}

/// Polynomial form of a term in the quantified variable, valid from some
/// threshold on. Function applications on variable-dependent arguments are
/// replaced by their tails once the argument provably exceeds the
/// function's stabilization point.
fn poly_term(t: &Term, var: &str, env: &Env) -> Option<(Poly, u64)> {
    match t {
        Term::Num(v) => Some((vec![*v as i128], 0)),
        Term::Var(v) if v == var => Some((vec![0, 1], 0)),
        // the body was closed by substitution before analysis starts
        Term::Var(_) => None,
        Term::Add(a, b) => {
            let (pa, ta) = poly_term(a, var, env)?;
            let (pb, tb) = poly_term(b, var, env)?;
            Some((poly_trim(poly_add(&pa, &pb)?), ta.max(tb)))
        }
        Term::Mul(a, b) => {
            let (pa, ta) = poly_term(a, var, env)?;
            let (pb, tb) = poly_term(b, var, env)?;
            Some((poly_trim(poly_mul(&pa, &pb)?), ta.max(tb)))
        }
        Term::App(name, arg) => {
            let def = env.func(name)?;
            let (inner, threshold) = poly_term(arg, var, env)?;
            let inner = poly_trim(inner);
            if inner.len() <= 1 {
                // constant argument: the application is a constant
                let value = inner.first().copied().unwrap_or(0);
                let value = u64::try_from(value).ok()?;
                Some((vec![def.eval(value) as i128], threshold))
            } else {
                // non-constant natural polynomial: monotone and unbounded
                // beyond its threshold, so scan for the point where it
                // clears the function's stabilization point
                let target = def.stabilization_point() as i128;
                let mut from = threshold;
                loop {
                    if from > SCAN_CAP {
                        return None;
                    }
                    if poly_eval(&inner, from)? >= target {
                        break;
                    }
                    from += 1;
                }
                Some((vec![def.tail() as i128], from))
            }
        }
    }
}

fn stabilize(f: &Formula, var: &str, env: &Env) -> Option<Stabilization> {
    match f {
        Formula::False => Some(Stabilization {
            bound: 0,
            eventual: false,
        }),
        Formula::Cmp(op, lhs, rhs) => {
            let (pa, ta) = poly_term(lhs, var, env)?;
            let (pb, tb) = poly_term(rhs, var, env)?;
            let threshold = ta.max(tb);
            let diff = poly_trim(poly_sub(&pa, &pb)?);
            if diff.is_empty() {
                // identical values from the threshold on
                return Some(Stabilization {
                    bound: threshold,
                    eventual: matches!(op, CmpOp::Eq),
                });
            }
            let lead = *diff.last().unwrap();
            let coeff_sum: i128 = diff.iter().map(|c| c.abs()).sum();
            let bound = threshold
                .checked_add(u64::try_from(coeff_sum).ok()?)?
                .checked_add(1)?;
            let eventual = match op {
                CmpOp::Eq => false,
                CmpOp::Lt => lead < 0,
            };
            Some(Stabilization { bound, eventual })
        }
        Formula::Not(p) => {
            let s = stabilize(p, var, env)?;
            Some(Stabilization {
                bound: s.bound,
                eventual: !s.eventual,
            })
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let sa = stabilize(a, var, env)?;
            let sb = stabilize(b, var, env)?;
            let eventual = match f {
                Formula::And(..) => sa.eventual && sb.eventual,
                Formula::Or(..) => sa.eventual || sb.eventual,
                _ => !sa.eventual || sb.eventual,
            };
            Some(Stabilization {
                bound: sa.bound.max(sb.bound),
                eventual,
            })
        }
        Formula::Forall {
            var: inner,
            bound: Some(t),
            body,
        }
        | Formula::Exists {
            var: inner,
            bound: Some(t),
            body,
        } => {
            // only variable-free bounds unfold to a fixed finite family
            let (pt, tt) = poly_term(t, var, env)?;
            let pt = poly_trim(pt);
            if pt.len() > 1 || tt > 0 {
                return None;
            }
            let limit = u64::try_from(pt.first().copied().unwrap_or(0)).ok()?;
            let universal = matches!(f, Formula::Forall { .. });
            let mut bound = 0u64;
            let mut eventual = universal;
            for c in 0..limit {
                let mut map = Binds::new();
                map.insert(inner.clone(), c);
                let s = stabilize(&body.substitute(&map), var, env)?;
                bound = bound.max(s.bound);
                if universal {
                    eventual = eventual && s.eventual;
                } else {
                    eventual = eventual || s.eventual;
                }
            }
            Some(Stabilization { bound, eventual })
        }
        Formula::Forall { bound: None, .. } | Formula::Exists { bound: None, .. } => None,
    }
}
