//! Command-line front end: seeded lemma-check suites, formula evaluation,
//! encoding inspection and demos, all reporting JSON to stdout.
//!
//! Exit code 0 means every check passed, 1 means the report contains
//! failures, 2 means the invocation itself was unusable.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use lifton::model::{
    classical_eval, eval_model, llpo_certificate, parse_formula, Env, FuncDef, Status,
};
use lifton::prcodes;
use lifton::realize::{dovetail, k2_apply, k2_parallel, proj1, Machine, Stream};
use lifton::sampling::{
    random_assignment, random_bounded_formula, random_family, random_good_node,
    random_good_tree, random_tree, rng_from_seed, sample_env, TreeParams,
};
use lifton::topology::{build_witness, compactify, intersect, refine};
use lifton::trees::Tree;

#[derive(Parser)]
#[command(name = "lifton", version, about = "workbench for sequence lattices, labelled trees and their cover topologies", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded property suite for one lemma-level fact.
    CheckLemma(CheckArgs),
    /// Evaluate a formula in the model and print its status.
    Eval(EvalArgs),
    /// Print the shape code, clause bounds and clause table of a tree.
    EncodeTree(EncodeArgs),
    /// Canned demonstrations.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Args)]
struct CheckArgs {
    /// covvgood | prgood | prvgood | intersect | refine | compact |
    /// buildwitness | llpo-sound | soundness | dovetail | k2
    lemma: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    #[arg(long, default_value_t = 8)]
    max_switch: u64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    fuel: u64,
    /// Function definitions, e.g. `g=unit@5`, `f=const@0`,
    /// `h=table@1,0,2:0` (values before `:`, tail after).
    #[arg(long = "def")]
    defs: Vec<String>,
    #[arg(long)]
    formula: String,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    tree: String,
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Residue-class certificate for a sequence with at most one 1.
    Llpo {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        one_at: Option<u64>,
    },
    /// Trace the parallel dovetail combinator on canned machines.
    Dovetail,
    /// Trace second-algebra application against the parallel transformer.
    K2,
}

#[derive(Serialize)]
struct Report {
    command: String,
    params: Value,
    samples: u64,
    failures: Vec<Value>,
    seed: u64,
    elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::CheckLemma(args) => run_check(args),
        Command::Eval(args) => run_eval(args),
        Command::EncodeTree(args) => run_encode(args),
        Command::Demo(demo) => run_demo(demo),
    };
    match outcome {
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Ok(mut report) => {
            report.elapsed_ms = started.elapsed().as_millis();
            println!("{}", serde_json::to_string_pretty(&report).expect("report is serializable"));
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn report(command: &str, params: Value, seed: u64) -> Report {
    Report {
        command: command.to_string(),
        params,
        samples: 0,
        failures: Vec::new(),
        seed,
        elapsed_ms: 0,
        result: None,
    }
}

// -------------------------------------------------------------------
// check-lemma
// -------------------------------------------------------------------

fn run_check(args: &CheckArgs) -> Result<Report, String> {
    let params = json!({
        "lemma": args.lemma,
        "n": args.n,
        "samples": args.samples,
        "max_depth": args.max_depth,
        "max_switch": args.max_switch,
    });
    let mut rep = report("check-lemma", params, args.seed);
    if args.n < 2 {
        return Err("--n must be at least 2".to_string());
    }
    let mut rng = rng_from_seed(args.seed);
    let p = TreeParams::new(args.n, args.max_depth, args.max_switch);
    let mut failures = Vec::new();
    let mut samples_run = 0;

    match args.lemma.as_str() {
        "covvgood" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let t = random_good_tree(&mut rng, p);
                let cover = t.cover0().map_err(err_str)?;
                let vgood = t.is_very_good().map_err(err_str)?;
                if cover != vgood {
                    failures.push(json!({"sample": sample, "tree": t.to_string(), "cover0": cover, "very_good": vgood}));
                }
            }
        }
        "prgood" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let t = random_tree(&mut rng, p);
                let direct = t.is_good().map_err(err_str)?;
                let coded = prcodes::eval_good_via_codes(&t).map_err(err_str)?;
                if direct != coded {
                    failures.push(json!({"sample": sample, "tree": t.to_string(), "is_good": direct, "via_codes": coded}));
                }
            }
        }
        "prvgood" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let t = random_tree(&mut rng, p);
                let direct = t.is_very_good().map_err(err_str)?;
                let coded = prcodes::eval_very_good_via_codes(&t).map_err(err_str)?;
                if direct != coded {
                    failures.push(json!({"sample": sample, "tree": t.to_string(), "is_very_good": direct, "via_codes": coded}));
                }
            }
        }
        "intersect" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let t = random_good_tree(&mut rng, p);
                let s = random_good_tree(&mut rng, p);
                let r = intersect(&t, &s).map_err(err_str)?;
                let good = r.is_good().map_err(err_str)?;
                let containment = !r.cover0().map_err(err_str)?
                    || (t.cover0().map_err(err_str)? && s.cover0().map_err(err_str)?);
                if !good || !containment {
                    failures.push(json!({"sample": sample, "t": t.to_string(), "s": s.to_string(), "r": r.to_string(), "good": good, "containment": containment}));
                }
            }
        }
        "refine" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let t = random_good_tree(&mut rng, p);
                let assign = random_assignment(&mut rng, &t, p);
                let s = refine(&t, &assign).map_err(err_str)?;
                let good = s.is_good().map_err(err_str)?;
                let mut target = false;
                for tree in assign.values() {
                    target = target || tree.cover0().map_err(err_str)?;
                }
                let implication = !s.cover0().map_err(err_str)? || target;
                if !good || !implication {
                    failures.push(json!({"sample": sample, "t": t.to_string(), "s": s.to_string(), "good": good, "covers_target": implication}));
                }
            }
        }
        "compact" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let t = random_good_tree(&mut rng, p);
                let members = 1 + (sample as usize % 4);
                let (fam, _) = random_family(&mut rng, members, 32);
                let (indices, s) = compactify(&t, &fam).map_err(err_str)?;
                let good = s.is_good().map_err(err_str)?;
                let bounded = indices.len() <= t.nil_leaf_count();
                let covering = !s.cover0().map_err(err_str)?
                    || indices.iter().any(|&j| fam.contains(j));
                if !good || !bounded || !covering {
                    failures.push(json!({"sample": sample, "t": t.to_string(), "indices": indices.iter().collect::<Vec<_>>(), "good": good, "bounded": bounded, "covering": covering}));
                }
            }
        }
        "buildwitness" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let k = 1 + sample % (args.n as u64 - 1);
                let t = random_good_node(&mut rng, p);
                let members = 1 + (sample as usize) % (k as usize);
                let (fam, picked) = random_family(&mut rng, members, 32);
                let (j, s) = build_witness(&t, &fam, k, args.n).map_err(err_str)?;
                let want_arity = ((args.n as u64).div_ceil(k)).max(2) as usize;
                let arity_ok = s.arity() == Some(want_arity);
                let good = s.is_good().map_err(err_str)?;
                // closed-form good trees are very good, so the strengthened
                // conclusion applies to every sample
                let hit = fam.contains(j);
                let unique_ok = k != 1 || j == picked[0];
                if !arity_ok || !good || !hit || !unique_ok {
                    failures.push(json!({"sample": sample, "t": t.to_string(), "k": k, "j": j, "s": s.to_string(), "arity_ok": arity_ok, "good": good, "hit": hit, "unique_ok": unique_ok}));
                }
            }
        }
        "llpo-sound" => {
            for pos in std::iter::once(None).chain((0..args.samples).map(Some)) {
                samples_run += 1;
                if let Some(failure) = check_llpo_sound(pos, args.n).map_err(err_str)? {
                    failures.push(failure);
                }
            }
        }
        "soundness" => {
            for sample in 0..args.samples {
                samples_run += 1;
                let env = sample_env(&mut rng, args.n, 100);
                let f = random_bounded_formula(&mut rng, 3);
                let status = eval_model(&f, &env).map_err(err_str)?;
                let truth = classical_eval(&f, &env).map_err(err_str)?;
                let agrees = match &status {
                    Status::Proven(cert) => truth && cert.tree().is_good().unwrap_or(false),
                    Status::Refuted { .. } => !truth,
                    Status::Unknown { .. } => false,
                };
                let monotone = if sample % 4 == 0 {
                    let richer =
                        eval_model(&f, &env.clone().with_fuel(400)).map_err(err_str)?;
                    richer.verdict() == status.verdict()
                } else {
                    true
                };
                if !agrees || !monotone {
                    failures.push(json!({"sample": sample, "formula": f.to_string(), "status": status.verdict(), "classical": truth, "monotone": monotone}));
                }
            }
        }
        "dovetail" => {
            use rand::Rng;
            for sample in 0..args.samples {
                samples_run += 1;
                let scale = rng.random_range(1..5u64);
                let offset = rng.random_range(0..5u64);
                let track_cost = rng.random_range(0..4u64);
                let value_cost = rng.random_range(0..6u64);
                let failure = if sample % 2 == 0 {
                    let first = Machine::total_with_cost(|_| 1, move |_| track_cost);
                    let second = Machine::total_with_cost(
                        move |x| scale * proj1(x) + offset,
                        move |_| value_cost,
                    );
                    let map = dovetail(&first, &second, sample, 4096);
                    (0..8).find_map(|i| {
                        let got = map.at(i).map_err(|e| e.to_string());
                        let want = scale * i + offset;
                        (got != Ok(want)).then(|| json!({"sample": sample, "kind": "all-ones", "input": i, "got": format!("{got:?}"), "want": want}))
                    })
                } else {
                    let zero_at = rng.random_range(0..6u64);
                    let first = Machine::total_with_cost(
                        move |x| u64::from(proj1(x) != zero_at),
                        move |_| track_cost,
                    );
                    let map = dovetail(&first, &Machine::diverging(), sample, 4096);
                    (0..8).find_map(|i| {
                        let got = map.at(i).map_err(|e| e.to_string());
                        (got != Ok(0)).then(|| json!({"sample": sample, "kind": "zero-track", "input": i, "got": format!("{got:?}")}))
                    })
                };
                failures.extend(failure);
            }
        }
        "k2" => {
            use num_bigint::BigUint;
            use rand::Rng;
            for sample in 0..args.samples {
                samples_run += 1;
                let stride = rng.random_range(1..4u64);
                let beta = staggered_stream(stride);
                let par = k2_parallel(&beta);
                // pointwise case split on a random query
                let len = rng.random_range(0..4usize);
                let mut query: Vec<BigUint> = vec![BigUint::from(rng.random_range(0..16u64))];
                for _ in 0..len {
                    query.push(BigUint::from(rng.random_range(0..3u64)));
                }
                let code = lifton::codec::list_encode(&query);
                let expected = if query[1..].iter().any(|m| *m != BigUint::from(1u32)) {
                    BigUint::from(1u32)
                } else {
                    beta.at(&code)
                };
                if par.at(&code) != expected {
                    failures.push(json!({"sample": sample, "kind": "case-split", "query": code.to_string()}));
                    continue;
                }
                // agreement with plain application on the all-ones oracle
                let gamma = Stream::constant(1);
                let direct = k2_apply(&beta, &gamma, 16);
                let parallel = k2_apply(&par, &gamma, 16);
                for input in 0..32 {
                    let a = direct.at(input).map_err(|e| e.to_string())?;
                    let b = parallel.at(input).map_err(|e| e.to_string())?;
                    if a != b {
                        failures.push(json!({"sample": sample, "kind": "agreement", "input": input}));
                        break;
                    }
                }
            }
        }
        other => return Err(format!("unknown lemma `{other}`")),
    }
    rep.samples = samples_run;
    rep.failures = failures;
    Ok(rep)
}

fn err_str(e: lifton::Error) -> String {
    e.to_string()
}

/// Operator answering with `n * 10` after consulting `n % stride + 1`
/// oracle values.
fn staggered_stream(stride: u64) -> Stream {
    use num_bigint::BigUint;
    Stream::new(move |q| {
        let parts = lifton::codec::list_decode(q);
        let Some(n) = parts.first() else {
            return BigUint::from(0u32);
        };
        let n: u64 = n.try_into().unwrap_or(0);
        if parts.len() as u64 > n % stride + 1 {
            BigUint::from(n * 10 + 1)
        } else {
            BigUint::from(0u32)
        }
    })
}

fn check_llpo_sound(pos: Option<u64>, n: usize) -> lifton::Result<Option<Value>> {
    let cert = llpo_certificate(pos, n, "g")?;
    if !cert.tree().is_good()? {
        return Ok(Some(json!({"one_at": pos, "failure": "certificate not good"})));
    }
    let formula_text = (0..n)
        .map(|c| format!("(forall x. g({n}*x+{c}) = 0)"))
        .collect::<Vec<_>>()
        .join(" \\/ ");
    let formula = parse_formula(&formula_text)?;
    let env = Env::new(n, 64)?.with_func("g", FuncDef::UnitSupport(pos));
    let Status::Proven(model_cert) = eval_model(&formula, &env)? else {
        return Ok(Some(json!({"one_at": pos, "failure": "disjunction not proven"})));
    };
    if model_cert.tree() != cert.tree() {
        return Ok(Some(json!({"one_at": pos, "failure": "certificate differs"})));
    }
    // each annotated disjunct must be classically true: the residue class
    // avoids the support position
    for note in model_cert.witnesses() {
        let c = note.value;
        let classically_true = match pos {
            None => true,
            Some(q) => q % n as u64 != c,
        };
        if !classically_true {
            return Ok(Some(
                json!({"one_at": pos, "failure": format!("annotated disjunct {c} is false")}),
            ));
        }
    }
    if model_cert.witnesses().is_empty() {
        return Ok(Some(json!({"one_at": pos, "failure": "no annotated disjunct"})));
    }
    Ok(None)
}

// -------------------------------------------------------------------
// eval
// -------------------------------------------------------------------

fn parse_def(text: &str) -> Result<(String, FuncDef), String> {
    let (name, rhs) = text
        .split_once('=')
        .ok_or_else(|| format!("malformed --def `{text}`, expected name=definition"))?;
    let def = if rhs == "unit" {
        FuncDef::UnitSupport(None)
    } else if let Some(at) = rhs.strip_prefix("unit@") {
        if at == "none" {
            FuncDef::UnitSupport(None)
        } else {
            FuncDef::UnitSupport(Some(
                at.parse().map_err(|_| format!("bad unit position `{at}`"))?,
            ))
        }
    } else if let Some(c) = rhs.strip_prefix("const@") {
        FuncDef::constant(c.parse().map_err(|_| format!("bad constant `{c}`"))?)
    } else if let Some(rest) = rhs.strip_prefix("table@") {
        let (values, tail) = rest
            .split_once(':')
            .ok_or_else(|| format!("malformed table `{rest}`, expected v,v,...:tail"))?;
        let values = values
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|v| v.parse().map_err(|_| format!("bad table value `{v}`")))
            .collect::<Result<Vec<u64>, _>>()?;
        FuncDef::Table {
            values,
            tail: tail.parse().map_err(|_| format!("bad tail `{tail}`"))?,
        }
    } else {
        return Err(format!(
            "unknown definition `{rhs}` (use unit@<p>, unit, const@<c> or table@v,..:tail)"
        ));
    };
    Ok((name.to_string(), def))
}

fn run_eval(args: &EvalArgs) -> Result<Report, String> {
    let mut env = Env::new(args.n, args.fuel).map_err(|e| e.to_string())?;
    for def in &args.defs {
        let (name, parsed) = parse_def(def)?;
        env.register(name, parsed);
    }
    let formula = parse_formula(&args.formula).map_err(|e| e.to_string())?;
    let status = eval_model(&formula, &env).map_err(|e| e.to_string())?;
    let result = match &status {
        Status::Proven(cert) => json!({
            "status": "proven",
            "certificate": cert.tree().to_string(),
            "target": cert.target(),
            "witnesses": cert.witnesses().iter().map(|w| {
                json!({"branch": w.branch, "value": w.value, "claim": w.claim})
            }).collect::<Vec<_>>(),
            "fuel_spent": 0,
        }),
        Status::Refuted { counterexample } => json!({
            "status": "refuted",
            "counterexample": counterexample,
            "fuel_spent": 0,
        }),
        Status::Unknown { fuel_spent } => json!({
            "status": "unknown",
            "fuel_spent": fuel_spent,
        }),
    };
    let params = json!({
        "n": args.n,
        "fuel": args.fuel,
        "defs": args.defs,
        "formula": args.formula,
    });
    let mut rep = report("eval", params, 0);
    rep.result = Some(result);
    Ok(rep)
}

// -------------------------------------------------------------------
// encode-tree
// -------------------------------------------------------------------

fn run_encode(args: &EncodeArgs) -> Result<Report, String> {
    let tree: Tree = args.tree.parse().map_err(|e: lifton::Error| e.to_string())?;
    let shape = tree.shape();
    let good_bound = prcodes::good_bound(&shape);
    let vgood_bound = prcodes::vgood_bound(&shape);
    let track_head = |track: &prcodes::Track| -> Vec<u64> { (0..6).map(|i| track.at(i)).collect() };
    let clauses: Vec<Value> = (0..good_bound)
        .map(|l| {
            let clause = prcodes::good_clause(l, &shape).expect("l below bound");
            json!({
                "l": l,
                "kind": if clause.c_flag == 1 { "recursive" } else { "pair" },
                "c": clause.c_flag,
                "f": track_head(&clause.f_track),
                "g0": track_head(&clause.g0_track),
                "g1": track_head(&clause.g1_track),
            })
        })
        .collect();
    let vgood_clauses: Vec<Value> = (0..vgood_bound)
        .map(|l| {
            let clause = prcodes::vgood_clause(l, &shape).expect("l below bound");
            json!({"l": l, "f": track_head(&clause.f_track)})
        })
        .collect();
    let result = json!({
        "tree": tree.to_string(),
        "shape": shape.to_string(),
        "good_bound": good_bound,
        "vgood_bound": vgood_bound,
        "stabilization_bound": prcodes::stabilization_bound(&tree).map_err(|e| e.to_string())?,
        "clauses": clauses,
        "vgood_clauses": vgood_clauses,
    });
    let mut rep = report("encode-tree", json!({"tree": args.tree}), 0);
    rep.result = Some(result);
    Ok(rep)
}

// -------------------------------------------------------------------
// demo
// -------------------------------------------------------------------

fn run_demo(demo: &DemoCommand) -> Result<Report, String> {
    match demo {
        DemoCommand::Llpo { n, one_at } => {
            let cert = llpo_certificate(*one_at, *n, "g").map_err(|e| e.to_string())?;
            println!("{}", cert.tree());
            let witnesses: Vec<Value> = cert
                .witnesses()
                .iter()
                .map(|w| json!({"branch": w.branch, "value": w.value, "claim": w.claim}))
                .collect();
            let mut rep = report("demo-llpo", json!({"n": n, "one_at": one_at}), 0);
            rep.result = Some(json!({
                "certificate": cert.tree().to_string(),
                "target": cert.target(),
                "witnesses": witnesses,
            }));
            Ok(rep)
        }
        DemoCommand::Dovetail => {
            let all_ones = Machine::total_with_cost(|_| 1, |x| proj1(x) % 3);
            let successor = Machine::total_with_cost(|x| proj1(x) + 1, |_| 2);
            let winner = dovetail(&all_ones, &successor, 0, 1024);
            let second_wins: Vec<u64> = (0..8)
                .map(|i| winner.at(i).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            println!("all-ones track, halting second algorithm: {second_wins:?}");

            let zero_track = Machine::total_with_cost(|x| u64::from(proj1(x) != 3), |_| 1);
            let zeros = dovetail(&zero_track, &Machine::diverging(), 0, 1024);
            let first_wins: Vec<u64> = (0..8)
                .map(|i| zeros.at(i).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            println!("track with a zero at 3, diverging second: {first_wins:?}");

            let mut rep = report("demo-dovetail", json!({}), 0);
            rep.result = Some(json!({
                "second_algorithm_output": second_wins,
                "zero_track_output": first_wins,
            }));
            Ok(rep)
        }
        DemoCommand::K2 => {
            let beta = staggered_stream(3);
            let gamma = Stream::constant(1);
            let direct = k2_apply(&beta, &gamma, 16);
            let parallel = k2_apply(&k2_parallel(&beta), &gamma, 16);
            let mut outputs = Vec::new();
            for n in 0..8 {
                let a = direct.at(n).map_err(|e| e.to_string())?;
                let b = parallel.at(n).map_err(|e| e.to_string())?;
                outputs.push(json!({"n": n, "direct": a.to_string(), "parallel": b.to_string()}));
            }
            println!("application against the all-ones oracle agrees with the parallel transformer:");
            for line in &outputs {
                println!("  {line}");
            }
            let mut rep = report("demo-k2", json!({}), 0);
            rep.result = Some(json!({"outputs": outputs}));
            Ok(rep)
        }
    }
}
