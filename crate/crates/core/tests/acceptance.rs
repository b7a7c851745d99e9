//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the sample counts it ran (visible with `--nocapture`). All checks
//! are exact; a single disagreement fails the criterion.

use std::time::Instant;

use lifton::model::{
    classical_eval, eval_model, llpo_certificate, parse_formula, Env, FuncDef, Status,
};
use lifton::prcodes::{eval_good_via_codes, eval_very_good_via_codes};
use lifton::realize::{dovetail, k2_apply, k2_parallel, proj1, Machine, Stream};
use lifton::sampling::{
    random_assignment, random_bounded_formula, random_family, random_good_node,
    random_good_tree, random_tree, rng_from_seed, TreeParams,
};
use lifton::topology::{build_witness, compactify, intersect, refine, SubsetFamily};
use lifton::trees::Tree;
use num_bigint::BigUint;
use rand::Rng;

fn pass(criterion: u32, name: &str, detail: String) {
    println!("criterion {criterion:2} ({name}): PASS — {detail}");
}

#[test]
fn criterion_01_pr_encoding_equivalence() {
    let started = Instant::now();
    let mut total = 0u64;
    for arity in [2usize, 3, 4] {
        let mut rng = rng_from_seed(100 + arity as u64);
        let p = TreeParams::new(arity, 3, 8);
        for sample in 0..2000u64 {
            let t = random_tree(&mut rng, p);
            let good = t.is_good().unwrap();
            let coded_good = eval_good_via_codes(&t).unwrap();
            assert_eq!(
                coded_good, good,
                "goodness mismatch at arity {arity}, sample {sample}: {t}"
            );
            let vgood = t.is_very_good().unwrap();
            let coded_vgood = eval_very_good_via_codes(&t).unwrap();
            assert_eq!(
                coded_vgood, vgood,
                "very-goodness mismatch at arity {arity}, sample {sample}: {t}"
            );
            total += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 30,
        "encoding equivalence took {elapsed:?}, budget is 30s"
    );
    pass(
        1,
        "pr-encoding equivalence",
        format!("{total} trees across arities 2-4 in {elapsed:?}"),
    );
}

#[test]
fn criterion_02_cover_iff_very_good() {
    let mut total = 0u64;
    for arity in [2usize, 3, 4] {
        let mut rng = rng_from_seed(200 + arity as u64);
        let p = TreeParams::new(arity, 3, 8);
        for sample in 0..2000u64 {
            let t = random_good_tree(&mut rng, p);
            assert!(t.is_good().unwrap());
            assert_eq!(
                t.cover0().unwrap(),
                t.is_very_good().unwrap(),
                "cover/very-good disagreement at arity {arity}, sample {sample}: {t}"
            );
            total += 1;
        }
    }
    pass(2, "cover matches very-goodness", format!("{total} good trees"));
}

#[test]
fn criterion_03_intersection_axiom() {
    let mut total = 0u64;
    for arity in [2usize, 3, 4] {
        let mut rng = rng_from_seed(300 + arity as u64);
        let p = TreeParams::new(arity, 3, 8);
        for sample in 0..1000u64 {
            let t = random_good_tree(&mut rng, p);
            let s = random_good_tree(&mut rng, p);
            let r = intersect(&t, &s).unwrap();
            assert!(
                r.is_good().unwrap(),
                "intersection lost goodness at arity {arity}, sample {sample}"
            );
            if r.cover0().unwrap() {
                assert!(
                    t.cover0().unwrap() && s.cover0().unwrap(),
                    "cover containment failed at arity {arity}, sample {sample}"
                );
            }
            total += 1;
        }
    }
    pass(3, "intersection axiom", format!("{total} good pairs"));
}

#[test]
fn criterion_04_refinement_axiom() {
    let mut total = 0u64;
    for arity in [2usize, 3, 4] {
        let mut rng = rng_from_seed(400 + arity as u64);
        let p = TreeParams::new(arity, 3, 8);
        for sample in 0..1000u64 {
            let t = random_good_tree(&mut rng, p);
            let assign = random_assignment(&mut rng, &t, p);
            let s = refine(&t, &assign).unwrap();
            assert!(
                s.is_good().unwrap(),
                "refinement lost goodness at arity {arity}, sample {sample}"
            );
            if s.cover0().unwrap() {
                let target_met = assign.values().any(|g| g.cover0().unwrap());
                assert!(
                    target_met,
                    "refined cover escapes the target at arity {arity}, sample {sample}"
                );
            }
            total += 1;
        }
    }
    pass(4, "refinement axiom", format!("{total} assignments"));
}

#[test]
fn criterion_05_countable_compactness() {
    let mut total = 0u64;
    for arity in [2usize, 3, 4] {
        let mut rng = rng_from_seed(500 + arity as u64);
        let p = TreeParams::new(arity, 3, 8);
        for sample in 0..1000u64 {
            let t = random_good_tree(&mut rng, p);
            // good closed trees always cover, so the semantic precondition
            // asks for at least one member below the bound
            let members = 1 + (sample as usize % 5);
            let (fam, _) = random_family(&mut rng, members, 48);
            let (indices, s) = compactify(&t, &fam).unwrap();
            assert!(s.is_good().unwrap());
            assert!(indices.len() <= t.nil_leaf_count());
            if s.cover0().unwrap() {
                assert!(
                    indices.iter().any(|&j| fam.contains(j)),
                    "extracted index set misses the family at arity {arity}, sample {sample}"
                );
            }
            total += 1;
        }
    }
    pass(5, "countable compactness", format!("{total} instances"));
}

#[test]
fn criterion_06_witness_builder() {
    let mut total = 0u64;
    for n in [3usize, 4, 6] {
        let mut rng = rng_from_seed(600 + n as u64);
        let p = TreeParams::new(n, 3, 8);
        for sample in 0..1000u64 {
            let k = 1 + sample % (n as u64 - 1);
            let t = random_good_node(&mut rng, p);
            let members = 1 + (sample as usize) % (k as usize);
            let (fam, picked) = random_family(&mut rng, members, 32);
            let (j, s) = build_witness(&t, &fam, k, n).unwrap();
            let want = ((n as u64).div_ceil(k)).max(2) as usize;
            assert_eq!(s.arity(), Some(want), "arity at n={n}, k={k}, sample {sample}");
            assert!(s.is_good().unwrap(), "witness tree not good at sample {sample}");
            // closed-form good inputs are very good, so the strengthened
            // conclusion applies
            assert!(t.is_very_good().unwrap());
            assert!(
                fam.contains(j),
                "chosen index misses the family at n={n}, k={k}, sample {sample}"
            );
            if k == 1 {
                assert_eq!(j, picked[0], "unique witness at sample {sample}");
            }
            total += 1;
        }
    }
    pass(6, "witness builder", format!("{total} instances over n in {{3,4,6}}"));
}

#[test]
fn criterion_07_residue_class_soundness() {
    let mut total = 0u64;
    for n in [2usize, 3, 4] {
        for pos in std::iter::once(None).chain((0..=50).map(Some)) {
            let cert = llpo_certificate(pos, n, "g").unwrap();
            assert!(cert.tree().is_good().unwrap());

            let text = (0..n)
                .map(|c| format!("(forall x. g({n}*x+{c}) = 0)"))
                .collect::<Vec<_>>()
                .join(" \\/ ");
            let formula = parse_formula(&text).unwrap();
            let env = Env::new(n, 64)
                .unwrap()
                .with_func("g", FuncDef::UnitSupport(pos));
            let Status::Proven(model_cert) = eval_model(&formula, &env).unwrap() else {
                panic!("disjunction not proven at n={n}, pos={pos:?}");
            };
            assert_eq!(model_cert.tree(), cert.tree());
            assert!(!model_cert.witnesses().is_empty());
            for note in model_cert.witnesses() {
                // independent reading of classical truth straight off the
                // support descriptor
                let classically_true = match pos {
                    None => true,
                    Some(q) => q % n as u64 != note.value,
                };
                assert!(
                    classically_true,
                    "annotated disjunct {} is classically false at n={n}, pos={pos:?}",
                    note.value
                );
            }
            total += 1;
        }
    }
    pass(
        7,
        "residue-class disjunction soundness",
        format!("{total} certificates over n in {{2,3,4}}, positions up to 50"),
    );
}

#[test]
fn criterion_08_model_soundness_and_fuel_monotonicity() {
    let mut rng = rng_from_seed(800);
    let mut monotone_checks = 0u64;
    let total = 2000u64;
    for sample in 0..total {
        let env = lifton::sampling::sample_env(&mut rng, 2 + (sample as usize % 3), 100);
        let f = random_bounded_formula(&mut rng, 3);
        let status = eval_model(&f, &env).unwrap();
        let truth = classical_eval(&f, &env).unwrap();
        match &status {
            Status::Proven(cert) => {
                assert!(truth, "proven but classically false at sample {sample}: {f}");
                assert!(cert.tree().is_good().unwrap());
            }
            Status::Refuted { .. } => {
                assert!(!truth, "refuted but classically true at sample {sample}: {f}");
            }
            Status::Unknown { .. } => {
                panic!("bounded formula evaluated unknown at sample {sample}: {f}")
            }
        }
        if sample % 4 == 0 {
            let richer = eval_model(&f, &env.clone().with_fuel(400)).unwrap();
            assert_eq!(
                richer.verdict(),
                status.verdict(),
                "verdict changed with more fuel at sample {sample}: {f}"
            );
            monotone_checks += 1;
        }
    }
    assert!(monotone_checks >= 500);
    pass(
        8,
        "bounded-fragment soundness",
        format!("{total} formulas, {monotone_checks} fuel monotonicity spot checks"),
    );
}

#[test]
fn criterion_09_dovetail_combinator() {
    let mut rng = rng_from_seed(900);
    let total = 120u64;
    for sample in 0..total {
        let track_cost = rng.random_range(0..4u64);
        if sample % 2 == 0 {
            // all-ones track, halting second algorithm: the output is the
            // second algorithm's function
            let scale = rng.random_range(1..5u64);
            let offset = rng.random_range(0..5u64);
            let value_cost = rng.random_range(0..6u64);
            let first = Machine::total_with_cost(|_| 1, move |_| track_cost);
            let second = Machine::total_with_cost(
                move |x| scale * proj1(x) + offset,
                move |_| value_cost,
            );
            let map = dovetail(&first, &second, sample, 4096);
            for n in 0..8 {
                assert_eq!(
                    map.at(n).unwrap(),
                    scale * n + offset,
                    "second-algorithm output at sample {sample}, n={n}"
                );
            }
        } else {
            // a zero in the track, diverging second algorithm: output 0
            let zero_at = rng.random_range(0..6u64);
            let first = Machine::total_with_cost(
                move |x| u64::from(proj1(x) != zero_at),
                move |_| track_cost,
            );
            let map = dovetail(&first, &Machine::diverging(), sample, 4096);
            for n in 0..8 {
                assert_eq!(map.at(n).unwrap(), 0, "zero-track output at sample {sample}");
            }
        }
    }
    pass(9, "dovetail combinator", format!("{total} machine instances"));
}

#[test]
fn criterion_10_parallel_stream_transformer() {
    let mut rng = rng_from_seed(1000);
    let total = 120u64;
    for sample in 0..total {
        let stride = rng.random_range(1..4u64);
        let beta = staggered_stream(stride);
        let par = k2_parallel(&beta);

        // case split, bit-exact on random queries
        for _ in 0..4 {
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
            assert_eq!(par.at(&code), expected, "case split at sample {sample}");
        }

        // agreement with plain application on the constant-1 oracle, first
        // 32 outputs
        let gamma = Stream::constant(1);
        let direct = k2_apply(&beta, &gamma, 16);
        let parallel = k2_apply(&par, &gamma, 16);
        for n in 0..32 {
            assert_eq!(
                parallel.at(n).unwrap(),
                direct.at(n).unwrap(),
                "application agreement at sample {sample}, n={n}"
            );
        }
    }
    pass(10, "parallel stream transformer", format!("{total} stream instances"));
}

/// Operator answering with `n * 10` after consulting `n % stride + 1`
/// oracle values.
fn staggered_stream(stride: u64) -> Stream {
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

#[test]
fn criterion_05b_compactness_family_check() {
    // deterministic instance where several leaves consult the family
    let fam = SubsetFamily::from_indices([2, 9], 16);
    let t: Tree = "Tr(Tr(nil,nil;one,one),nil;one,one)".parse().unwrap();
    let (indices, s) = compactify(&t, &fam).unwrap();
    assert!(indices.contains(&2));
    assert!(s.is_good().unwrap());
    assert!(s.cover0().unwrap());
}
