//! Seeded random generation of trees, families and formulas, shared by the
//! lemma-check drivers and the test suites. All generation is driven by a
//! counter-based generator seeded explicitly, so identical parameters give
//! identical samples.

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::model::{CmpOp, Env, Formula, FuncDef, Term};
use crate::omega::Omega;
use crate::topology::{LeafAssignment, SubsetFamily};
use crate::trees::Tree;

/// The deterministic generator used everywhere.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape parameters for random trees.
#[derive(Clone, Copy, Debug)]
pub struct TreeParams {
    pub arity: usize,
    pub max_depth: usize,
    pub max_switch: u64,
}

impl TreeParams {
    pub fn new(arity: usize, max_depth: usize, max_switch: u64) -> TreeParams {
        TreeParams {
            arity,
            max_depth,
            max_switch,
        }
    }
}

pub fn random_omega(rng: &mut ChaCha8Rng, max_switch: u64) -> Omega {
    if rng.random_bool(0.5) {
        Omega::ConstOne
    } else {
        Omega::ZeroFrom(rng.random_range(0..=max_switch))
    }
}

/// Arbitrary closed-form tree by depth-bounded recursive choice.
pub fn random_tree(rng: &mut ChaCha8Rng, p: TreeParams) -> Tree {
    if p.max_depth == 0 || rng.random_bool(0.3) {
        return Tree::Nil;
    }
    let child = TreeParams {
        max_depth: p.max_depth - 1,
        ..p
    };
    let subtrees = (0..p.arity).map(|_| random_tree(rng, child)).collect();
    let labels = (0..p.arity).map(|_| random_omega(rng, p.max_switch)).collect();
    Tree::node(subtrees, labels).expect("generated tree is well formed")
}

/// Random good tree: at most one label per node departs from the top
/// element (closed-form goodness forces this), and children under top
/// labels are generated good.
pub fn random_good_tree(rng: &mut ChaCha8Rng, p: TreeParams) -> Tree {
    if p.max_depth == 0 || rng.random_bool(0.3) {
        return Tree::Nil;
    }
    let child = TreeParams {
        max_depth: p.max_depth - 1,
        ..p
    };
    let mut labels = vec![Omega::ConstOne; p.arity];
    // index arity means every label stays top
    let low = rng.random_range(0..=p.arity);
    if low < p.arity {
        labels[low] = Omega::ZeroFrom(rng.random_range(0..=p.max_switch));
    }
    let subtrees = (0..p.arity)
        .map(|i| {
            if i == low {
                // label is not top: the subtree is unconstrained
                random_tree(rng, child)
            } else {
                random_good_tree(rng, child)
            }
        })
        .collect();
    Tree::node(subtrees, labels).expect("generated tree is well formed")
}

/// Random non-`nil` good tree.
pub fn random_good_node(rng: &mut ChaCha8Rng, p: TreeParams) -> Tree {
    loop {
        let t = random_good_tree(rng, p);
        if !matches!(t, Tree::Nil) {
            return t;
        }
    }
}

/// Random family over `0..bound` with the given exact number of members.
pub fn random_family(
    rng: &mut ChaCha8Rng,
    members: usize,
    bound: u64,
) -> (SubsetFamily, Vec<u64>) {
    let mut indices: Vec<u64> = (0..bound).collect();
    let mut picked = Vec::new();
    for _ in 0..members.min(indices.len()) {
        let at = rng.random_range(0..indices.len());
        picked.push(indices.swap_remove(at));
    }
    picked.sort_unstable();
    (
        SubsetFamily::from_indices(picked.iter().copied(), bound),
        picked,
    )
}

/// A good-tree assignment for every reachable leaf of `t`.
pub fn random_assignment(
    rng: &mut ChaCha8Rng,
    t: &Tree,
    p: TreeParams,
) -> LeafAssignment {
    let mut assign = LeafAssignment::new();
    for path in t.reachable_nil_paths().expect("closed tree") {
        assign.insert(path, random_good_tree(rng, p));
    }
    assign
}

/// Environment with a few registered eventually-constant functions, for
/// the soundness drivers.
pub fn sample_env(rng: &mut ChaCha8Rng, arity: usize, fuel: u64) -> Env {
    let mut env = Env::new(arity, fuel).expect("arity at least 2");
    let table_len = rng.random_range(0..5usize);
    let values: Vec<u64> = (0..table_len).map(|_| rng.random_range(0..3)).collect();
    env.register(
        "f",
        FuncDef::Table {
            values,
            tail: rng.random_range(0..3),
        },
    );
    env.register(
        "g",
        FuncDef::UnitSupport(if rng.random_bool(0.5) {
            Some(rng.random_range(0..12))
        } else {
            None
        }),
    );
    env
}

fn random_term(rng: &mut ChaCha8Rng, vars: &[String], depth: usize) -> Term {
    let leaf = depth == 0 || rng.random_bool(0.4);
    if leaf {
        if !vars.is_empty() && rng.random_bool(0.5) {
            let v = vars.choose(rng).unwrap().clone();
            return Term::Var(v);
        }
        return Term::Num(rng.random_range(0..6));
    }
    match rng.random_range(0..4u8) {
        0 => Term::Add(
            Box::new(random_term(rng, vars, depth - 1)),
            Box::new(random_term(rng, vars, depth - 1)),
        ),
        1 => Term::Mul(
            Box::new(random_term(rng, vars, depth - 1)),
            Box::new(random_term(rng, vars, depth - 1)),
        ),
        2 => Term::App(
            "f".to_string(),
            Box::new(random_term(rng, vars, depth - 1)),
        ),
        _ => Term::App(
            "g".to_string(),
            Box::new(random_term(rng, vars, depth - 1)),
        ),
    }
}

/// Random closed formula of the bounded-quantifier fragment over the
/// symbols registered by [`sample_env`].
pub fn random_bounded_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    fn go(rng: &mut ChaCha8Rng, vars: &mut Vec<String>, depth: usize) -> Formula {
        if depth == 0 || rng.random_bool(0.3) {
            let op = if rng.random_bool(0.5) {
                CmpOp::Eq
            } else {
                CmpOp::Lt
            };
            return Formula::Cmp(
                op,
                random_term(rng, vars, 2),
                random_term(rng, vars, 2),
            );
        }
        match rng.random_range(0..7u8) {
            0 => Formula::Not(Box::new(go(rng, vars, depth - 1))),
            1 => Formula::And(
                Box::new(go(rng, vars, depth - 1)),
                Box::new(go(rng, vars, depth - 1)),
            ),
            2 => Formula::Or(
                Box::new(go(rng, vars, depth - 1)),
                Box::new(go(rng, vars, depth - 1)),
            ),
            3 => Formula::Implies(
                Box::new(go(rng, vars, depth - 1)),
                Box::new(go(rng, vars, depth - 1)),
            ),
            4 => Formula::False,
            _ => {
                let var = format!("v{}", vars.len());
                let bound = Some(Term::Num(rng.random_range(0..5)));
                vars.push(var.clone());
                let body = Box::new(go(rng, vars, depth - 1));
                vars.pop();
                if rng.random_bool(0.5) {
                    Formula::Forall { var, bound, body }
                } else {
                    Formula::Exists { var, bound, body }
                }
            }
        }
    }
    go(rng, &mut Vec::new(), depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let p = TreeParams::new(3, 3, 8);
        let a: Vec<Tree> = {
            let mut rng = rng_from_seed(42);
            (0..50).map(|_| random_tree(&mut rng, p)).collect()
        };
        let b: Vec<Tree> = {
            let mut rng = rng_from_seed(42);
            (0..50).map(|_| random_tree(&mut rng, p)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn good_trees_are_good() {
        let mut rng = rng_from_seed(7);
        let p = TreeParams::new(3, 3, 8);
        for _ in 0..200 {
            let t = random_good_tree(&mut rng, p);
            assert!(t.is_good().unwrap(), "{t}");
        }
    }

    #[test]
    fn bounded_formulas_are_closed() {
        let mut rng = rng_from_seed(9);
        for _ in 0..200 {
            let f = random_bounded_formula(&mut rng, 3);
            assert!(f.free_vars().is_empty(), "{f}");
        }
    }

    /// The arbitrary-tree generator must exercise both classes of every
    /// predicate the suites compare, or the comparisons go vacuous.
    #[test]
    fn tree_samples_cover_both_truth_classes() {
        for arity in [2usize, 3, 4] {
            let mut rng = rng_from_seed(77 + arity as u64);
            let p = TreeParams::new(arity, 3, 8);
            let mut good = [0u32; 2];
            let mut vgood = [0u32; 2];
            let mut covered = [0u32; 2];
            for _ in 0..500 {
                let t = random_tree(&mut rng, p);
                good[usize::from(t.is_good().unwrap())] += 1;
                vgood[usize::from(t.is_very_good().unwrap())] += 1;
                covered[usize::from(t.cover0().unwrap())] += 1;
            }
            for counts in [good, vgood, covered] {
                assert!(counts[0] > 20 && counts[1] > 20, "degenerate sample: {counts:?}");
            }
        }
    }
}
