//! Realizability-side algorithms: step-budgeted machines with the parallel
//! dovetail combinator, and second-algebra streams with prefix-interrogation
//! application and the parallel stream transformer.
//!
//! Machines are host-supplied step functions, not codes of a universal
//! machine: a machine maps `(input, budget)` to `Halted(value)` or
//! `Running`, and must be monotone in the budget. The stream side uses the
//! workbench's list codec for finite sequences, so stream queries are
//! arbitrary-precision naturals.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::codec;
use crate::error::{Error, Result};

/// Outcome of running a machine for a given budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Halted(u64),
    Running,
}

/// A step-budgeted partial map on the naturals. The contract is purity per
/// `(input, budget)` and budget monotonicity: once halted, the same value
/// is returned for every larger budget.
#[derive(Clone)]
pub struct Machine(Arc<dyn Fn(u64, u64) -> Step + Send + Sync>);

impl Machine {
    pub fn new<F>(step: F) -> Machine
    where
        F: Fn(u64, u64) -> Step + Send + Sync + 'static,
    {
        Machine(Arc::new(step))
    }

    /// Machine computing `f`, halting on input `x` once the budget reaches
    /// `cost(x)`.
    pub fn total_with_cost<F, C>(f: F, cost: C) -> Machine
    where
        F: Fn(u64) -> u64 + Send + Sync + 'static,
        C: Fn(u64) -> u64 + Send + Sync + 'static,
    {
        Machine::new(move |x, budget| {
            if budget >= cost(x) {
                Step::Halted(f(x))
            } else {
                Step::Running
            }
        })
    }

    /// Machine that never halts.
    pub fn diverging() -> Machine {
        Machine::new(|_, _| Step::Running)
    }

    pub fn run(&self, input: u64, budget: u64) -> Step {
        (self.0)(input, budget)
    }
}

/// Cantor pairing on machine words; used to feed a parameter/input pair to
/// a machine as a single code.
pub fn pair_u64(a: u64, b: u64) -> u64 {
    let s = a as u128 + b as u128;
    let code = s * (s + 1) / 2 + b as u128;
    u64::try_from(code).expect("pair code exceeds u64")
}

/// First projection of a pair code.
pub fn proj0(c: u64) -> u64 {
    let (a, b) = codec::unpair(&BigUint::from(c));
    let _ = b;
    a.try_into().unwrap()
}

/// Second projection of a pair code.
pub fn proj1(c: u64) -> u64 {
    codec::unpair(&BigUint::from(c)).1.try_into().unwrap()
}

/// The total map produced by [`dovetail`]; each output is computed by the
/// budgeted alternation on demand.
pub struct DovetailMap {
    first: Machine,
    second: Machine,
    parameter: u64,
    budget: u64,
}

impl DovetailMap {
    /// Run the alternation for input `n`.
    ///
    /// Round `r` gives one probe to each side. The first algorithm walks
    /// the track `m -> first(pair(d, m))`, halting with output 0 at the
    /// first non-1 value; the second tries to produce its own value for
    /// `n` via `second(pair(d, n))`. Strict alternation starts with the
    /// first algorithm, so when both would halt in the same round the
    /// first wins.
    pub fn at(&self, n: u64) -> Result<u64> {
        let mut m = 0u64;
        let mut first_budget = 0u64;
        let mut second_budget = 0u64;
        for _ in 0..self.budget {
            match self.first.run(pair_u64(self.parameter, m), first_budget) {
                Step::Halted(v) if v != 1 => return Ok(0),
                Step::Halted(_) => {
                    m += 1;
                    first_budget = 0;
                }
                Step::Running => first_budget += 1,
            }
            match self.second.run(pair_u64(self.parameter, n), second_budget) {
                Step::Halted(v) => return Ok(v),
                Step::Running => second_budget += 1,
            }
        }
        Err(Error::BudgetExhausted {
            budget: self.budget,
        })
    }
}

/// The parallel dovetail combinator.
///
/// `first` represents the track `m -> (a0 d)_0 m` and `second` the map
/// `n -> (a1 d 0)_0 n`, both fed the pair code of the parameter and their
/// argument. When the track is constantly 1 on inspected arguments and the
/// second algorithm halts, the output agrees with the second algorithm;
/// when a non-1 track value is found first, the output is 0.
pub fn dovetail(first: &Machine, second: &Machine, parameter: u64, budget: u64) -> DovetailMap {
    DovetailMap {
        first: first.clone(),
        second: second.clone(),
        parameter,
        budget,
    }
}

/// A total stream on the naturals with memoized evaluation: an element of
/// the second algebra. Queries are arbitrary naturals because applications
/// interrogate coded finite sequences.
#[derive(Clone)]
pub struct Stream {
    eval: Arc<dyn Fn(&BigUint) -> BigUint + Send + Sync>,
    memo: Arc<Mutex<BTreeMap<BigUint, BigUint>>>,
}

impl Stream {
    pub fn new<F>(f: F) -> Stream
    where
        F: Fn(&BigUint) -> BigUint + Send + Sync + 'static,
    {
        Stream {
            eval: Arc::new(f),
            memo: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub fn constant(c: u64) -> Stream {
        Stream::new(move |_| BigUint::from(c))
    }

    pub fn at(&self, q: &BigUint) -> BigUint {
        let mut memo = self.memo.lock().unwrap();
        if let Some(v) = memo.get(q) {
            return v.clone();
        }
        let v = (self.eval)(q);
        memo.insert(q.clone(), v.clone());
        v
    }

    pub fn at_u64(&self, q: u64) -> BigUint {
        self.at(&BigUint::from(q))
    }
}

/// A stream applied to an oracle stream; outputs are computed on demand by
/// prefix interrogation.
pub struct AppliedStream {
    operator: Stream,
    oracle: Stream,
    fuel: u64,
}

impl AppliedStream {
    /// Output at `n`: the value `m` such that the operator answers `m + 1`
    /// on the query `code(n :: oracle-prefix of length k)` for the least
    /// `k <= fuel`, having answered 0 on all shorter prefixes.
    pub fn at(&self, n: u64) -> Result<BigUint> {
        let mut query: Vec<BigUint> = vec![BigUint::from(n)];
        for k in 0..=self.fuel {
            let answer = self.operator.at(&codec::list_encode(&query));
            if !answer.is_zero() {
                return Ok(answer - 1u32);
            }
            query.push(self.oracle.at_u64(k));
        }
        Err(Error::K2Undefined {
            input: n,
            fuel: self.fuel,
        })
    }

    /// First `len` outputs, or the first undefined input.
    pub fn prefix(&self, len: u64) -> Result<Vec<BigUint>> {
        (0..len).map(|n| self.at(n)).collect()
    }
}

/// Application in the second algebra, fuel-bounded.
pub fn k2_apply(operator: &Stream, oracle: &Stream, fuel: u64) -> AppliedStream {
    AppliedStream {
        operator: operator.clone(),
        oracle: oracle.clone(),
        fuel,
    }
}

/// The parallel stream transformer: on a query `code(n :: m_1 .. m_k)` the
/// result answers 1 (that is, the output value 0) as soon as some `m_i` is
/// not 1, and defers to `beta` on all-ones prefixes.
pub fn k2_parallel(beta: &Stream) -> Stream {
    let beta = beta.clone();
    Stream::new(move |q| {
        let parts = codec::list_decode(q);
        if parts.len() >= 2 && parts[1..].iter().any(|m| !m.is_one()) {
            BigUint::one()
        } else {
            beta.at(q)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn pairing_projections() {
        for a in 0..20 {
            for b in 0..20 {
                let c = pair_u64(a, b);
                assert_eq!(proj0(c), a);
                assert_eq!(proj1(c), b);
            }
        }
    }

    fn all_ones_track() -> Machine {
        Machine::total_with_cost(|_| 1, |x| proj1(x) % 3)
    }

    fn track_with_zero_at(z: u64) -> Machine {
        Machine::total_with_cost(move |x| if proj1(x) == z { 0 } else { 1 }, |_| 1)
    }

    #[test]
    fn dovetail_second_algorithm_wins_on_all_ones() {
        let second = Machine::total_with_cost(|x| proj1(x) + 1, |_| 4);
        let map = dovetail(&all_ones_track(), &second, 9, 1_000);
        for n in 0..16 {
            assert_eq!(map.at(n).unwrap(), n + 1);
        }
    }

    #[test]
    fn dovetail_zero_in_track_forces_zero() {
        let map = dovetail(&track_with_zero_at(3), &Machine::diverging(), 2, 1_000);
        for n in 0..16 {
            assert_eq!(map.at(n).unwrap(), 0);
        }
    }

    #[test]
    fn dovetail_first_to_halt_wins_deterministically() {
        // both halt: the zero at m = 0 costs one round; a second algorithm
        // halting at budget 0 answers within round one as well, but only
        // after the first algorithm's probe of that round
        let second = Machine::total_with_cost(|_| 42, |_| 0);
        let map = dovetail(&track_with_zero_at(0), &second, 0, 100);
        // round 0: first probes (budget 0 < cost 1) -> running; second
        // halts -> 42
        assert_eq!(map.at(5).unwrap(), 42);

        let instant_zero = Machine::total_with_cost(|_| 0, |_| 0);
        let map = dovetail(&instant_zero, &second, 0, 100);
        // the first algorithm halts in its half of round 0, before the
        // second is probed
        assert_eq!(map.at(5).unwrap(), 0);
    }

    #[test]
    fn dovetail_budget_exhaustion_is_a_value() {
        let map = dovetail(&all_ones_track(), &Machine::diverging(), 0, 64);
        assert!(matches!(
            map.at(0),
            Err(Error::BudgetExhausted { budget: 64 })
        ));
    }

    #[test]
    fn dovetail_output_is_budget_monotone() {
        let second = Machine::total_with_cost(|x| proj1(x) * 2, |_| 7);
        for budget in [16u64, 64, 256] {
            let map = dovetail(&all_ones_track(), &second, 1, budget);
            for n in 0..8 {
                assert_eq!(map.at(n).unwrap(), 2 * n);
            }
        }
    }

    /// Operator that reads one oracle value and outputs it.
    fn copy_first_oracle_value() -> Stream {
        Stream::new(|q| {
            let parts = codec::list_decode(q);
            match parts.len() {
                0 | 1 => BigUint::zero(),
                _ => &parts[1] + 1u32,
            }
        })
    }

    #[test]
    fn k2_apply_copies_the_oracle() {
        let applied = k2_apply(&copy_first_oracle_value(), &Stream::constant(2), 8);
        for n in 0..8 {
            assert_eq!(applied.at(n).unwrap(), big(2));
        }
    }

    #[test]
    fn k2_apply_immediate_answer_ignores_oracle() {
        let operator = Stream::new(|q| {
            let parts = codec::list_decode(q);
            if parts.len() == 1 {
                big(7) + 1u32
            } else {
                BigUint::zero()
            }
        });
        let applied = k2_apply(&operator, &Stream::constant(999), 8);
        for n in 0..8 {
            assert_eq!(applied.at(n).unwrap(), big(7));
        }
    }

    #[test]
    fn k2_apply_never_answering_is_undefined_at_zero() {
        let silent = Stream::constant(0);
        let applied = k2_apply(&silent, &Stream::constant(1), 6);
        assert!(matches!(
            applied.at(0),
            Err(Error::K2Undefined { input: 0, fuel: 6 })
        ));
    }

    #[test]
    fn k2_parallel_case_split_is_bit_exact() {
        let beta = Stream::new(|q| q % 5u32);
        let par = k2_parallel(&beta);
        // all-ones oracle prefix: defer to beta
        let q = codec::list_encode(&[big(3), big(1), big(1)]);
        assert_eq!(par.at(&q), beta.at(&q));
        // a non-1 value in the prefix: answer 1
        let q = codec::list_encode(&[big(3), big(1), big(0)]);
        assert_eq!(par.at(&q), big(1));
        let q = codec::list_encode(&[big(3), big(4)]);
        assert_eq!(par.at(&q), big(1));
        // bare query (no oracle values consulted yet): defer to beta
        let q = codec::list_encode(&[big(3)]);
        assert_eq!(par.at(&q), beta.at(&q));
    }

    /// Operator answering after a short, input-dependent prefix.
    fn staggered_operator() -> Stream {
        Stream::new(|q| {
            let parts = codec::list_decode(q);
            if parts.is_empty() {
                return BigUint::zero();
            }
            let n: u64 = (&parts[0]).try_into().unwrap_or(0);
            let want = (n % 3) as usize + 1;
            if parts.len() > want {
                big(n * 10) + 1u32
            } else {
                BigUint::zero()
            }
        })
    }

    #[test]
    fn k2_parallel_agrees_with_plain_application_on_all_ones_oracle() {
        let beta = staggered_operator();
        let gamma = Stream::constant(1);
        let direct = k2_apply(&beta, &gamma, 16);
        let parallel = k2_apply(&k2_parallel(&beta), &gamma, 16);
        for n in 0..32 {
            assert_eq!(parallel.at(n).unwrap(), direct.at(n).unwrap());
        }
    }

    #[test]
    fn k2_apply_is_fuel_monotone() {
        let beta = staggered_operator();
        let gamma = Stream::constant(1);
        let lean = k2_apply(&beta, &gamma, 4);
        let rich = k2_apply(&beta, &gamma, 64);
        for n in 0..16 {
            if let Ok(v) = lean.at(n) {
                assert_eq!(rich.at(n).unwrap(), v);
            }
        }
    }

    #[test]
    fn k2_parallel_is_defined_on_arbitrary_oracles() {
        let beta = staggered_operator();
        // oracle with a non-1 value early on
        let gamma = Stream::new(|q| if q.is_zero() { big(1) } else { big(0) });
        let applied = k2_apply(&k2_parallel(&beta), &gamma, 16);
        for n in 0..16 {
            // defined everywhere; value is either beta's answer or 0 from
            // the parallel guard
            applied.at(n).unwrap();
        }
    }
}
