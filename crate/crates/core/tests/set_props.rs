//! Witnesses, verdict monotonicity and outer approximations on small sets.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use porlab::certificates::max_run;
use porlab::expansion::MultiExpansion;
use porlab::sets::{ASetSpec, Strategy as Pick, Verdict};
use porlab::ExactDecimal;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// d ≡ `size`, N = 3, ε = 1, α = 3/4.
fn spec(size: usize, blocks: usize) -> ASetSpec {
    ASetSpec::zero_prefix(MultiExpansion::constant(size, blocks).unwrap(), 3, q(1, 1), q(3, 4)).unwrap()
}

fn strategy() -> impl Strategy<Value = Pick> {
    prop_oneof![Just(Pick::MaxC), Just(Pick::MinC), Just(Pick::SeededRandom)]
}

/// Block `k` of `x` read straight off the digit string.
fn block(x: &ExactDecimal, size: usize, k: usize) -> u64 {
    (1..=size).fold(0, |acc, j| acc * 10 + x.frac_digit((k - 1) * size + j) as u64)
}

fn pad(digits: &[u8]) -> ExactDecimal {
    ExactDecimal::from_fraction_digits(digits)
}

fn verdict_rank(v: &Verdict) -> i8 {
    match v {
        Verdict::In { .. } => 1,
        Verdict::Unknown { .. } => 0,
        Verdict::Out { .. } => -1,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn witnesses_are_members(st in strategy(), seed in any::<u64>(), depth in 3usize..=6, size in 1usize..=2) {
        let s = spec(size, 49);
        let w = s.generate_witness(depth, st, seed).unwrap();
        let in_at_depth = matches!(s.membership(&w.x, depth), Verdict::In { depth: d } if d == depth);
        prop_assert!(in_at_depth);
        let top = 10u64.pow(size as u32) - 1;
        for rc in &w.counts {
            // independent block scan of range n
            let c = (rc.n * rc.n + 1..=(rc.n + 1) * (rc.n + 1)).filter(|&k| block(&w.x, size, k) == top).count();
            prop_assert_eq!(c, rc.c);
            prop_assert!(c >= s.floor_count(rc.n) && c <= 2 * rc.n);
        }
    }

    #[test]
    fn verdicts_are_monotone_in_depth(tail in prop::collection::vec(prop_oneof![Just(9u8), 0u8..9], 40)) {
        let s = spec(1, 49);
        let mut digits = vec![0u8; 9];
        digits.extend(tail);
        let x = pad(&digits);
        let vs: Vec<Verdict> = (3..=6).map(|d| s.membership(&x, d)).collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if vs[j].is_in() {
                    prop_assert!(vs[i].is_in());
                }
                if vs[i].is_out() {
                    prop_assert!(vs[j].is_out());
                }
                prop_assert!(verdict_rank(&vs[j]) <= verdict_rank(&vs[i]) || !vs[i].is_out());
            }
        }
    }

    /// `2n+1 − E ≤ m_n (E + 1)`: the `C` maximal blocks of a range split
    /// into at most `E + 1` runs.
    #[test]
    fn run_length_bounds_the_count(st in strategy(), seed in any::<u64>(), n in 3usize..=6) {
        let s = spec(2, 49);
        let w = s.generate_witness(6, st, seed).unwrap();
        let run = max_run(s.expansion(), &w.x, n).unwrap();
        let flags: Vec<bool> = (n * n + 1..=(n + 1) * (n + 1)).map(|k| block(&w.x, 2, k) == 99).collect();
        let longest = flags.split(|f| !f).map(|r| r.len()).max().unwrap();
        prop_assert_eq!(run.m, longest);
        let e = flags.iter().filter(|f| !**f).count();
        prop_assert!(2 * n + 1 - e <= run.m * (e + 1));
    }

    #[test]
    fn outer_approx_contains_witnesses_and_nests(st in strategy(), seed in any::<u64>()) {
        let s = spec(1, 49);
        let w = s.generate_witness(5, st, seed).unwrap();
        // a window pinned by the first 20 digits keeps the cover small
        let lo = w.x.truncate(20);
        let window = (lo.clone(), lo.add(&ExactDecimal::pow10(-20)));
        let c3 = s.outer_approx_in(3, &window, 16, 1_000_000).unwrap();
        let c4 = s.outer_approx_in(4, &window, 25, 1_000_000).unwrap();
        prop_assert!(c3.contains(&w.x));
        prop_assert!(c4.contains(&w.x));
        for p in c4.parts() {
            prop_assert!(c3.contains(&p.lo) && c3.contains(&p.hi) && c3.contains_open(&p.lo, &p.hi));
        }
    }
}

#[test]
fn prefix_mismatch_is_out_at_every_depth() {
    let s = ASetSpec::new(
        MultiExpansion::constant(1, 49).unwrap(),
        3,
        q(1, 1),
        q(3, 4),
        (1..=9).map(|k| BigUint::from((k % 10) as u32)).collect(),
    )
    .unwrap();
    let x = pad(&[1, 2, 3, 4, 5, 6, 7, 8, 8]);
    for d in 3..=6 {
        assert!(matches!(s.membership(&x, d), Verdict::Out { .. }));
    }
}
