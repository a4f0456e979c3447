//! Sequence invariants over a sweep of `f` and `x₁`; block expansions
//! against direct digit arithmetic.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use porlab::expansion::MultiExpansion;
use porlab::{ControlFunction, ExactDecimal, LemmaScaffold, PorositySequence};
use proptest::prelude::*;

fn linear(n: i64, d: i64) -> ControlFunction {
    ControlFunction::linear(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_hold_across_parameters(slope in prop_oneof![Just((1, 2)), Just((1, 3)), Just((3, 5)), Just((1, 4))], x1 in 1u32..600) {
        let f = linear(slope.0, slope.1);
        let scaffold = LemmaScaffold::build(f).unwrap();
        let x1 = ExactDecimal::from_parts(&BigUint::from(x1), 3);
        let Ok(seq) = PorositySequence::construct(scaffold.clone(), x1.clone(), 30) else {
            // x₁ outside (0, δ₁) is rejected up front
            prop_assume!(false);
            unreachable!()
        };
        let inv = seq.verify_invariants();
        prop_assert!(inv.passed, "{:?}", inv.failures);
        prop_assert!(seq.verify_gap_chain().passed);
        let again = PorositySequence::construct(scaffold, x1, 30).unwrap();
        prop_assert_eq!(seq.terms(), again.terms());
        for w in seq.terms().windows(2) {
            prop_assert!(w[1] < w[0]);
            prop_assert!(w[1].length().unwrap() > w[0].length().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn blocks_reconstruct_the_value(d in prop::collection::vec(1usize..5, 1..8), digits in prop::collection::vec(0u8..10, 0..30)) {
        let me = MultiExpansion::from_explicit(d.clone()).unwrap();
        let total: usize = d.iter().sum();
        let digits: Vec<u8> = digits.into_iter().take(total).collect();
        let x = ExactDecimal::from_fraction_digits(&digits);
        let mut sum = ExactDecimal::zero();
        let mut offset = 0;
        for (i, &size) in d.iter().enumerate() {
            let b = me.multi_digit(&x, i + 1).unwrap();
            prop_assert!(b < BigUint::from(10u32).pow(size as u32));
            // the same block read straight from the digit list
            let direct = (offset..offset + size).fold(0u64, |acc, j| acc * 10 + *digits.get(j).unwrap_or(&0) as u64);
            prop_assert_eq!(b.clone(), BigUint::from(direct));
            offset += size;
            sum = sum.add(&ExactDecimal::from_parts(&b, offset));
        }
        prop_assert_eq!(sum, x.clone());
        let values: Vec<BigUint> = (1..=d.len()).map(|k| me.multi_digit(&x, k).unwrap()).collect();
        prop_assert_eq!(me.compose(&values).unwrap(), x);
    }
}
