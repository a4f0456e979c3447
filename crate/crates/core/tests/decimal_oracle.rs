//! Exact decimals against scaled-integer arithmetic.

use std::cmp::Ordering;

use num_bigint::BigUint;
use porlab::ExactDecimal;
use proptest::prelude::*;

/// `m · 10^-s` held as a plain integer pair.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    m: u128,
    s: u32,
}

impl Scaled {
    fn at(self, s: u32) -> u128 {
        self.m * 10u128.pow(s - self.s)
    }

    fn render(self) -> String {
        let p = 10u128.pow(self.s);
        let (int, frac) = (self.m / p, self.m % p);
        let frac = format!("{:0width$}", frac, width = self.s as usize);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    }

    fn decimal(self) -> ExactDecimal {
        ExactDecimal::from_parts(&BigUint::from(self.m), self.s as usize)
    }
}

fn scaled() -> impl Strategy<Value = Scaled> {
    (0u128..1_000_000_000_000_000, 0u32..=12).prop_map(|(m, s)| Scaled { m, s })
}

fn unit() -> impl Strategy<Value = Scaled> {
    (1u32..=12).prop_flat_map(|s| (1u128..10u128.pow(s)).prop_map(move |m| Scaled { m, s }))
}

const COMMON: u32 = 12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn render_and_parse_round_trip(a in scaled()) {
        let x = a.decimal();
        prop_assert_eq!(x.to_string(), a.render());
        prop_assert_eq!(ExactDecimal::parse(&a.render()).unwrap(), x.clone());
        // padding zeros do not change the value
        let padded = if a.render().contains('.') { format!("{}000", a.render()) } else { format!("{}.000", a.render()) };
        prop_assert_eq!(ExactDecimal::parse(&padded).unwrap(), x);
    }

    #[test]
    fn arithmetic_matches_scaled_integers(a in scaled(), b in scaled()) {
        let (x, y) = (a.decimal(), b.decimal());
        let (ia, ib) = (a.at(COMMON), b.at(COMMON));
        prop_assert_eq!(x.add(&y), Scaled { m: ia + ib, s: COMMON }.decimal());
        prop_assert_eq!(x.mul(&y), Scaled { m: a.m * b.m, s: a.s + b.s }.decimal());
        prop_assert_eq!(x.cmp(&y), ia.cmp(&ib));
        match ia.checked_sub(ib) {
            Some(d) => prop_assert_eq!(x.sub(&y).unwrap(), Scaled { m: d, s: COMMON }.decimal()),
            None => prop_assert!(x.sub(&y).is_err()),
        }
        prop_assert_eq!(x == y, ia == ib);
    }

    #[test]
    fn digits_length_and_reconstruction(a in unit()) {
        let x = a.decimal();
        let l = x.length().unwrap();
        prop_assert_ne!(x.digit(l).unwrap(), 0);
        for i in l + 1..l + 8 {
            prop_assert_eq!(x.digit(i).unwrap(), 0);
        }
        // Σ a_i · 10^-i over i ≤ l(x), as a scaled integer at scale l
        let sum = (1..=l).fold(0u128, |acc, i| acc * 10 + x.digit(i).unwrap() as u128);
        prop_assert_eq!(Scaled { m: sum, s: l as u32 }.decimal(), x.clone());
        // the last nonzero digit of the oracle value sits at l
        let trimmed = a.render();
        prop_assert_eq!(trimmed.len() - 2, l);
    }
}

#[test]
fn comparison_is_numeric_not_lexicographic() {
    let d = |s: &str| ExactDecimal::parse(s).unwrap();
    assert_eq!(d("0.3").cmp(&d("0.29999999")), Ordering::Greater);
    assert_eq!(d("10").cmp(&d("9.999")), Ordering::Greater);
    assert_eq!(d("0.10").cmp(&d("0.1")), Ordering::Equal);
}
