//! Largest-gap lengths against a brute-force scan, and the bracket detector
//! on random finite unions.

use num_bigint::BigInt;
use num_rational::BigRational;
use porlab::metrics::{recheck_bracket, right_bracket_porous, PorosityVerdict};
use porlab::{ControlFunction, ExactDecimal, Interval, IntervalUnion};
use proptest::prelude::*;

/// Interval on the grid `k/100` with its closedness flags.
#[derive(Clone, Copy, Debug)]
struct Raw {
    lo: u32,
    hi: u32,
    lo_closed: bool,
    hi_closed: bool,
}

impl Raw {
    /// Membership of the doubled coordinate `t2 / 200`.
    fn has2(&self, t2: u32) -> bool {
        let (lo, hi) = (2 * self.lo, 2 * self.hi);
        (t2 > lo || (t2 == lo && self.lo_closed)) && (t2 < hi || (t2 == hi && self.hi_closed))
    }
}

fn grid(k: u32) -> ExactDecimal {
    ExactDecimal::parse(&format!("{}.{:02}", k / 100, k % 100)).unwrap()
}

fn raw_intervals() -> impl Strategy<Value = Vec<Raw>> {
    prop::collection::vec(
        (0u32..200, 0u32..30, any::<bool>(), any::<bool>()).prop_map(|(lo, w, a, b)| Raw { lo, hi: lo + w, lo_closed: a, hi_closed: b }),
        0..12,
    )
}

fn union_of(raw: &[Raw]) -> IntervalUnion {
    IntervalUnion::from_parts(
        raw.iter().map(|r| Interval { lo: grid(r.lo), hi: grid(r.hi), lo_closed: r.lo_closed, hi_closed: r.hi_closed }),
    )
}

/// Longest open subinterval of `(a, b)` missing every raw interval, by
/// scanning the cells between consecutive endpoints.
fn brute_lambda(raw: &[Raw], a: u32, b: u32) -> u32 {
    let mut cuts: Vec<u32> = raw.iter().flat_map(|r| [r.lo, r.hi]).filter(|&t| t > a && t < b).collect();
    cuts.extend([a, b]);
    cuts.sort_unstable();
    cuts.dedup();
    let hit = |t2: u32| raw.iter().any(|r| r.has2(t2));
    let (mut best, mut run) = (0, 0);
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let free = !hit(p + q);
        // a run continues across `p` only if `p` itself is free
        if free {
            run = if run > 0 && !hit(2 * p) { run + (q - p) } else { q - p };
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lambda_matches_brute_force(raw in raw_intervals(), a in 0u32..240, w in 1u32..60) {
        let m = union_of(&raw);
        let b = a + w;
        prop_assert_eq!(m.lambda(&grid(a), &grid(b)), grid(brute_lambda(&raw, a, b)));
    }

    #[test]
    fn bracket_witnesses_recheck(raw in raw_intervals(), x in 0u32..100, c in 1i64..10) {
        let m = union_of(&raw);
        let g = ControlFunction::linear(BigRational::new(BigInt::from(c), BigInt::from(10)));
        let x = grid(x);
        let schedule: Vec<ExactDecimal> = ["0.5", "0.2", "0.1", "0.05"].iter().map(|s| s.parse().unwrap()).collect();
        let v = right_bracket_porous(&m, &x, &g, &schedule).unwrap();
        if let PorosityVerdict::In { witnesses, .. } = &v {
            prop_assert!(recheck_bracket(&m, &x, &g, &v).unwrap());
            for w in witnesses {
                prop_assert!(!m.intersects_open(&w.lo, &w.hi));
                prop_assert_eq!(&w.hi, &x.add(&w.scale));
            }
        }
    }

    /// A smaller `g` asks for a longer empty stretch, so its In verdicts
    /// carry over to any larger `g`.
    #[test]
    fn in_for_smaller_g_implies_in_for_larger(raw in raw_intervals(), x in 0u32..100, c1 in 1i64..10, dc in 0i64..5) {
        let m = union_of(&raw);
        let x = grid(x);
        let g1 = ControlFunction::linear(BigRational::new(BigInt::from(c1), BigInt::from(15)));
        let g2 = ControlFunction::linear(BigRational::new(BigInt::from(c1 + dc), BigInt::from(15)));
        let schedule: Vec<ExactDecimal> = ["0.4", "0.2", "0.1"].iter().map(|s| s.parse().unwrap()).collect();
        let v1 = right_bracket_porous(&m, &x, &g1, &schedule).unwrap();
        if v1.is_in() {
            let v2 = right_bracket_porous(&m, &x, &g2, &schedule).unwrap();
            prop_assert!(v2.is_in());
            prop_assert!(recheck_bracket(&m, &x, &g2, &v1).unwrap());
        }
    }
}
