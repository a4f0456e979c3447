//! Certified minimization of `α(t) = t − f(t)` over a closed interval.
//!
//! Interval branch-and-bound: every box carries a rigorous lower bound, the
//! incumbent comes from point enclosures, and boxes on which `α` is provably
//! monotone collapse to one endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::enclosure::RatInterval;
use super::function::ControlFunction;
use crate::error::{Error, Result};

const MAX_BOXES: usize = 50_000;

struct Node {
    lb: BigRational,
    lo: BigRational,
    hi: BigRational,
    /// Set once the minimum over this box is known to sit at this point.
    at: Option<BigRational>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.lb == other.lb
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // min-heap on the lower bound
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.cmp(&self.lb)
    }
}

fn alpha_at(f: &ControlFunction, t: &BigRational, places: u32) -> RatInterval {
    let fv = f.bounds_at(t, places);
    RatInterval { lo: t - fv.hi, hi: t - fv.lo }
}

/// Enclosure of `min α` over `[a, b]` whose width is at most `tol`.
pub(crate) fn min_alpha(
    f: &ControlFunction,
    a: &BigRational,
    b: &BigRational,
    tol: &BigRational,
    places: u32,
) -> Result<RatInterval> {
    if a > b {
        return Err(Error::domain("min_alpha: empty interval"));
    }
    let mut incumbent = alpha_at(f, a, places).hi.min(alpha_at(f, b, places).hi);
    let mut heap = BinaryHeap::new();
    heap.push(make_node(f, a.clone(), b.clone(), places, &mut incumbent));
    let mut boxes = 1usize;

    while let Some(node) = heap.pop() {
        if &incumbent - &node.lb <= *tol {
            return Ok(RatInterval { lo: node.lb, hi: incumbent });
        }
        if node.at.is_some() {
            // the popped lower bound is a point enclosure that cannot tighten
            // without more precision
            return Err(Error::unresolved(format!(
                "min of x − f(x) on [{a}, {b}]: point enclosures wider than {tol} at 10^-{places}"
            )));
        }
        boxes += 2;
        if boxes > MAX_BOXES {
            return Err(Error::unresolved(format!("min of x − f(x) on [{a}, {b}]: box budget exhausted")));
        }
        let mid = (&node.lo + &node.hi) / BigRational::from_integer(2.into());
        let m = alpha_at(f, &mid, places).hi;
        if m < incumbent {
            incumbent = m;
        }
        heap.push(make_node(f, node.lo, mid.clone(), places, &mut incumbent));
        heap.push(make_node(f, mid, node.hi, places, &mut incumbent));
    }
    unreachable!("heap holds at least the box containing the minimizer")
}

fn make_node(f: &ControlFunction, lo: BigRational, hi: BigRational, places: u32, incumbent: &mut BigRational) -> Node {
    if lo == hi {
        let v = alpha_at(f, &lo, places);
        if v.hi < *incumbent {
            *incumbent = v.hi.clone();
        }
        return Node { lb: v.lo, at: Some(lo.clone()), lo, hi };
    }
    if let Some(df) = f.derivative_on(&lo, &hi, places) {
        let one = BigRational::one();
        let endpoint = if df.hi <= one {
            Some(lo.clone())
        } else if df.lo >= one {
            Some(hi.clone())
        } else {
            None
        };
        if let Some(p) = endpoint {
            let v = alpha_at(f, &p, places);
            if v.hi < *incumbent {
                *incumbent = v.hi.clone();
            }
            return Node { lb: v.lo, at: Some(p), lo, hi };
        }
        // mean-value bound: α(t) ≥ α(lo) + min(0, 1 − f'_hi)·(hi − lo)
        let slope = &one - &df.hi;
        let slope = if slope.is_negative() { slope } else { BigRational::zero() };
        let mv = alpha_at(f, &lo, places).lo + slope * (&hi - &lo);
        let naive = &lo - f.bounds_at(&hi, places).hi;
        return Node { lb: mv.max(naive), at: None, lo, hi };
    }
    let naive = &lo - f.bounds_at(&hi, places).hi;
    Node { lb: naive, at: None, lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::function::{Family, FunctionClass};
    use crate::decimal::ExactDecimal;
    use crate::numeric::{int, pow10_neg, ratio};

    fn grid_min(f: &ControlFunction, a: &BigRational, b: &BigRational, steps: i64) -> BigRational {
        // oracle: dense grid of exact evaluations (only for exact families)
        (0..=steps)
            .map(|k| {
                let t = a + (b - a) * ratio(k, steps);
                alpha_at(f, &t, 40).lo
            })
            .min()
            .unwrap()
    }

    #[test]
    fn linear_minimum_sits_at_left_endpoint() {
        let f = ControlFunction::linear(ratio(1, 2));
        let r = min_alpha(&f, &ratio(3, 10), &ratio(1, 2), &pow10_neg(20), 30).unwrap();
        assert_eq!(r, RatInterval::point(ratio(3, 20)));
    }

    #[test]
    fn interior_minimum_matches_grid_oracle() {
        // α(t) = t − 3t² peaks at 1/6, inside the window, so the boxes
        // around the top have to be split before the bounds settle
        let f = ControlFunction::new(
            Family::scaled_power(int(3), int(2)),
            ExactDecimal::one(),
            FunctionClass::G,
        )
        .unwrap();
        let (a, b) = (ratio(1, 10), ratio(3, 10));
        let r = min_alpha(&f, &a, &b, &pow10_neg(12), 30).unwrap();
        let oracle = grid_min(&f, &a, &b, 400);
        assert!(r.lo <= oracle && oracle - &r.hi <= pow10_neg(12) + pow10_neg(12));
        // α(0.3) = 0.3 − 0.27 = 0.03 < α(0.1) = 0.07
        assert!(r.lo <= ratio(3, 100) && ratio(3, 100) <= r.hi);
    }

    #[test]
    fn fractional_power_is_certified() {
        let f = ControlFunction::new(Family::power(ratio(3, 2)), ExactDecimal::one(), FunctionClass::G3).unwrap();
        let r = min_alpha(&f, &ratio(1, 5), &ratio(1, 2), &pow10_neg(15), 30).unwrap();
        // α(t) = t − t^{3/2} is increasing on [0, 4/9] and decreasing after,
        // so the minimum is min(α(0.2), α(0.5))
        let a02 = ratio(1, 5) - crate::numeric::pow_bounds(&ratio(1, 5), &ratio(3, 2), 40).1;
        let a05 = ratio(1, 2) - crate::numeric::pow_bounds(&ratio(1, 2), &ratio(3, 2), 40).1;
        let want = a02.min(a05);
        assert!((&want - &r.lo).abs() <= pow10_neg(14));
        assert!(r.width() <= pow10_neg(15));
    }
}
