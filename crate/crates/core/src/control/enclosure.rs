use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::numeric::precision_cap;

/// A certified range `[lo, hi]` containing a true value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: ExactDecimal,
    pub hi: ExactDecimal,
}

impl Enclosure {
    pub fn exact(v: ExactDecimal) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> ExactDecimal {
        self.hi.sub(&self.lo).expect("enclosure is ordered")
    }

    pub fn contains(&self, v: &ExactDecimal) -> bool {
        &self.lo <= v && v <= &self.hi
    }
}

/// Rational enclosure used inside computations; may dip below zero.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(v: BigRational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    #[cfg(test)]
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Outward rounding to decimal endpoints; exact endpoints stay exact.
    /// Negative lower bounds are clamped to zero (all enclosed quantities
    /// in this crate are nonnegative).
    pub fn to_enclosure(&self, places: u32) -> Enclosure {
        let lo = if self.lo.is_negative() {
            ExactDecimal::zero()
        } else {
            ExactDecimal::from_rational_exact(&self.lo)
                .filter(|d| d.scale() <= places as usize + 4)
                .unwrap_or_else(|| ExactDecimal::floor_rational(&self.lo, places as usize))
        };
        let hi = if self.hi.is_negative() {
            ExactDecimal::zero()
        } else {
            ExactDecimal::from_rational_exact(&self.hi)
                .filter(|d| d.scale() <= places as usize + 4)
                .unwrap_or_else(|| ExactDecimal::ceil_rational(&self.hi, places as usize))
        };
        Enclosure { lo, hi }
    }

    /// Certified order against `t`, if these bounds decide it.
    pub fn decide(&self, t: &BigRational) -> Option<Ordering> {
        if &self.hi < t {
            Some(Ordering::Less)
        } else if &self.lo > t {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

/// Starting precision (decimal places) for refinement loops.
pub(crate) const START_PLACES: u32 = 24;

/// Refines an enclosure until it decides the order against `threshold`.
/// Gives up with [`Error::Unresolved`] once the precision cap is reached.
pub(crate) fn refine_cmp<F>(mut enclose: F, threshold: &BigRational, what: &dyn Fn() -> String) -> Result<Ordering>
where
    F: FnMut(u32) -> Result<RatInterval>,
{
    let cap = precision_cap();
    let mut places = START_PLACES.min(cap);
    loop {
        let e = enclose(places)?;
        if let Some(o) = e.decide(threshold) {
            return Ok(o);
        }
        if places >= cap {
            return Err(Error::unresolved(format!("{} at precision cap 10^-{cap}", what())));
        }
        places = (places * 2).min(cap);
    }
}

/// Refines until two enclosures separate; returns the order of `a` vs `b`.
pub(crate) fn refine_cmp_pair<F, G>(mut a: F, mut b: G, what: &dyn Fn() -> String) -> Result<Ordering>
where
    F: FnMut(u32) -> Result<RatInterval>,
    G: FnMut(u32) -> Result<RatInterval>,
{
    let cap = precision_cap();
    let mut places = START_PLACES.min(cap);
    loop {
        let (ea, eb) = (a(places)?, b(places)?);
        if ea.hi < eb.lo {
            return Ok(Ordering::Less);
        }
        if ea.lo > eb.hi {
            return Ok(Ordering::Greater);
        }
        if ea.lo == ea.hi && eb.lo == eb.hi && ea.lo == eb.lo {
            return Ok(Ordering::Equal);
        }
        if places >= cap {
            return Err(Error::unresolved(format!("{} at precision cap 10^-{cap}", what())));
        }
        places = (places * 2).min(cap);
    }
}

pub(crate) fn nonneg(r: BigRational) -> BigRational {
    if r.is_negative() {
        BigRational::zero()
    } else {
        r
    }
}
