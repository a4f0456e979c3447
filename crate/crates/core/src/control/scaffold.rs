use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::enclosure::{nonneg, refine_cmp, Enclosure, RatInterval, START_PLACES};
use super::function::{ControlFunction, FunctionClass};
use super::minimize::min_alpha;
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::numeric::{int, pow10_neg, precision_cap, ratio};

/// Grid used for the threshold `δ₁`: multiples of `10^(-DELTA1_PLACES)`.
pub const DELTA1_PLACES: usize = 6;

/// `α(x) = x − f(x)`, its running minimum `β(x) = min α([x, δ/2])`,
/// the contraction `g_L(x) = x − β(x)²` and the threshold `δ₁` below which
/// `β < 1/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaScaffold {
    f: ControlFunction,
    delta1: ExactDecimal,
}

impl LemmaScaffold {
    /// Builds the scaffold for `f`, which must validate in G₃.
    pub fn build(f: ControlFunction) -> Result<Self> {
        if f.class() != FunctionClass::G3 {
            return Err(Error::domain(format!("scaffold needs a G3 function, {} is claimed {}", f.family(), f.class())));
        }
        let report = f.validate_class(32);
        if let Some(v) = report.violation {
            return Err(Error::domain(format!("{} fails G3 at {}: {} ({})", f.family(), v.witness, v.condition, v.detail)));
        }
        let mut s = LemmaScaffold { f, delta1: ExactDecimal::zero() };
        s.delta1 = s.find_delta1()?;
        Ok(s)
    }

    pub fn f(&self) -> &ControlFunction {
        &self.f
    }

    pub fn delta1(&self) -> &ExactDecimal {
        &self.delta1
    }

    pub(crate) fn half_delta(&self) -> BigRational {
        self.f.delta().to_rational() / int(2)
    }

    pub(crate) fn beta_bounds(&self, x: &BigRational, places: u32) -> Result<RatInterval> {
        let h = self.half_delta();
        if x.is_negative() || x > &h {
            return Err(Error::domain(format!("β is defined on [0, δ/2]; got {x}")));
        }
        let r = min_alpha(&self.f, x, &h, &pow10_neg(places as u64), places + 4)?;
        Ok(RatInterval { lo: nonneg(r.lo), hi: r.hi })
    }

    pub(crate) fn gl_bounds(&self, x: &BigRational, places: u32) -> Result<RatInterval> {
        let b = self.beta_bounds(x, places)?;
        Ok(RatInterval { lo: x - &b.hi * &b.hi, hi: x - &b.lo * &b.lo })
    }

    /// Bounds of `g_L` over `[lo, hi]`, using that `β` is non-decreasing.
    pub(crate) fn gl_on(&self, lo: &BigRational, hi: &BigRational, places: u32) -> Result<RatInterval> {
        if lo == hi {
            return self.gl_bounds(lo, places);
        }
        let bl = self.beta_bounds(&nonneg(lo.clone()), places)?;
        let bh = self.beta_bounds(hi, places)?;
        Ok(RatInterval { lo: lo - &bh.hi * &bh.hi, hi: hi - &bl.lo * &bl.lo })
    }

    pub fn alpha(&self, x: &ExactDecimal, width_bound: &ExactDecimal) -> Result<Enclosure> {
        let e = self.f.eval(x, width_bound)?;
        Ok(Enclosure { lo: x.checked_sub(&e.hi).unwrap_or_default(), hi: x.checked_sub(&e.lo).unwrap_or_default() })
    }

    /// Certified enclosure of `β(x)` of width at most `width_bound`.
    pub fn beta(&self, x: &ExactDecimal, width_bound: &ExactDecimal) -> Result<Enclosure> {
        let xr = x.to_rational();
        self.refine_to_width(width_bound, |p| self.beta_bounds(&xr, p))
    }

    /// Certified enclosure of `g_L(x)` of width at most `width_bound`.
    pub fn g_l(&self, x: &ExactDecimal, width_bound: &ExactDecimal) -> Result<Enclosure> {
        let xr = x.to_rational();
        self.refine_to_width(width_bound, |p| self.gl_bounds(&xr, p))
    }

    fn refine_to_width<F>(&self, width_bound: &ExactDecimal, mut enclose: F) -> Result<Enclosure>
    where
        F: FnMut(u32) -> Result<RatInterval>,
    {
        if width_bound.is_zero() {
            return Err(Error::domain("width bound must be positive"));
        }
        let bound = width_bound.to_rational();
        let cap = precision_cap();
        let mut places = START_PLACES.max(width_bound.scale() as u32 + 2).min(cap);
        loop {
            let e = enclose(places)?.to_enclosure(places + 2);
            if e.width().to_rational() <= bound {
                return Ok(e);
            }
            if places >= cap {
                return Err(Error::unresolved("scaffold enclosure did not reach the width bound"));
            }
            places = (places * 2).min(cap);
        }
    }

    /// Exact order of `β(x)` against `t`.
    pub(crate) fn cmp_beta(&self, x: &BigRational, t: &BigRational) -> Result<Ordering> {
        refine_cmp(|p| self.beta_bounds(x, p), t, &|| format!("β({x}) vs {t}"))
    }

    /// Largest `K·10^(-6) < δ/2` with `β(K·10^(-6)) < 1/2` certified.
    fn find_delta1(&self) -> Result<ExactDecimal> {
        let unit = pow10_neg(DELTA1_PLACES as u64);
        let h = self.half_delta();
        // largest K with K·unit < δ/2
        let kmax = {
            let q = (&h / &unit).ceil().to_integer() - 1;
            u64::try_from(q).map_err(|_| Error::domain("δ too large for the δ₁ grid"))?
        };
        if kmax == 0 {
            return Err(Error::domain("δ/2 is below the δ₁ grid resolution"));
        }
        let half = ratio(1, 2);
        let ok = |k: u64| -> Result<bool> { Ok(self.cmp_beta(&(&unit * int(k as i64)), &half)? == Ordering::Less) };
        if ok(kmax)? {
            return Ok(grid_point(kmax));
        }
        if !ok(1)? {
            return Err(Error::domain("β(10^-6) ≥ 1/2: no admissible δ₁ on the grid"));
        }
        // β is non-decreasing, so the admissible K form a prefix
        let (mut lo, mut hi) = (1u64, kmax);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(grid_point(lo))
    }

    /// Checks `g_L(g_L(x)) > f(x)` and `g_L(x) < x` at `x`.
    #[cfg(test)]
    pub(crate) fn chain_holds_at(&self, x: &BigRational) -> Result<bool> {
        let fx = |p: u32| Ok::<_, Error>(self.f.bounds_at(x, p));
        let ggx = |p: u32| {
            let g = self.gl_bounds(x, p)?;
            self.gl_on(&g.lo, &g.hi, p)
        };
        let chain = super::enclosure::refine_cmp_pair(fx, ggx, &|| format!("f({x}) vs g_L(g_L({x}))"))?;
        let below = refine_cmp(|p| self.gl_bounds(x, p), x, &|| format!("g_L({x}) vs {x}"))?;
        Ok(chain == Ordering::Less && below == Ordering::Less && !num_traits::Zero::is_zero(x))
    }
}

fn grid_point(k: u64) -> ExactDecimal {
    ExactDecimal::from_u64(k).mul(&ExactDecimal::pow10(-(DELTA1_PLACES as i64)))
}
