//! Exact rational helpers shared by the enclosure and validity code.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default enclosure refinement cap, in decimal places (width 10^(-4096)).
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// Enclosure refinement cap in decimal places. `PORLAB_PRECISION_CAP`
/// overrides the default; it is read once per process.
pub fn precision_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("PORLAB_PRECISION_CAP")
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_PRECISION_CAP)
    })
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn pow10_neg(k: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u32).pow(k as u32))
}

/// `r^e` for a nonnegative integer exponent.
pub(crate) fn powi(r: &BigRational, e: u64) -> BigRational {
    let e = e as u32;
    BigRational::new(r.numer().pow(e), r.denom().pow(e))
}

pub(crate) fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(text.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if t.starts_with('-') {
        return Ok(-parse_rational(&t[1..])?);
    }
    crate::decimal::ExactDecimal::parse(t).map(|x| x.to_rational()).map_err(|_| bad())
}

pub(crate) fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Bounds on `y^(1/b)` (`y ≥ 0`, `b ≥ 1`) on the grid `10^(-places)`.
/// Returns `(lo, hi)` with `lo == hi` iff the root is exactly representable
/// at that resolution.
pub(crate) fn root_bounds(y: &BigRational, b: u32, places: u32) -> (BigRational, BigRational) {
    debug_assert!(!y.is_negative());
    if b == 1 || y.is_zero() {
        return (y.clone(), y.clone());
    }
    let num = y.numer().magnitude();
    let den = y.denom().magnitude();
    let scale = BigUint::from(10u32).pow(places * b);
    let scaled_num = num * &scale;
    let floor = &scaled_num / den;
    let r = floor.nth_root(b);
    let unit = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(places));
    let lo = BigRational::from_integer(BigInt::from(r.clone())) * &unit;
    if r.pow(b) * den == scaled_num {
        (lo.clone(), lo)
    } else {
        let hi = BigRational::from_integer(BigInt::from(r + 1u32)) * &unit;
        (lo, hi)
    }
}

/// Bounds on `x^p` for rational `p` and `x ≥ 0` (`x > 0` when `p < 0`).
pub(crate) fn pow_bounds(x: &BigRational, p: &BigRational, places: u32) -> (BigRational, BigRational) {
    if x.is_zero() {
        let z = BigRational::zero();
        return (z.clone(), z);
    }
    if p.is_negative() {
        let inv = x.recip();
        return pow_bounds(&inv, &-p, places);
    }
    let a = p.numer().to_u64().expect("exponent numerator fits u64");
    let b = p.denom().to_u32().expect("exponent denominator fits u32");
    let y = powi(x, a);
    root_bounds(&y, b, places)
}

/// Exact order of `x^p` against `r`, for `x > 0`, `r ≥ 0`.
pub(crate) fn cmp_power(x: &BigRational, p: &BigRational, r: &BigRational) -> Ordering {
    debug_assert!(x.is_positive());
    if r.is_zero() {
        return Ordering::Greater;
    }
    let a = p.numer().clone();
    let b = p.denom().to_u64().expect("exponent denominator fits u64");
    let rb = powi(r, b);
    if !a.is_negative() {
        powi(x, a.to_u64().expect("exponent fits u64")).cmp(&rb)
    } else {
        let xa = powi(x, (-a).to_u64().expect("exponent fits u64"));
        BigRational::one().cmp(&(rb * xa))
    }
}

/// Smallest integer `m ≥ 1` with `m > base^p` (`base > 0`).
pub(crate) fn smallest_int_above_power(base: &BigRational, p: &BigRational) -> u64 {
    // estimate through f64, then settle exactly
    let est = base.to_f64().unwrap_or(1.0).powf(p.to_f64().unwrap_or(1.0));
    let mut m = if est.is_finite() && est > 1.0 { est.floor() as u64 } else { 1 };
    m = m.saturating_sub(2).max(1);
    while cmp_power(base, p, &int(m as i64)) != Ordering::Less {
        m += 1;
    }
    while m > 1 && cmp_power(base, p, &int(m as i64 - 1)) == Ordering::Less {
        m -= 1;
    }
    m
}
