//! Nonnegative finite decimals with exact arithmetic.
//!
//! An [`ExactDecimal`] is `mantissa · 10^(-scale)` held in canonical form:
//! no leading zero digits in the mantissa and, when `scale > 0`, no trailing
//! zero digits either. For `x ∈ (0,1)` the scale is therefore exactly the
//! position of the last nonzero decimal digit, and every value has the
//! terminating expansion (never the one ending in nines).
//!
//! The mantissa is stored as a big-endian vector of decimal digits. Digit
//! access is the dominant operation in block scans, and addition and
//! subtraction stay linear in the digit count.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactDecimal {
    /// Big-endian decimal digits of the mantissa; empty for zero.
    digits: Vec<u8>,
    scale: usize,
}

impl ExactDecimal {
    pub fn zero() -> Self {
        ExactDecimal::default()
    }

    pub fn one() -> Self {
        ExactDecimal { digits: vec![1], scale: 0 }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_raw_digits(v.to_string().bytes().map(|b| b - b'0').collect(), 0)
    }

    /// Builds `mantissa · 10^(-scale)` and canonicalizes it.
    pub fn from_parts(mantissa: &BigUint, scale: usize) -> Self {
        let digits = if mantissa.is_zero() { Vec::new() } else { mantissa.to_radix_be(10) };
        Self::from_raw_digits(digits, scale)
    }

    /// `0.d₁d₂…d_k` from fraction digits (each in `0..=9`).
    pub fn from_fraction_digits(fraction: &[u8]) -> Self {
        debug_assert!(fraction.iter().all(|&d| d < 10));
        Self::from_raw_digits(fraction.to_vec(), fraction.len())
    }

    fn from_raw_digits(mut digits: Vec<u8>, mut scale: usize) -> Self {
        while scale > 0 && digits.last() == Some(&0) {
            digits.pop();
            scale -= 1;
        }
        let lead = digits.iter().take_while(|&&d| d == 0).count();
        if lead == digits.len() {
            return ExactDecimal::zero();
        }
        digits.drain(..lead);
        ExactDecimal { digits, scale }
    }

    /// `10^k` for any integer `k`.
    pub fn pow10(k: i64) -> Self {
        if k >= 0 {
            let mut digits = vec![0u8; k as usize + 1];
            digits[0] = 1;
            ExactDecimal { digits, scale: 0 }
        } else {
            ExactDecimal { digits: vec![1], scale: k.unsigned_abs() as usize }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(text.to_string());
        let t = text.trim();
        let (int_part, frac_part) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
        Ok(Self::from_raw_digits(digits, frac_part.len()))
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn mantissa(&self) -> BigUint {
        if self.digits.is_empty() {
            BigUint::zero()
        } else {
            BigUint::from_radix_be(&self.digits, 10).expect("decimal digits are valid radix-10")
        }
    }

    /// Number of mantissa digits (zero has none).
    pub fn mantissa_len(&self) -> usize {
        self.digits.len()
    }

    /// `0 < x < 1`.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_zero() && self.digits.len() <= self.scale
    }

    /// The `i`-th digit after the decimal point (`i ≥ 1`), for any value.
    #[inline]
    pub fn frac_digit(&self, i: usize) -> u8 {
        if i == 0 || i > self.scale {
            return 0;
        }
        let from_right = self.scale - i;
        if from_right < self.digits.len() {
            self.digits[self.digits.len() - 1 - from_right]
        } else {
            0
        }
    }

    /// `a_i(x)` under the terminating-expansion convention.
    pub fn digit(&self, i: usize) -> Result<u8> {
        if !self.in_unit_interval() {
            return Err(Error::domain(format!("digit: {self} is not in (0,1)")));
        }
        if i == 0 {
            return Err(Error::domain("digit: positions start at 1"));
        }
        Ok(self.frac_digit(i))
    }

    /// `l(x)`, the position of the last nonzero digit.
    pub fn length(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::domain("length: l(0) is the supremum of the empty set"));
        }
        if !self.in_unit_interval() {
            return Err(Error::domain(format!("length: {self} is not in (0,1)")));
        }
        Ok(self.scale)
    }

    /// Fraction digits `a_from ..= a_to` (1-based, inclusive).
    pub fn frac_digits(&self, from: usize, to: usize) -> Vec<u8> {
        (from..=to).map(|i| self.frac_digit(i)).collect()
    }

    /// Drops every fraction digit after position `places`.
    pub fn truncate(&self, places: usize) -> Self {
        if places >= self.scale {
            return self.clone();
        }
        let drop = self.scale - places;
        if drop >= self.digits.len() {
            return ExactDecimal::zero();
        }
        let digits = self.digits[..self.digits.len() - drop].to_vec();
        Self::from_raw_digits(digits, places)
    }

    /// Mantissa digits padded with trailing zeros up to `scale`.
    fn aligned(&self, scale: usize) -> Vec<u8> {
        debug_assert!(scale >= self.scale);
        let mut v = Vec::with_capacity(self.digits.len() + scale - self.scale);
        v.extend_from_slice(&self.digits);
        if !v.is_empty() {
            v.resize(self.digits.len() + scale - self.scale, 0);
        }
        v
    }

    pub fn add(&self, other: &Self) -> Self {
        let scale = self.scale.max(other.scale);
        let sum = add_be(&self.aligned(scale), &other.aligned(scale));
        Self::from_raw_digits(sum, scale)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let scale = self.scale.max(other.scale);
        let (a, b) = (self.aligned(scale), other.aligned(scale));
        if cmp_be(&a, &b) == Ordering::Less {
            return None;
        }
        Some(Self::from_raw_digits(sub_be(&a, &b), scale))
    }

    /// `self − other`; the carrier is nonnegative so underflow is an error.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.checked_sub(other)
            .ok_or_else(|| Error::domain(format!("subtraction underflow: {self} − {other}")))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ExactDecimal::zero();
        }
        Self::from_parts(&(self.mantissa() * other.mantissa()), self.scale + other.scale)
    }

    pub fn to_rational(&self) -> BigRational {
        let den = BigUint::from(10u32).pow(self.scale as u32);
        BigRational::new(BigInt::from(self.mantissa()), BigInt::from(den))
    }

    /// Exact conversion when the rational has a terminating decimal form.
    pub fn from_rational_exact(r: &BigRational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        let (num, den) = (r.numer().magnitude(), r.denom().magnitude());
        let two = BigUint::from(2u32);
        let five = BigUint::from(5u32);
        let mut rest = den.clone();
        let (mut twos, mut fives) = (0usize, 0usize);
        while rest.is_even() && !rest.is_zero() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() && !rest.is_zero() {
            rest /= &five;
            fives += 1;
        }
        if !rest.is_one() {
            return None;
        }
        let scale = twos.max(fives);
        let factor = BigUint::from(10u32).pow(scale as u32) / den;
        Some(Self::from_parts(&(num * factor), scale))
    }

    /// Largest multiple of `10^(-places)` that is `≤ r` (`r ≥ 0`).
    pub fn floor_rational(r: &BigRational, places: usize) -> Self {
        if r.is_negative() {
            return ExactDecimal::zero();
        }
        let scaled = r * BigRational::from_integer(BigInt::from(10u32).pow(places as u32));
        Self::from_parts(scaled.floor().to_integer().magnitude(), places)
    }

    /// Smallest multiple of `10^(-places)` that is `≥ r` (`r ≥ 0`).
    pub fn ceil_rational(r: &BigRational, places: usize) -> Self {
        if r.is_negative() {
            return ExactDecimal::zero();
        }
        let scaled = r * BigRational::from_integer(BigInt::from(10u32).pow(places as u32));
        Self::from_parts(scaled.ceil().to_integer().magnitude(), places)
    }
}

fn add_be(a: &[u8], b: &[u8]) -> Vec<u8> {
    let n = a.len().max(b.len());
    let mut out = vec![0u8; n + 1];
    let mut carry = 0u8;
    for i in 0..n {
        let da = if i < a.len() { a[a.len() - 1 - i] } else { 0 };
        let db = if i < b.len() { b[b.len() - 1 - i] } else { 0 };
        let s = da + db + carry;
        out[n - i] = s % 10;
        carry = s / 10;
    }
    out[0] = carry;
    out
}

/// `a − b` for `a ≥ b` (both big-endian, no leading zeros).
fn sub_be(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = a.to_vec();
    let mut borrow = 0i8;
    for i in 0..a.len() {
        let db = if i < b.len() { b[b.len() - 1 - i] as i8 } else { 0 };
        let idx = a.len() - 1 - i;
        let mut d = a[idx] as i8 - db - borrow;
        if d < 0 {
            d += 10;
            borrow = 1;
        } else {
            borrow = 0;
        }
        out[idx] = d as u8;
        if i >= b.len() && borrow == 0 {
            break;
        }
    }
    debug_assert_eq!(borrow, 0);
    out
}

fn cmp_be(a: &[u8], b: &[u8]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl Ord for ExactDecimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let scale = self.scale.max(other.scale);
        // compare integer-part widths first to avoid padding huge values
        let int_a = self.digits.len() as isize - self.scale as isize;
        let int_b = other.digits.len() as isize - other.scale as isize;
        if !self.is_zero() && !other.is_zero() && int_a != int_b {
            return int_a.cmp(&int_b);
        }
        cmp_be(&self.aligned(scale), &other.aligned(scale))
    }
}

impl PartialOrd for ExactDecimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExactDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.digits.iter().map(|d| (b'0' + d) as char).collect();
        if self.scale == 0 {
            return f.write_str(if s.is_empty() { "0" } else { &s });
        }
        if s.len() > self.scale {
            let (i, fr) = s.split_at(s.len() - self.scale);
            write!(f, "{i}.{fr}")
        } else {
            write!(f, "0.{}{}", "0".repeat(self.scale - s.len()), s)
        }
    }
}

impl fmt::Debug for ExactDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactDecimal({self})")
    }
}

impl FromStr for ExactDecimal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExactDecimal::parse(s)
    }
}

impl Serialize for ExactDecimal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactDecimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ExactDecimal::parse(&s).map_err(serde::de::Error::custom)
    }
}
