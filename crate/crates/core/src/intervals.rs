//! Finite unions of intervals with exact decimal endpoints.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: ExactDecimal,
    pub hi: ExactDecimal,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: ExactDecimal, hi: ExactDecimal) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: ExactDecimal, hi: ExactDecimal) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn point(x: ExactDecimal) -> Self {
        Interval::closed(x.clone(), x)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    pub fn length(&self) -> ExactDecimal {
        self.hi.checked_sub(&self.lo).unwrap_or_default()
    }

    pub fn contains(&self, x: &ExactDecimal) -> bool {
        let above = match self.lo.cmp(x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        let i = Interval { lo, hi, lo_closed, hi_closed };
        (!i.is_empty()).then_some(i)
    }

    /// True when `self ∪ other` is a single interval (`self` starts first).
    fn touches(&self, next: &Interval) -> bool {
        match self.hi.cmp(&next.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.hi_closed || next.lo_closed,
            Ordering::Less => false,
        }
    }

    fn start_key(&self) -> (&ExactDecimal, bool) {
        // closed starts sort before open ones at the same point
        (&self.lo, !self.lo_closed)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Sorted, pairwise disjoint intervals; touching pieces are merged.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for IntervalUnion {
    type Error = Error;

    fn try_from(parts: Vec<Interval>) -> Result<Self> {
        Ok(IntervalUnion::from_parts(parts))
    }
}

impl From<IntervalUnion> for Vec<Interval> {
    fn from(u: IntervalUnion) -> Self {
        u.parts
    }
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    pub fn from_parts(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().filter(|i| !i.is_empty()).collect();
        parts.sort_by(|a, b| a.start_key().cmp(&b.start_key()));
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match out.last_mut() {
                Some(last) if last.touches(&p) => match last.hi.cmp(&p.hi) {
                    Ordering::Less => {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    }
                    Ordering::Equal => last.hi_closed |= p.hi_closed,
                    Ordering::Greater => {}
                },
                _ => out.push(p),
            }
        }
        IntervalUnion { parts: out }
    }

    pub fn points(xs: impl IntoIterator<Item = ExactDecimal>) -> Self {
        IntervalUnion::from_parts(xs.into_iter().map(Interval::point))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::from_parts(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersect_interval(&self, window: &Interval) -> IntervalUnion {
        IntervalUnion { parts: self.parts.iter().filter_map(|p| p.intersect(window)).collect() }
    }

    fn first_ending_at_or_after(&self, x: &ExactDecimal) -> usize {
        self.parts.partition_point(|p| &p.hi < x)
    }

    pub fn contains(&self, x: &ExactDecimal) -> bool {
        let i = self.first_ending_at_or_after(x);
        self.parts[i..].iter().take(2).any(|p| p.contains(x))
    }

    /// Does `M` meet the open interval `(a, b)`?
    pub fn intersects_open(&self, a: &ExactDecimal, b: &ExactDecimal) -> bool {
        let window = Interval::open(a.clone(), b.clone());
        let i = self.first_ending_at_or_after(a);
        self.parts[i..].iter().take_while(|p| &p.lo < b).any(|p| p.intersect(&window).is_some())
    }

    /// Does `M` contain the whole open interval `(a, b)`?
    pub fn contains_open(&self, a: &ExactDecimal, b: &ExactDecimal) -> bool {
        if a >= b {
            return true;
        }
        let i = self.first_ending_at_or_after(b);
        self.parts.get(i).is_some_and(|p| &p.lo <= a && &p.hi >= b)
    }

    /// Maximal open subintervals of `(a, b)` disjoint from `M`.
    pub fn gaps_in(&self, a: &ExactDecimal, b: &ExactDecimal) -> Vec<(ExactDecimal, ExactDecimal)> {
        let mut gaps = Vec::new();
        if a >= b {
            return gaps;
        }
        let mut cursor = a.clone();
        let start = self.first_ending_at_or_after(a);
        for p in &self.parts[start..] {
            if &p.lo >= b {
                break;
            }
            if p.lo > cursor {
                gaps.push((cursor.clone(), p.lo.clone()));
            }
            if p.hi > cursor {
                cursor = p.hi.clone();
            }
            if &cursor >= b {
                return gaps;
            }
        }
        if &cursor < b {
            gaps.push((cursor, b.clone()));
        }
        gaps
    }

    /// Length of the largest open subinterval of `(a, b)` missing `M`.
    pub fn lambda(&self, a: &ExactDecimal, b: &ExactDecimal) -> ExactDecimal {
        self.gaps_in(a, b)
            .into_iter()
            .map(|(l, h)| h.sub(&l).expect("gap is ordered"))
            .max()
            .unwrap_or_default()
    }

    /// Total length of the parts.
    pub fn measure(&self) -> ExactDecimal {
        self.parts.iter().fold(ExactDecimal::zero(), |acc, p| acc.add(&p.length()))
    }

    /// `lo,hi,lo_closed,hi_closed` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lo,hi,lo_closed,hi_closed\n");
        for p in &self.parts {
            out.push_str(&format!("{},{},{},{}\n", p.lo, p.hi, p.lo_closed, p.hi_closed));
        }
        out
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
