//! The decreasing sequence `x₁ > x₂ > …` with `l(x_n)` strictly increasing
//! and `x_{n+1} ∈ (g_L(x_n), g_L(x_n) + (x_n − g_L(x_n))/(n+1))`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::control::{refine_cmp, refine_cmp_pair, ControlFunction, Enclosure, LemmaScaffold, RatInterval, START_PLACES};
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::intervals::IntervalUnion;
use crate::numeric::{int, precision_cap};

pub const CHOICE_RULE: &str = "fewest decimal digits above l(x_n), then smallest value";

/// How one term was chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    /// Index of the chosen term (`n + 1`).
    pub index: usize,
    /// Enclosure of the open interval's left end `g_L(x_n)`.
    pub lower: Enclosure,
    /// Enclosure of the right end `g_L(x_n) + (x_n − g_L(x_n))/(n+1)`.
    pub upper: Enclosure,
    pub length: usize,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorositySequence {
    scaffold: LemmaScaffold,
    terms: Vec<ExactDecimal>,
    choice_log: Vec<ChoiceRecord>,
}

impl PorositySequence {
    /// Builds `count` terms from `x1` by the canonical choice rule.
    pub fn construct(scaffold: LemmaScaffold, x1: ExactDecimal, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("count must be positive"));
        }
        if x1.is_zero() || &x1 >= scaffold.delta1() {
            return Err(Error::domain(format!("x1 = {x1} is outside (0, δ₁) with δ₁ = {}", scaffold.delta1())));
        }
        let mut seq = PorositySequence { scaffold, terms: vec![x1], choice_log: Vec::new() };
        seq.extend_to(count)?;
        Ok(seq)
    }

    /// Wraps given terms without certifying anything; the `verify_*`
    /// methods report on them.
    pub fn from_terms(scaffold: LemmaScaffold, terms: Vec<ExactDecimal>) -> Self {
        PorositySequence { scaffold, terms, choice_log: Vec::new() }
    }

    pub fn scaffold(&self) -> &LemmaScaffold {
        &self.scaffold
    }

    pub fn f(&self) -> &ControlFunction {
        self.scaffold.f()
    }

    pub fn terms(&self) -> &[ExactDecimal] {
        &self.terms
    }

    pub fn choice_log(&self) -> &[ChoiceRecord] {
        &self.choice_log
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `x_n`, 1-based.
    pub fn term(&self, n: usize) -> Option<&ExactDecimal> {
        n.checked_sub(1).and_then(|i| self.terms.get(i))
    }

    /// Appends canonical terms until `count` are present.
    pub fn extend_to(&mut self, count: usize) -> Result<()> {
        while self.terms.len() < count {
            let n = self.terms.len();
            let (next, record) = self.next_term(n)?;
            self.terms.push(next);
            self.choice_log.push(record);
        }
        Ok(())
    }

    fn interval_bounds(&self, n: usize, places: u32) -> Result<(RatInterval, RatInterval)> {
        let x = self.terms[n - 1].to_rational();
        let g = self.scaffold.gl_bounds(&x, places)?;
        let (nn, n1) = (int(n as i64), int(n as i64 + 1));
        let upper = RatInterval { lo: (&nn * &g.lo + &x) / &n1, hi: (&nn * &g.hi + &x) / &n1 };
        Ok((g, upper))
    }

    fn next_term(&self, n: usize) -> Result<(ExactDecimal, ChoiceRecord)> {
        let xn = &self.terms[n - 1];
        let ln = xn.length()?;
        let cap = precision_cap();
        let mut level = ln + 1;
        loop {
            if level as u32 + 8 > cap {
                return Err(Error::unresolved(format!("term {}: no admissible point before the precision cap", n + 1)));
            }
            let mut places = START_PLACES.max(2 * level as u32 + 8).min(cap);
            loop {
                let (lower, upper) = self.interval_bounds(n, places)?;
                match pick_at_level(&lower, &upper, level) {
                    Pick::Found(y) => {
                        let record = ChoiceRecord {
                            index: n + 1,
                            lower: lower.to_enclosure(places),
                            upper: upper.to_enclosure(places),
                            length: level,
                            rule: CHOICE_RULE.to_string(),
                        };
                        return Ok((y, record));
                    }
                    Pick::NoneAtLevel => break,
                    Pick::Undecided if places < cap => places = (places * 2).min(cap),
                    Pick::Undecided => {
                        return Err(Error::unresolved(format!("term {}: interval ends unresolved at level {level}", n + 1)))
                    }
                }
            }
            level += 1;
        }
    }

    /// Certifies the four sequence invariants term by term.
    pub fn verify_invariants(&self) -> InvariantReport {
        let mut checks = Vec::new();
        let zero = BigRational::zero();
        let d1 = self.scaffold.delta1().to_rational();
        for (i, x) in self.terms.iter().enumerate() {
            let n = i + 1;
            let xr = x.to_rational();
            checks.push(Check::bool(n, "in (0, δ₁)", xr > zero && xr < d1));
            if let Some(next) = self.terms.get(i + 1) {
                checks.push(Check::bool(n, "x_{n+1} < x_n", next < x));
                let (la, lb) = (x.length().ok(), next.length().ok());
                checks.push(Check::bool(n, "l(x_{n+1}) > l(x_n)", matches!((la, lb), (Some(a), Some(b)) if b > a)));
                let nr = next.to_rational();
                let what = || format!("x_{} vs interval ends", n + 1);
                let above = refine_cmp(|p| self.interval_bounds(n, p).map(|b| b.0), &nr, &what);
                let below = refine_cmp(|p| self.interval_bounds(n, p).map(|b| b.1), &nr, &what);
                checks.push(match (above, below) {
                    (Ok(Ordering::Less), Ok(Ordering::Greater)) => Check::pass(n, "x_{n+1} inside the admissible interval"),
                    (Ok(_), Ok(_)) => Check::fail(n, "x_{n+1} inside the admissible interval", "outside"),
                    (Err(e), _) | (_, Err(e)) => Check::unresolved(n, "x_{n+1} inside the admissible interval", &e),
                });
            }
            if let Some(x2) = self.terms.get(i + 2) {
                checks.push(match self.f().cmp_at(&xr, &x2.to_rational()) {
                    Ok(Ordering::Less) => Check::pass(n, "f(x_n) < x_{n+2}"),
                    Ok(_) => Check::fail(n, "f(x_n) < x_{n+2}", &format!("f({x}) ≥ {x2}")),
                    Err(e) => Check::unresolved(n, "f(x_n) < x_{n+2}", &e),
                });
            }
        }
        InvariantReport::from_checks(checks)
    }

    /// Certifies `g_L(g_L(x_n)) < x_{n+2}` and `f(x_n) < g_L(g_L(x_n))`.
    pub fn verify_gap_chain(&self) -> GapChainReport {
        let mut entries = Vec::new();
        for n in 1..=self.terms.len().saturating_sub(2) {
            entries.push(self.chain_entry(n));
        }
        let passed = entries.iter().all(|e| e.outer && e.inner);
        let first_failure = entries.iter().find(|e| !(e.outer && e.inner)).map(|e| e.n);
        GapChainReport { entries, passed, first_failure }
    }

    fn chain_entry(&self, n: usize) -> ChainEntry {
        let x = self.terms[n - 1].to_rational();
        let x2 = self.terms[n + 1].to_rational();
        let gg = |p: u32| -> Result<RatInterval> {
            let g = self.scaffold.gl_bounds(&x, p)?;
            self.scaffold.gl_on(&g.lo, &g.hi, p)
        };
        let mut note = None;
        let outer = match refine_cmp(gg, &x2, &|| format!("g_L(g_L(x_{n})) vs x_{}", n + 2)) {
            Ok(o) => o == Ordering::Less,
            Err(e) => {
                note = Some(e.to_string());
                false
            }
        };
        let fx = |p: u32| Ok(self.f().bounds_at(&x, p));
        let inner = match refine_cmp_pair(fx, gg, &|| format!("f(x_{n}) vs g_L(g_L(x_{n}))")) {
            Ok(o) => o == Ordering::Less,
            Err(e) => {
                note.get_or_insert(e.to_string());
                false
            }
        };
        let value = gg(START_PLACES).map(|r| r.to_enclosure(START_PLACES)).unwrap_or_else(|_| Enclosure::exact(ExactDecimal::zero()));
        ChainEntry { n, gg: value, outer, inner, note }
    }

    /// `x + x_n ∈ M` or `x + x_{n+1} ∈ M` for every `n ∈ (n0, n_max]`.
    /// When this holds for all large `n`, `M` is not right-[f]-porous at
    /// `x`; only the finite premise is checked here.
    pub fn check_premise_right(&self, m: &IntervalUnion, x: &ExactDecimal, n0: usize, n_max: usize) -> Result<bool> {
        self.check_premise(n0, n_max, |t| m.contains(&x.add(t)))
    }

    /// Mirror image: `x − x_n ∈ M` or `x − x_{n+1} ∈ M`; translates below
    /// zero count as outside `M`.
    pub fn check_premise_left(&self, m: &IntervalUnion, x: &ExactDecimal, n0: usize, n_max: usize) -> Result<bool> {
        self.check_premise(n0, n_max, |t| x.checked_sub(t).is_some_and(|v| m.contains(&v)))
    }

    fn check_premise(&self, n0: usize, n_max: usize, hit: impl Fn(&ExactDecimal) -> bool) -> Result<bool> {
        if n0 >= n_max || n_max + 1 > self.terms.len() {
            return Err(Error::domain(format!("need n0 < n_max ≤ {} (count − 1)", self.terms.len().saturating_sub(1))));
        }
        Ok(((n0 + 1)..=n_max).all(|n| hit(&self.terms[n - 1]) || hit(&self.terms[n])))
    }
}

enum Pick {
    Found(ExactDecimal),
    NoneAtLevel,
    Undecided,
}

/// Smallest `y = j·10^(-level)` with last digit nonzero strictly inside
/// `(lower, upper)`, if the enclosures decide it.
fn pick_at_level(lower: &RatInterval, upper: &RatInterval, level: usize) -> Pick {
    let scale = BigRational::from_integer(BigInt::from(10u32).pow(level as u32));
    let floor_lo = (&lower.lo * &scale).floor().to_integer();
    let floor_hi = (&lower.hi * &scale).floor().to_integer();
    if floor_lo != floor_hi {
        return Pick::Undecided;
    }
    let mut j: BigInt = floor_lo + 1u32;
    // lower.lo and lower.hi share the floor, so j/10^level > lower.hi unless
    // lower.hi sits exactly on the grid point j; floor rules that out
    if (&j % BigInt::from(10u32)).is_zero() {
        j += 1u32;
    }
    let y = BigRational::new(j.clone(), scale.to_integer());
    if y >= upper.hi {
        return Pick::NoneAtLevel;
    }
    if y >= upper.lo {
        return Pick::Undecided;
    }
    let mag = j.to_biguint().expect("candidate is positive");
    Pick::Found(ExactDecimal::from_parts(&mag, level))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub n: usize,
    pub condition: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn pass(n: usize, condition: &str) -> Self {
        Check { n, condition: condition.to_string(), status: Status::Pass, detail: None }
    }

    fn fail(n: usize, condition: &str, detail: &str) -> Self {
        Check { n, condition: condition.to_string(), status: Status::Fail, detail: Some(detail.to_string()) }
    }

    fn unresolved(n: usize, condition: &str, e: &Error) -> Self {
        Check { n, condition: condition.to_string(), status: Status::Unresolved, detail: Some(e.to_string()) }
    }

    fn bool(n: usize, condition: &str, ok: bool) -> Self {
        if ok {
            Check::pass(n, condition)
        } else {
            Check::fail(n, condition, "violated")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub passed: bool,
    pub unresolved: usize,
    pub failures: Vec<Check>,
    pub checked: usize,
}

impl InvariantReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let checked = checks.len();
        let failures: Vec<Check> = checks.into_iter().filter(|c| c.status != Status::Pass).collect();
        let unresolved = failures.iter().filter(|c| c.status == Status::Unresolved).count();
        InvariantReport { passed: failures.is_empty(), unresolved, failures, checked }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub n: usize,
    /// Enclosure of `g_L(g_L(x_n))`.
    pub gg: Enclosure,
    /// `g_L(g_L(x_n)) < x_{n+2}`
    pub outer: bool,
    /// `f(x_n) < g_L(g_L(x_n))`
    pub inner: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapChainReport {
    pub entries: Vec<ChainEntry>,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn d(s: &str) -> ExactDecimal {
        s.parse().unwrap()
    }

    fn half() -> LemmaScaffold {
        LemmaScaffold::build(ControlFunction::linear(ratio(1, 2))).unwrap()
    }

    #[test]
    fn first_terms_for_half() {
        let seq = PorositySequence::construct(half(), d("0.4"), 3).unwrap();
        assert_eq!(seq.terms(), &[d("0.4"), d("0.37"), d("0.336")]);
        let r = &seq.choice_log()[0];
        assert_eq!((r.lower.lo.clone(), r.upper.lo.clone()), (d("0.36"), d("0.38")));
        let r = &seq.choice_log()[1];
        assert_eq!(r.lower, Enclosure::exact(d("0.335775")));
        assert_eq!(r.upper.lo.truncate(7), d("0.3471833"));
        assert_eq!(r.upper.hi.truncate(7), d("0.3471833"));
        assert!(seq.verify_invariants().passed);
    }

    #[test]
    fn single_term_is_vacuous() {
        let seq = PorositySequence::construct(half(), d("0.4"), 1).unwrap();
        assert!(seq.verify_invariants().passed);
        assert!(seq.verify_gap_chain().entries.is_empty());
    }

    #[test]
    fn out_of_range_start() {
        assert!(matches!(PorositySequence::construct(half(), d("0.5"), 3), Err(Error::Domain(_))));
        assert!(matches!(PorositySequence::construct(half(), d("0"), 3), Err(Error::Domain(_))));
    }

    #[test]
    fn gap_chain_and_corruption() {
        let seq = PorositySequence::construct(half(), d("0.4"), 3).unwrap();
        let r = seq.verify_gap_chain();
        assert!(r.passed);
        assert_eq!(r.entries[0].gg, Enclosure::exact(d("0.3276")));
        let bad = PorositySequence::from_terms(half(), vec![d("0.4"), d("0.37"), d("0.3")]);
        let r = bad.verify_gap_chain();
        assert!(!r.passed);
        assert_eq!(r.first_failure, Some(1));
        assert!(!bad.verify_invariants().passed);
    }

    #[test]
    fn premises() {
        let seq = PorositySequence::construct(half(), d("0.4"), 8).unwrap();
        let x = d("0.1");
        let all = IntervalUnion::points(seq.terms().iter().map(|t| x.add(t)));
        assert!(seq.check_premise_right(&all, &x, 0, 7).unwrap());
        assert!(!seq.check_premise_right(&IntervalUnion::empty(), &x, 0, 7).unwrap());
        let odd = IntervalUnion::points(seq.terms().iter().step_by(2).map(|t| x.add(t)));
        assert!(seq.check_premise_right(&odd, &x, 0, 7).unwrap());
        let even_only = IntervalUnion::points(seq.terms().iter().skip(1).step_by(4).map(|t| x.add(t)));
        assert!(!seq.check_premise_right(&even_only, &x, 0, 7).unwrap());

        let y = d("0.9");
        let left = IntervalUnion::points(seq.terms().iter().map(|t| y.sub(t).unwrap()));
        assert!(seq.check_premise_left(&left, &y, 0, 7).unwrap());
        assert!(!seq.check_premise_left(&IntervalUnion::empty(), &y, 0, 7).unwrap());
        let alt = IntervalUnion::points(seq.terms().iter().skip(1).step_by(2).map(|t| y.sub(t).unwrap()));
        assert!(seq.check_premise_left(&alt, &y, 0, 7).unwrap());
        assert!(seq.check_premise_left(&alt, &y, 3, 8).is_err());
    }
}
