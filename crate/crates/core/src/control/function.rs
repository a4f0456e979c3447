use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::enclosure::{refine_cmp, refine_cmp_pair, Enclosure, RatInterval, START_PLACES};
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::numeric::{format_rational, pow10_neg, pow_bounds, precision_cap};

/// Serde adapter: rationals travel as strings such as `"1/2"` or `"0.75"`.
pub(crate) mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::numeric::format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::numeric::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Control-function classes. All members are increasing, continuous, vanish
/// at 0 and are positive elsewhere on `[0, δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionClass {
    G,
    /// `lim_{x→0+} f(x)/x > 0`
    G1,
    /// `f(x) > x` off zero
    G2,
    /// `f(x) < x` off zero
    G3,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionClass::G => "G",
            FunctionClass::G1 => "G1",
            FunctionClass::G2 => "G2",
            FunctionClass::G3 => "G3",
        })
    }
}

/// The closed set of analyzable families. Every family is increasing on
/// `[0, ∞)` because all coefficients and exponents are positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Linear {
        #[serde(with = "rational_str")]
        c: BigRational,
    },
    Power {
        #[serde(with = "rational_str")]
        p: BigRational,
    },
    ScaledPower {
        #[serde(with = "rational_str")]
        c: BigRational,
        #[serde(with = "rational_str")]
        p: BigRational,
    },
    /// `outer(inner(x))`
    Composite { outer: Box<Family>, inner: Box<Family> },
}

impl Family {
    pub fn linear(c: BigRational) -> Self {
        Family::Linear { c }
    }

    pub fn power(p: BigRational) -> Self {
        Family::Power { p }
    }

    pub fn scaled_power(c: BigRational, p: BigRational) -> Self {
        Family::ScaledPower { c, p }
    }

    pub fn compose(outer: Family, inner: Family) -> Self {
        Family::Composite { outer: Box::new(outer), inner: Box::new(inner) }
    }

    fn check_params(&self) -> Result<()> {
        match self {
            Family::Linear { c } if !c.is_positive() => Err(Error::config("linear: c must be positive")),
            Family::Power { p } if !p.is_positive() => Err(Error::config("power: p must be positive")),
            Family::ScaledPower { c, p } if !c.is_positive() || !p.is_positive() => {
                Err(Error::config("scaled-power: c and p must be positive"))
            }
            Family::Composite { outer, inner } => {
                outer.check_params()?;
                inner.check_params()
            }
            _ => Ok(()),
        }
    }

    /// Lower/upper bounds of the family at a single point `x ≥ 0`.
    fn point_bounds(&self, x: &BigRational, places: u32) -> RatInterval {
        match self {
            Family::Linear { c } => RatInterval::point(c * x),
            Family::Power { p } => {
                let (lo, hi) = pow_bounds(x, p, places);
                RatInterval { lo, hi }
            }
            Family::ScaledPower { c, p } => {
                let (lo, hi) = pow_bounds(x, p, places);
                RatInterval { lo: c * lo, hi: c * hi }
            }
            Family::Composite { outer, inner } => {
                let i = inner.point_bounds(x, places);
                outer.range_bounds(&i.lo, &i.hi, places)
            }
        }
    }

    /// Bounds of `f([lo, hi])`; exact monotonicity makes this two point calls.
    fn range_bounds(&self, lo: &BigRational, hi: &BigRational, places: u32) -> RatInterval {
        if lo == hi {
            return self.point_bounds(lo, places);
        }
        RatInterval { lo: self.point_bounds(lo, places).lo, hi: self.point_bounds(hi, places).hi }
    }

    /// Bounds of `f'` over `[lo, hi]`; `None` if unbounded there.
    fn derivative_bounds(&self, lo: &BigRational, hi: &BigRational, places: u32) -> Option<RatInterval> {
        let power_deriv = |p: &BigRational| -> Option<RatInterval> {
            let q = p - BigRational::one();
            if q.is_zero() {
                return Some(RatInterval::point(BigRational::one()));
            }
            if q.is_positive() {
                let a = pow_bounds(lo, &q, places).0;
                let b = pow_bounds(hi, &q, places).1;
                Some(RatInterval { lo: p * a, hi: p * b })
            } else {
                if lo.is_zero() {
                    return None;
                }
                let a = pow_bounds(hi, &q, places).0;
                let b = pow_bounds(lo, &q, places).1;
                Some(RatInterval { lo: p * a, hi: p * b })
            }
        };
        match self {
            Family::Linear { c } => Some(RatInterval::point(c.clone())),
            Family::Power { p } => power_deriv(p),
            Family::ScaledPower { c, p } => power_deriv(p).map(|d| RatInterval { lo: c * d.lo, hi: c * d.hi }),
            Family::Composite { outer, inner } => {
                let ir = inner.range_bounds(lo, hi, places);
                let od = outer.derivative_bounds(&ir.lo, &ir.hi, places)?;
                let id = inner.derivative_bounds(lo, hi, places)?;
                Some(RatInterval { lo: od.lo * id.lo, hi: od.hi * id.hi })
            }
        }
    }

    /// Exponent of the leading power at 0.
    fn exponent_at_zero(&self) -> BigRational {
        match self {
            Family::Linear { .. } => BigRational::one(),
            Family::Power { p } | Family::ScaledPower { p, .. } => p.clone(),
            Family::Composite { outer, inner } => outer.exponent_at_zero() * inner.exponent_at_zero(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Linear { c } => write!(f, "{}·x", format_rational(c)),
            Family::Power { p } => write!(f, "x^({})", format_rational(p)),
            Family::ScaledPower { c, p } => write!(f, "{}·x^({})", format_rational(c), format_rational(p)),
            Family::Composite { outer, inner } => write!(f, "({outer})∘({inner})"),
        }
    }
}

fn default_delta() -> ExactDecimal {
    ExactDecimal::one()
}

fn default_class() -> FunctionClass {
    FunctionClass::G3
}

/// A control function `f: [0, δ) → [0, ∞)` with a claimed class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlFunction {
    #[serde(flatten)]
    family: Family,
    #[serde(default = "default_delta")]
    delta: ExactDecimal,
    #[serde(default = "default_class")]
    class: FunctionClass,
}

impl ControlFunction {
    pub fn new(family: Family, delta: ExactDecimal, class: FunctionClass) -> Result<Self> {
        family.check_params()?;
        if delta.is_zero() {
            return Err(Error::config("control function domain [0, δ) needs δ > 0"));
        }
        Ok(ControlFunction { family, delta, class })
    }

    /// Parses a JSON descriptor such as
    /// `{"family": "scaled-power", "c": "1/2", "p": "1"}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ControlFunction = serde_json::from_str(text)?;
        f.family.check_params()?;
        if f.delta.is_zero() {
            return Err(Error::config("control function domain [0, δ) needs δ > 0"));
        }
        Ok(f)
    }

    /// `c·x` on `[0, 1)` claimed in G₃.
    pub fn linear(c: BigRational) -> Self {
        ControlFunction::new(Family::linear(c), ExactDecimal::one(), FunctionClass::G3).expect("positive slope")
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn delta(&self) -> &ExactDecimal {
        &self.delta
    }

    pub fn class(&self) -> FunctionClass {
        self.class
    }

    pub fn with_class(mut self, class: FunctionClass) -> Self {
        self.class = class;
        self
    }

    pub fn in_domain(&self, x: &ExactDecimal) -> bool {
        x < &self.delta
    }

    fn check_domain(&self, x: &BigRational) -> Result<()> {
        if x.is_negative() || x >= &self.delta.to_rational() {
            return Err(Error::domain(format!("{} is outside the domain [0, {})", x, self.delta)));
        }
        Ok(())
    }

    pub(crate) fn bounds_at(&self, x: &BigRational, places: u32) -> RatInterval {
        self.family.point_bounds(x, places)
    }

    pub(crate) fn derivative_on(&self, lo: &BigRational, hi: &BigRational, places: u32) -> Option<RatInterval> {
        self.family.derivative_bounds(lo, hi, places)
    }

    /// Certified enclosure of `f(x)` no wider than `width_bound`.
    pub fn eval(&self, x: &ExactDecimal, width_bound: &ExactDecimal) -> Result<Enclosure> {
        if width_bound.is_zero() {
            return Err(Error::domain("eval: width bound must be positive"));
        }
        let xr = x.to_rational();
        self.check_domain(&xr)?;
        let cap = precision_cap();
        let bound = width_bound.to_rational();
        let mut places = START_PLACES.max(width_bound.scale() as u32 + 2).min(cap);
        loop {
            let enc = self.bounds_at(&xr, places).to_enclosure(places + 2);
            if enc.width().to_rational() <= bound {
                return Ok(enc);
            }
            if places >= cap {
                return Err(Error::unresolved(format!("eval {} at {x}: width bound not reached", self.family)));
            }
            places = (places * 2).min(cap);
        }
    }

    /// Exact order of `f(x)` against `threshold`.
    pub fn cmp_certified(&self, x: &ExactDecimal, threshold: &ExactDecimal) -> Result<Ordering> {
        let xr = x.to_rational();
        self.check_domain(&xr)?;
        self.cmp_at(&xr, &threshold.to_rational())
    }

    pub(crate) fn cmp_at(&self, x: &BigRational, t: &BigRational) -> Result<Ordering> {
        refine_cmp(|p| Ok(self.bounds_at(x, p)), t, &|| format!("{}({}) vs {}", self.family, x, t))
    }

    /// Checks monotonicity, positivity and the claimed class inequality on
    /// a deterministic grid. Grid points come in bisection order
    /// (δ/2, δ/4, 3δ/4, δ/8, …) and the first violation is reported.
    pub fn validate_class(&self, samples: usize) -> ClassReport {
        let points = bisection_grid(&self.delta, samples);
        let mut report = ClassReport { claimed: self.class, samples: points.len(), passed: true, violation: None };
        let fail = |report: &mut ClassReport, v: ClassViolation| {
            if report.violation.is_none() {
                report.passed = false;
                report.violation = Some(v);
            }
        };

        if !self.bounds_at(&BigRational::zero(), START_PLACES).hi.is_zero() {
            fail(&mut report, ClassViolation::new(ExactDecimal::zero(), "f(0) = 0", "f(0) ≠ 0"));
        }
        if self.class == FunctionClass::G1 && self.family.exponent_at_zero() > BigRational::one() {
            fail(
                &mut report,
                ClassViolation::new(
                    ExactDecimal::zero(),
                    "lim f(x)/x > 0",
                    &format!("leading exponent {} > 1 sends f(x)/x to 0", format_rational(&self.family.exponent_at_zero())),
                ),
            );
        }
        for x in &points {
            let xr = x.to_rational();
            match self.cmp_at(&xr, &BigRational::zero()) {
                Ok(Ordering::Greater) => {}
                Ok(_) => fail(&mut report, ClassViolation::new(x.clone(), "f(x) > 0", "f(x) ≤ 0")),
                Err(e) => fail(&mut report, ClassViolation::new(x.clone(), "f(x) > 0", &e.to_string())),
            }
            let (want, name) = match self.class {
                FunctionClass::G2 => (Ordering::Greater, "f(x) > x"),
                FunctionClass::G3 => (Ordering::Less, "f(x) < x"),
                _ => continue,
            };
            match self.cmp_at(&xr, &xr) {
                Ok(o) if o == want => {}
                Ok(_) => {
                    let enc = self.bounds_at(&xr, START_PLACES).to_enclosure(START_PLACES);
                    fail(&mut report, ClassViolation::new(x.clone(), name, &format!("f({x}) ∈ [{}, {}]", enc.lo, enc.hi)))
                }
                Err(e) => fail(&mut report, ClassViolation::new(x.clone(), name, &e.to_string())),
            }
        }
        let mut sorted = points.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            let (a, b) = (w[0].to_rational(), w[1].to_rational());
            let what = || format!("monotonicity between {} and {}", w[0], w[1]);
            match refine_cmp_pair(|p| Ok(self.bounds_at(&a, p)), |p| Ok(self.bounds_at(&b, p)), &what) {
                Ok(Ordering::Less) => {}
                Ok(_) => fail(&mut report, ClassViolation::new(w[0].clone(), "increasing", &format!("f({}) ≥ f({})", w[0], w[1]))),
                Err(e) => fail(&mut report, ClassViolation::new(w[0].clone(), "increasing", &e.to_string())),
            }
        }
        report
    }

    /// Smallest `K` with `f(10^(-D)) > 10^(-K)`, i.e. the exact decimal
    /// order of magnitude below `f(10^(-D))`.
    pub(crate) fn decimal_floor_exponent(&self, d: u64) -> Result<u64> {
        let x = pow10_neg(d);
        let enc = refine_positive(|p| Ok(self.bounds_at(&x, p)))?;
        // 10^(-k) < lo certifies f(10^-d) > 10^(-k)
        let mut k = 0u64;
        while pow10_neg(k) >= enc {
            k += 1;
        }
        // the lower bound may sit just under a power of ten
        while k > 0 && self.cmp_at(&x, &pow10_neg(k - 1))? == Ordering::Greater {
            k -= 1;
        }
        Ok(k)
    }
}

/// Refines until the lower bound is strictly positive; returns it.
fn refine_positive<F>(mut enclose: F) -> Result<BigRational>
where
    F: FnMut(u32) -> Result<RatInterval>,
{
    let cap = precision_cap();
    let mut places = START_PLACES.min(cap);
    loop {
        let e = enclose(places)?;
        if e.lo.is_positive() {
            return Ok(e.lo);
        }
        if places >= cap {
            return Err(Error::unresolved("positive lower bound not reached"));
        }
        places = (places * 2).min(cap);
    }
}

fn bisection_grid(delta: &ExactDecimal, samples: usize) -> Vec<ExactDecimal> {
    let mut out = Vec::with_capacity(samples);
    let mut level = 1u32;
    while out.len() < samples && level < 60 {
        let den = 1u64 << level;
        let mut j = 1u64;
        while j < den && out.len() < samples {
            // δ·j/2^level is a terminating decimal
            let frac = ExactDecimal::from_rational_exact(&crate::numeric::ratio(j as i64, den as i64))
                .expect("dyadic rationals terminate");
            out.push(delta.mul(&frac));
            j += 2;
        }
        level += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassViolation {
    pub witness: ExactDecimal,
    pub condition: String,
    pub detail: String,
}

impl ClassViolation {
    fn new(witness: ExactDecimal, condition: &str, detail: &str) -> Self {
        ClassViolation { witness, condition: condition.to_string(), detail: detail.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub claimed: FunctionClass,
    pub samples: usize,
    pub passed: bool,
    pub violation: Option<ClassViolation>,
}
