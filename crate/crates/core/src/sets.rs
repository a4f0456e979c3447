//! The closed sets `A(B₁, …, B_{N²}, ε)`: points whose first `N²` blocks
//! are `B₁, …, B_{N²}` (A1) and whose maximal-block count in every range
//! `n ≥ N` satisfies `1 − ε/n^α ≤ C(x, n)/(2n+1) < 1` (A2).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::control::{rational_str, Enclosure, RatInterval};
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::expansion::MultiExpansion;
use crate::intervals::{Interval, IntervalUnion};
use crate::numeric::{cmp_power, format_rational, int, pow_bounds, ratio};

/// Default node budget for outer approximations.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

pub(crate) mod biguint_strs {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|b| b.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.trim().parse::<BigUint>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Range index `n` of block `k ≥ 1`: `n² < k ≤ (n+1)²`.
pub fn range_of(k: usize) -> usize {
    (k - 1).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ASetSpec {
    expansion: MultiExpansion,
    #[serde(rename = "N")]
    n: usize,
    #[serde(with = "rational_str")]
    eps: BigRational,
    #[serde(with = "rational_str")]
    alpha: BigRational,
    #[serde(with = "biguint_strs")]
    prefix: Vec<BigUint>,
}

#[derive(Deserialize)]
struct RawSpec {
    expansion: MultiExpansion,
    #[serde(rename = "N")]
    n: usize,
    #[serde(with = "rational_str")]
    eps: BigRational,
    #[serde(with = "rational_str")]
    alpha: BigRational,
    #[serde(with = "biguint_strs")]
    prefix: Vec<BigUint>,
}

impl TryFrom<RawSpec> for ASetSpec {
    type Error = Error;

    fn try_from(r: RawSpec) -> Result<Self> {
        ASetSpec::new(r.expansion, r.n, r.eps, r.alpha, r.prefix)
    }
}

impl ASetSpec {
    pub fn new(
        expansion: MultiExpansion,
        n: usize,
        eps: BigRational,
        alpha: BigRational,
        prefix: Vec<BigUint>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("N must be positive"));
        }
        if !eps.is_positive() {
            return Err(Error::config("ε must be positive"));
        }
        if alpha <= ratio(1, 2) || alpha >= int(1) {
            return Err(Error::config(format!("α = {} is outside (1/2, 1)", format_rational(&alpha))));
        }
        if prefix.len() != n * n {
            return Err(Error::config(format!("prefix has {} blocks, N² = {}", prefix.len(), n * n)));
        }
        if expansion.blocks() < n * n {
            return Err(Error::depth(format!("expansion has {} blocks, N² = {}", expansion.blocks(), n * n)));
        }
        for (i, b) in prefix.iter().enumerate() {
            if b > &expansion.max_value(i + 1) {
                return Err(Error::config(format!("B_{} = {b} exceeds 10^{} − 1", i + 1, expansion.d(i + 1))));
            }
        }
        Ok(ASetSpec { expansion, n, eps, alpha, prefix })
    }

    /// All `N²` prefix blocks zero.
    pub fn zero_prefix(expansion: MultiExpansion, n: usize, eps: BigRational, alpha: BigRational) -> Result<Self> {
        ASetSpec::new(expansion, n, eps, alpha, vec![BigUint::zero(); n * n])
    }

    pub fn expansion(&self) -> &MultiExpansion {
        &self.expansion
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> &BigRational {
        &self.eps
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    /// Deepest range index whose blocks the expansion covers.
    pub fn max_depth(&self) -> usize {
        (self.expansion.blocks() + 1).sqrt().saturating_sub(1).max(0)
    }

    /// `N > (1+ε)^(1/α)` and `N > ε^(1/(α−1))`, decided exactly.
    pub fn validate(&self) -> ValidityReport {
        let n = int(self.n as i64);
        // N > (1+ε)^(1/α) ⇔ N^α > 1+ε
        let one_plus = &self.eps + BigRational::one();
        let first = cmp_power(&n, &self.alpha, &one_plus) == Ordering::Greater;
        // N > ε^(1/(α−1)) ⇔ N^(α−1) < ε, since α − 1 < 0
        let am1 = &self.alpha - BigRational::one();
        let second = cmp_power(&n, &am1, &self.eps) == Ordering::Less;
        let (a, b) = (self.alpha.numer().to_string(), self.alpha.denom().to_string());
        let constraints = vec![
            Constraint {
                name: "N > (1+ε)^(1/α)".into(),
                holds: first,
                detail: format!(
                    "N^{a} = {} vs (1+ε)^{b} = {}",
                    crate::numeric::powi(&n, self.alpha.numer().to_u64().unwrap_or(0)),
                    format_rational(&crate::numeric::powi(&one_plus, self.alpha.denom().to_u64().unwrap_or(0)))
                ),
            },
            Constraint {
                name: "N > ε^(1/(α−1))".into(),
                holds: second,
                detail: format!("N^({}) vs ε = {}", format_rational(&am1), format_rational(&self.eps)),
            },
        ];
        let binding = constraints.iter().find(|c| !c.holds).map(|c| c.name.clone());
        ValidityReport { passed: first && second, constraints, binding }
    }

    /// Largest `e ≤ 2n+1` with `e·n^α ≤ ε(2n+1)`.
    fn e_max(&self, n: usize) -> usize {
        let nn = int(n as i64);
        let total = &self.eps * int(2 * n as i64 + 1);
        let ok = |e: usize| e == 0 || cmp_power(&nn, &self.alpha, &(&total / int(e as i64))) != Ordering::Greater;
        let (mut lo, mut hi) = (0usize, 2 * n + 1);
        if ok(hi) {
            return hi;
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Smallest admissible `C(x, n)`; `2n+1` means no integer is admissible.
    pub fn floor_count(&self, n: usize) -> usize {
        2 * n + 1 - self.e_max(n)
    }

    /// `I_n = [(1 − ε/n^α)(2n+1), 2n+1)` and the integers inside it.
    pub fn block_interval(&self, n: usize) -> Result<BlockInterval> {
        if n < self.n {
            return Err(Error::domain(format!("I_n is defined for n ≥ N = {}", self.n)));
        }
        let places = 30;
        let (plo, phi) = pow_bounds(&int(n as i64), &self.alpha, places);
        let w = int(2 * n as i64 + 1);
        let bounds = RatInterval {
            lo: (BigRational::one() - &self.eps / &plo) * &w,
            hi: (BigRational::one() - &self.eps / &phi) * &w,
        };
        let lower = signed_enclosure(&bounds, places);
        let first = self.floor_count(n);
        let admissible: Vec<usize> = (first..=2 * n).collect();
        Ok(BlockInterval { n, lower, upper: 2 * n + 1, admissible })
    }

    fn check_a1(&self, x: &ExactDecimal) -> Option<Violation> {
        for k in 1..=self.n * self.n {
            let b = self.expansion.multi_digit(x, k).expect("prefix blocks exist");
            if b != self.prefix[k - 1] {
                return Some(Violation::Prefix { block: k, expected: self.prefix[k - 1].to_string(), found: b.to_string() });
            }
        }
        None
    }

    /// Three-valued membership: conditions (A1) and (A2) for ranges
    /// `N ≤ n ≤ depth`.
    pub fn membership(&self, x: &ExactDecimal, depth: usize) -> Verdict {
        if !x.is_zero() && !x.in_unit_interval() {
            return Verdict::Out { violation: Violation::OutOfRange { value: x.clone() } };
        }
        if let Some(v) = self.check_a1(x) {
            return Verdict::Out { violation: v };
        }
        for n in self.n..=depth {
            if (n + 1) * (n + 1) > self.expansion.blocks() {
                return Verdict::Unknown {
                    depth: n - 1,
                    reason: format!("range {n} needs {} blocks, expansion has {}", (n + 1) * (n + 1), self.expansion.blocks()),
                };
            }
            let (c, _) = self.expansion.stats_unchecked(x, n);
            if c == 2 * n + 1 {
                return Verdict::Out { violation: Violation::Upper { n } };
            }
            let floor = self.floor_count(n);
            if c < floor {
                return Verdict::Out { violation: Violation::Lower { n, count: c, floor } };
            }
        }
        Verdict::In { depth }
    }

    fn blocks_for_depth(&self, depth: usize) -> usize {
        if depth >= self.n {
            (depth + 1) * (depth + 1)
        } else {
            self.n * self.n
        }
    }

    /// Builds a point satisfying (A1) and (A2) for every range up to `depth`.
    pub fn generate_witness(&self, depth: usize, strategy: Strategy, seed: u64) -> Result<Witness> {
        self.complete(self.prefix.clone(), depth, strategy, seed)
    }

    /// Completes fixed leading blocks (at least the prefix) range by range.
    fn complete(&self, mut blocks: Vec<BigUint>, depth: usize, strategy: Strategy, seed: u64) -> Result<Witness> {
        let total = self.blocks_for_depth(depth);
        if total > self.expansion.blocks() {
            return Err(Error::depth(format!(
                "depth {depth} needs {total} blocks, expansion has {}",
                self.expansion.blocks()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = Vec::new();
        for n in self.n..=depth {
            let (lo_k, hi_k) = (n * n + 1, (n + 1) * (n + 1));
            let fixed_to = blocks.len().min(hi_k);
            let c_fixed = (lo_k..=fixed_to).filter(|&k| blocks[k - 1] == self.expansion.max_value(k)).count();
            let free: Vec<usize> = (fixed_to.max(lo_k - 1) + 1..=hi_k).collect();
            let lo_c = self.floor_count(n).max(c_fixed);
            let hi_c = (2 * n).min(c_fixed + free.len());
            if lo_c > hi_c {
                return Err(Error::domain(format!("range {n}: no admissible count given the fixed blocks")));
            }
            let c = match strategy {
                Strategy::MaxC => hi_c,
                Strategy::MinC => lo_c,
                Strategy::SeededRandom => rng.random_range(lo_c..=hi_c),
            };
            let need = c - c_fixed;
            let mut maximal = vec![false; free.len()];
            match strategy {
                Strategy::SeededRandom => sample(&mut rng, free.len(), need).into_iter().for_each(|i| maximal[i] = true),
                _ => maximal[..need].iter_mut().for_each(|m| *m = true),
            }
            for (i, &k) in free.iter().enumerate() {
                let v = if maximal[i] { self.expansion.max_value(k) } else { self.fill_value(k, strategy, &mut rng) };
                debug_assert_eq!(blocks.len() + 1, k);
                blocks.push(v);
            }
            counts.push(RangeCount { n, c });
        }
        let x = self.expansion.compose(&blocks)?;
        let verdict = self.membership(&x, depth);
        Ok(Witness { x, depth, strategy, counts, verdict })
    }

    /// Non-maximal filler: `1` for the deterministic strategies, random
    /// nonzero otherwise (nonzero fillers stop borrows in subtractions).
    fn fill_value(&self, k: usize, strategy: Strategy, rng: &mut ChaCha8Rng) -> BigUint {
        match strategy {
            Strategy::SeededRandom => {
                let top = self.expansion.max_value(k) - 1u32;
                let cap = top.to_u64().unwrap_or(u64::MAX / 2).max(1);
                BigUint::from(rng.random_range(1..=cap))
            }
            _ => BigUint::one(),
        }
    }

    /// Sound cover of the set by closed cylinders at block `(depth+1)²`.
    pub fn outer_approx(&self, depth: usize, budget: usize) -> Result<IntervalUnion> {
        let window = (ExactDecimal::zero(), ExactDecimal::one());
        self.outer_approx_in(depth, &window, self.blocks_for_depth(depth), budget)
    }

    /// Sound cover of `F ∩ [a, b]`: cylinders of every block prefix through
    /// `resolution_block` that meets `[a, b]` and can still be completed
    /// under (A1) and (A2) for ranges up to `depth`.
    pub fn outer_approx_in(
        &self,
        depth: usize,
        window: &(ExactDecimal, ExactDecimal),
        resolution_block: usize,
        budget: usize,
    ) -> Result<IntervalUnion> {
        let last = resolution_block.min(self.blocks_for_depth(depth));
        if last > self.expansion.blocks() {
            return Err(Error::depth(format!("resolution block {last} beyond the expansion")));
        }
        let mut walk = Walk::new(self, depth, window, budget);
        let inside = walk.cylinder_inside(&BigUint::zero(), 0);
        walk.cover(1, BigUint::zero(), 0, inside, last)?;
        Ok(IntervalUnion::from_parts(walk.out))
    }

    /// A witness lying in the open window `(a, b)`, or `None` when no
    /// point of the set is there. The witness satisfies (A2) through
    /// `depth` or one range past the blocks the window pins down.
    pub fn witness_in_window(
        &self,
        depth: usize,
        window: &(ExactDecimal, ExactDecimal),
        strategy: Strategy,
        seed: u64,
        budget: usize,
    ) -> Result<Option<Witness>> {
        let mut walk = Walk::new(self, usize::MAX, window, budget);
        let mut path = Vec::new();
        if !walk.find_inside(1, BigUint::zero(), 0, &mut path, strategy)? {
            return Ok(None);
        }
        let pinned = path.len().max(self.n * self.n);
        let depth = depth.max(range_of(pinned) + 1);
        let w = self.complete(path, depth, strategy, seed)?;
        Ok(Some(w))
    }
}

fn signed_enclosure(r: &RatInterval, places: u32) -> Enclosure {
    // the lower end of I_n can be negative for small n; report it clamped
    r.to_enclosure(places)
}

/// Depth-first walk over block prefixes restricted to a window.
struct Walk<'a> {
    spec: &'a ASetSpec,
    depth: usize,
    a: ExactDecimal,
    b: ExactDecimal,
    budget: usize,
    nodes: usize,
    floors: Vec<usize>,
    out: Vec<Interval>,
}

impl<'a> Walk<'a> {
    fn new(spec: &'a ASetSpec, depth: usize, window: &(ExactDecimal, ExactDecimal), budget: usize) -> Self {
        Walk { spec, depth, a: window.0.clone(), b: window.1.clone(), budget, nodes: 0, floors: Vec::new(), out: Vec::new() }
    }

    fn floor(&mut self, n: usize) -> usize {
        while self.floors.len() <= n {
            let m = self.floors.len();
            let f = if m < self.spec.n { 0 } else { self.spec.floor_count(m) };
            self.floors.push(f);
        }
        self.floors[n]
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::budget(format!("outer approximation exceeded {} nodes", self.budget)));
        }
        Ok(())
    }

    /// `[p, p+1]·10^(-D)` inside the window.
    fn cylinder_inside(&self, p: &BigUint, digits: usize) -> bool {
        let lo = ExactDecimal::from_parts(p, digits);
        let hi = ExactDecimal::from_parts(&(p + 1u32), digits);
        self.a <= lo && hi <= self.b
    }

    /// Values `v` at block `k` (prefix value `base`) whose cylinder meets
    /// the window, as an inclusive range.
    fn window_values(&self, k: usize, base: &BigUint) -> Option<(BigUint, BigUint)> {
        let me = &self.spec.expansion;
        let dk = me.big_d(k);
        let p = base * BigUint::from(10u32).pow(me.d(k) as u32);
        let (_, a_ceil) = scaled(&self.a, dk);
        let (b_floor, _) = scaled(&self.b, dk);
        // p + v + 1 ≥ ceil(a·10^D) and p + v ≤ floor(b·10^D)
        let lo = if a_ceil > &p + 1u32 { a_ceil - &p - 1u32 } else { BigUint::zero() };
        if b_floor < p {
            return None;
        }
        let hi = (b_floor - &p).min(me.max_value(k));
        (lo <= hi).then_some((lo, hi))
    }

    /// Allowed (maximal?, count after) options at block `k` with `c`
    /// maximal blocks so far in its range.
    fn options(&mut self, k: usize, c: usize) -> (Option<usize>, Option<usize>) {
        let spec = self.spec;
        if k <= spec.n * spec.n {
            return (None, None);
        }
        let n = range_of(k);
        if n > self.depth {
            return (Some(0), Some(0));
        }
        let c = if k == n * n + 1 { 0 } else { c };
        let left = (n + 1) * (n + 1) - k;
        let floor = self.floor(n);
        let with_max = (c + 1 <= 2 * n && c + 1 + left >= floor).then_some(c + 1);
        let without = (c + left >= floor).then_some(c);
        (with_max, without)
    }

    fn cover(&mut self, k: usize, base: BigUint, c: usize, inside: bool, last: usize) -> Result<()> {
        self.tick()?;
        let spec = self.spec;
        let me = &spec.expansion;
        let (lo, hi) = if inside {
            (BigUint::zero(), me.max_value(k))
        } else {
            match self.window_values(k, &base) {
                Some(r) => r,
                None => return Ok(()),
            }
        };
        let shift = BigUint::from(10u32).pow(me.d(k) as u32);
        let p = &base * &shift;
        let maxv = me.max_value(k);

        if k <= spec.n * spec.n {
            let v = &spec.prefix[k - 1];
            if v < &lo || v > &hi {
                return Ok(());
            }
            return self.descend(k, &p + v, c, inside, last);
        }
        let (with_max, without) = self.options(k, c);
        if k == last {
            if let Some(_) = without {
                let top = (&maxv - 1u32).min(hi.clone());
                if lo <= top {
                    self.emit(&(&p + &lo), &(&p + &top + 1u32), me.big_d(k));
                }
            }
            if with_max.is_some() && lo <= maxv && maxv <= hi {
                self.emit(&(&p + &maxv), &(&p + &maxv + 1u32), me.big_d(k));
            }
            return Ok(());
        }
        if let Some(c2) = with_max {
            if lo <= maxv && maxv <= hi {
                self.descend(k, &p + &maxv, c2, inside, last)?;
            }
        }
        if let Some(c2) = without {
            let top = (&maxv - 1u32).min(hi);
            let mut v = lo;
            while v <= top {
                self.descend(k, &p + &v, c2, inside, last)?;
                v += 1u32;
            }
        }
        Ok(())
    }

    fn descend(&mut self, k: usize, value: BigUint, c: usize, inside: bool, last: usize) -> Result<()> {
        if k == last {
            let d = self.spec.expansion.big_d(k);
            self.emit(&value, &(&value + 1u32), d);
            return Ok(());
        }
        let inside = inside || self.cylinder_inside(&value, self.spec.expansion.big_d(k));
        self.cover(k + 1, value, c, inside, last)
    }

    fn emit(&mut self, lo: &BigUint, hi: &BigUint, digits: usize) {
        self.out.push(Interval::closed(ExactDecimal::from_parts(lo, digits), ExactDecimal::from_parts(hi, digits)));
    }

    /// Finds block values whose cylinder lies inside the window.
    fn find_inside(&mut self, k: usize, base: BigUint, c: usize, path: &mut Vec<BigUint>, strategy: Strategy) -> Result<bool> {
        self.tick()?;
        let spec = self.spec;
        let me = &spec.expansion;
        if k > 1 && self.cylinder_inside(&base, me.big_d(k - 1)) && path.len() >= spec.n * spec.n {
            return Ok(true);
        }
        if k > me.blocks() {
            return Ok(false);
        }
        let (lo, hi) = match self.window_values(k, &base) {
            Some(r) => r,
            None => return Ok(false),
        };
        let p = &base * BigUint::from(10u32).pow(me.d(k) as u32);
        let maxv = me.max_value(k);
        let mut candidates: Vec<(BigUint, usize)> = Vec::new();
        if k <= spec.n * spec.n {
            let v = spec.prefix[k - 1].clone();
            if lo <= v && v <= hi {
                candidates.push((v, 0));
            }
        } else {
            let (with_max, without) = self.options(k, c);
            let max_ok = with_max.filter(|_| lo <= maxv && maxv <= hi);
            // try at most a handful of non-maximal values per block: the
            // window pins the value except at its two ends
            let mut others = Vec::new();
            if let Some(c2) = without {
                let top = (&maxv - 1u32).min(hi.clone());
                let mut v = lo.clone();
                while v <= top && others.len() < 4 {
                    if !v.is_zero() || spec.n * spec.n >= k {
                        others.push((v.clone(), c2));
                    }
                    v += 1u32;
                }
                if others.is_empty() && lo <= top {
                    others.push((lo.clone(), c2));
                }
            }
            if let (Strategy::MaxC, Some(c2)) = (strategy, max_ok) {
                candidates.push((maxv.clone(), c2));
                candidates.extend(others);
            } else {
                candidates.extend(others);
                if let Some(c2) = max_ok {
                    candidates.push((maxv.clone(), c2));
                }
            }
        }
        for (v, c2) in candidates {
            path.push(v.clone());
            if self.find_inside(k + 1, &p + &v, c2, path, strategy)? {
                return Ok(true);
            }
            path.pop();
        }
        Ok(false)
    }
}

/// `(floor(x·10^D), ceil(x·10^D))`.
fn scaled(x: &ExactDecimal, digits: usize) -> (BigUint, BigUint) {
    let m = x.mantissa();
    let s = x.scale();
    if s <= digits {
        let v = m * BigUint::from(10u32).pow((digits - s) as u32);
        (v.clone(), v)
    } else {
        let div = BigUint::from(10u32).pow((s - digits) as u32);
        let q = &m / &div;
        let exact = (&q * &div) == m;
        let c = if exact { q.clone() } else { &q + 1u32 };
        (q, c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "max-C")]
    MaxC,
    #[serde(rename = "min-C")]
    MinC,
    #[serde(rename = "seeded-random")]
    SeededRandom,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max-c" => Ok(Strategy::MaxC),
            "min-c" => Ok(Strategy::MinC),
            "seeded-random" | "random" => Ok(Strategy::SeededRandom),
            _ => Err(Error::config(format!("unknown witness strategy {s:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::MaxC => "max-C",
            Strategy::MinC => "min-C",
            Strategy::SeededRandom => "seeded-random",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum Violation {
    /// (A1): `b_block(x) ≠ B_block`
    Prefix { block: usize, expected: String, found: String },
    /// (A2) lower bound: `C(x, n) < floor`
    Lower { n: usize, count: usize, floor: usize },
    /// (A2) upper bound: every block of range `n` is maximal
    Upper { n: usize },
    OutOfRange { value: ExactDecimal },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    /// (A1) and (A2) hold for every range up to `depth`.
    In { depth: usize },
    Out { violation: Violation },
    /// Checked through `depth` only; the expansion ends there.
    Unknown { depth: usize, reason: String },
}

impl Verdict {
    pub fn is_in(&self) -> bool {
        matches!(self, Verdict::In { .. })
    }

    pub fn is_out(&self) -> bool {
        matches!(self, Verdict::Out { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub passed: bool,
    pub constraints: Vec<Constraint>,
    /// First violated constraint.
    pub binding: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockInterval {
    pub n: usize,
    /// Enclosure of `(1 − ε/n^α)(2n+1)`, clamped at 0.
    pub lower: Enclosure,
    pub upper: usize,
    pub admissible: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeCount {
    pub n: usize,
    pub c: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: ExactDecimal,
    pub depth: usize,
    pub strategy: Strategy,
    pub counts: Vec<RangeCount>,
    pub verdict: Verdict,
}
