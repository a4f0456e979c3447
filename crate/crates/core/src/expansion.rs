//! Multi-digit expansions: decimal digits grouped into blocks of sizes
//! `d₁, d₂, …` with `D_n = d₁ + … + d_n`, block values `b_n(x)`, and the
//! per-range counts `C(x, n)` (maximal blocks) and `E(x, n)` (the rest)
//! over `n² < k ≤ (n+1)²`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::control::ControlFunction;
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::numeric::pow10_neg;
use crate::sequence::PorositySequence;

/// Term budget used when the coupled construction extends the sequence.
pub const DEFAULT_TERM_BUDGET: usize = 1500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionMode {
    Explicit,
    Coupled,
}

/// Why block `index` of a coupled expansion has the size it has.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProvenance {
    pub index: usize,
    pub d: usize,
    #[serde(rename = "D")]
    pub big_d: usize,
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reach: Option<ReachCheck>,
}

/// `d_{n+1} > d_n`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub previous: usize,
    pub holds: bool,
}

/// `g(10^(-D_n)) > 10^(-D_{n+1})`, with a certified lower bound of the
/// left side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapCheck {
    pub g_lower_bound: ExactDecimal,
    pub threshold: ExactDecimal,
    pub holds: bool,
}

/// `D_{n+1} > max(max{l(x_k): b_n(x_k) ≠ 0}, l(x_{k₀+1}))` with
/// `k₀ = max{k: b_n(x_k) ≠ 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachCheck {
    pub k0: Option<usize>,
    pub max_length: usize,
    pub next_length: Option<usize>,
    /// Set when no term has a nonzero block `n`; the maximum over the empty
    /// set is taken as 0 and the `l(x_{k₀+1})` clause is skipped.
    pub empty_set_guard: bool,
    pub terms_scanned: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiExpansion {
    mode: ExpansionMode,
    d: Vec<usize>,
    #[serde(rename = "D")]
    big_d: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<BlockProvenance>,
}

impl MultiExpansion {
    pub fn from_explicit(d: Vec<usize>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::domain("block sizes: empty list"));
        }
        if let Some(i) = d.iter().position(|&k| k == 0) {
            return Err(Error::domain(format!("block sizes: d_{} = 0", i + 1)));
        }
        let big_d = prefix_sums(&d);
        Ok(MultiExpansion { mode: ExpansionMode::Explicit, d, big_d, provenance: Vec::new() })
    }

    /// `blocks` blocks of the same size.
    pub fn constant(size: usize, blocks: usize) -> Result<Self> {
        Self::from_explicit(vec![size; blocks])
    }

    pub fn mode(&self) -> ExpansionMode {
        self.mode
    }

    pub fn provenance(&self) -> &[BlockProvenance] {
        &self.provenance
    }

    pub fn sizes(&self) -> &[usize] {
        &self.d
    }

    pub fn blocks(&self) -> usize {
        self.d.len()
    }

    /// `d_n`, 1-based.
    pub fn d(&self, n: usize) -> usize {
        self.d[n - 1]
    }

    /// `D_n` with `D_0 = 0`.
    pub fn big_d(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.big_d[n - 1]
        }
    }

    /// Total digits covered by all blocks.
    pub fn digits(&self) -> usize {
        self.big_d(self.blocks())
    }

    fn need(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.blocks() {
            return Err(Error::depth(format!("block {n} requested, expansion has {}", self.blocks())));
        }
        Ok(())
    }

    fn check_unit(x: &ExactDecimal) -> Result<()> {
        if !x.is_zero() && !x.in_unit_interval() {
            return Err(Error::domain(format!("{x} is not in [0, 1)")));
        }
        Ok(())
    }

    /// `b_n(x)`.
    pub fn multi_digit(&self, x: &ExactDecimal, n: usize) -> Result<BigUint> {
        self.need(n)?;
        Self::check_unit(x)?;
        let digits = x.frac_digits(self.big_d(n - 1) + 1, self.big_d(n));
        Ok(BigUint::from_radix_be(&digits, 10).unwrap_or_default())
    }

    /// `b_n(x) = 10^(d_n) − 1`. No bounds checks.
    pub(crate) fn is_max_block(&self, x: &ExactDecimal, n: usize) -> bool {
        (self.big_d(n - 1) + 1..=self.big_d(n)).all(|i| x.frac_digit(i) == 9)
    }

    /// `b_n(x) = 0`. No bounds checks.
    pub(crate) fn is_zero_block(&self, x: &ExactDecimal, n: usize) -> bool {
        if self.big_d(n - 1) >= x.scale() {
            return true;
        }
        (self.big_d(n - 1) + 1..=self.big_d(n)).all(|i| x.frac_digit(i) == 0)
    }

    pub fn is_maximal(&self, x: &ExactDecimal, n: usize) -> Result<bool> {
        self.need(n)?;
        Self::check_unit(x)?;
        Ok(self.is_max_block(x, n))
    }

    /// `(C(x, n), E(x, n))`.
    pub fn block_stats(&self, x: &ExactDecimal, n: usize) -> Result<(usize, usize)> {
        if n == 0 {
            return Err(Error::domain("block ranges start at n = 1"));
        }
        self.need((n + 1) * (n + 1))?;
        Self::check_unit(x)?;
        Ok(self.stats_unchecked(x, n))
    }

    pub(crate) fn stats_unchecked(&self, x: &ExactDecimal, n: usize) -> (usize, usize) {
        let c = (n * n + 1..=(n + 1) * (n + 1)).filter(|&k| self.is_max_block(x, k)).count();
        (c, 2 * n + 1 - c)
    }

    /// Block containing digit position `i ≥ 1`.
    pub fn block_of_digit(&self, i: usize) -> Option<usize> {
        let k = self.big_d.partition_point(|&dk| dk < i);
        (k < self.blocks()).then_some(k + 1)
    }

    /// Indices of the nonzero blocks of `x`; `x` must fit inside the blocks.
    pub fn nonzero_blocks(&self, x: &ExactDecimal) -> Result<Vec<usize>> {
        Self::check_unit(x)?;
        if x.scale() > self.digits() {
            return Err(Error::depth(format!("{x} has {} digits, blocks cover {}", x.scale(), self.digits())));
        }
        let last = if x.is_zero() { 0 } else { self.block_of_digit(x.scale()).expect("fits") };
        Ok((1..=last).filter(|&k| !self.is_zero_block(x, k)).collect())
    }

    /// Assembles `Σ b_k·10^(-D_k)` from block values.
    pub fn compose(&self, values: &[BigUint]) -> Result<ExactDecimal> {
        if values.len() > self.blocks() {
            return Err(Error::depth(format!("{} block values for {} blocks", values.len(), self.blocks())));
        }
        let mut digits = Vec::with_capacity(self.big_d(values.len()));
        for (i, v) in values.iter().enumerate() {
            let size = self.d[i];
            let raw = if v.is_zero() { Vec::new() } else { v.to_radix_be(10) };
            if raw.len() > size {
                return Err(Error::domain(format!("b_{} = {v} does not fit in {size} digits", i + 1)));
            }
            digits.extend(std::iter::repeat_n(0u8, size - raw.len()));
            digits.extend_from_slice(&raw);
        }
        Ok(ExactDecimal::from_fraction_digits(&digits))
    }

    /// `10^(d_n) − 1`.
    pub fn max_value(&self, n: usize) -> BigUint {
        BigUint::from(10u32).pow(self.d(n) as u32) - 1u32
    }

    /// Certifies `g(10^(-D_n)) > 10^(-D_{n+1})` for block `n + 1`.
    pub fn check_gap_condition(&self, g: &ControlFunction, n: usize) -> Result<GapCheck> {
        self.need(n + 1)?;
        gap_check(g, self.big_d(n), self.big_d(n + 1))
    }

    /// Builds `blocks` block sizes from `f`'s sequence and `g`; stops early
    /// (returning what was certified and the reason) when the sequence
    /// would need more than `term_budget` terms.
    pub fn construct_coupled_partial(
        g: &ControlFunction,
        seq: &mut PorositySequence,
        blocks: usize,
        term_budget: usize,
    ) -> (MultiExpansion, Option<Error>) {
        let mut me = MultiExpansion { mode: ExpansionMode::Coupled, d: Vec::new(), big_d: Vec::new(), provenance: Vec::new() };
        let x1 = seq.terms()[0].clone();
        let d1 = match (1..=x1.scale()).find(|&i| x1.frac_digit(i) != 0) {
            Some(p) if x1.in_unit_interval() => p,
            _ => return (me, Some(Error::domain(format!("x1 = {x1} is not in (0,1)")))),
        };
        me.push(d1, "first nonzero digit of x1".into(), None, None, None);
        while me.blocks() < blocks {
            match me.next_coupled(g, seq, term_budget) {
                Ok(()) => {}
                Err(e) => return (me, Some(e)),
            }
        }
        (me, None)
    }

    pub fn construct_coupled(
        g: &ControlFunction,
        seq: &mut PorositySequence,
        blocks: usize,
        term_budget: usize,
    ) -> Result<MultiExpansion> {
        match Self::construct_coupled_partial(g, seq, blocks, term_budget) {
            (me, None) => Ok(me),
            (_, Some(e)) => Err(e),
        }
    }

    fn push(&mut self, d: usize, rule: String, growth: Option<GrowthCheck>, gap: Option<GapCheck>, reach: Option<ReachCheck>) {
        let big_d = self.digits() + d;
        self.d.push(d);
        self.big_d.push(big_d);
        self.provenance.push(BlockProvenance { index: self.d.len(), d, big_d, rule, growth, gap, reach });
    }

    fn next_coupled(&mut self, g: &ControlFunction, seq: &mut PorositySequence, budget: usize) -> Result<()> {
        let n = self.blocks();
        let (dn, big_dn) = (self.d(n), self.big_d(n));

        // bullet 2 alone: smallest K with g(10^-D_n) > 10^-K
        let k = g.decimal_floor_exponent(big_dn as u64)? as usize;
        let from_gap = k.saturating_sub(big_dn);

        // bullet 3: every term with b_n ≠ 0 is ≥ 10^-D_n, so extend the
        // sequence until it drops below that
        let floor = pow10_neg(big_dn as u64);
        loop {
            let last = seq.terms().last().expect("nonempty");
            if last.to_rational() < floor {
                break;
            }
            if seq.len() >= budget {
                return Err(Error::budget(format!(
                    "block {}: the third condition (D_{} above the lengths of all x_k with b_{n}(x_k) ≠ 0 and of x_{{k0+1}}) \
                     needs terms below 10^-{big_dn}; {budget} terms reach only x_{budget} ≈ {}… ({} digits)",
                    n + 1,
                    n + 1,
                    last.truncate(big_dn.max(12)),
                    last.scale()
                )));
            }
            seq.extend_to(seq.len() + 1)?;
        }
        let reach = self.reach_bound(seq, n)?;
        let from_reach = (reach.max_length.max(reach.next_length.unwrap_or(0)) + 1).saturating_sub(big_dn);

        let d = (dn + 1).max(from_gap).max(from_reach).max(1);
        let big_next = big_dn + d;
        let gap = gap_check(g, big_dn, big_next)?;
        let reach = ReachCheck { holds: big_next > reach.max_length.max(reach.next_length.unwrap_or(0)), ..reach };
        let growth = GrowthCheck { previous: dn, holds: d > dn };
        if !(gap.holds && reach.holds && growth.holds) {
            return Err(Error::unresolved(format!("block {}: chosen size {d} failed re-verification", n + 1)));
        }
        self.push(d, "smallest size meeting all three conditions".into(), Some(growth), Some(gap), Some(reach));
        Ok(())
    }

    /// Scans the terms `≥ 10^-D_n` for nonzero `b_n`.
    fn reach_bound(&self, seq: &PorositySequence, n: usize) -> Result<ReachCheck> {
        let floor = pow10_neg(self.big_d(n) as u64);
        let mut k0 = None;
        let mut max_length = 0;
        let mut scanned = 0;
        for (i, x) in seq.terms().iter().enumerate() {
            if x.to_rational() < floor {
                break;
            }
            scanned += 1;
            if !self.is_zero_block(x, n) {
                k0 = Some(i + 1);
                max_length = max_length.max(x.length()?);
            }
        }
        let next_length = match k0 {
            Some(k) => Some(seq.term(k + 1).ok_or_else(|| Error::budget("x_{k0+1} not constructed"))?.length()?),
            None => None,
        };
        Ok(ReachCheck { k0, max_length, next_length, empty_set_guard: k0.is_none(), terms_scanned: scanned, holds: false })
    }

    /// One-or-two-consecutive nonzero blocks per term and the max-shift
    /// property; terms longer than the blocks are skipped.
    pub fn structure_report(&self, seq: &PorositySequence) -> StructureReport {
        self.structure_report_terms(seq.terms())
    }

    pub fn structure_report_terms(&self, terms: &[ExactDecimal]) -> StructureReport {
        let mut entries = Vec::new();
        let mut skipped = 0;
        let mut prev_top: Option<usize> = None;
        for (i, x) in terms.iter().enumerate() {
            let blocks = match self.nonzero_blocks(x) {
                Ok(b) => b,
                Err(_) => {
                    skipped += 1;
                    prev_top = None;
                    continue;
                }
            };
            let shape = match blocks.as_slice() {
                [_] => true,
                [a, b] => b == &(a + 1),
                _ => false,
            };
            let top = blocks.last().copied();
            let shift = match (prev_top, top) {
                (Some(p), Some(t)) => t <= p + 1,
                _ => true,
            };
            entries.push(StructureEntry { n: i + 1, nonzero_blocks: blocks, shape, shift });
            prev_top = top;
        }
        let passed = entries.iter().all(|e| e.shape && e.shift);
        let note = (self.mode == ExpansionMode::Explicit).then(|| "explicit mode: coupled conditions not certified".to_string());
        StructureReport { passed, certified: self.mode == ExpansionMode::Coupled, note, entries, skipped }
    }
}

fn prefix_sums(d: &[usize]) -> Vec<usize> {
    d.iter()
        .scan(0usize, |acc, &k| {
            *acc += k;
            Some(*acc)
        })
        .collect()
}

fn gap_check(g: &ControlFunction, big_dn: usize, big_next: usize) -> Result<GapCheck> {
    let threshold = ExactDecimal::pow10(-(big_next as i64));
    let x = ExactDecimal::pow10(-(big_dn as i64));
    let holds = g.cmp_certified(&x, &threshold)? == Ordering::Greater;
    // a decimal lower bound of g(10^-D_n) that still clears the threshold
    let width = ExactDecimal::pow10(-(big_next as i64 + 2));
    let enc = g.eval(&x, &width)?;
    Ok(GapCheck { g_lower_bound: enc.lo, threshold, holds })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureEntry {
    pub n: usize,
    pub nonzero_blocks: Vec<usize>,
    /// one nonzero block, or two consecutive ones
    pub shape: bool,
    /// top nonzero block at most one past the previous term's
    pub shift: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub passed: bool,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub entries: Vec<StructureEntry>,
    pub skipped: usize,
}

impl StructureReport {
    pub fn first_failure(&self) -> Option<&StructureEntry> {
        self.entries.iter().find(|e| !(e.shape && e.shift))
    }
}
