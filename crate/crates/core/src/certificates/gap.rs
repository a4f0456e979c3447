use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::control::{refine_cmp, ControlFunction, RatInterval};
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::expansion::MultiExpansion;
use crate::intervals::IntervalUnion;
use crate::numeric::{cmp_power, format_rational, int, pow_bounds};
use crate::sets::ASetSpec;

/// A leftmost longest run `u < s ≤ v` of maximal blocks inside
/// `n² ≤ u < v ≤ (n+1)²`. With no maximal block, `u = v = n²+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxRun {
    pub u: usize,
    pub v: usize,
    pub m: usize,
}

pub fn max_run(me: &MultiExpansion, x: &ExactDecimal, n: usize) -> Result<MaxRun> {
    let last = (n + 1) * (n + 1);
    if last > me.blocks() {
        return Err(Error::depth(format!("range {n} needs {last} blocks, expansion has {}", me.blocks())));
    }
    let mut best = MaxRun { u: n * n + 1, v: n * n + 1, m: 0 };
    let mut start = None;
    for s in n * n + 1..=last {
        if me.is_max_block(x, s) {
            let u = *start.get_or_insert(s - 1);
            if s - u > best.m {
                best = MaxRun { u, v: s, m: s - u };
            }
        } else {
            start = None;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome { passed, detail: detail.into() }
    }
}

/// Evidence that `(y_n, z_n)` misses the set and sits within `g` of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub n: usize,
    pub u: usize,
    pub v: usize,
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub y: ExactDecimal,
    pub z: ExactDecimal,
    pub run_maximality: CheckOutcome,
    /// `2n+1 − (m−1) < (1 − ε/n^α)(2n+1)`, i.e. `(m−1)·n^α > ε(2n+1)`.
    pub digit_criterion: CheckOutcome,
    /// `b_k(t) = 0` for `u < k < v` at both ends of the gap.
    pub zero_blocks: CheckOutcome,
    /// `g(10^(−L)) > 10^(−K)`.
    pub g_inequality: CheckOutcome,
    pub passed: bool,
}

impl GapCertificate {
    /// `α = z_n − x`, the bracket scale this gap witnesses.
    pub fn alpha(&self) -> ExactDecimal {
        ExactDecimal::pow10(-(self.l as i64))
    }

    pub fn csv_header() -> &'static str {
        "n,y,z,m,pass\n"
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}\n", self.n, self.y, self.z, self.m, self.passed)
    }
}

pub fn gap_certificate(spec: &ASetSpec, g: &ControlFunction, x: &ExactDecimal, n: usize) -> Result<GapCertificate> {
    if n < spec.n() {
        return Err(Error::domain(format!("gap certificates need n ≥ N = {}", spec.n())));
    }
    let me = spec.expansion();
    let run = max_run(me, x, n)?;
    let MaxRun { u, v, m } = run;
    let (l, k) = if m == 0 { (me.big_d(u), me.big_d(u)) } else { (me.big_d(v - 1), me.big_d(v)) };
    let y = x.add(&ExactDecimal::pow10(-(k as i64)));
    let z = x.add(&ExactDecimal::pow10(-(l as i64)));

    let run_maximality = {
        // independent rescan: no longer run, and the run is all maximal
        let all_max = (u + 1..=v).all(|s| me.is_max_block(x, s));
        let longer = (n * n..(n + 1) * (n + 1))
            .any(|a| a + m < (n + 1) * (n + 1) && (a + 1..=a + m + 1).all(|s| me.is_max_block(x, s)));
        CheckOutcome::new(all_max && !longer, format!("run ({u}, {v}] of length {m}"))
    };

    let digit_criterion = if m < 2 {
        CheckOutcome::new(false, format!("m = {m}: bound C(t,n) ≤ {} is vacuous", 2 * n + 2 - m))
    } else {
        let rhs = spec.eps() * int(2 * n as i64 + 1) / int(m as i64 - 1);
        let holds = cmp_power(&int(n as i64), spec.alpha(), &rhs) == Ordering::Greater;
        CheckOutcome::new(
            holds,
            format!(
                "C(t,{n}) ≤ {} vs floor {}; n^α {} ε(2n+1)/(m−1) = {}",
                2 * n + 2 - m,
                spec.floor_count(n),
                if holds { ">" } else { "≤" },
                format_rational(&rhs)
            ),
        )
    };

    let zero_blocks = if m < 2 {
        CheckOutcome::new(false, "no interior blocks")
    } else {
        // any t in (y, z) shares its first L digits with y or with z
        let yt = y.truncate(l);
        let zt = z.truncate(l);
        let ok = [&yt, &zt].iter().all(|t| (u + 1..v).all(|s| me.is_zero_block(t, s)));
        CheckOutcome::new(ok && yt == zt, format!("blocks {}..={} zero on trunc_L(y) = trunc_L(z)", u + 1, v - 1))
    };

    let g_inequality = if m == 0 {
        CheckOutcome::new(false, "empty run")
    } else {
        let at = ExactDecimal::pow10(-(l as i64));
        if !g.in_domain(&at) {
            CheckOutcome::new(false, format!("10^-{l} is outside the domain of g"))
        } else {
            let ord = g.cmp_certified(&at, &ExactDecimal::pow10(-(k as i64)))?;
            CheckOutcome::new(ord == Ordering::Greater, format!("g(10^-{l}) {} 10^-{k}", sign(ord)))
        }
    };

    let passed = run_maximality.passed && digit_criterion.passed && zero_blocks.passed && g_inequality.passed;
    Ok(GapCertificate { n, u, v, m, l, k, y, z, run_maximality, digit_criterion, zero_blocks, g_inequality, passed })
}

fn sign(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    }
}

/// Outer approximation of the set over `[x, z_n]` at block `v_n`.
pub fn gap_neighbourhood(spec: &ASetSpec, x: &ExactDecimal, cert: &GapCertificate, budget: usize) -> Result<IntervalUnion> {
    spec.outer_approx_in(cert.n, &(x.clone(), cert.z.clone()), cert.v.max(spec.n() * spec.n()), budget)
}

/// Independent soundness check: `(y_n, z_n)` misses the outer approximation.
pub fn cross_check_gap(spec: &ASetSpec, x: &ExactDecimal, cert: &GapCertificate, budget: usize) -> Result<bool> {
    let cover = gap_neighbourhood(spec, x, cert, budget)?;
    Ok(!cover.intersects_open(&cert.y, &cert.z))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstGood {
    /// Smallest `n` in the scanned range whose certificate passes.
    pub n: Option<usize>,
    /// First `n ≥ N` with `c·n^(2α) − n^α − 2εn − ε > 0`, `c = (1+ε)^(−2)`.
    pub asymptotic: Option<usize>,
    pub scanned: (usize, usize),
}

pub fn first_good_n(
    spec: &ASetSpec,
    g: &ControlFunction,
    x: &ExactDecimal,
    n_lo: usize,
    n_hi: usize,
) -> Result<FirstGood> {
    if n_lo < spec.n() {
        return Err(Error::domain(format!("n_lo = {n_lo} is below N = {}", spec.n())));
    }
    let mut found = None;
    for n in n_lo..=n_hi {
        if gap_certificate(spec, g, x, n)?.passed {
            found = Some(n);
            break;
        }
    }
    Ok(FirstGood { n: found, asymptotic: asymptotic_threshold(spec.eps(), spec.alpha(), spec.n(), 1_000_000)?, scanned: (n_lo, n_hi) })
}

/// Scan for the first `n ≥ n_from` with `c·n^(2α) − n^α > 2εn + ε`.
pub fn asymptotic_threshold(eps: &BigRational, alpha: &BigRational, n_from: usize, n_max: usize) -> Result<Option<usize>> {
    let one = BigRational::one();
    let c = &one / ((&one + eps) * (&one + eps));
    let turn = &one / (int(2) * &c);
    for n in n_from.max(1)..=n_max {
        let nn = int(n as i64);
        let rhs = int(2) * eps * &nn + eps;
        // cheap float screen far from the threshold
        let t = (n as f64).powf(alpha_f64(alpha));
        let cf = 1.0 / (1.0 + eps_f64(eps)).powi(2);
        let approx = cf * t * t - t - 2.0 * eps_f64(eps) * n as f64 - eps_f64(eps);
        if approx < -1.0 {
            continue;
        }
        let ord = refine_cmp(
            |p| {
                let (tl, th) = pow_bounds(&nn, alpha, p);
                let lo = if tl >= turn { &c * &tl * &tl - &tl } else { &c * &tl * &tl - &th };
                let hi = if tl >= turn { &c * &th * &th - &th } else { &c * &th * &th - &tl };
                Ok(RatInterval { lo, hi })
            },
            &rhs,
            &|| format!("asymptotic criterion at n = {n}"),
        )?;
        if ord == Ordering::Greater {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

fn alpha_f64(a: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(a).unwrap_or(0.75)
}

fn eps_f64(e: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(e).unwrap_or(1.0)
}
