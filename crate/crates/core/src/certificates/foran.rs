use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::expansion::MultiExpansion;
use crate::numeric::{cmp_power, int, smallest_int_above_power};
use crate::sets::{range_of, ASetSpec, Strategy, ValidityReport, Verdict, Witness, DEFAULT_NODE_BUDGET};

/// Label carried by every report built from synthesized displacements.
pub const SURROGATE_NOTE: &str =
    "displacements are surrogate pairs with the digit structure of deep sequence terms, not sequence terms";

/// Label for the finite-depth system check.
pub const IMPLICATION_NOTE: &str =
    "finite-depth evidence only: non-σ-porosity follows from the full (infinitary) system condition, which is not checked";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub eps_halved: bool,
    pub prefix_extends: bool,
    pub validity: ValidityReport,
    pub passed: bool,
}

/// Checks that `fstar` refines `f`: `ε` halved, prefix extended, valid.
pub fn check_refinement(f: &ASetSpec, fstar: &ASetSpec) -> RefinementCheck {
    let eps_halved = fstar.eps() * int(2) == *f.eps() && fstar.alpha() == f.alpha();
    let prefix_extends = fstar.prefix().len() >= f.prefix().len() && fstar.prefix()[..f.prefix().len()] == *f.prefix();
    let validity = fstar.validate();
    let passed = eps_halved && prefix_extends && validity.passed;
    RefinementCheck { eps_halved, prefix_extends, validity, passed }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCase {
    /// `k₂ = k₁ + 1`
    ShiftedTop,
    /// `k₂ = k₁`, top blocks differ
    SameTop,
}

/// Stand-ins for consecutive deep terms `x_p > x_{p+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementPair {
    pub s_p: ExactDecimal,
    pub s_next: ExactDecimal,
    pub k1: usize,
    pub k2: usize,
    pub case: PairCase,
    pub seed: u64,
}

/// Structural facts re-read from the digits of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStructure {
    pub nonzero_p: Vec<usize>,
    pub nonzero_next: Vec<usize>,
    pub low_blocks_zero: bool,
    pub consecutive: bool,
    pub top_relation: bool,
    pub length_increases: bool,
    pub decreasing: bool,
    pub passed: bool,
}

/// Re-verifies a pair against the structure the refinement step uses.
pub fn pair_structure(me: &MultiExpansion, m: usize, pair: &DisplacementPair) -> Result<PairStructure> {
    let nonzero_p = me.nonzero_blocks(&pair.s_p)?;
    let nonzero_next = me.nonzero_blocks(&pair.s_next)?;
    let floor = (m + 1) * (m + 1) + 1;
    let low_blocks_zero = nonzero_p.iter().chain(&nonzero_next).all(|&k| k > floor);
    let two_consecutive = |v: &[usize]| v.len() <= 2 && v.windows(2).all(|w| w[1] == w[0] + 1);
    let consecutive = two_consecutive(&nonzero_p) && two_consecutive(&nonzero_next);
    let (k1, k2) = (nonzero_p.last().copied().unwrap_or(0), nonzero_next.last().copied().unwrap_or(0));
    let top_relation = (k2 == k1 + 1 && pair.case == PairCase::ShiftedTop)
        || (k2 == k1 && pair.case == PairCase::SameTop && me.multi_digit(&pair.s_p, k1)? != me.multi_digit(&pair.s_next, k1)?);
    let length_increases = pair.s_next.length()? > pair.s_p.length()?;
    let decreasing = pair.s_next < pair.s_p;
    let passed = low_blocks_zero && consecutive && top_relation && length_increases && decreasing && (k1, k2) == (pair.k1, pair.k2);
    Ok(PairStructure { nonzero_p, nonzero_next, low_blocks_zero, consecutive, top_relation, length_increases, decreasing, passed })
}

/// Synthesizes a pair; even seeds give `k₂ = k₁ + 1`, odd seeds `k₂ = k₁`
/// (when the top block has at least two digits).
pub fn synth_displacement_pair(me: &MultiExpansion, m: usize, l_base: usize, seed: u64) -> Result<DisplacementPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lowest = l_base.max((m + 1) * (m + 1) + 3);
    let k1 = lowest + rng.random_range(0..=2 * m);
    if k1 + 1 > me.blocks() {
        return Err(Error::depth(format!("pair needs block {}, expansion has {}", k1 + 1, me.blocks())));
    }
    let case = if seed % 2 == 1 && me.d(k1) >= 2 { PairCase::SameTop } else { PairCase::ShiftedTop };
    let mut bp = vec![BigUint::zero(); k1 + 1];
    let mut bn = vec![BigUint::zero(); k1 + 1];
    let k2 = match case {
        PairCase::ShiftedTop => {
            bp[k1 - 2] = random_block(&mut rng, &me.max_value(k1 - 1), 1);
            bp[k1 - 1] = random_block(&mut rng, &me.max_value(k1), 1);
            bn[k1 - 1] = random_block(&mut rng, &me.max_value(k1), 0);
            bn[k1] = random_block(&mut rng, &me.max_value(k1 + 1), 1);
            k1 + 1
        }
        PairCase::SameTop => {
            // s_p's top block ends in 0, s_{p+1}'s does not, so l grows
            let top = me.max_value(k1);
            let v0 = random_block(&mut rng, &me.max_value(k1 - 1), 2);
            bp[k1 - 2] = v0.clone();
            bn[k1 - 2] = random_range_big(&mut rng, &BigUint::one(), &(&v0 - 1u32));
            let tens = &top / 10u32;
            bp[k1 - 1] = random_range_big(&mut rng, &BigUint::one(), &tens) * 10u32;
            let mut w = random_block(&mut rng, &top, 1);
            if (&w % 10u32).is_zero() {
                w += 1u32;
            }
            bn[k1 - 1] = w;
            k1
        }
    };
    bp.truncate(k1);
    let s_p = me.compose(&bp)?;
    let s_next = me.compose(&bn)?;
    Ok(DisplacementPair { s_p, s_next, k1, k2, case, seed })
}

fn random_block(rng: &mut ChaCha8Rng, max: &BigUint, min: u32) -> BigUint {
    random_range_big(rng, &BigUint::from(min), max)
}

fn random_range_big(rng: &mut ChaCha8Rng, lo: &BigUint, hi: &BigUint) -> BigUint {
    let span = hi - lo;
    match span.to_u64() {
        Some(s) => lo + BigUint::from(rng.random_range(0..=s)),
        None => lo + BigUint::from(rng.random::<u64>()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslateEvidence {
    pub label: String,
    pub x: ExactDecimal,
    pub verdict: Verdict,
    /// `C(x,n) ≥ C(z,n) − 2` on every scanned range.
    pub count_drop_ok: bool,
    /// Ranges `n ≥ M` with `E(x, n) = 0`.
    pub e_zero_ranges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub pair: DisplacementPair,
    pub structure: PairStructure,
    pub translates: Vec<TranslateEvidence>,
    /// `4n^α < ε(2n+1)` for `M ≤ n ≤ depth`.
    pub margin_ok: bool,
    /// `C(z, n) > 2` for `M ≤ n ≤ depth`.
    pub z_counts_above_two: bool,
    /// When `E(z − s_p, n) = 0`, `E(z − s_{p+1}, n) ≠ 0`.
    pub dichotomy_holds: bool,
    pub chosen: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForanStepReport {
    #[serde(rename = "F")]
    pub f: ASetSpec,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "Fstar")]
    pub fstar: ASetSpec,
    pub y: ExactDecimal,
    pub window: (ExactDecimal, ExactDecimal),
    pub refinement: RefinementCheck,
    pub z: Option<Witness>,
    pub trials: Vec<Trial>,
    pub note: String,
}

impl ForanStepReport {
    pub fn passed(&self) -> bool {
        self.refinement.passed && self.trials.iter().all(|t| t.passed)
    }
}

/// Picks `M` and builds `F* = A(B, b_{N²+1}(y), …, b_{M²}(y), ε/2)` inside
/// the open window.
/// Smallest `M ≥ max(N+1, ⌊(ε/2)^(1/(α−1))⌋+1)` whose closed cylinder of
/// `y` at block `M²` lies in the window.
pub fn refinement_index(f: &ASetSpec, y: &ExactDecimal, window: &(ExactDecimal, ExactDecimal)) -> Result<usize> {
    let half = f.eps() / int(2);
    let exponent = BigRational::one() / (f.alpha() - BigRational::one());
    let bound = smallest_int_above_power(&half, &exponent) as usize;
    let me = f.expansion();
    let mut m = (f.n() + 1).max(bound);
    loop {
        if m * m > me.blocks() {
            return Err(Error::budget(format!("no cylinder of y fits the window within {} blocks", me.blocks())));
        }
        let digits = me.big_d(m * m);
        let lo = y.truncate(digits);
        let hi = lo.add(&ExactDecimal::pow10(-(digits as i64)));
        if window.0 <= lo && hi <= window.1 {
            return Ok(m);
        }
        m += 1;
    }
}

pub fn foran_refine(f: &ASetSpec, y: &ExactDecimal, window: &(ExactDecimal, ExactDecimal)) -> Result<ForanStepReport> {
    if !(window.0 < *y && *y < window.1) {
        return Err(Error::domain(format!("y = {y} is not inside the window")));
    }
    let half = f.eps() / int(2);
    let m = refinement_index(f, y, window)?;
    let me = f.expansion();
    match f.membership(y, m - 1) {
        Verdict::In { .. } => {}
        other => return Err(Error::domain(format!("y is not in F through range {}: {other:?}", m - 1))),
    }
    let prefix = (1..=m * m).map(|k| me.multi_digit(y, k)).collect::<Result<Vec<_>>>()?;
    let fstar = ASetSpec::new(me.clone(), m, half, f.alpha().clone(), prefix)?;
    let refinement = check_refinement(f, &fstar);
    Ok(ForanStepReport {
        f: f.clone(),
        m,
        fstar,
        y: y.clone(),
        window: window.clone(),
        refinement,
        z: None,
        trials: Vec::new(),
        note: SURROGATE_NOTE.into(),
    })
}

/// Depth that covers a pair's blocks plus one full range.
pub fn trial_depth(pair: &DisplacementPair) -> usize {
    range_of(pair.k2) + 1
}

/// Translates `z` by both displacements and records which lands in `F`.
pub fn foran_dichotomy(report: &ForanStepReport, z: &ExactDecimal, pair: &DisplacementPair, depth: usize) -> Result<Trial> {
    let f = &report.f;
    let me = f.expansion();
    if depth < trial_depth(pair) {
        return Err(Error::depth(format!("depth {depth} does not cover block {} plus a range", pair.k2)));
    }
    match report.fstar.membership(z, depth) {
        Verdict::In { .. } => {}
        other => return Err(Error::domain(format!("z is not in F* through range {depth}: {other:?}"))),
    }
    let structure = pair_structure(me, report.m, pair)?;
    let margin_ok = (report.m..=depth).all(|n| {
        let rhs = f.eps() * int(2 * n as i64 + 1) / int(4);
        cmp_power(&int(n as i64), f.alpha(), &rhs) == Ordering::Less
    });
    let z_counts_above_two = (report.m..=depth).all(|n| me.stats_unchecked(z, n).0 > 2);
    let mut translates = Vec::with_capacity(2);
    for (label, s) in [("z-s_p", &pair.s_p), ("z-s_{p+1}", &pair.s_next)] {
        let x = z.sub(s)?;
        let verdict = f.membership(&x, depth);
        let count_drop_ok = (f.n()..=depth).all(|n| me.stats_unchecked(&x, n).0 + 2 >= me.stats_unchecked(z, n).0);
        let e_zero_ranges = (report.m..=depth).filter(|&n| me.stats_unchecked(&x, n).1 == 0).collect();
        translates.push(TranslateEvidence { label: label.into(), x, verdict, count_drop_ok, e_zero_ranges });
    }
    let dichotomy_holds = translates[0]
        .e_zero_ranges
        .iter()
        .all(|n| !translates[1].e_zero_ranges.contains(n));
    let chosen = translates.iter().find(|t| t.verdict.is_in()).map(|t| t.label.clone());
    let passed = chosen.is_some()
        && structure.passed
        && margin_ok
        && translates.iter().all(|t| t.count_drop_ok)
        && dichotomy_holds;
    Ok(Trial { pair: pair.clone(), structure, translates, margin_ok, z_counts_above_two, dichotomy_holds, chosen, passed })
}

/// Refines `f` in `window` from `y`, draws `z ∈ F*` and runs `trials`
/// seeded surrogate pairs against it.
pub fn foran_step(
    f: &ASetSpec,
    y: &ExactDecimal,
    window: &(ExactDecimal, ExactDecimal),
    trials: usize,
    seed: u64,
    strategy: Strategy,
) -> Result<ForanStepReport> {
    let mut report = foran_refine(f, y, window)?;
    if !report.refinement.passed {
        return Ok(report);
    }
    let me = f.expansion();
    let l_base = (report.m + 1) * (report.m + 1) + 3;
    let pairs = (0..trials as u64)
        .map(|i| synth_displacement_pair(me, report.m, l_base, seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    let depth = pairs.iter().map(trial_depth).max().unwrap_or(report.m);
    let z = report.fstar.generate_witness(depth, strategy, seed)?;
    for pair in &pairs {
        report.trials.push(foran_dichotomy(&report, &z.x, pair, depth)?);
    }
    report.z = Some(z);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowOutcome {
    pub window: (ExactDecimal, ExactDecimal),
    pub skipped: Option<String>,
    pub step: Option<ForanStepReport>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForanConditionReport {
    pub windows: Vec<WindowOutcome>,
    pub passed: bool,
    pub note: String,
}

/// Finite-depth form of the system condition for `f`: in each open window
/// meeting `f`, some refinement `F* ⊆ F ∩ window` of the family passes the
/// dichotomy trials.
pub fn foran_condition_check(
    f: &ASetSpec,
    windows: &[(ExactDecimal, ExactDecimal)],
    depth: usize,
    trials: usize,
    seed: u64,
) -> Result<ForanConditionReport> {
    let mut out = Vec::with_capacity(windows.len());
    for (i, w) in windows.iter().enumerate() {
        // a coarse cover is enough to rule a window out
        let cover = f.outer_approx_in(f.n(), w, f.n() * f.n() + 1, DEFAULT_NODE_BUDGET)?;
        if !cover.intersects_open(&w.0, &w.1) {
            out.push(WindowOutcome { window: w.clone(), skipped: Some("window misses the outer approximation".into()), step: None, passed: true });
            continue;
        }
        // the window witness must be in F through range M − 1
        let mut d = depth;
        let y = loop {
            let Some(y) = f.witness_in_window(d, w, Strategy::MaxC, seed, DEFAULT_NODE_BUDGET)? else {
                break None;
            };
            let need = refinement_index(f, &y.x, w)? - 1;
            if need <= d {
                break Some(y);
            }
            d = need;
        };
        let Some(y) = y else {
            out.push(WindowOutcome { window: w.clone(), skipped: Some("no witness found in the window".into()), step: None, passed: true });
            continue;
        };
        let step = foran_step(f, &y.x, w, trials, seed.wrapping_add(1000 * i as u64), Strategy::SeededRandom)?;
        let passed = step.passed();
        out.push(WindowOutcome { window: w.clone(), skipped: None, step: Some(step), passed });
    }
    let passed = out.iter().all(|w| w.passed);
    Ok(ForanConditionReport { windows: out, passed, note: IMPLICATION_NOTE.into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn family(blocks: usize) -> ASetSpec {
        ASetSpec::zero_prefix(MultiExpansion::constant(2, blocks).unwrap(), 5, int(2), ratio(3, 4)).unwrap()
    }

    fn unit() -> (ExactDecimal, ExactDecimal) {
        (ExactDecimal::zero(), ExactDecimal::one())
    }

    #[test]
    fn refinement_depth_from_exact_power() {
        let f = family(121);
        let y = f.generate_witness(8, Strategy::MaxC, 0).unwrap().x;
        let r = foran_refine(&f, &y, &unit()).unwrap();
        assert_eq!(r.m, 6);
        assert!(r.refinement.passed);
        assert_eq!(r.fstar.eps(), &int(1));
        // ε = 1: (1/2)^(-4) = 16, so M ≥ 17
        let g = ASetSpec::zero_prefix(MultiExpansion::constant(2, 400).unwrap(), 3, int(1), ratio(3, 4)).unwrap();
        let y = g.generate_witness(18, Strategy::MaxC, 0).unwrap().x;
        assert_eq!(foran_refine(&g, &y, &unit()).unwrap().m, 17);
    }

    #[test]
    fn narrow_window_pushes_m() {
        let f = family(121);
        let y = f.generate_witness(8, Strategy::MaxC, 0).unwrap().x;
        let digits = f.expansion().big_d(49);
        let lo = y.truncate(digits);
        let window = (lo.clone(), lo.add(&ExactDecimal::pow10(-(digits as i64))).add(&ExactDecimal::pow10(-(digits as i64))));
        let r = foran_refine(&f, &y, &window).unwrap();
        assert_eq!(r.m, 7);
    }

    #[test]
    fn corrupted_refinement_is_caught() {
        let f = family(121);
        let y = f.generate_witness(8, Strategy::MaxC, 0).unwrap().x;
        let r = foran_refine(&f, &y, &unit()).unwrap();
        let bad = ASetSpec::new(f.expansion().clone(), r.m, f.eps().clone(), f.alpha().clone(), r.fstar.prefix().to_vec()).unwrap();
        assert!(!check_refinement(&f, &bad).eps_halved);
    }

    #[test]
    fn pairs_have_the_required_structure() {
        let me = MultiExpansion::constant(2, 100).unwrap();
        for seed in 0..40 {
            let p = synth_displacement_pair(&me, 6, 60, seed).unwrap();
            let s = pair_structure(&me, 6, &p).unwrap();
            assert!(s.passed, "seed {seed}: {s:?}");
            let want = if seed % 2 == 0 { PairCase::ShiftedTop } else { PairCase::SameTop };
            assert_eq!(p.case, want);
            assert!(p.k1 >= 60);
        }
        let p = synth_displacement_pair(&me, 6, 60, 0).unwrap();
        let s = pair_structure(&me, 6, &p).unwrap();
        assert_eq!(s.nonzero_p, vec![p.k1 - 1, p.k1]);
        assert_eq!(s.nonzero_next.last(), Some(&(p.k1 + 1)));
    }

    #[test]
    fn dichotomy_trials_pass() {
        let f = family(121);
        let y = f.generate_witness(8, Strategy::MaxC, 0).unwrap().x;
        for strategy in [Strategy::MaxC, Strategy::SeededRandom] {
            let r = foran_step(&f, &y, &unit(), 20, 11, strategy).unwrap();
            assert!(r.passed(), "{strategy}");
            assert!(r.trials.iter().all(|t| t.z_counts_above_two));
        }
    }

    #[test]
    fn condition_check_skips_empty_windows() {
        let f = family(121);
        let windows = vec![
            unit(),
            ("0.5".parse().unwrap(), "0.6".parse().unwrap()),
        ];
        let r = foran_condition_check(&f, &windows, 6, 4, 0).unwrap();
        assert!(r.passed);
        assert!(r.windows[0].step.is_some());
        assert!(r.windows[1].skipped.is_some());
    }
}
