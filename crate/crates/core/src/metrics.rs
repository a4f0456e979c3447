//! Finite-horizon detectors for three function-controlled porosity notions
//! over interval unions, and an empirical harness comparing them.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::control::{ControlFunction, FunctionClass};
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalUnion};

const RATIO_PLACES: usize = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    #[default]
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// An open interval missing `M`, kept so a verdict can be re-checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapWitness {
    pub scale: ExactDecimal,
    pub lo: ExactDecimal,
    pub hi: ExactDecimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PorosityVerdict {
    /// Witnessed at every scheduled scale.
    In { scales: usize, witnesses: Vec<GapWitness> },
    /// `M` fills a one-sided neighbourhood too large for any small scale.
    Out { reason: String },
    Unknown { scale: Option<ExactDecimal>, note: String },
}

impl PorosityVerdict {
    pub fn is_in(&self) -> bool {
        matches!(self, PorosityVerdict::In { .. })
    }

    pub fn is_out(&self) -> bool {
        matches!(self, PorosityVerdict::Out { .. })
    }
}

/// `λ(M, (a, b))`: length of the largest open subinterval missing `M`.
pub fn lambda(m: &IntervalUnion, a: &ExactDecimal, b: &ExactDecimal) -> Result<ExactDecimal> {
    if a >= b {
        return Err(Error::domain(format!("empty interval ({a}, {b})")));
    }
    Ok(m.lambda(a, b))
}

/// `start, start·ratio, start·ratio², …` (`count` terms).
pub fn geometric_schedule(start: &ExactDecimal, ratio: &ExactDecimal, count: usize) -> Vec<ExactDecimal> {
    std::iter::successors(Some(start.clone()), |s| Some(s.mul(ratio))).take(count).collect()
}

fn check_decreasing(schedule: &[ExactDecimal]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::domain("empty schedule"));
    }
    if schedule.iter().any(|s| s.is_zero()) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("schedule must be strictly decreasing and positive"));
    }
    Ok(())
}

fn require_class(g: &ControlFunction, class: FunctionClass, what: &str) -> Result<()> {
    if g.class() != class {
        return Err(Error::domain(format!("{what} pairs with {class}, got a {} function", g.class())));
    }
    Ok(())
}

/// Mirror `M` and `x` through `t ↦ c − t` so left queries become right ones.
fn oriented(m: &IntervalUnion, x: &ExactDecimal, side: Side) -> (IntervalUnion, ExactDecimal) {
    match side {
        Side::Right => (m.clone(), x.clone()),
        Side::Left => {
            let top = m.parts().last().map(|p| p.hi.clone()).unwrap_or_default().max(x.clone());
            let c = top.add(&ExactDecimal::one());
            let flip = |t: &ExactDecimal| c.sub(t).expect("c bounds every endpoint");
            let parts = m.parts().iter().map(|p| Interval { lo: flip(&p.hi), hi: flip(&p.lo), lo_closed: p.hi_closed, hi_closed: p.lo_closed });
            (IntervalUnion::from_parts(parts), flip(x))
        }
    }
}

/// `η > 0` with `(x, x+η) ⊆ M`, if any.
fn filled_right(m: &IntervalUnion, x: &ExactDecimal) -> Option<ExactDecimal> {
    m.parts().iter().find(|p| &p.lo <= x && &p.hi > x).map(|p| p.hi.sub(x).expect("hi > x"))
}

/// As [`filled_right`], but only when the filled stretch reaches the
/// smallest scheduled scale; a fill below it is invisible to the schedule.
fn filled_within(m: &IntervalUnion, x: &ExactDecimal, schedule: &[ExactDecimal]) -> Option<ExactDecimal> {
    let horizon = schedule.last()?;
    filled_right(m, x).filter(|eta| eta >= horizon)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioRow {
    pub h: ExactDecimal,
    pub lambda: ExactDecimal,
    /// Certified lower bound of `g(λ)/h`.
    pub ratio: ExactDecimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioScan {
    pub side: Side,
    pub rows: Vec<RatioRow>,
    /// Largest certified ratio over the schedule; a lower bound for the
    /// ratio's lim sup only along the finite schedule.
    pub estimate: ExactDecimal,
    pub verdict: PorosityVerdict,
}

impl RatioScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,lambda,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.h, r.lambda, r.ratio));
        }
        out
    }
}

/// Scan of `g(λ(M, (x, x+h)))/h` along a decreasing schedule (`g ∈ G₁`).
pub fn p_plus(m: &IntervalUnion, x: &ExactDecimal, g: &ControlFunction, schedule: &[ExactDecimal], side: Side) -> Result<RatioScan> {
    require_class(g, FunctionClass::G1, "(g)-porosity")?;
    check_decreasing(schedule)?;
    let (m, x) = oriented(m, x, side);
    let mut rows = Vec::with_capacity(schedule.len());
    for h in schedule {
        let lam = m.lambda(&x, &x.add(h));
        let ratio = if lam.is_zero() {
            ExactDecimal::zero()
        } else {
            if !g.in_domain(&lam) {
                return Err(Error::domain(format!("λ = {lam} is outside the domain of g")));
            }
            let lo = g.bounds_at(&lam.to_rational(), RATIO_PLACES as u32 + 4).lo;
            ExactDecimal::floor_rational(&(lo / h.to_rational()), RATIO_PLACES)
        };
        rows.push(RatioRow { h: h.clone(), lambda: lam, ratio });
    }
    let estimate = rows.iter().map(|r| r.ratio.clone()).max().unwrap_or_default();
    let verdict = if let Some(eta) = filled_within(&m, &x, schedule) {
        PorosityVerdict::Out { reason: format!("M contains ({x}, {x} + {eta}) after orientation") }
    } else if let Some(r) = rows.iter().find(|r| r.ratio.is_zero()) {
        PorosityVerdict::Unknown { scale: Some(r.h.clone()), note: "no gap certified at this scale".into() }
    } else {
        let witnesses = rows
            .iter()
            .map(|r| {
                let (lo, hi) = m.gaps_in(&x, &x.add(&r.h)).into_iter().max_by(|a, b| len(a).cmp(&len(b))).expect("λ > 0");
                GapWitness { scale: r.h.clone(), lo, hi }
            })
            .collect();
        PorosityVerdict::In { scales: rows.len(), witnesses }
    };
    Ok(RatioScan { side, rows, estimate, verdict })
}

fn len(g: &(ExactDecimal, ExactDecimal)) -> ExactDecimal {
    g.1.sub(&g.0).unwrap_or_default()
}

/// `x ∈ S⁺(g, r, M)` for every scheduled `r` (`g ∈ G₂`): some gap
/// `(y−σ, y)` of `M` with `σ < r` has `x ∈ (y − g(σ), y)`.
pub fn right_angle_porous(m: &IntervalUnion, x: &ExactDecimal, g: &ControlFunction, schedule: &[ExactDecimal], side: Side) -> Result<PorosityVerdict> {
    require_class(g, FunctionClass::G2, "⟨g⟩-porosity")?;
    check_decreasing(schedule)?;
    let (m, x) = oriented(m, x, side);
    let mut witnesses = Vec::new();
    for r in schedule {
        if !g.in_domain(r) {
            return Err(Error::domain(format!("scale {r} is outside the domain of g")));
        }
        // only gaps ending before x + g(r) can cover x
        let reach = ExactDecimal::ceil_rational(&g.bounds_at(&r.to_rational(), RATIO_PLACES as u32).hi, RATIO_PLACES);
        let mut found = None;
        let below = x.checked_sub(r).unwrap_or_default();
        for (p, q) in m.gaps_in(&below, &x.add(&reach)) {
            if q <= x {
                continue;
            }
            // σ < r: a full short gap, or one just under r (continuity of g
            // turns a strict inequality at r into one slightly below it)
            let width = q.sub(&p)?;
            let sigma = width.clone().min(r.clone());
            // when x sits inside the gap, centre the window on x
            let half = sigma.mul(&ExactDecimal::parse("0.5")?);
            let start = x.checked_sub(&half).map_or(p.clone(), |s| s.max(p.clone()));
            let y = start.add(&sigma).min(q.clone());
            if y <= x {
                continue;
            }
            let need = y.sub(&x)?;
            let ord = match g.cmp_at(&sigma.to_rational(), &need.to_rational()) {
                Ok(o) => o,
                Err(e) if e.is_resource_limit() => {
                    return Ok(PorosityVerdict::Unknown { scale: Some(r.clone()), note: e.to_string() });
                }
                Err(e) => return Err(e),
            };
            if ord == Ordering::Greater {
                found = Some(GapWitness { scale: r.clone(), lo: y.sub(&sigma)?, hi: y });
                break;
            }
        }
        match found {
            Some(w) => witnesses.push(w),
            None => {
                if let Some(eta) = filled_right(&m, &x) {
                    if g.cmp_certified(r, &eta).is_ok_and(|o| o != Ordering::Greater) {
                        return Ok(PorosityVerdict::Out { reason: format!("M ⊇ (x, x + {eta}) and g({r}) ≤ {eta}") });
                    }
                }
                return Ok(PorosityVerdict::Unknown { scale: Some(r.clone()), note: "no covering gap found at this scale".into() });
            }
        }
    }
    Ok(PorosityVerdict::In { scales: schedule.len(), witnesses })
}

/// `(x + g(α), x + α) ∩ M = ∅` for every scheduled `α` (`g ∈ G₃`).
pub fn bracket_porous(m: &IntervalUnion, x: &ExactDecimal, g: &ControlFunction, schedule: &[ExactDecimal], side: Side) -> Result<PorosityVerdict> {
    require_class(g, FunctionClass::G3, "[g]-porosity")?;
    check_decreasing(schedule)?;
    let (m, x) = oriented(m, x, side);
    let mut witnesses = Vec::with_capacity(schedule.len());
    for a in schedule {
        if !g.in_domain(a) {
            return Err(Error::domain(format!("scale {a} is outside the domain of g")));
        }
        let end = x.add(a);
        // last point of M inside (x, x+α)
        let hit = m
            .parts()
            .iter()
            .filter(|p| p.intersect(&Interval::open(x.clone(), end.clone())).is_some())
            .map(|p| p.hi.clone().min(end.clone()))
            .max();
        let verdict = match hit {
            None => Some(GapWitness { scale: a.clone(), lo: x.clone(), hi: end }),
            Some(t) if t >= end => None,
            Some(t) => {
                let need = t.sub(&x)?;
                match g.cmp_at(&a.to_rational(), &need.to_rational()) {
                    Ok(Ordering::Less) => None,
                    Ok(_) => Some(GapWitness { scale: a.clone(), lo: t, hi: end }),
                    Err(e) if e.is_resource_limit() => {
                        return Ok(PorosityVerdict::Unknown { scale: Some(a.clone()), note: e.to_string() });
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        match verdict {
            Some(w) => witnesses.push(w),
            None => {
                return Ok(match filled_within(&m, &x, schedule) {
                    Some(eta) => PorosityVerdict::Out { reason: format!("M ⊇ (x, x + {eta})") },
                    None => PorosityVerdict::Unknown { scale: Some(a.clone()), note: "M meets (x + g(α), x + α)".into() },
                });
            }
        }
    }
    Ok(PorosityVerdict::In { scales: schedule.len(), witnesses })
}

pub fn right_bracket_porous(m: &IntervalUnion, x: &ExactDecimal, g: &ControlFunction, schedule: &[ExactDecimal]) -> Result<PorosityVerdict> {
    bracket_porous(m, x, g, schedule, Side::Right)
}

pub fn left_bracket_porous(m: &IntervalUnion, x: &ExactDecimal, g: &ControlFunction, schedule: &[ExactDecimal]) -> Result<PorosityVerdict> {
    bracket_porous(m, x, g, schedule, Side::Left)
}

/// Re-checks bracket witnesses by direct intersection with `M`.
pub fn recheck_bracket(m: &IntervalUnion, x: &ExactDecimal, g: &ControlFunction, verdict: &PorosityVerdict) -> Result<bool> {
    let PorosityVerdict::In { witnesses, .. } = verdict else {
        return Ok(false);
    };
    for w in witnesses {
        if m.intersects_open(&w.lo, &w.hi) || w.hi != x.add(&w.scale) {
            return Ok(false);
        }
        // g(α) ≥ lo − x
        if g.cmp_certified(&w.scale, &w.lo.sub(x)?)? == Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A porosity notion with its control function and finite schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub g: ControlFunction,
    pub schedule: Vec<ExactDecimal>,
}

impl Detector {
    pub fn run(&self, m: &IntervalUnion, x: &ExactDecimal, side: Side) -> Result<PorosityVerdict> {
        match self.g.class() {
            FunctionClass::G1 => Ok(p_plus(m, x, &self.g, &self.schedule, side)?.verdict),
            FunctionClass::G2 => right_angle_porous(m, x, &self.g, &self.schedule, side),
            FunctionClass::G3 => bracket_porous(m, x, &self.g, &self.schedule, side),
            FunctionClass::G => Err(Error::domain("plain G functions do not control a porosity notion")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusItem {
    pub m: IntervalUnion,
    pub x: ExactDecimal,
    #[serde(default)]
    pub side: Side,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    /// Antecedent and consequent both `In`.
    pub agree: usize,
    /// Antecedent `In`, consequent `Out`.
    pub violations: usize,
    /// Antecedent not `In`.
    pub vacuous: usize,
    /// Antecedent `In`, consequent `Unknown`.
    pub unknown: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessRow {
    pub index: usize,
    pub antecedent: PorosityVerdict,
    pub consequent: Option<PorosityVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub table: ContingencyTable,
    pub rows: Vec<HarnessRow>,
}

/// Tests "porous for `antecedent` ⇒ porous for `consequent`" on a corpus.
/// Unknown verdicts are tallied apart and never counted as violations.
pub fn implication_harness(consequent: &Detector, antecedent: &Detector, corpus: &[CorpusItem]) -> Result<HarnessReport> {
    let mut table = ContingencyTable::default();
    let mut rows = Vec::with_capacity(corpus.len());
    for (index, item) in corpus.iter().enumerate() {
        let a = antecedent.run(&item.m, &item.x, item.side)?;
        if !a.is_in() {
            table.vacuous += 1;
            rows.push(HarnessRow { index, antecedent: a, consequent: None });
            continue;
        }
        let c = consequent.run(&item.m, &item.x, item.side)?;
        match &c {
            PorosityVerdict::In { .. } => table.agree += 1,
            PorosityVerdict::Out { .. } => table.violations += 1,
            PorosityVerdict::Unknown { .. } => table.unknown += 1,
        }
        rows.push(HarnessRow { index, antecedent: a, consequent: Some(c) });
    }
    Ok(HarnessReport { table, rows })
}
