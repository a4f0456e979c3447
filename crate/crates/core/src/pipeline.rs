//! The batch pipeline behind the command-line tool: sequence, expansion,
//! set, certificates and metrics, each producing a deterministic report.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::certificates::{
    first_good_n, foran_condition_check, gap_certificate, gap_neighbourhood, FirstGood,
    ForanConditionReport, GapCertificate,
};
use crate::config::{ModeConfig, RunConfig};
use crate::control::{ControlFunction, LemmaScaffold};
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::expansion::MultiExpansion;
use crate::intervals::{Interval, IntervalUnion};
use crate::metrics::{
    implication_harness, p_plus, recheck_bracket, right_bracket_porous, CorpusItem, Detector, HarnessReport, PorosityVerdict, RatioRow, Side,
};
use crate::numeric::format_rational;
use crate::sequence::{GapChainReport, InvariantReport, PorositySequence};
use crate::sets::{ASetSpec, BlockInterval, RangeCount, ValidityReport, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// Some check came out false.
    Falsified,
    /// Some check could not be decided within precision or budget.
    Unresolved,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Falsified => 2,
            Status::Unresolved => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        self.max_rank(other)
    }

    fn max_rank(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Pass => 0,
            Status::Unresolved => 1,
            Status::Falsified => 2,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

/// A report plus its CSV side files (`suffix`, contents).
#[derive(Clone, Debug)]
pub struct Run<R> {
    pub report: R,
    pub status: Status,
    pub csv: Vec<(String, String)>,
}

impl<R: Serialize> Run<R> {
    pub fn json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.report)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes the JSON report to `out` and each CSV next to it as
    /// `<stem>_<suffix>.csv`.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(out, self.json()?)?;
        let mut written = vec![out.to_path_buf()];
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        for (suffix, body) in &self.csv {
            let p = out.with_file_name(format!("{stem}_{suffix}.csv"));
            std::fs::write(&p, body)?;
            written.push(p);
        }
        Ok(written)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub f: ControlFunction,
    pub delta1: ExactDecimal,
    pub x1: ExactDecimal,
    pub count: usize,
    pub terms: Vec<ExactDecimal>,
    pub invariants: InvariantReport,
    pub gap_chain: GapChainReport,
    pub status: Status,
}

fn build_sequence(cfg: &RunConfig, count: usize) -> Result<PorositySequence> {
    let scaffold = LemmaScaffold::build(cfg.f.clone())?;
    PorositySequence::construct(scaffold, cfg.sequence.x1.clone(), count)
}

pub fn cmd_sequence(cfg: &RunConfig) -> Result<Run<SequenceReport>> {
    let seq = build_sequence(cfg, cfg.sequence.count)?;
    let invariants = seq.verify_invariants();
    let gap_chain = seq.verify_gap_chain();
    let status = if !invariants.failures.is_empty() || !gap_chain.passed && gap_chain.first_failure.is_some() {
        Status::Falsified
    } else if invariants.unresolved > 0 || !gap_chain.passed {
        Status::Unresolved
    } else {
        Status::Pass
    };
    let mut csv = String::from("n,x,length\n");
    for (i, x) in seq.terms().iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", i + 1, x, x.length()?));
    }
    let report = SequenceReport {
        f: cfg.f.clone(),
        delta1: seq.scaffold().delta1().clone(),
        x1: cfg.sequence.x1.clone(),
        count: seq.len(),
        terms: seq.terms().to_vec(),
        invariants,
        gap_chain,
        status,
    };
    Ok(Run { report, status, csv: vec![("terms".into(), csv)] })
}

/// The set parameters without the expansion they refer to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps: String,
    pub alpha: String,
    pub prefix: Vec<String>,
}

impl SetSummary {
    fn of(spec: &ASetSpec) -> Self {
        SetSummary {
            n: spec.n(),
            eps: format_rational(spec.eps()),
            alpha: format_rational(spec.alpha()),
            prefix: spec.prefix().iter().map(|b| b.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsRow {
    pub n: usize,
    pub c: usize,
    pub e: usize,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSection {
    pub spec: SetSummary,
    pub validity: ValidityReport,
    pub block_intervals: Vec<BlockInterval>,
    pub witness: Option<Witness>,
    /// `block_stats` recomputed on the witness for every range.
    pub stats: Vec<StatsRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructReport {
    pub expansion: MultiExpansion,
    /// Why a coupled construction stopped early.
    pub budget_stop: Option<String>,
    pub set: Option<SetSection>,
    pub notes: Vec<String>,
    pub status: Status,
}

fn expansion_for(cfg: &RunConfig) -> Result<(MultiExpansion, Option<Error>)> {
    match cfg.expansion.mode {
        ModeConfig::Explicit => Ok((cfg.expansion.explicit()?, None)),
        ModeConfig::Coupled => {
            let mut seq = build_sequence(cfg, 1)?;
            Ok(MultiExpansion::construct_coupled_partial(&cfg.g, &mut seq, cfg.expansion.coupled_blocks, cfg.expansion.term_budget))
        }
    }
}

pub fn cmd_construct(cfg: &RunConfig) -> Result<Run<ConstructReport>> {
    let (me, stop) = expansion_for(cfg)?;
    let mut status = Status::Pass;
    let mut notes = Vec::new();
    let budget_stop = match stop {
        None => None,
        Some(e) if e.is_resource_limit() => {
            status = Status::Unresolved;
            Some(e.to_string())
        }
        Some(e) => return Err(e),
    };
    let set = if me.blocks() < cfg.set.n * cfg.set.n {
        notes.push(format!("set section skipped: {} blocks do not cover the N² = {} prefix", me.blocks(), cfg.set.n * cfg.set.n));
        None
    } else {
        let spec = cfg.set.spec(me.clone())?;
        let validity = spec.validate();
        if !validity.passed {
            status = status.worst(Status::Falsified);
        }
        let depth = cfg.set.depth.min(spec.max_depth());
        if depth < cfg.set.depth {
            notes.push(format!("witness depth lowered from {} to {depth} by the expansion length", cfg.set.depth));
        }
        let block_intervals = (spec.n()..=depth.max(spec.n())).map(|n| spec.block_interval(n)).collect::<Result<Vec<_>>>()?;
        let mut stats = Vec::new();
        let witness = if validity.passed && depth >= spec.n() {
            let w = spec.generate_witness(depth, cfg.set.strategy, cfg.set.seed)?;
            if !w.verdict.is_in() {
                status = status.worst(Status::Falsified);
            }
            for RangeCount { n, c } in &w.counts {
                let (bc, be) = me.block_stats(&w.x, *n)?;
                let matches = bc == *c && bc + be == 2 * n + 1;
                if !matches {
                    status = status.worst(Status::Falsified);
                }
                stats.push(StatsRow { n: *n, c: bc, e: be, matches });
            }
            Some(w)
        } else {
            None
        };
        Some(SetSection { spec: SetSummary::of(&spec), validity, block_intervals, witness, stats })
    };
    let report = ConstructReport { expansion: me, budget_stop, set, notes, status };
    Ok(Run { report, status, csv: Vec::new() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub certificate: GapCertificate,
    /// `(y_n, z_n)` misses the windowed outer approximation.
    pub disjoint_from_cover: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    /// Bracket porosity of the certified cover at `x` with `α_n = z_n − x`.
    pub bracket: PorosityVerdict,
    pub witnesses_recheck: bool,
    /// Identity ratio rows at the same scales.
    pub ratios: Vec<RatioRow>,
    pub ratios_positive: bool,
    /// `[g]`-porous ⇒ `(identity)`-porous on the certified cover.
    pub harness: HarnessReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub n_range: (usize, usize),
    pub witness: ExactDecimal,
    pub gaps: Vec<GapEntry>,
    pub first_good: FirstGood,
    pub foran: ForanConditionReport,
    pub metrics: Option<BridgeReport>,
    pub failures: Vec<String>,
    pub status: Status,
}

fn foran_spec(cfg: &RunConfig, me: &MultiExpansion) -> Result<ASetSpec> {
    let fc = &cfg.foran;
    let n = fc.n.unwrap_or(cfg.set.n);
    let eps: BigRational = fc.eps.clone().unwrap_or_else(|| cfg.set.eps.clone());
    let alpha = fc.alpha.clone().unwrap_or_else(|| cfg.set.alpha.clone());
    if fc.n.is_some() || fc.eps.is_some() || fc.alpha.is_some() {
        ASetSpec::zero_prefix(me.clone(), n, eps, alpha)
    } else {
        cfg.set.spec(me.clone())
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Run<VerifyReport>> {
    if cfg.expansion.mode == ModeConfig::Coupled {
        return Err(Error::config("verify needs an explicit expansion; coupled mode stops after a few blocks"));
    }
    let me = cfg.expansion.explicit()?;
    let spec = cfg.set.spec(me.clone())?;
    let (lo, hi) = cfg.verify.n_range;
    if lo < spec.n() {
        return Err(Error::config(format!("n-range starts below N = {}", spec.n())));
    }
    let depth = cfg.set.depth.max(hi);
    let witness = spec.generate_witness(depth, cfg.set.strategy, cfg.set.seed)?;
    let x = witness.x.clone();
    let mut failures = Vec::new();
    let mut status = Status::Pass;
    if !witness.verdict.is_in() {
        failures.push(format!("witness verdict {:?}", witness.verdict));
    }

    let mut gaps = Vec::new();
    // passing certificates with their neighbourhoods, in order of n
    let mut certified: Vec<(ExactDecimal, IntervalUnion)> = Vec::new();
    for n in lo..=hi {
        let certificate = gap_certificate(&spec, &cfg.g, &x, n)?;
        let neighbourhood = match gap_neighbourhood(&spec, &x, &certificate, cfg.verify.budget) {
            Ok(nb) => Some(nb),
            Err(e) if e.is_resource_limit() => {
                status = status.worst(Status::Unresolved);
                failures.push(format!("gap n = {n}: cross-check {e}"));
                None
            }
            Err(e) => return Err(e),
        };
        let disjoint_from_cover = neighbourhood.as_ref().is_some_and(|nb| !nb.intersects_open(&certificate.y, &certificate.z));
        if !certificate.passed {
            let failed: Vec<&str> = [
                ("run maximality", certificate.run_maximality.passed),
                ("digit criterion", certificate.digit_criterion.passed),
                ("zero blocks", certificate.zero_blocks.passed),
                ("g-inequality", certificate.g_inequality.passed),
            ]
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| *name)
            .collect();
            failures.push(format!("gap n = {n}: {}", failed.join(", ")));
        } else if neighbourhood.is_some() && !disjoint_from_cover {
            failures.push(format!("gap n = {n}: (y, z) meets the outer approximation"));
        }
        if let (true, true, Some(nb)) = (certificate.passed, disjoint_from_cover, neighbourhood) {
            if certified.len() == n - lo {
                certified.push((certificate.z.clone(), nb));
            }
        }
        gaps.push(GapEntry { certificate, disjoint_from_cover });
    }
    // Neighbourhood n only resolves blocks through v_n, so it is used on the
    // shell [z_{n+1}, z_n]; the last one also covers [x, z_hi].
    let mut cover = IntervalUnion::empty();
    let mut alphas = Vec::new();
    for (i, (z, nb)) in certified.iter().enumerate() {
        let inner = certified.get(i + 1).map_or_else(|| x.clone(), |(z1, _)| z1.clone());
        cover = cover.union(&nb.intersect_interval(&Interval::closed(inner, z.clone())));
        alphas.push(z.sub(&x)?);
    }
    let first_good = first_good_n(&spec, &cfg.g, &x, lo, hi)?;

    let fspec = foran_spec(cfg, &me)?;
    let seed = cfg.foran.seed.unwrap_or(cfg.set.seed);
    let foran = foran_condition_check(&fspec, &cfg.foran.windows(), fspec.n() + 1, cfg.foran.trials, seed)?;
    for w in &foran.windows {
        if !w.passed {
            failures.push(format!("dichotomy trials failed in window ({}, {})", w.window.0, w.window.1));
        }
    }

    let metrics = if alphas.is_empty() {
        None
    } else {
        let bracket = right_bracket_porous(&cover, &x, &cfg.g, &alphas)?;
        let witnesses_recheck = recheck_bracket(&cover, &x, &cfg.g, &bracket)?;
        if !bracket.is_in() || !witnesses_recheck {
            failures.push("certified gaps do not give bracket porosity".into());
        }
        let consequent = cfg.metrics.consequent()?;
        let ratios = p_plus(&cover, &x, &consequent, &alphas, Side::Right)?.rows;
        let ratios_positive = ratios.iter().all(|r| !r.ratio.is_zero());
        if !ratios_positive {
            failures.push("some certified scale has a zero porosity ratio".into());
        }
        let antecedent = Detector { g: cfg.g.clone(), schedule: alphas.clone() };
        let consequent = Detector { g: consequent, schedule: alphas };
        let corpus = [CorpusItem { m: cover, x: x.clone(), side: Side::Right }];
        let harness = implication_harness(&consequent, &antecedent, &corpus)?;
        if harness.table.violations > 0 {
            failures.push("implication violated on the certified cover".into());
        }
        Some(BridgeReport { bracket, witnesses_recheck, ratios, ratios_positive, harness })
    };

    if !failures.is_empty() && status == Status::Pass {
        status = Status::Falsified;
    }
    let mut csv = GapCertificate::csv_header().to_string();
    for g in &gaps {
        csv.push_str(&g.certificate.csv_row());
    }
    let report = VerifyReport { seed: cfg.set.seed, n_range: (lo, hi), witness: x, gaps, first_good, foran, metrics, failures, status };
    Ok(Run { report, status, csv: vec![("gaps".into(), csv)] })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub antecedent: ControlFunction,
    pub consequent: ControlFunction,
    pub schedule: Vec<ExactDecimal>,
    pub harness: HarnessReport,
    pub status: Status,
}

pub fn cmd_metrics(cfg: &RunConfig) -> Result<Run<MetricsReport>> {
    let path = cfg.metrics.corpus.as_ref().ok_or_else(|| Error::config("metrics.corpus is not set"))?;
    let corpus: Vec<CorpusItem> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let schedule = cfg.metrics.schedule.values();
    let antecedent = cfg.metrics.antecedent.clone().unwrap_or_else(|| cfg.g.clone());
    let consequent = cfg.metrics.consequent()?;
    let a = Detector { g: antecedent.clone(), schedule: schedule.clone() };
    let c = Detector { g: consequent.clone(), schedule: schedule.clone() };
    let harness = implication_harness(&c, &a, &corpus)?;
    let status = if harness.table.violations > 0 { Status::Falsified } else { Status::Pass };
    let mut csv = Vec::new();
    if consequent.class() == crate::control::FunctionClass::G1 {
        let mut body = String::from("item,h,lambda,ratio\n");
        for (i, item) in corpus.iter().enumerate() {
            let scan = p_plus(&item.m, &item.x, &consequent, &schedule, item.side)?;
            for r in &scan.rows {
                body.push_str(&format!("{i},{},{},{}\n", r.h, r.lambda, r.ratio));
            }
        }
        csv.push(("ratios".into(), body));
    }
    let report = MetricsReport { antecedent, consequent, schedule, harness, status };
    Ok(Run { report, status, csv })
}
