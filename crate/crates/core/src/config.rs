//! Run configuration: a TOML file whose exact quantities are strings.
//!
//! ```toml
//! [f]
//! family = "linear"
//! c = "1/2"
//!
//! [g]
//! family = "linear"
//! c = "1/10"
//!
//! [set]
//! N = 3
//! eps = "1"
//! alpha = "3/4"
//! ```

use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::control::{rational_str, ControlFunction, FunctionClass};
use crate::decimal::ExactDecimal;
use crate::error::{Error, Result};
use crate::expansion::{MultiExpansion, DEFAULT_TERM_BUDGET};
use crate::metrics::geometric_schedule;
use crate::numeric::int;
use crate::sets::{ASetSpec, Strategy, DEFAULT_NODE_BUDGET};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub f: ControlFunction,
    pub g: ControlFunction,
    #[serde(default)]
    pub sequence: SequenceConfig,
    #[serde(default)]
    pub expansion: ExpansionConfig,
    pub set: SetConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub foran: ForanConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceConfig {
    pub x1: ExactDecimal,
    pub count: usize,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        SequenceConfig { x1: "0.4".parse().expect("literal"), count: 200 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeConfig {
    #[default]
    Explicit,
    Coupled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionConfig {
    #[serde(default)]
    pub mode: ModeConfig,
    /// Explicit block sizes; the last one repeats up to `blocks`.
    #[serde(default = "default_d")]
    pub d: Vec<usize>,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    /// Coupled mode: blocks to attempt and sequence terms allowed.
    #[serde(default = "default_coupled_blocks")]
    pub coupled_blocks: usize,
    #[serde(default = "default_term_budget")]
    pub term_budget: usize,
}

fn default_d() -> Vec<usize> {
    vec![2]
}

fn default_blocks() -> usize {
    441
}

fn default_coupled_blocks() -> usize {
    3
}

fn default_term_budget() -> usize {
    DEFAULT_TERM_BUDGET
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            mode: ModeConfig::Explicit,
            d: default_d(),
            blocks: default_blocks(),
            coupled_blocks: default_coupled_blocks(),
            term_budget: default_term_budget(),
        }
    }
}

impl ExpansionConfig {
    pub fn explicit(&self) -> Result<MultiExpansion> {
        let mut d = self.d.clone();
        let last = *d.last().ok_or_else(|| Error::config("expansion.d is empty"))?;
        d.resize(self.blocks.max(d.len()), last);
        MultiExpansion::from_explicit(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(with = "rational_str")]
    pub eps: BigRational,
    #[serde(with = "rational_str")]
    pub alpha: BigRational,
    /// `N²` block values; all zero when omitted.
    #[serde(default)]
    pub prefix: Option<Vec<String>>,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_depth")]
    pub depth: usize,
}

fn default_strategy() -> Strategy {
    Strategy::MaxC
}

fn default_depth() -> usize {
    20
}

impl SetConfig {
    pub fn spec(&self, me: MultiExpansion) -> Result<ASetSpec> {
        let prefix = match &self.prefix {
            None => vec![BigUint::default(); self.n * self.n],
            Some(p) => p
                .iter()
                .map(|s| s.trim().parse::<BigUint>().map_err(|_| Error::config(format!("bad prefix block {s:?}"))))
                .collect::<Result<_>>()?,
        };
        ASetSpec::new(me, self.n, self.eps.clone(), self.alpha.clone(), prefix)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Inclusive range of `n` for gap certificates.
    pub n_range: (usize, usize),
    /// Node budget for outer approximations.
    pub budget: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { n_range: (3, 7), budget: DEFAULT_NODE_BUDGET }
    }
}

/// The set refined by the dichotomy trials; defaults to `[set]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForanConfig {
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    #[serde(default, with = "opt_rational")]
    pub eps: Option<BigRational>,
    #[serde(default, with = "opt_rational")]
    pub alpha: Option<BigRational>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Open windows as `[lo, hi]` decimal strings; `(0, 1)` when empty.
    #[serde(default)]
    pub windows: Vec<(ExactDecimal, ExactDecimal)>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_trials() -> usize {
    20
}

impl Default for ForanConfig {
    fn default() -> Self {
        ForanConfig { n: None, eps: None, alpha: None, trials: default_trials(), windows: Vec::new(), seed: None }
    }
}

mod opt_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(crate::numeric::format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| crate::numeric::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl ForanConfig {
    pub fn windows(&self) -> Vec<(ExactDecimal, ExactDecimal)> {
        if self.windows.is_empty() {
            vec![(ExactDecimal::zero(), ExactDecimal::one())]
        } else {
            self.windows.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub start: ExactDecimal,
    pub ratio: ExactDecimal,
    pub count: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { start: "0.1".parse().expect("literal"), ratio: "0.1".parse().expect("literal"), count: 12 }
    }
}

impl ScheduleConfig {
    pub fn values(&self) -> Vec<ExactDecimal> {
        geometric_schedule(&self.start, &self.ratio, self.count)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// JSON list of `{ m, x, side }` items.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    /// Function of the claimed-weaker notion; identity in `G₁` by default.
    #[serde(default)]
    pub consequent: Option<ControlFunction>,
    /// Function of the claimed-stronger notion; `g` by default.
    #[serde(default)]
    pub antecedent: Option<ControlFunction>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
}

impl MetricsConfig {
    pub fn consequent(&self) -> Result<ControlFunction> {
        match &self.consequent {
            Some(c) => Ok(c.clone()),
            None => ControlFunction::new(crate::control::Family::linear(int(1)), "1".parse()?, FunctionClass::G1),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads and checks a config; relative corpus paths resolve against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = RunConfig::from_toml(&text)?;
        if let Some(c) = &cfg.metrics.corpus {
            if c.is_relative() {
                cfg.metrics.corpus = Some(path.parent().unwrap_or(Path::new(".")).join(c));
            }
        }
        if let Some(c) = &cfg.metrics.corpus {
            if !c.exists() {
                return Err(Error::config(format!("corpus file {} does not exist", c.display())));
            }
        }
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        for (name, h) in [("f", &self.f), ("g", &self.g)] {
            ControlFunction::new(h.family().clone(), h.delta().clone(), h.class())?;
            if h.class() != FunctionClass::G3 {
                return Err(Error::config(format!("{name} must be declared G3, got {}", h.class())));
            }
        }
        let e = &self.expansion;
        if e.blocks == 0 || e.coupled_blocks == 0 || e.term_budget == 0 || self.verify.budget == 0 {
            return Err(Error::config("budgets and block counts must be positive"));
        }
        if e.d.contains(&0) {
            return Err(Error::config("block sizes must be positive"));
        }
        if self.sequence.count == 0 {
            return Err(Error::config("sequence.count must be positive"));
        }
        let (lo, hi) = self.verify.n_range;
        if lo > hi {
            return Err(Error::config(format!("empty n-range {lo}..{hi}")));
        }
        if self.metrics.schedule.count == 0 {
            return Err(Error::config("metrics.schedule.count must be positive"));
        }
        for c in [&self.metrics.consequent, &self.metrics.antecedent].into_iter().flatten() {
            if c.class() == FunctionClass::G {
                return Err(Error::config("metric functions must be declared G1, G2 or G3"));
            }
        }
        if let Some(eps) = &self.foran.eps {
            if eps <= &int(0) {
                return Err(Error::config("foran.eps must be positive"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[f]
family = "linear"
c = "1/2"

[g]
family = "linear"
c = "1/10"

[set]
N = 3
eps = "1"
alpha = "3/4"
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.sequence.count, 200);
        assert_eq!(cfg.expansion.mode, ModeConfig::Explicit);
        let me = cfg.expansion.explicit().unwrap();
        assert_eq!(me.blocks(), 441);
        let spec = cfg.set.spec(me).unwrap();
        assert!(spec.validate().passed);
        assert_eq!(cfg.foran.windows().len(), 1);
    }

    #[test]
    fn partial_tables_fill_defaults() {
        let text = format!("{MINIMAL}\n[verify]\nn_range = [4, 9]\n[sequence]\ncount = 12\n[foran]\neps = \"2\"\n");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.verify.budget, DEFAULT_NODE_BUDGET);
        assert_eq!(cfg.verify.n_range, (4, 9));
        assert_eq!(cfg.sequence.x1.to_string(), "0.4");
        assert_eq!(cfg.foran.trials, 20);
        assert_eq!(cfg.foran.n, None);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_toml("[f]\nfamily = 3").is_err());
        let typo = MINIMAL.replace("[set]", "[set]\nNN = 4");
        assert!(matches!(RunConfig::from_toml(&typo), Err(Error::Config(_))));
        let g2 = MINIMAL.replace("c = \"1/10\"", "c = \"2\"\nclass = \"G2\"");
        assert!(RunConfig::from_toml(&g2).is_err());
        let zero = format!("{MINIMAL}\n[verify]\nn_range = [3, 4]\nbudget = 0\n");
        assert!(RunConfig::from_toml(&zero).is_err());
    }
}
