//! Control functions with certified enclosure evaluation, and the scaffold
//! `α`, `β`, `g_L`, `δ₁` derived from a G₃ function.

mod enclosure;
mod function;
mod minimize;
mod scaffold;

pub use enclosure::Enclosure;
pub use function::{ClassReport, ClassViolation, ControlFunction, Family, FunctionClass};
pub use scaffold::{LemmaScaffold, DELTA1_PLACES};

pub(crate) use enclosure::{refine_cmp, refine_cmp_pair, RatInterval, START_PLACES};
pub(crate) use function::rational_str;
