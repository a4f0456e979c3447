pub mod certificates;
pub mod config;
pub mod control;
pub mod decimal;
pub mod error;
pub mod expansion;
pub mod intervals;
pub mod metrics;
pub mod numeric;
pub mod pipeline;
pub mod sequence;
pub mod sets;

pub use control::{ControlFunction, Enclosure, Family, FunctionClass, LemmaScaffold};
pub use decimal::ExactDecimal;
pub use error::{Error, Result};
pub use intervals::{Interval, IntervalUnion};
pub use sequence::PorositySequence;
