//! Finite certificates for the two halves of the main construction: gaps
//! to the right of set points, and the refinement dichotomy on the left.

mod foran;
mod gap;

pub use foran::{
    check_refinement, foran_condition_check, foran_dichotomy, foran_refine, foran_step, pair_structure, refinement_index,
    synth_displacement_pair, trial_depth, DisplacementPair, ForanConditionReport, ForanStepReport, PairCase,
    PairStructure, RefinementCheck, TranslateEvidence, Trial, WindowOutcome, IMPLICATION_NOTE, SURROGATE_NOTE,
};
pub use gap::{
    asymptotic_threshold, cross_check_gap, first_good_n, gap_certificate, gap_neighbourhood, max_run, CheckOutcome,
    FirstGood, GapCertificate, MaxRun,
};
