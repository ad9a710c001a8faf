//! Depth-accounted execution harness for hybrid quantum–classical schemes
//! and the BSSP algorithms built on it.

mod bssp;
mod harness;
mod sweep;

pub use bssp::{
    bssp_circuit, bssp_layout, bssp_qc_spec, guess_period, run_bssp_decision, run_bssp_search,
    run_bssp_with, sample_instance, BsspLayout, BsspOptions, BsspResult, SchemeChoice, Verdict,
    ZetaPolicy, DECISION_SAMPLES_PER_BIT, SEARCH_SAMPLES_PER_BIT,
};
pub use harness::{
    run_bare_qnc, run_cq_scheme, run_qc_scheme, CircuitInput, ClassicalHook, CqControl,
    InvocationRecord, MeasureRecord, MeasureStep, NoHook, OracleCall, QncCircuit, SchemeKind,
    SchemeSpec, SchemeTranscript, Stage, StageRecord,
};
pub use sweep::{run_depth_sweep, wilson_interval, Strategy, SweepRow, SweepTable};
