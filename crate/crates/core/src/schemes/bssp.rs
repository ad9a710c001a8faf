use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::harness::{
    run_cq_scheme, run_qc_scheme, ClassicalHook, CqControl, InvocationRecord, MeasureRecord,
    MeasureStep, OracleCall, QncCircuit, SchemeSpec, SchemeTranscript, Stage,
};
use crate::gf2::{
    coefficient_rank, sample_injective_function, sample_simons_function, solve_affine_system,
    AffineEquation, AffineSolution, BitWord, FunctionMode,
};
use crate::oracle::{sample_bijective_shuffling, BijectiveShuffling, OracleKind, OracleUnitary};
use crate::seed::{SeedSpec, Stream};
use crate::sim::{Basis, Field, GateLayer, RegisterLayout, Role, SlotBinding};
use crate::{Error, Result};

/// Search sample cap is `5n`.
pub const SEARCH_SAMPLES_PER_BIT: usize = 5;
/// Decision runs collect `3n` samples.
pub const DECISION_SAMPLES_PER_BIT: usize = 3;

/// Registers of the BSSP circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsspLayout {
    pub n: usize,
    pub d: usize,
    pub x: Field,
    pub value: Field,
    pub zeta: Field,
    pub eta: Field,
    /// One `ξ` ancilla per tag `1..=d`, present only against shadows.
    pub xi: Vec<Field>,
    pub registers: RegisterLayout,
}

impl BsspLayout {
    pub fn width(&self) -> usize {
        self.registers.width()
    }

    /// Oracle call `tag`.
    pub fn call(&self, tag: usize) -> OracleCall {
        let xi = self.xi.get(tag.wrapping_sub(1)).copied();
        let slot = if tag == 0 {
            SlotBinding::fixed(0, self.x).with_out(self.value)
        } else if tag < self.d {
            SlotBinding::fixed(tag, self.value).with_flags(None, None, xi)
        } else {
            SlotBinding::fixed(tag, self.value).with_flags(Some(self.zeta), Some(self.eta), xi)
        };
        OracleCall::new(vec![slot])
    }

    fn x_eta_qubits(&self) -> Vec<usize> {
        self.x.qubits().chain(self.eta.qubits()).collect()
    }

    fn h_x(&self) -> Result<GateLayer> {
        GateLayer::hadamards(self.x.qubits())
    }

    fn h_x_eta(&self) -> Result<GateLayer> {
        GateLayer::hadamards(self.x_eta_qubits())
    }
}

/// `x` (n qubits), `value` ((d+2)n), `ζ`, `η`, and `ξ_1..ξ_d` if asked.
pub fn bssp_layout(n: usize, d: usize, with_xi: bool) -> Result<BsspLayout> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("n and d must be positive".into()));
    }
    let mut r = RegisterLayout::new();
    let x = r.push("x", Role::Query, n)?;
    let value = r.push("value", Role::Query, (d + 2) * n)?;
    let zeta = r.push("zeta", Role::Ancilla, 1)?;
    let eta = r.push("eta", Role::Ancilla, 1)?;
    let mut xi = Vec::new();
    if with_xi {
        for t in 1..=d {
            xi.push(r.push(&format!("xi_{t}"), Role::Flag, 1)?);
        }
    }
    Ok(BsspLayout {
        n,
        d,
        x,
        value,
        zeta,
        eta,
        xi,
        registers: r,
    })
}

/// The QC form: `calls` stages (`H^n` then identities), each with one
/// oracle call; the last stage measures `value` and `ζ` and then `x, η` in
/// the Hadamard basis. With `no_hadamard` the Hadamards become an extra
/// stage before a computational measurement.
pub fn bssp_qc_spec(layout: &BsspLayout, calls: usize, no_hadamard: bool) -> Result<SchemeSpec> {
    if calls == 0 {
        return Err(Error::InvalidParameter("the quantum strategy needs at least one call".into()));
    }
    let mut stages = Vec::with_capacity(calls + 1);
    for k in 0..calls {
        let layer = if k == 0 { layout.h_x()? } else { GateLayer::identity() };
        stages.push(Stage::new(layer, Some(layout.call(k))));
    }
    let last = stages.last_mut().expect("at least one stage");
    last.measurements
        .push(MeasureStep::new("value", layout.value.qubits(), Basis::Computational));
    last.measurements
        .push(MeasureStep::new("zeta", layout.zeta.qubits(), Basis::Computational));
    if no_hadamard {
        stages.push(Stage::new(layout.h_x_eta()?, None).measuring(MeasureStep::new(
            "x_eta",
            layout.x_eta_qubits(),
            Basis::Computational,
        )));
    } else {
        last.measurements
            .push(MeasureStep::new("x_eta", layout.x_eta_qubits(), Basis::Hadamard));
    }
    let budget = stages.len();
    Ok(SchemeSpec::qc(budget, layout.width(), stages))
}

/// The bare-circuit form with `calls` oracle calls and `calls + 1` layers,
/// the last being `H` on `x` and `η`.
pub fn bssp_circuit(layout: &BsspLayout, calls: usize) -> Result<QncCircuit> {
    let mut layers = vec![layout.h_x()?];
    layers.extend((1..calls).map(|_| GateLayer::identity()));
    layers.push(layout.h_x_eta()?);
    Ok(QncCircuit {
        width: layout.width(),
        layers,
        calls: (0..calls).map(|t| layout.call(t)).collect(),
        input: Default::default(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    #[default]
    Qc,
    Cq,
}

/// What to do with a sample whose `ζ` reads 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZetaPolicy {
    /// Impossible on promised inputs: raise an internal-consistency error.
    #[default]
    Strict,
    /// Drop the sample.
    Discard,
    /// Keep the equation anyway.
    Ignore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Simon,
    Injective,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Simon => "simon",
            Verdict::Injective => "injective",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsspOptions {
    pub scheme: SchemeChoice,
    /// Oracle calls per sample; `d + 1` runs the full algorithm.
    pub calls: usize,
    pub no_hadamard: bool,
    pub zeta: ZetaPolicy,
    pub max_samples: usize,
    /// Decision mode collects every sample and issues a verdict.
    pub decision: bool,
    pub keep_transcripts: bool,
}

impl BsspOptions {
    pub fn search(n: usize, d: usize) -> Self {
        Self {
            scheme: SchemeChoice::Qc,
            calls: d + 1,
            no_hadamard: false,
            zeta: ZetaPolicy::Strict,
            max_samples: SEARCH_SAMPLES_PER_BIT * n,
            decision: false,
            keep_transcripts: false,
        }
    }

    pub fn decision(n: usize, d: usize) -> Self {
        Self {
            max_samples: DECISION_SAMPLES_PER_BIT * n,
            decision: true,
            ..Self::search(n, d)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsspResult {
    pub n: usize,
    pub d: usize,
    /// Set when the equations pin down a unique nonzero period.
    pub period: Option<BitWord>,
    pub equations: Vec<AffineEquation>,
    pub solution: AffineSolution,
    pub rank: usize,
    pub samples_used: usize,
    pub discarded: usize,
    pub verdict: Option<Verdict>,
    pub low_confidence: bool,
    /// Oracle calls made by each sample's quantum part.
    pub calls_per_sample: Vec<usize>,
    pub depth: usize,
    pub gate_set: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transcripts: Vec<SchemeTranscript>,
}

impl BsspResult {
    /// Every equation holds for `s`.
    pub fn consistent_with(&self, s: BitWord) -> Result<bool> {
        for e in &self.equations {
            if !e.is_satisfied_by(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    zeta: u8,
    j: u64,
    b: u8,
}

/// Draws the function and the bijective shuffling of one instance.
pub fn sample_instance(
    n: usize,
    d: usize,
    mode: FunctionMode,
    seeds: &SeedSpec,
) -> Result<BijectiveShuffling> {
    let fseed = seeds.derive(Stream::Function, 0);
    let f = match mode {
        FunctionMode::Simon => sample_simons_function(n, fseed)?,
        FunctionMode::Injective => sample_injective_function(n, fseed)?,
    };
    sample_bijective_shuffling(d, f, seeds)
}

struct Collector<'a> {
    layout: &'a BsspLayout,
    options: &'a BsspOptions,
    equations: Vec<AffineEquation>,
    discarded: usize,
    samples: usize,
    done: bool,
}

impl Collector<'_> {
    fn push(&mut self, s: Sample) -> Result<()> {
        self.samples += 1;
        if s.zeta == 0 {
            match self.options.zeta {
                ZetaPolicy::Strict => {
                    return Err(Error::InternalConsistency(
                        "ζ measured 0 after the final query".into(),
                    ))
                }
                ZetaPolicy::Discard => {
                    self.discarded += 1;
                    return Ok(());
                }
                ZetaPolicy::Ignore => {}
            }
        }
        self.equations
            .push(AffineEquation::new(BitWord::new(s.j, self.layout.n)?, s.b));
        if !self.options.decision {
            let sol = solve_affine_system(&self.equations, self.layout.n)?;
            self.done = matches!(sol, AffineSolution::Unique(_) | AffineSolution::Inconsistent);
        }
        Ok(())
    }

    fn finished(&self) -> bool {
        self.done || self.samples >= self.options.max_samples
    }
}

impl ClassicalHook for Collector<'_> {
    fn after_invocation(&mut self, record: &InvocationRecord) -> Result<CqControl> {
        let i = record.outcome;
        let l = self.layout;
        self.push(Sample {
            zeta: l.zeta.get(i) as u8,
            j: l.x.get(i),
            b: l.eta.get(i) as u8,
        })?;
        Ok(if self.finished() {
            CqControl::Stop
        } else {
            CqControl::Continue
        })
    }
}

fn outcome(records: &[MeasureRecord], label: &str) -> Result<u64> {
    records
        .iter()
        .find(|m| m.label == label)
        .map(|m| m.outcome)
        .ok_or_else(|| Error::InternalConsistency(format!("no {label} measurement recorded")))
}

/// Runs the BSSP algorithm with explicit options.
pub fn run_bssp_with(oracle: &OracleUnitary, options: &BsspOptions, seed: u64) -> Result<BsspResult> {
    let (n, d) = (oracle.n(), oracle.d());
    if options.calls == 0 || options.calls > d + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} oracle calls per sample; tags only go up to {d}",
            options.calls
        )));
    }
    let shadow = matches!(oracle.kind(), OracleKind::Shadow { .. });
    let layout = bssp_layout(n, d, shadow)?;
    let seeds = SeedSpec::new(seed);
    let mut c = Collector {
        layout: &layout,
        options,
        equations: Vec::new(),
        discarded: 0,
        samples: 0,
        done: false,
    };
    let mut transcripts = Vec::new();
    let mut calls_per_sample = Vec::new();
    let mut gate_set = BTreeSet::new();
    let depth;
    match options.scheme {
        SchemeChoice::Qc => {
            let spec = bssp_qc_spec(&layout, options.calls, options.no_hadamard)?;
            depth = spec.stages.len();
            while !c.finished() {
                let k = c.samples as u64;
                let t = run_qc_scheme(
                    &spec,
                    oracle,
                    &mut super::harness::NoHook,
                    seeds.derive(Stream::Measurement, k),
                )?;
                let j_b = outcome(&t.outcomes, "x_eta")?;
                let sample = Sample {
                    zeta: outcome(&t.outcomes, "zeta")? as u8,
                    j: j_b & ((1 << n) - 1),
                    b: (j_b >> n) as u8,
                };
                calls_per_sample.push(t.oracle_calls);
                gate_set.extend(t.gate_set());
                if options.keep_transcripts {
                    transcripts.push(t);
                }
                c.push(sample)?;
            }
        }
        SchemeChoice::Cq => {
            if options.no_hadamard {
                return Err(Error::InvalidParameter(
                    "the CQ form already ends in a computational measurement".into(),
                ));
            }
            let circuit = bssp_circuit(&layout, options.calls)?;
            depth = circuit.depth();
            let spec = SchemeSpec::cq(options.calls, circuit, options.max_samples);
            let t = run_cq_scheme(&spec, oracle, &mut c, seeds.derive(Stream::Measurement, 0))?;
            calls_per_sample.extend(t.invocations.iter().map(|i| i.oracle_tags.len()));
            gate_set.extend(t.gate_set());
            if options.keep_transcripts {
                transcripts.push(t);
            }
        }
    }
    let solution = solve_affine_system(&c.equations, n)?;
    let rank = coefficient_rank(&c.equations, n);
    let period = match solution {
        AffineSolution::Unique(s) if !s.is_zero() => Some(s),
        _ => None,
    };
    let verdict = options.decision.then(|| {
        if solution.admits_nonzero() {
            Verdict::Simon
        } else {
            Verdict::Injective
        }
    });
    Ok(BsspResult {
        n,
        d,
        period,
        low_confidence: options.decision && rank < n,
        equations: c.equations,
        solution,
        rank,
        samples_used: c.samples,
        discarded: c.discarded,
        verdict,
        calls_per_sample,
        depth,
        gate_set,
        transcripts,
    })
}

/// Search with the `(d+1)`-call QC algorithm and `max_samples` samples.
pub fn run_bssp_search(oracle: &OracleUnitary, max_samples: usize, seed: u64) -> Result<BsspResult> {
    let options = BsspOptions {
        max_samples,
        ..BsspOptions::search(oracle.n(), oracle.d())
    };
    run_bssp_with(oracle, &options, seed)
}

/// Decision with `samples` samples; the verdict is `simon` iff the system
/// admits a nonzero solution.
pub fn run_bssp_decision(oracle: &OracleUnitary, samples: usize, seed: u64) -> Result<BsspResult> {
    let options = BsspOptions {
        max_samples: samples,
        ..BsspOptions::decision(oracle.n(), oracle.d())
    };
    run_bssp_with(oracle, &options, seed)
}

/// Final answer of a search: the recovered period, else a uniform choice
/// among nonzero vectors consistent with the equations, else a uniform
/// nonzero vector.
pub fn guess_period<R: Rng + ?Sized>(result: &BsspResult, rng: &mut R) -> Result<BitWord> {
    if let Some(s) = result.period {
        return Ok(s);
    }
    let n = result.n;
    let mut candidates = Vec::new();
    if result.solution.is_consistent() {
        for v in 1..1u64 << n {
            let s = BitWord::new(v, n)?;
            if result.consistent_with(s)? {
                candidates.push(s);
            }
        }
    }
    if candidates.is_empty() {
        return BitWord::new(rng.random_range(1..1u64 << n), n);
    }
    Ok(candidates[rng.random_range(0..candidates.len())])
}
