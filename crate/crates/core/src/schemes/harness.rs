use serde::{Deserialize, Serialize};

use crate::oracle::OracleUnitary;
use crate::seed::rng_from;
use crate::sim::{
    apply_basis_permutation, check_bindings, measure, Basis, GateLayer, QuantumState,
    SlotBinding, SparseState,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Qc,
    Cq,
    BareQnc,
}

/// One parallel oracle query: every slot is answered by a single call.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCall {
    pub slots: Vec<SlotBinding>,
}

impl OracleCall {
    pub fn new(slots: Vec<SlotBinding>) -> Self {
        Self { slots }
    }

    pub fn tags(&self) -> Vec<usize> {
        self.slots
            .iter()
            .map(|s| match s.tag {
                crate::sim::TagSource::Fixed(t) => t,
                crate::sim::TagSource::Field(_) => usize::MAX,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureStep {
    pub label: String,
    pub qubits: Vec<usize>,
    pub basis: Basis,
}

impl MeasureStep {
    pub fn new(label: &str, qubits: impl IntoIterator<Item = usize>, basis: Basis) -> Self {
        Self {
            label: label.to_owned(),
            qubits: qubits.into_iter().collect(),
            basis,
        }
    }
}

/// A quantum stage of a QC scheme: one gate layer, then at most one oracle
/// call, then optional measurements.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub layers: Vec<GateLayer>,
    pub oracle: Option<OracleCall>,
    pub measurements: Vec<MeasureStep>,
}

impl Stage {
    pub fn new(layer: GateLayer, oracle: Option<OracleCall>) -> Self {
        Self {
            layers: vec![layer],
            oracle,
            measurements: Vec::new(),
        }
    }

    pub fn measuring(mut self, step: MeasureStep) -> Self {
        self.measurements.push(step);
        self
    }
}

/// Whether an invocation starts from `|0…0⟩` or tries to reuse the state
/// of a previous one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitInput {
    #[default]
    Fresh,
    Carry,
}

/// A bare depth-`d` circuit `U_{d+1} O U_d … O U_1` ending in a full
/// computational measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QncCircuit {
    pub width: usize,
    pub layers: Vec<GateLayer>,
    pub calls: Vec<OracleCall>,
    #[serde(default)]
    pub input: CircuitInput,
}

impl QncCircuit {
    pub fn depth(&self) -> usize {
        self.calls.len()
    }

    fn validate(&self, budget: usize) -> Result<()> {
        if self.input == CircuitInput::Carry {
            return Err(Error::ContractViolation(
                "a CQ invocation cannot carry quantum state from an earlier one".into(),
            ));
        }
        if self.layers.len() != self.calls.len() + 1 {
            return Err(Error::DepthViolation(format!(
                "{} oracle calls need {} unitary layers, got {}",
                self.calls.len(),
                self.calls.len() + 1,
                self.layers.len()
            )));
        }
        if self.calls.len() > budget {
            return Err(Error::BudgetExceeded(format!(
                "circuit makes {} oracle calls, budget is {budget}",
                self.calls.len()
            )));
        }
        check_layers(self.width, &self.layers)?;
        for c in &self.calls {
            check_bindings(self.width, &c.slots)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    /// Depth budget: stages for QC, oracle calls per circuit for CQ and
    /// bare circuits.
    pub budget: usize,
    pub width: usize,
    #[serde(default)]
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub circuit: Option<QncCircuit>,
    /// Invocation cap for CQ schemes.
    #[serde(default)]
    pub max_invocations: usize,
}

impl SchemeSpec {
    pub fn qc(budget: usize, width: usize, stages: Vec<Stage>) -> Self {
        Self {
            kind: SchemeKind::Qc,
            budget,
            width,
            stages,
            circuit: None,
            max_invocations: 0,
        }
    }

    pub fn cq(budget: usize, circuit: QncCircuit, max_invocations: usize) -> Self {
        Self {
            kind: SchemeKind::Cq,
            budget,
            width: circuit.width,
            stages: Vec::new(),
            circuit: Some(circuit),
            max_invocations,
        }
    }

    pub fn bare(budget: usize, circuit: QncCircuit) -> Self {
        Self {
            kind: SchemeKind::BareQnc,
            max_invocations: 1,
            ..Self::cq(budget, circuit, 1)
        }
    }

    fn expect(&self, kind: SchemeKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidParameter(format!(
                "expected a {kind:?} spec, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub label: String,
    pub basis: Basis,
    pub outcome: u64,
    pub probability: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub gates: Vec<String>,
    pub oracle_tags: Vec<usize>,
    pub outcomes: Vec<MeasureRecord>,
    pub message: Option<String>,
}

/// Result of one bare circuit: classical data only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvocationRecord {
    pub seed: u64,
    pub gates: Vec<String>,
    pub oracle_tags: Vec<Vec<usize>>,
    pub outcome: u64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeTranscript {
    pub kind: SchemeKind,
    pub budget: usize,
    /// Quantum depth used under the scheme's convention.
    pub depth: usize,
    pub oracle_calls: usize,
    pub stages: Vec<StageRecord>,
    pub invocations: Vec<InvocationRecord>,
    pub outcomes: Vec<MeasureRecord>,
    pub seeds: Vec<u64>,
}

impl SchemeTranscript {
    fn new(spec: &SchemeSpec) -> Self {
        Self {
            kind: spec.kind,
            budget: spec.budget,
            depth: 0,
            oracle_calls: 0,
            stages: Vec::new(),
            invocations: Vec::new(),
            outcomes: Vec::new(),
            seeds: Vec::new(),
        }
    }

    /// Distinct gate names used anywhere in the run.
    pub fn gate_set(&self) -> std::collections::BTreeSet<String> {
        self.stages
            .iter()
            .flat_map(|s| s.gates.iter())
            .chain(self.invocations.iter().flat_map(|i| i.gates.iter()))
            .cloned()
            .collect()
    }

    pub fn outcome(&self, label: &str) -> Option<u64> {
        self.outcomes
            .iter()
            .find(|m| m.label == label)
            .map(|m| m.outcome)
    }
}

/// Classical processing between quantum steps. Hooks see classical data
/// only.
pub trait ClassicalHook {
    /// Called after QC stage `stage`; may return a message to log.
    fn after_stage(&mut self, _stage: usize, _outcomes: &[MeasureRecord]) -> Result<Option<String>> {
        Ok(None)
    }

    /// Called after each CQ invocation.
    fn after_invocation(&mut self, _record: &InvocationRecord) -> Result<CqControl> {
        Ok(CqControl::Continue)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CqControl {
    Continue,
    Stop,
}

pub struct NoHook;

impl ClassicalHook for NoHook {}

fn check_layers(width: usize, layers: &[GateLayer]) -> Result<()> {
    for l in layers {
        if let Some(q) = l.max_qubit() {
            if q >= width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    actual: q + 1,
                });
            }
        }
    }
    Ok(())
}

fn names(layer: &GateLayer) -> impl Iterator<Item = String> + '_ {
    layer.gate_names().into_iter().map(str::to_owned)
}

/// Runs a QC scheme on one persistent state.
pub fn run_qc_scheme(
    spec: &SchemeSpec,
    oracle: &OracleUnitary,
    hook: &mut dyn ClassicalHook,
    seed: u64,
) -> Result<SchemeTranscript> {
    spec.expect(SchemeKind::Qc)?;
    if spec.stages.len() > spec.budget {
        return Err(Error::BudgetExceeded(format!(
            "{} stages against a depth budget of {}",
            spec.stages.len(),
            spec.budget
        )));
    }
    for (i, st) in spec.stages.iter().enumerate() {
        if st.layers.len() > 1 {
            return Err(Error::DepthViolation(format!(
                "stage {i} has {} gate layers, one is allowed",
                st.layers.len()
            )));
        }
        check_layers(spec.width, &st.layers)?;
        if let Some(call) = &st.oracle {
            check_bindings(spec.width, &call.slots)?;
        }
    }
    let mut transcript = SchemeTranscript::new(spec);
    transcript.seeds.push(seed);
    let mut rng = rng_from(seed);
    let mut state = SparseState::zero(spec.width)?;
    for (i, st) in spec.stages.iter().enumerate() {
        let mut rec = StageRecord::default();
        for layer in &st.layers {
            state.apply_layer(layer)?;
            rec.gates.extend(names(layer));
        }
        if let Some(call) = &st.oracle {
            apply_basis_permutation(&mut state, oracle, &call.slots)?;
            rec.oracle_tags = call.tags();
            transcript.oracle_calls += 1;
        }
        for m in &st.measurements {
            let r = measure(&mut state, &m.qubits, m.basis, &mut rng)?;
            rec.outcomes.push(MeasureRecord {
                label: m.label.clone(),
                basis: m.basis,
                outcome: r.outcome,
                probability: r.probability,
            });
        }
        transcript.outcomes.extend(rec.outcomes.iter().cloned());
        rec.message = hook.after_stage(i, &rec.outcomes)?;
        transcript.stages.push(rec);
        transcript.depth += 1;
    }
    Ok(transcript)
}

/// Runs one fresh circuit and measures every qubit.
pub fn run_bare_qnc(
    circuit: &QncCircuit,
    budget: usize,
    oracle: &OracleUnitary,
    seed: u64,
) -> Result<InvocationRecord> {
    circuit.validate(budget)?;
    let mut rng = rng_from(seed);
    let mut state = SparseState::zero(circuit.width)?;
    let mut gates = Vec::new();
    let mut tags = Vec::new();
    for (i, layer) in circuit.layers.iter().enumerate() {
        state.apply_layer(layer)?;
        gates.extend(names(layer));
        if let Some(call) = circuit.calls.get(i) {
            apply_basis_permutation(&mut state, oracle, &call.slots)?;
            tags.push(call.tags());
        }
    }
    let all: Vec<usize> = (0..circuit.width).collect();
    let r = measure(&mut state, &all, Basis::Computational, &mut rng)?;
    Ok(InvocationRecord {
        seed,
        gates,
        oracle_tags: tags,
        outcome: r.outcome,
        probability: r.probability,
    })
}

/// Runs a CQ scheme: fresh circuits driven by a classical hook, with
/// invocation `k` measured from `mix64`-derived seed `k`.
pub fn run_cq_scheme(
    spec: &SchemeSpec,
    oracle: &OracleUnitary,
    hook: &mut dyn ClassicalHook,
    seed: u64,
) -> Result<SchemeTranscript> {
    if spec.kind != SchemeKind::BareQnc {
        spec.expect(SchemeKind::Cq)?;
    }
    let circuit = spec
        .circuit
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("CQ spec has no circuit".into()))?;
    circuit.validate(spec.budget)?;
    let mut transcript = SchemeTranscript::new(spec);
    transcript.depth = circuit.depth();
    let seeds = crate::seed::SeedSpec::new(seed);
    for k in 0..spec.max_invocations {
        let s = seeds.derive(crate::seed::Stream::Measurement, k as u64);
        let rec = run_bare_qnc(circuit, spec.budget, oracle, s)?;
        transcript.seeds.push(s);
        transcript.oracle_calls += rec.oracle_tags.len();
        transcript.outcomes.push(MeasureRecord {
            label: format!("invocation_{k}"),
            basis: Basis::Computational,
            outcome: rec.outcome,
            probability: rec.probability,
        });
        let control = hook.after_invocation(&rec)?;
        transcript.invocations.push(rec);
        if control == CqControl::Stop {
            break;
        }
    }
    Ok(transcript)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::sample_simons_function;
    use crate::oracle::{oracle_unitary, sample_bijective_shuffling};
    use crate::seed::{SeedSpec, Stream};
    use crate::sim::{Field, Gate};

    fn oracle() -> OracleUnitary {
        let seeds = SeedSpec::new(1);
        let f = sample_simons_function(1, seeds.derive(Stream::Function, 0)).unwrap();
        oracle_unitary(&sample_bijective_shuffling(1, f, &seeds).unwrap()).unwrap()
    }

    #[test]
    fn too_many_stages_rejected() {
        let stages = vec![Stage::new(GateLayer::identity(), None); 3];
        let spec = SchemeSpec::qc(2, 4, stages);
        let err = run_qc_scheme(&spec, &oracle(), &mut NoHook, 0).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }

    #[test]
    fn two_layers_in_a_stage_rejected() {
        let mut st = Stage::new(GateLayer::hadamards([0]).unwrap(), None);
        st.layers.push(GateLayer::hadamards([0]).unwrap());
        let spec = SchemeSpec::qc(2, 4, vec![st]);
        let err = run_qc_scheme(&spec, &oracle(), &mut NoHook, 0).unwrap_err();
        assert!(matches!(err, Error::DepthViolation(_)));
    }

    #[test]
    fn qc_counts_stages_and_calls() {
        let x = Field::new(0, 1);
        let out = Field::new(1, 3);
        let call = OracleCall::new(vec![SlotBinding::fixed(0, x).with_out(out)]);
        let st = Stage::new(GateLayer::hadamards([0]).unwrap(), Some(call))
            .measuring(MeasureStep::new("x", [0], Basis::Computational));
        let spec = SchemeSpec::qc(1, 4, vec![st]);
        let t = run_qc_scheme(&spec, &oracle(), &mut NoHook, 9).unwrap();
        assert_eq!((t.depth, t.oracle_calls), (1, 1));
        assert_eq!(t.stages[0].oracle_tags, vec![0]);
        assert!(t.outcome("x").is_some());
    }

    #[test]
    fn carryover_is_a_contract_violation() {
        let c = QncCircuit {
            width: 2,
            layers: vec![GateLayer::identity()],
            calls: vec![],
            input: CircuitInput::Carry,
        };
        let spec = SchemeSpec::cq(1, c, 3);
        let err = run_cq_scheme(&spec, &oracle(), &mut NoHook, 0).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn bare_circuit_layer_count_enforced() {
        let c = QncCircuit {
            width: 2,
            layers: vec![GateLayer::identity()],
            calls: vec![OracleCall::default()],
            input: CircuitInput::Fresh,
        };
        assert!(matches!(
            run_bare_qnc(&c, 1, &oracle(), 0),
            Err(Error::DepthViolation(_))
        ));
    }

    #[test]
    fn cq_invocations_are_independent_records() {
        let c = QncCircuit {
            width: 1,
            layers: vec![GateLayer::new(vec![Gate::H(0)]).unwrap()],
            calls: vec![],
            input: CircuitInput::Fresh,
        };
        let spec = SchemeSpec::cq(0, c, 64);
        let t = run_cq_scheme(&spec, &oracle(), &mut NoHook, 5).unwrap();
        assert_eq!(t.invocations.len(), 64);
        let ones = t.invocations.iter().filter(|r| r.outcome == 1).count();
        assert!(ones > 16 && ones < 48);
        assert_eq!(t.oracle_calls, 0);
    }
}
