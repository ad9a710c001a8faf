use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

type C = Complex64;

const fn re(x: f64) -> C {
    C::new(x, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Cnot { control: usize, target: usize },
    /// Arbitrary single-qubit unitary, rows/columns indexed by the qubit.
    Single { qubit: usize, matrix: [[C; 2]; 2] },
    /// Arbitrary two-qubit unitary; local index is `2·bit(first) + bit(second)`.
    Two {
        first: usize,
        second: usize,
        matrix: [[C; 4]; 4],
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::S(q) => vec![q],
            Gate::Single { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Two { first, second, .. } => vec![first, second],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::S(_) => "S",
            Gate::Cnot { .. } => "CNOT",
            Gate::Single { .. } => "U1",
            Gate::Two { .. } => "U2",
        }
    }

    /// The 2×2 matrix of a single-qubit gate.
    pub fn single_matrix(&self) -> Option<(usize, [[C; 2]; 2])> {
        let h = re(FRAC_1_SQRT_2);
        let (o, z) = (re(1.0), re(0.0));
        Some(match *self {
            Gate::H(q) => (q, [[h, h], [h, -h]]),
            Gate::X(q) => (q, [[z, o], [o, z]]),
            Gate::Z(q) => (q, [[o, z], [z, -o]]),
            Gate::S(q) => (q, [[o, z], [z, C::i()]]),
            Gate::Single { qubit, matrix } => (qubit, matrix),
            _ => return None,
        })
    }

    /// The 4×4 matrix of a two-qubit gate and its `(first, second)` qubits.
    pub fn two_matrix(&self) -> Option<(usize, usize, [[C; 4]; 4])> {
        match *self {
            Gate::Cnot { control, target } => {
                let (o, z) = (re(1.0), re(0.0));
                Some((
                    control,
                    target,
                    [[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]],
                ))
            }
            Gate::Two {
                first,
                second,
                matrix,
            } => Some((first, second, matrix)),
            _ => None,
        }
    }
}

/// One depth of gates acting on pairwise disjoint qubits.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Gate>", into = "Vec<Gate>")]
pub struct GateLayer {
    gates: Vec<Gate>,
}

impl GateLayer {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        let mut used = std::collections::BTreeSet::new();
        for g in &gates {
            let qs = g.qubits();
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::DepthViolation(format!(
                    "{} acts twice on qubit {}",
                    g.name(),
                    qs[0]
                )));
            }
            for q in qs {
                if !used.insert(q) {
                    return Err(Error::DepthViolation(format!(
                        "qubit {q} is targeted by more than one gate in a layer"
                    )));
                }
            }
        }
        Ok(Self { gates })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// Hadamards on every listed qubit.
    pub fn hadamards(qubits: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(qubits.into_iter().map(Gate::H).collect())
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_identity(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.gates.iter().flat_map(|g| g.qubits()).max()
    }

    pub fn gate_names(&self) -> Vec<&'static str> {
        self.gates.iter().map(Gate::name).collect()
    }
}

impl TryFrom<Vec<Gate>> for GateLayer {
    type Error = Error;

    fn try_from(gates: Vec<Gate>) -> Result<Self> {
        GateLayer::new(gates)
    }
}

impl From<GateLayer> for Vec<Gate> {
    fn from(layer: GateLayer) -> Self {
        layer.gates
    }
}
