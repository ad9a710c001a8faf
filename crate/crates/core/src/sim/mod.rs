//! State-vector simulation over register layouts.

mod dense;
mod density;
mod find;
mod gates;
mod layout;
mod sparse;
mod state;

pub use dense::DenseState;
pub use density::{bures, density_from_samples, fidelity, DensityMatrix};
pub use find::{apply_flag_toggle, find_probability};
pub use gates::{Gate, GateLayer};
pub use layout::{
    check_bindings, Field, NamedField, RegisterLayout, Role, SlotBinding, TagSource,
    MAX_SPARSE_WIDTH,
};
pub use sparse::SparseState;
pub use state::{
    apply_basis_permutation, dump_triplets, inner_product, measure, outcome_distribution,
    pure_bures, pure_fidelity, total_variation, Basis, Measurement, QuantumState,
};

use std::sync::OnceLock;

use num_complex::Complex64;

/// Amplitudes below this magnitude are dropped by the sparse engine.
pub const PRUNE_EPSILON: f64 = 1e-15;
/// Norm tolerance for state invariants.
pub const NORM_TOLERANCE: f64 = 1e-9;

pub type Amplitude = Complex64;

/// Width caps for the dense engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineCaps {
    pub dense_qubits: usize,
    pub density_qubits: usize,
}

impl EngineCaps {
    pub const DEFAULT: EngineCaps = EngineCaps {
        dense_qubits: 24,
        density_qubits: 12,
    };

    /// Defaults overridden by `BSSP_DENSE_CAP` and `BSSP_DENSITY_CAP`.
    pub fn from_env() -> Self {
        let read = |key: &str, default: usize| {
            std::env::var(key)
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(default)
        };
        EngineCaps {
            dense_qubits: read("BSSP_DENSE_CAP", Self::DEFAULT.dense_qubits).min(30),
            density_qubits: read("BSSP_DENSITY_CAP", Self::DEFAULT.density_qubits).min(14),
        }
    }
}

/// Process-wide caps, read from the environment once.
pub fn caps() -> EngineCaps {
    static CAPS: OnceLock<EngineCaps> = OnceLock::new();
    *CAPS.get_or_init(EngineCaps::from_env)
}
