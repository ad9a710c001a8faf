//! Runs the same circuit on the dense and sparse engines and compares
//! distributions, fidelities and Bures distance.
use bssp::sim::{
    outcome_distribution, pure_bures, pure_fidelity, total_variation, DenseState, DensityMatrix, Gate, GateLayer,
    QuantumState, SparseState,
};

fn run<S: QuantumState>() -> bssp::Result<S> {
    let mut s = S::zero(3)?;
    s.apply_layer(&GateLayer::hadamards([0])?)?;
    s.apply_layer(&GateLayer::new(vec![Gate::Cnot { control: 0, target: 1 }])?)?;
    s.apply_layer(&GateLayer::new(vec![Gate::Cnot { control: 1, target: 2 }, Gate::S(0)])?)?;
    Ok(s)
}

fn main() -> bssp::Result<()> {
    let dense: DenseState = run()?;
    let sparse: SparseState = run()?;
    let qubits = [0, 1, 2];
    let tv = total_variation(&outcome_distribution(&dense, &qubits), &outcome_distribution(&sparse, &qubits));
    println!("total variation {tv:.2e}");
    println!("fidelity {:.6}", pure_fidelity(&dense, &sparse));

    let zero = DenseState::zero(3)?;
    println!("bures to |000> {:.6}", pure_bures(&dense, &zero));
    let rho = DensityMatrix::from_pure(&dense)?;
    let sigma = DensityMatrix::from_pure(&zero)?;
    println!("density bures {:.6}, purity {:.3}", bssp::sim::bures(&rho, &sigma)?, rho.purity());
    Ok(())
}
