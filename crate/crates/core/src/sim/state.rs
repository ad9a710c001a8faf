use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_bindings, Amplitude, Gate, GateLayer, SlotBinding};
use crate::oracle::OracleUnitary;
use crate::{Error, Result};

/// Operations shared by the dense and sparse engines.
pub trait QuantumState: Clone + Sized {
    /// `|0…0⟩` on `width` qubits.
    fn zero(width: usize) -> Result<Self>;

    /// Builds a state from `(basis index, amplitude)` pairs; the vector must
    /// have unit norm.
    fn from_entries(width: usize, entries: &[(u64, Amplitude)]) -> Result<Self>;

    fn width(&self) -> usize;

    fn amplitude(&self, index: u64) -> Amplitude;

    /// Nonzero amplitudes in ascending basis order.
    fn entries(&self) -> Vec<(u64, Amplitude)>;

    fn apply_gate(&mut self, gate: &Gate);

    /// Relabels basis states; `map` must be injective on the support.
    fn map_basis<F>(&mut self, map: F) -> Result<()>
    where
        F: Fn(u64) -> Result<u64>;

    /// Zeroes every basis state rejected by `keep` and scales the rest.
    fn project(&mut self, keep: &dyn Fn(u64) -> bool, scale: f64);

    fn norm_sqr(&self) -> f64;

    fn support_size(&self) -> usize {
        self.entries().len()
    }

    fn basis(width: usize, index: u64) -> Result<Self> {
        Self::from_entries(width, &[(index, Amplitude::new(1.0, 0.0))])
    }

    fn apply_layer(&mut self, layer: &GateLayer) -> Result<()> {
        if let Some(q) = layer.max_qubit() {
            if q >= self.width() {
                return Err(Error::WidthMismatch {
                    expected: self.width(),
                    actual: q + 1,
                });
            }
        }
        for g in layer.gates() {
            self.apply_gate(g);
        }
        Ok(())
    }
}

/// Checks a list of entries for range and unit norm.
pub(crate) fn check_entries(width: usize, entries: &[(u64, Amplitude)]) -> Result<()> {
    if let Some(&(i, _)) = entries.iter().find(|(i, _)| width < 64 && i >> width != 0) {
        return Err(Error::InvalidParameter(format!(
            "basis index {i} outside {width}-qubit register"
        )));
    }
    let norm: f64 = entries.iter().map(|(_, a)| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > super::NORM_TOLERANCE {
        return Err(Error::InvalidParameter(format!("state norm² is {norm}, expected 1")));
    }
    Ok(())
}

/// Applies an oracle to the bound query slots of a state.
pub fn apply_basis_permutation<S: QuantumState>(
    state: &mut S,
    oracle: &OracleUnitary,
    slots: &[SlotBinding],
) -> Result<()> {
    check_bindings(state.width(), slots)?;
    state.map_basis(|i| oracle.map_basis(i, slots))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Computational,
    Hadamard,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Bit `k` is the result for the `k`-th listed qubit.
    pub outcome: u64,
    pub probability: f64,
}

fn gather(index: u64, qubits: &[usize]) -> u64 {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// Born-rule distribution of a computational measurement of `qubits`.
pub fn outcome_distribution<S: QuantumState>(state: &S, qubits: &[usize]) -> BTreeMap<u64, f64> {
    let mut dist = BTreeMap::new();
    for (i, a) in state.entries() {
        *dist.entry(gather(i, qubits)).or_insert(0.0) += a.norm_sqr();
    }
    dist
}

/// Measures `qubits` and collapses the state.
///
/// The Hadamard basis applies `H` to each measured qubit and then measures
/// computationally; the post-measurement state is left in that rotated frame.
/// Outcomes are drawn by inverse CDF over ascending outcome values from a
/// single uniform draw.
pub fn measure<S: QuantumState, R: Rng + ?Sized>(
    state: &mut S,
    qubits: &[usize],
    basis: Basis,
    rng: &mut R,
) -> Result<Measurement> {
    if qubits.is_empty() {
        return Err(Error::InvalidParameter("empty measurement qubit set".into()));
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= state.width()) {
        return Err(Error::WidthMismatch {
            expected: state.width(),
            actual: q + 1,
        });
    }
    if basis == Basis::Hadamard {
        state.apply_layer(&GateLayer::hadamards(qubits.iter().copied())?)?;
    }
    let dist = outcome_distribution(state, qubits);
    let u: f64 = rng.random();
    let total: f64 = dist.values().sum();
    let mut acc = 0.0;
    let mut chosen = None;
    for (&outcome, &p) in &dist {
        if p <= 0.0 {
            continue;
        }
        acc += p / total;
        chosen = Some((outcome, p));
        if u < acc {
            break;
        }
    }
    let (outcome, probability) =
        chosen.ok_or_else(|| Error::InternalConsistency("measuring a zero state".into()))?;
    let owned = qubits.to_vec();
    state.project(&move |i| gather(i, &owned) == outcome, 1.0 / probability.sqrt());
    Ok(Measurement {
        outcome,
        probability,
    })
}

/// `⟨a|b⟩`.
pub fn inner_product<A: QuantumState, B: QuantumState>(a: &A, b: &B) -> Amplitude {
    a.entries()
        .into_iter()
        .map(|(i, x)| x.conj() * b.amplitude(i))
        .sum()
}

/// `|⟨a|b⟩|`.
pub fn pure_fidelity<A: QuantumState, B: QuantumState>(a: &A, b: &B) -> f64 {
    inner_product(a, b).norm().min(1.0)
}

/// Bures distance of two pure states, `min_θ ‖a − e^{iθ} b‖`.
///
/// Equal to `√(2 − 2|⟨a|b⟩|)` but accurate when the states are close.
pub fn pure_bures<A: QuantumState, B: QuantumState>(a: &A, b: &B) -> f64 {
    let ip = inner_product(a, b);
    let w = if ip.norm() > 0.0 { ip.conj() / ip.norm() } else { Amplitude::new(1.0, 0.0) };
    let mut sq = 0.0;
    for (i, x) in a.entries() {
        sq += (x - w * b.amplitude(i)).norm_sqr();
    }
    for (i, y) in b.entries() {
        if a.amplitude(i) == Amplitude::new(0.0, 0.0) {
            sq += y.norm_sqr();
        }
    }
    sq.sqrt()
}

/// Total variation distance between two outcome distributions.
pub fn total_variation(p: &BTreeMap<u64, f64>, q: &BTreeMap<u64, f64>) -> f64 {
    let keys: std::collections::BTreeSet<_> = p.keys().chain(q.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// `(index, re, im)` triplets for debugging tiny states.
pub fn dump_triplets<S: QuantumState>(state: &S, max_width: usize) -> Result<Vec<(u64, f64, f64)>> {
    if state.width() > max_width {
        return Err(Error::Resource {
            what: "state dump width",
            required: state.width(),
            available: max_width,
        });
    }
    Ok(state
        .entries()
        .into_iter()
        .map(|(i, a)| (i, a.re, a.im))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{sample_simons_function, Permutation};
    use crate::seed::rng_from;
    use crate::sim::{DenseState, Field, SparseState};
    use rand::Rng;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = SparseState::zero(1).unwrap();
        s.apply_gate(&Gate::H(0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - c(h)).norm() < 1e-12);
        assert!((s.amplitude(1) - c(h)).norm() < 1e-12);
    }

    #[test]
    fn cnot_flips_target() {
        // |10⟩ with qubit 1 as control.
        let mut s = DenseState::basis(2, 0b10).unwrap();
        s.apply_gate(&Gate::Cnot { control: 1, target: 0 });
        assert_eq!(s.entries(), vec![(0b11, c(1.0))]);
        let mut t = SparseState::basis(2, 0b10).unwrap();
        t.apply_gate(&Gate::Cnot { control: 1, target: 0 });
        assert_eq!(t.entries(), vec![(0b11, c(1.0))]);
    }

    #[test]
    fn computational_measure_of_one() {
        let mut s = SparseState::basis(1, 1).unwrap();
        let m = measure(&mut s, &[0], Basis::Computational, &mut rng_from(1)).unwrap();
        assert_eq!(m.outcome, 1);
        assert!((m.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_measure_of_plus() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for seed in 0..20 {
            let mut s = DenseState::from_entries(1, &[(0, c(h)), (1, c(h))]).unwrap();
            let m = measure(&mut s, &[0], Basis::Hadamard, &mut rng_from(seed)).unwrap();
            assert_eq!(m.outcome, 0);
            assert!((m.probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_measurement_rejected() {
        let mut s = SparseState::zero(1).unwrap();
        assert!(measure(&mut s, &[], Basis::Computational, &mut rng_from(0)).is_err());
    }

    #[test]
    fn measuring_simon_values_leaves_coset() {
        let n = 2;
        for seed in 0..20 {
            let f = sample_simons_function(n, seed).unwrap();
            let s = f.period().unwrap().value();
            let amp = c(0.5);
            let entries: Vec<_> = (0..4u64)
                .map(|x| (x | (u64::from(f.eval(x as u32)) << n), amp))
                .collect();
            let mut st = SparseState::from_entries(2 * n, &entries).unwrap();
            measure(&mut st, &[2, 3], Basis::Computational, &mut rng_from(seed)).unwrap();
            let xs: Vec<u64> = st.entries().iter().map(|(i, _)| i & 3).collect();
            assert_eq!(xs.len(), 2);
            assert_eq!(xs[0] ^ xs[1], s);
            assert!((st.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn relabeling_keeps_amplitudes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = Permutation::from_table(3, vec![5, 2, 7, 0, 1, 3, 6, 4]).unwrap();
        let mut s = SparseState::from_entries(3, &[(1, c(h)), (6, c(-h))]).unwrap();
        s.map_basis(|i| Ok(u64::from(p.apply(i as u32)))).unwrap();
        assert_eq!(s.support_size(), 2);
        assert_eq!(s.amplitude(2), c(h));
        assert_eq!(s.amplitude(6), c(-h));
        let before = s.clone();
        s.map_basis(Ok).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn collisions_are_rejected() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = SparseState::from_entries(2, &[(0, c(h)), (1, c(h))]).unwrap();
        assert!(s.map_basis(|_| Ok(0)).is_err());
    }

    fn random_layer<R: Rng>(width: usize, rng: &mut R) -> GateLayer {
        let mut qubits: Vec<usize> = (0..width).collect();
        rand::seq::SliceRandom::shuffle(qubits.as_mut_slice(), rng);
        let mut gates = Vec::new();
        let mut it = qubits.into_iter();
        while let Some(q) = it.next() {
            match rng.random_range(0..4) {
                0 => gates.push(Gate::H(q)),
                1 => {
                    if let Some(t) = it.next() {
                        gates.push(Gate::Cnot { control: q, target: t });
                    }
                }
                2 => gates.push(Gate::S(q)),
                _ => {}
            }
        }
        GateLayer::new(gates).unwrap()
    }

    #[test]
    fn dense_and_sparse_agree() {
        let mut rng = rng_from(42);
        for _ in 0..10 {
            let width = rng.random_range(2..=8);
            let mut d = DenseState::zero(width).unwrap();
            let mut s = SparseState::zero(width).unwrap();
            for _ in 0..4 {
                let layer = random_layer(width, &mut rng);
                d.apply_layer(&layer).unwrap();
                s.apply_layer(&layer).unwrap();
                let p = crate::gf2::sample_permutation(width, rng.random()).unwrap();
                d.map_basis(|i| Ok(u64::from(p.apply(i as u32)))).unwrap();
                s.map_basis(|i| Ok(u64::from(p.apply(i as u32)))).unwrap();
            }
            for i in 0..1u64 << width {
                assert!((d.amplitude(i) - s.amplitude(i)).norm() < 1e-12);
            }
            let all: Vec<usize> = (0..width).collect();
            let tv = total_variation(&outcome_distribution(&d, &all), &outcome_distribution(&s, &all));
            assert!(tv < 1e-9);
            assert!((d.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hadamard_basis_matches_explicit_rotation() {
        let mut rng = rng_from(3);
        let width = 4;
        let mut s = SparseState::zero(width).unwrap();
        for _ in 0..3 {
            s.apply_layer(&random_layer(width, &mut rng)).unwrap();
        }
        let qubits = [0, 2];
        let mut rotated = s.clone();
        rotated
            .apply_layer(&GateLayer::hadamards(qubits).unwrap())
            .unwrap();
        let expected = outcome_distribution(&rotated, &qubits);
        for seed in 0..10 {
            let mut a = s.clone();
            let mut b = rotated.clone();
            let ma = measure(&mut a, &qubits, Basis::Hadamard, &mut rng_from(seed)).unwrap();
            let mb = measure(&mut b, &qubits, Basis::Computational, &mut rng_from(seed)).unwrap();
            assert_eq!(ma.outcome, mb.outcome);
            assert!((expected[&ma.outcome] - ma.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_bures_matches_closed_form() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = SparseState::basis(1, 0).unwrap();
        let plus = SparseState::from_entries(1, &[(0, c(h)), (1, Amplitude::new(0.0, h))]).unwrap();
        let expected = (2.0 - 2.0 * h).sqrt();
        assert!((pure_bures(&zero, &plus) - expected).abs() < 1e-12);
        assert!((pure_bures(&plus, &zero) - expected).abs() < 1e-12);
        let one = SparseState::basis(1, 1).unwrap();
        assert!((pure_bures(&zero, &one) - 2f64.sqrt()).abs() < 1e-12);
        assert!(pure_bures(&plus, &plus) < 1e-15);
    }

    #[test]
    fn triplet_dump_is_gated_by_width() {
        let s = SparseState::zero(3).unwrap();
        assert_eq!(dump_triplets(&s, 4).unwrap(), vec![(0, 1.0, 0.0)]);
        assert!(dump_triplets(&s, 2).is_err());
    }

    #[test]
    fn field_widths_are_checked() {
        let mut s = SparseState::zero(2).unwrap();
        let layer = GateLayer::new(vec![Gate::H(5)]).unwrap();
        assert!(s.apply_layer(&layer).is_err());
        let _ = Field::new(0, 1);
    }
}
