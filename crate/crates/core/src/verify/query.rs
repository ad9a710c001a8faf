use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::oracle::{BijectiveShuffling, DomainSet, HiddenChain, HiddenSets};
use crate::sim::{Amplitude, Field, Gate, GateLayer, QuantumState, RegisterLayout, Role, SlotBinding, SparseState};
use crate::{Error, Result};

/// Parallel query slots plus a semi-classical flag qubit and workspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLayout {
    pub n: usize,
    pub d: usize,
    pub registers: RegisterLayout,
    pub slots: Vec<SlotBinding>,
    pub flag: Field,
    pub workspace: Option<Field>,
}

impl QueryLayout {
    pub fn width(&self) -> usize {
        self.registers.width()
    }

    pub fn domain_bits(&self) -> usize {
        (self.d + 2) * self.n
    }

    /// Qubits a query-preparing unitary may act on: slot values, the
    /// standard query's output and the workspace.
    pub fn free_qubits(&self) -> Vec<usize> {
        self.slots
            .iter()
            .flat_map(|s| [Some(s.value), s.out])
            .flatten()
            .chain(self.workspace)
            .flat_map(|f| f.qubits())
            .collect()
    }

    /// `ξ` qubits of every slot.
    pub fn xi_qubits(&self) -> Vec<usize> {
        self.slots.iter().filter_map(|s| s.xi).map(|f| f.offset).collect()
    }

    pub fn zeta_qubit(&self) -> Option<usize> {
        self.slots.iter().find_map(|s| s.zeta).map(|f| f.offset)
    }
}

/// One slot per entry of `tags`, each with the ancillas its tag needs
/// (`out` for tag 0, `ξ` for tags `1..d`, `ζ, η, ξ` for tag `d`).
pub fn query_layout(n: usize, d: usize, tags: &[usize], workspace: usize) -> Result<QueryLayout> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("n and d must be positive".into()));
    }
    if let Some(t) = tags.iter().find(|&&t| t > d) {
        return Err(Error::InvalidParameter(format!("tag {t} exceeds d = {d}")));
    }
    let m = (d + 2) * n;
    let mut r = RegisterLayout::new();
    let mut slots = Vec::with_capacity(tags.len());
    for (k, &t) in tags.iter().enumerate() {
        let value = r.push(&format!("q{k}_value"), Role::Query, m)?;
        let mut slot = SlotBinding::fixed(t, value);
        if t == 0 {
            slot = slot.with_out(r.push(&format!("q{k}_out"), Role::Query, m)?);
        } else {
            let (zeta, eta) = if t == d {
                (
                    Some(r.push(&format!("q{k}_zeta"), Role::Ancilla, 1)?),
                    Some(r.push(&format!("q{k}_eta"), Role::Ancilla, 1)?),
                )
            } else {
                (None, None)
            };
            let xi = r.push(&format!("q{k}_xi"), Role::Ancilla, 1)?;
            slot = slot.with_flags(zeta, eta, Some(xi));
        }
        slots.push(slot);
    }
    let flag = r.push("find_flag", Role::Flag, 1)?;
    let workspace = if workspace > 0 {
        Some(r.push("workspace", Role::Workspace, workspace)?)
    } else {
        None
    };
    Ok(QueryLayout {
        n,
        d,
        registers: r,
        slots,
        flag,
        workspace,
    })
}

/// A query state and the unitary applied to it before the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryFixture {
    pub state: SparseState,
    pub unitary: Vec<GateLayer>,
}

fn random_unitary<R: Rng + ?Sized>(qubit: usize, rng: &mut R) -> Gate {
    let theta = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    let b = rng.random::<f64>() * std::f64::consts::TAU;
    let (c, s) = (theta.cos(), theta.sin());
    let e = |phi: f64| Amplitude::from_polar(1.0, phi);
    Gate::Single {
        qubit,
        matrix: [[e(a) * c, e(b) * s], [-e(-b) * s, e(-a) * c]],
    }
}

/// A random superposition of `support` basis states (random slot values,
/// outputs and workspace) and `layers` random layers, each with up to two
/// random single-qubit unitaries and one CNOT on the free qubits.
pub fn random_query_fixture<R: Rng + ?Sized>(
    layout: &QueryLayout,
    support: usize,
    layers: usize,
    rng: &mut R,
) -> Result<QueryFixture> {
    let mut fields: Vec<Field> = layout
        .slots
        .iter()
        .flat_map(|s| [Some(s.value), s.out])
        .flatten()
        .collect();
    fields.extend(layout.workspace);
    let mut indices = std::collections::BTreeSet::new();
    while indices.len() < support.max(1) {
        let mut i = 0u64;
        for f in &fields {
            i = f.set(i, rng.random_range(0..1u64 << f.width))?;
        }
        indices.insert(i);
    }
    let raw: Vec<Amplitude> = indices
        .iter()
        .map(|_| Amplitude::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let entries: Vec<(u64, Amplitude)> = indices
        .into_iter()
        .zip(raw)
        .map(|(i, a)| (i, a / norm))
        .collect();
    let state = SparseState::from_entries(layout.width(), &entries)?;
    let free = layout.free_qubits();
    let mut unitary = Vec::with_capacity(layers);
    for _ in 0..layers {
        let picks = index::sample(rng, free.len(), 4.min(free.len())).into_vec();
        let mut gates = Vec::new();
        for (k, &p) in picks.iter().enumerate().take(2) {
            if rng.random_bool(0.75) {
                gates.push(random_unitary(free[p], rng));
            } else if k == 0 {
                gates.push(Gate::X(free[p]));
            }
        }
        if picks.len() == 4 && rng.random_bool(0.5) {
            gates.push(Gate::Cnot {
                control: free[picks[2]],
                target: free[picks[3]],
            });
        }
        unitary.push(GateLayer::new(gates)?);
    }
    Ok(QueryFixture { state, unitary })
}

/// Level-`level` hidden sets enlarged to twice their size: extra points of
/// `S_l^(l-1) \ S_l^(l)` are added at layer `l` and pushed forward.
pub fn enlarge_hidden_sets<R: Rng + ?Sized>(
    fb: &BijectiveShuffling,
    chain: &HiddenChain,
    level: usize,
    rng: &mut R,
) -> Result<HiddenSets> {
    let h = chain
        .level(level)
        .ok_or_else(|| Error::InvalidParameter(format!("level {level} not sampled")))?;
    let d = fb.d();
    let base = h.set(level);
    let candidates: Vec<u32> = (0..fb.domain_size() as u32)
        .filter(|&x| chain.contains(level - 1, level, x) && !base[x as usize])
        .collect();
    let extra = h.size(level).min(candidates.len());
    let mut first: DomainSet = base.clone();
    for i in index::sample(rng, candidates.len(), extra) {
        first.set(candidates[i] as usize, true);
    }
    let mut sets = vec![first];
    for j in level..d {
        let mut next = crate::oracle::empty_set(fb.domain_size());
        for x in sets.last().expect("nonempty").iter_ones() {
            next.set(fb.perm(j).apply(x as u32) as usize, true);
        }
        sets.push(next);
    }
    HiddenSets::from_sets(level, d, sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::FunctionMode;
    use crate::oracle::{sample_hidden_chain, FlagPack};
    use crate::schemes::sample_instance;
    use crate::seed::{SeedSpec, Stream};
    use crate::sim::find_probability;

    #[test]
    fn layout_has_tag_specific_ancillas() {
        let l = query_layout(1, 2, &[0, 1, 2], 2).unwrap();
        let m = 4;
        assert_eq!(l.width(), (2 * m) + (m + 1) + (m + 3) + 1 + 2);
        assert_eq!(l.xi_qubits().len(), 2);
        assert!(l.zeta_qubit().is_some());
        assert!(query_layout(1, 2, &[3], 0).is_err());
    }

    #[test]
    fn enlarging_hidden_sets_never_lowers_find_probability() {
        for seed in 0..20u64 {
            let seeds = SeedSpec::new(seed);
            let layout = query_layout(1, 2, &[1, 2], 1).unwrap();
            let mut rng = seeds.rng(Stream::QueryState, 0);
            let fx = random_query_fixture(&layout, 3, 2, &mut rng).unwrap();
            let fb = sample_instance(1, 2, FunctionMode::Simon, &seeds).unwrap();
            let chain = sample_hidden_chain(&fb, 1, &seeds).unwrap();
            let h = chain.level(1).unwrap();
            let big = enlarge_hidden_sets(&fb, &chain, 1, &mut seeds.rng(Stream::Resample, 0)).unwrap();
            assert_eq!(big.size(1), 2 * h.size(1));
            let mut state = fx.state.clone();
            for l in &fx.unitary {
                state.apply_layer(l).unwrap();
            }
            let small_p = find_probability(&state, &FlagPack::from_hidden(h), &layout.slots, layout.flag).unwrap();
            let big_p = find_probability(&state, &FlagPack::from_hidden(&big), &layout.slots, layout.flag).unwrap();
            assert!(big_p + 1e-12 >= small_p);
        }
    }
}
