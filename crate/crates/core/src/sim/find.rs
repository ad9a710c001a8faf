use super::{check_bindings, Field, QuantumState, SlotBinding};
use crate::oracle::FlagPack;
use crate::{Error, Result};

/// Semi-classical toggle: flips `flag` on every basis state where some slot
/// queries a value inside the hidden sets.
pub fn apply_flag_toggle<S: QuantumState>(
    state: &mut S,
    flags: &FlagPack,
    slots: &[SlotBinding],
    flag: Field,
) -> Result<()> {
    if flag.width != 1 || flag.offset >= state.width() {
        return Err(Error::InvalidParameter(format!(
            "flag must be one qubit inside the {}-qubit layout",
            state.width()
        )));
    }
    check_bindings(state.width(), slots)?;
    let bit = 1u64 << flag.offset;
    state.map_basis(|i| {
        let hit = slots.iter().any(|s| flags.hits(s.tag_of(i), s.value.get(i)));
        Ok(if hit { i ^ bit } else { i })
    })
}

/// Mass with the flag set after the toggle. The flag must read 0 beforehand.
pub fn find_probability<S: QuantumState>(
    state: &S,
    flags: &FlagPack,
    slots: &[SlotBinding],
    flag: Field,
) -> Result<f64> {
    if flag.offset >= state.width() {
        return Err(Error::InvalidParameter("flag bit not in layout".into()));
    }
    if state.entries().iter().any(|(i, _)| flag.get(*i) != 0) {
        return Err(Error::ContractViolation("flag qubit must start in |0⟩".into()));
    }
    let mut s = state.clone();
    apply_flag_toggle(&mut s, flags, slots, flag)?;
    Ok(s
        .entries()
        .iter()
        .filter(|(i, _)| flag.get(*i) == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{empty_set, sample_bijective_shuffling, sample_hidden_chain};
    use crate::gf2::sample_simons_function;
    use crate::seed::{SeedSpec, Stream};
    use crate::sim::{Amplitude, SparseState};

    fn pack(size: usize, members: &[usize]) -> FlagPack {
        let mut set = empty_set(size);
        for &m in members {
            set.set(m, true);
        }
        FlagPack::from_sets(1, 1, vec![set]).unwrap()
    }

    fn slot() -> SlotBinding {
        SlotBinding::fixed(1, Field::new(0, 3))
    }

    #[test]
    fn no_hidden_amplitude_gives_zero() {
        let s = SparseState::basis(4, 2).unwrap();
        let p = find_probability(&s, &pack(8, &[5]), &[slot()], Field::new(3, 1)).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn all_amplitude_hidden_gives_one() {
        let s = SparseState::basis(4, 5).unwrap();
        let p = find_probability(&s, &pack(8, &[5]), &[slot()], Field::new(3, 1)).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn other_tags_are_not_flagged() {
        let s = SparseState::basis(4, 5).unwrap();
        let slot0 = SlotBinding::fixed(0, Field::new(0, 3));
        let p = find_probability(&s, &pack(8, &[5]), &[slot0], Field::new(3, 1)).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn uniform_query_finds_hidden_fraction() {
        for (n, d) in [(1, 1), (1, 2), (2, 1)] {
            let seeds = SeedSpec::new(11);
            let f = sample_simons_function(n, seeds.derive(Stream::Function, 0)).unwrap();
            let fb = sample_bijective_shuffling(d, f, &seeds).unwrap();
            let chain = sample_hidden_chain(&fb, 1, &seeds).unwrap();
            let flags = FlagPack::from_hidden(chain.level(1).unwrap());
            let m = fb.domain_bits();
            let size = 1u64 << m;
            let a = Amplitude::new((size as f64).recip().sqrt(), 0.0);
            let entries: Vec<_> = (0..size).map(|x| (x, a)).collect();
            let s = SparseState::from_entries(m + 1, &entries).unwrap();
            let slot = SlotBinding::fixed(1, Field::new(0, m));
            let p = find_probability(&s, &flags, &[slot], Field::new(m, 1)).unwrap();
            assert!((p - 0.5f64.powi(n as i32)).abs() < 1e-12, "n={n} d={d} p={p}");
        }
    }

    #[test]
    fn flag_must_start_clear() {
        let s = SparseState::basis(4, 0b1000).unwrap();
        assert!(find_probability(&s, &pack(8, &[5]), &[slot()], Field::new(3, 1)).is_err());
        assert!(find_probability(&s, &pack(8, &[5]), &[slot()], Field::new(9, 1)).is_err());
    }
}
