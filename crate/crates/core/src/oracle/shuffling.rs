use serde::{Deserialize, Serialize};

use super::{empty_set, DomainSet};
use crate::gf2::{sample_permutation, FunctionMode, Permutation, SimonsInstance};
use crate::seed::{rng_from, SeedSpec, Stream};
use crate::{Error, Result};
use rand::Rng;

const NONE: u32 = u32::MAX;

/// A `(d, f)`-shuffling: `d` random permutations of `Z_2^{(d+2)n}` and the
/// partial map `f_d` defined on the image chain of `Z_2^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shuffling {
    d: usize,
    f: SimonsInstance,
    perms: Vec<Permutation>,
    /// `chain[j][x']` is the image of `x'` after `f_0..f_{j-1}`.
    chain: Vec<Vec<u32>>,
    /// Preimage in `Z_2^n` of each point of `S_d`, `NONE` elsewhere.
    origin: Vec<u32>,
}

impl Shuffling {
    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Width of the shuffled domain, `(d+2)n`.
    pub fn domain_bits(&self) -> usize {
        (self.d + 2) * self.f.n()
    }

    pub fn domain_size(&self) -> usize {
        1 << self.domain_bits()
    }

    pub fn function(&self) -> &SimonsInstance {
        &self.f
    }

    pub fn perm(&self, j: usize) -> &Permutation {
        &self.perms[j]
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// Elements of `S_j`, ordered by their preimage in `Z_2^n`.
    pub fn set(&self, j: usize) -> &[u32] {
        &self.chain[j]
    }

    pub fn set_bits(&self, j: usize) -> DomainSet {
        let mut s = empty_set(self.domain_size());
        for &x in &self.chain[j] {
            s.set(x as usize, true);
        }
        s
    }

    pub fn in_final_set(&self, x: u32) -> bool {
        self.origin[x as usize] != NONE
    }

    /// The point of `Z_2^n` that `x ∈ S_d` came from.
    pub fn origin(&self, x: u32) -> Option<u32> {
        match self.origin[x as usize] {
            NONE => None,
            o => Some(o),
        }
    }

    /// `f_d(x)`, or `None` for ⊥.
    pub fn final_map(&self, x: u32) -> Option<u32> {
        self.origin(x).map(|o| self.f.eval(o))
    }

    pub fn check_invariants(&self) -> Result<()> {
        let size = 1usize << self.n();
        for j in 0..self.d {
            for (x, &y) in self.chain[j].iter().enumerate() {
                if self.perms[j].apply(y) != self.chain[j + 1][x] {
                    return Err(Error::InternalConsistency(format!(
                        "S_{} is not the image of S_{j}",
                        j + 1
                    )));
                }
            }
        }
        for set in &self.chain {
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != size {
                return Err(Error::InternalConsistency("|S_j| != 2^n".into()));
            }
        }
        Ok(())
    }
}

/// Builds the `(d, f)`-shuffling for explicit permutations.
pub fn build_shuffling(d: usize, f: SimonsInstance, perms: Vec<Permutation>) -> Result<Shuffling> {
    if d == 0 {
        return Err(Error::InvalidParameter("depth d must be at least 1".into()));
    }
    if perms.len() != d {
        return Err(Error::InvalidParameter(format!(
            "expected {d} permutations, got {}",
            perms.len()
        )));
    }
    let bits = (d + 2) * f.n();
    for p in &perms {
        if p.bits() != bits {
            return Err(Error::WidthMismatch {
                expected: bits,
                actual: p.bits(),
            });
        }
    }
    let mut chain = Vec::with_capacity(d + 1);
    chain.push((0..1u32 << f.n()).collect::<Vec<_>>());
    for p in &perms {
        let next = chain.last().unwrap().iter().map(|&x| p.apply(x)).collect();
        chain.push(next);
    }
    let mut origin = vec![NONE; 1 << bits];
    for (x_prime, &x) in chain[d].iter().enumerate() {
        origin[x as usize] = x_prime as u32;
    }
    Ok(Shuffling {
        d,
        f,
        perms,
        chain,
        origin,
    })
}

/// A `(d, f)`-bijective shuffling `(f_0, …, f_{d-1}, f_d′, ζ, η)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectiveShuffling {
    shuffling: Shuffling,
    final_total: Vec<u32>,
    zeta: DomainSet,
    eta: DomainSet,
}

impl BijectiveShuffling {
    pub fn shuffling(&self) -> &Shuffling {
        &self.shuffling
    }

    pub fn n(&self) -> usize {
        self.shuffling.n()
    }

    pub fn d(&self) -> usize {
        self.shuffling.d
    }

    pub fn domain_bits(&self) -> usize {
        self.shuffling.domain_bits()
    }

    pub fn domain_size(&self) -> usize {
        self.shuffling.domain_size()
    }

    pub fn mode(&self) -> FunctionMode {
        self.shuffling.f.mode()
    }

    pub fn function(&self) -> &SimonsInstance {
        &self.shuffling.f
    }

    pub fn perm(&self, j: usize) -> &Permutation {
        &self.shuffling.perms[j]
    }

    /// `f_d′(x)`.
    pub fn final_total(&self, x: u32) -> u32 {
        self.final_total[x as usize]
    }

    pub fn final_table(&self) -> &[u32] {
        &self.final_total
    }

    pub fn zeta(&self, x: u32) -> u8 {
        u8::from(self.zeta[x as usize])
    }

    pub fn eta(&self, x: u32) -> u8 {
        u8::from(self.eta[x as usize])
    }

    pub fn zeta_bits(&self) -> &DomainSet {
        &self.zeta
    }

    pub fn eta_bits(&self) -> &DomainSet {
        &self.eta
    }

    /// Rebuilds from a shuffling and an explicit η table, checking every
    /// invariant.
    pub fn from_parts(shuffling: Shuffling, eta: DomainSet) -> Result<Self> {
        let (final_total, zeta) = totalize(&shuffling);
        if eta.len() != shuffling.domain_size() {
            return Err(Error::WidthMismatch {
                expected: shuffling.domain_size(),
                actual: eta.len(),
            });
        }
        let fb = Self {
            shuffling,
            final_total,
            zeta,
            eta,
        };
        fb.check_invariants()?;
        Ok(fb)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let sh = &self.shuffling;
        sh.check_invariants()?;
        for x in 0..sh.domain_size() as u32 {
            let inside = sh.in_final_set(x);
            let expected = sh.final_map(x).unwrap_or(x);
            if self.final_total(x) != expected || self.zeta(x) != u8::from(inside) {
                return Err(Error::InternalConsistency(format!("f_d′/ζ wrong at {x}")));
            }
            if !inside && self.eta(x) != 1 {
                return Err(Error::InternalConsistency(format!("η({x}) must be 1 off S_d")));
            }
        }
        if let Some(s) = sh.f.period() {
            let s = s.value() as usize;
            for (a, &xa) in sh.chain[sh.d].iter().enumerate() {
                let xb = sh.chain[sh.d][a ^ s];
                if self.eta(xa) == self.eta(xb) {
                    return Err(Error::InternalConsistency(format!(
                        "η pair rule violated at {xa}, {xb}"
                    )));
                }
            }
        }
        self.check_flagged_injective()
    }

    /// `x ↦ (f_d′(x), ζ(x), η(x))` must be injective on the whole domain.
    pub fn check_flagged_injective(&self) -> Result<()> {
        let mut seen = vec![u32::MAX; self.domain_size() * 4];
        for x in 0..self.domain_size() as u32 {
            let key = ((self.final_total(x) as usize) << 2)
                | ((self.zeta(x) as usize) << 1)
                | self.eta(x) as usize;
            if seen[key] != u32::MAX {
                return Err(Error::NotInjective {
                    first: u64::from(seen[key]),
                    second: u64::from(x),
                    image: key as u64,
                });
            }
            seen[key] = x;
        }
        Ok(())
    }
}

fn totalize(sh: &Shuffling) -> (Vec<u32>, DomainSet) {
    let size = sh.domain_size();
    let mut final_total: Vec<u32> = (0..size as u32).collect();
    let mut zeta = empty_set(size);
    for &x in &sh.chain[sh.d] {
        final_total[x as usize] = sh.final_map(x).expect("x is in S_d");
        zeta.set(x as usize, true);
    }
    (final_total, zeta)
}

/// Bijectivizes a shuffling, drawing the η coins from `seed`.
///
/// In simon mode one coin per preimage pair `{x′, x′ ⊕ s}` fixes both η
/// values; in injective mode every point of `S_d` gets an independent bit.
pub fn build_bijective_shuffling(shuffling: Shuffling, seed: u64) -> Result<BijectiveShuffling> {
    let mut rng = rng_from(seed);
    let mut eta = empty_set(shuffling.domain_size());
    eta.fill(true);
    let last = &shuffling.chain[shuffling.d];
    match shuffling.f.period() {
        Some(s) => {
            let s = s.value() as usize;
            for a in 0..last.len() {
                let b = a ^ s;
                if a < b {
                    let coin: bool = rng.random();
                    eta.set(last[a] as usize, coin);
                    eta.set(last[b] as usize, !coin);
                }
            }
        }
        None => {
            for &x in last {
                eta.set(x as usize, rng.random());
            }
        }
    }
    let (final_total, zeta) = totalize(&shuffling);
    Ok(BijectiveShuffling {
        shuffling,
        final_total,
        zeta,
        eta,
    })
}

/// Samples a uniform element of BSHUF(d, f).
pub fn sample_bijective_shuffling(
    d: usize,
    f: SimonsInstance,
    seeds: &SeedSpec,
) -> Result<BijectiveShuffling> {
    let bits = (d + 2) * f.n();
    let perms = (0..d)
        .map(|j| sample_permutation(bits, seeds.derive(Stream::Permutations, j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let sh = build_shuffling(d, f, perms)?;
    build_bijective_shuffling(sh, seeds.derive(Stream::Eta, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{sample_injective_function, sample_simons_function};

    fn simon_n1() -> SimonsInstance {
        SimonsInstance::from_parts(1, FunctionMode::Simon, vec![1, 1], Some(1)).unwrap()
    }

    #[test]
    fn identity_shuffle_n1_d1() {
        let sh = build_shuffling(1, simon_n1(), vec![Permutation::identity(3).unwrap()]).unwrap();
        assert_eq!(sh.set(1), &[0, 1]);
        assert_eq!(sh.final_map(0), Some(1));
        assert_eq!(sh.final_map(1), Some(1));
        for x in 2..8 {
            assert_eq!(sh.final_map(x), None);
        }
    }

    #[test]
    fn bijectivized_identity_shuffle_n1_d1() {
        let sh = build_shuffling(1, simon_n1(), vec![Permutation::identity(3).unwrap()]).unwrap();
        for seed in 0..8 {
            let fb = build_bijective_shuffling(sh.clone(), seed).unwrap();
            assert_eq!(fb.final_table(), &[1, 1, 2, 3, 4, 5, 6, 7]);
            let zeta: Vec<u8> = (0..8).map(|x| fb.zeta(x)).collect();
            assert_eq!(zeta, [1, 1, 0, 0, 0, 0, 0, 0]);
            assert_eq!(fb.eta(0) ^ fb.eta(1), 1);
            assert!((2..8).all(|x| fb.eta(x) == 1));
            fb.check_invariants().unwrap();
        }
    }

    #[test]
    fn injective_same_shuffle() {
        let f = SimonsInstance::from_parts(1, FunctionMode::Injective, vec![1, 0], None).unwrap();
        let sh = build_shuffling(1, f, vec![Permutation::identity(3).unwrap()]).unwrap();
        let mut etas = std::collections::BTreeSet::new();
        for seed in 0..32 {
            let fb = build_bijective_shuffling(sh.clone(), crate::seed::mix64(seed)).unwrap();
            assert_ne!(fb.final_total(0), fb.final_total(1));
            etas.insert((fb.eta(0), fb.eta(1)));
            fb.check_invariants().unwrap();
        }
        // both bits are free
        assert_eq!(etas.len(), 4);
    }

    #[test]
    fn cardinality_and_composition() {
        for seed in 0..10u64 {
            let seeds = SeedSpec::new(seed);
            let f = sample_simons_function(2, seeds.derive(Stream::Function, 0)).unwrap();
            let fb = sample_bijective_shuffling(2, f.clone(), &seeds).unwrap();
            let sh = fb.shuffling();
            for j in 0..=2 {
                assert_eq!(sh.set(j).len(), 4);
            }
            for x_prime in 0..4u32 {
                let x2 = sh.perm(1).apply(sh.perm(0).apply(x_prime));
                assert_eq!(sh.final_map(x2), Some(f.eval(x_prime)));
            }
        }
    }

    #[test]
    fn flagged_map_injective_exhaustively_small() {
        for n in 1..=2 {
            for d in 1..=2 {
                for seed in 0..5u64 {
                    let seeds = SeedSpec::new(seed * 31 + n as u64);
                    let f = sample_simons_function(n, seeds.derive(Stream::Function, 0)).unwrap();
                    sample_bijective_shuffling(d, f, &seeds)
                        .unwrap()
                        .check_invariants()
                        .unwrap();
                    let g = sample_injective_function(n, seeds.derive(Stream::Function, 1)).unwrap();
                    sample_bijective_shuffling(d, g, &seeds)
                        .unwrap()
                        .check_invariants()
                        .unwrap();
                }
            }
        }
    }

    #[test]
    fn wrong_permutation_count_or_width() {
        let p = Permutation::identity(3).unwrap();
        assert!(build_shuffling(2, simon_n1(), vec![p.clone()]).is_err());
        assert!(build_shuffling(1, simon_n1(), vec![Permutation::identity(4).unwrap()]).is_err());
        assert!(build_shuffling(0, simon_n1(), vec![]).is_err());
    }
}
