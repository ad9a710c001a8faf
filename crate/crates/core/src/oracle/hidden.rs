//! Hidden sets: random nested supersets of the true image chain.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use super::{build_bijective_shuffling, build_shuffling, empty_set, BijectiveShuffling, DomainSet};
use crate::gf2::Permutation;
use crate::seed::{rng_from, SeedSpec, Stream};
use crate::{Error, Result};

/// The sets `S_l^(l), …, S_d^(l)` of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenSets {
    level: usize,
    d: usize,
    sets: Vec<DomainSet>,
}

impl HiddenSets {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Hidden set for layer `j` (`level ≤ j ≤ d`).
    pub fn set(&self, j: usize) -> &DomainSet {
        &self.sets[j - self.level]
    }

    pub fn contains(&self, j: usize, x: u32) -> bool {
        j >= self.level && j <= self.d && self.sets[j - self.level][x as usize]
    }

    pub fn size(&self, j: usize) -> usize {
        self.set(j).count_ones()
    }

    pub fn members(&self, j: usize) -> Vec<u32> {
        self.set(j).iter_ones().map(|x| x as u32).collect()
    }

    /// Builds a level from explicit sets, e.g. for counterfactual checks.
    pub fn from_sets(level: usize, d: usize, sets: Vec<DomainSet>) -> Result<Self> {
        if level == 0 || level > d || sets.len() != d - level + 1 {
            return Err(Error::InvalidParameter(format!(
                "level {level} with {} sets does not fit depth {d}",
                sets.len()
            )));
        }
        Ok(Self { level, d, sets })
    }
}

/// Levels `1..=k` of a hidden-set sequence; level 0 is the full domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenChain {
    levels: Vec<HiddenSets>,
}

impl HiddenChain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Highest sampled level (0 when empty).
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, l: usize) -> Option<&HiddenSets> {
        l.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    pub fn top(&self) -> Option<&HiddenSets> {
        self.levels.last()
    }

    /// Membership in `S_j^(l)`; level 0 is everything.
    pub fn contains(&self, l: usize, j: usize, x: u32) -> bool {
        l == 0 || self.levels[l - 1].contains(j, x)
    }

    fn size(&self, fb: &BijectiveShuffling, l: usize, j: usize) -> usize {
        if l == 0 {
            fb.domain_size()
        } else {
            self.levels[l - 1].size(j)
        }
    }

    pub fn push(&mut self, fb: &BijectiveShuffling, level: HiddenSets) -> Result<()> {
        if level.level != self.depth() + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected level {}, got {}",
                self.depth() + 1,
                level.level
            )));
        }
        self.levels.push(level);
        self.check_level(fb, self.depth())
    }

    /// Checks nesting, ratio, push-forward and containment for level `l`.
    pub fn check_level(&self, fb: &BijectiveShuffling, l: usize) -> Result<()> {
        let h = self
            .level(l)
            .ok_or_else(|| Error::InvalidParameter(format!("level {l} not sampled")))?;
        let n = fb.n();
        let sh = fb.shuffling();
        for j in l..=fb.d() {
            let set = h.set(j);
            if set.len() != fb.domain_size() {
                return Err(Error::WidthMismatch {
                    expected: fb.domain_size(),
                    actual: set.len(),
                });
            }
            if set.iter_ones().any(|x| !self.contains(l - 1, j, x as u32)) {
                return Err(Error::InternalConsistency(format!("S_{j}^({l}) not nested")));
            }
            if h.size(j) << n > self.size(fb, l - 1, j) {
                return Err(Error::InternalConsistency(format!("S_{j}^({l}) too large")));
            }
            if sh.set(j).iter().any(|&x| !set[x as usize]) {
                return Err(Error::InternalConsistency(format!("S_{j} ⊄ S_{j}^({l})")));
            }
            if j > l {
                let prev = h.set(j - 1);
                let pushed = prev.iter_ones().all(|x| set[fb.perm(j - 1).apply(x as u32) as usize]);
                if !pushed || h.size(j - 1) != h.size(j) {
                    return Err(Error::InternalConsistency(format!(
                        "f_{}(S_{}^({l})) != S_{j}^({l})",
                        j - 1,
                        j - 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_all(&self, fb: &BijectiveShuffling) -> Result<()> {
        (1..=self.depth()).try_for_each(|l| self.check_level(fb, l))
    }
}

/// Samples level `l` given levels `1..l` in `chain`.
///
/// `S_l^(l)` is `S_l` plus a uniform subset of `S_l^(l-1) \ S_l`, sized so
/// that `|S_l^(l)| = |S_l^(l-1)| / 2^n`; deeper layers are pushed forward
/// through `f_l, …, f_{d-1}`.
pub fn sample_hidden_sets(
    fb: &BijectiveShuffling,
    chain: &HiddenChain,
    level: usize,
    seed: u64,
) -> Result<HiddenSets> {
    let d = fb.d();
    if level == 0 || level > d {
        return Err(Error::InvalidParameter(format!("level {level} outside 1..={d}")));
    }
    if chain.depth() != level - 1 {
        return Err(Error::InvalidParameter(format!(
            "level {level} needs levels 1..{level} sampled first, chain has {}",
            chain.depth()
        )));
    }
    let n = fb.n();
    let sh = fb.shuffling();
    let prev_size = chain.size(fb, level - 1, level);
    let target = prev_size >> n;
    let truth = sh.set(level);
    if target < truth.len() {
        return Err(Error::ImpossibleHiddenSet {
            target,
            required: truth.len(),
        });
    }
    let truth_bits = sh.set_bits(level);
    let candidates: Vec<u32> = (0..fb.domain_size() as u32)
        .filter(|&x| chain.contains(level - 1, level, x) && !truth_bits[x as usize])
        .collect();
    let mut rng = rng_from(seed);
    let chosen = index::sample(&mut rng, candidates.len(), target - truth.len());
    let mut first = truth_bits;
    for i in chosen {
        first.set(candidates[i] as usize, true);
    }
    let mut sets = vec![first];
    for j in level..d {
        let mut next = empty_set(fb.domain_size());
        for x in sets.last().unwrap().iter_ones() {
            next.set(fb.perm(j).apply(x as u32) as usize, true);
        }
        sets.push(next);
    }
    Ok(HiddenSets { level, d, sets })
}

/// Samples levels `1..=up_to`, level `l` from stream `(HiddenSets, l)`.
pub fn sample_hidden_chain(
    fb: &BijectiveShuffling,
    up_to: usize,
    seeds: &SeedSpec,
) -> Result<HiddenChain> {
    let mut chain = HiddenChain::new();
    for l in 1..=up_to {
        let h = sample_hidden_sets(fb, &chain, l, seeds.derive(Stream::HiddenSets, l as u64))?;
        chain.push(fb, h)?;
    }
    Ok(chain)
}

/// One table restricted to the outside (`S_j^(l-1) \ S_j^(l)`) and inside
/// (`S_j^(l)`) parts. Entries are `(x, image)` in ascending `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceTable {
    pub j: usize,
    pub outside: Vec<(u32, u32)>,
    pub inside: Vec<(u32, u32)>,
}

/// `F^(l)` (outside parts) and `F̂^(l)` (inside parts) of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSlice {
    pub level: usize,
    /// `f_l, …, f_{d-1}` and finally `f_d′`.
    pub tables: Vec<SliceTable>,
    pub zeta: SliceTable,
    pub eta: SliceTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSlices {
    pub levels: Vec<LevelSlice>,
}

impl LevelSlices {
    /// Checks that outside and inside partition `S_j^(l-1)` for every table.
    pub fn check_partition(&self, fb: &BijectiveShuffling, chain: &HiddenChain) -> Result<()> {
        for slice in &self.levels {
            let l = slice.level;
            for t in slice.tables.iter().chain([&slice.zeta, &slice.eta]) {
                let mut seen = empty_set(fb.domain_size());
                for &(x, _) in t.outside.iter().chain(&t.inside) {
                    if seen.replace(x as usize, true) {
                        return Err(Error::InternalConsistency(format!(
                            "slices overlap at {x} (level {l}, j={})",
                            t.j
                        )));
                    }
                }
                let expected = (0..fb.domain_size() as u32)
                    .filter(|&x| chain.contains(l - 1, t.j, x))
                    .count();
                if seen.count_ones() != expected {
                    return Err(Error::InternalConsistency(format!(
                        "slices do not cover S_{}^({})",
                        t.j,
                        l - 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Splits every table of `fb` by the hidden-set chain. Needs levels `1..=d`.
pub fn slice_levels(fb: &BijectiveShuffling, chain: &HiddenChain) -> Result<LevelSlices> {
    if chain.depth() != fb.d() {
        return Err(Error::InvalidParameter(format!(
            "slicing needs levels 1..={}, chain has {}",
            fb.d(),
            chain.depth()
        )));
    }
    chain.check_all(fb)?;
    let d = fb.d();
    let split = |l: usize, j: usize, image: &dyn Fn(u32) -> u32| {
        let mut t = SliceTable {
            j,
            outside: Vec::new(),
            inside: Vec::new(),
        };
        for x in 0..fb.domain_size() as u32 {
            if !chain.contains(l - 1, j, x) {
                continue;
            }
            if chain.contains(l, j, x) {
                t.inside.push((x, image(x)));
            } else {
                t.outside.push((x, image(x)));
            }
        }
        t
    };
    let mut levels = Vec::with_capacity(d);
    for l in 1..=d {
        let mut tables: Vec<SliceTable> = (l..d)
            .map(|j| split(l, j, &|x| fb.perm(j).apply(x)))
            .collect();
        tables.push(split(l, d, &|x| fb.final_total(x)));
        levels.push(LevelSlice {
            level: l,
            tables,
            zeta: split(l, d, &|x| u32::from(fb.zeta(x))),
            eta: split(l, d, &|x| u32::from(fb.eta(x))),
        });
    }
    let slices = LevelSlices { levels };
    slices.check_partition(fb, chain)?;
    Ok(slices)
}

/// Redraws the hidden slice `F̂^(l)` while keeping everything outside the
/// level-`l` hidden sets: each `f_j` (`l ≤ j < d`) is replaced on `S_j^(l)`
/// by a uniform bijection onto `S_{j+1}^(l)`, and `f_d′, ζ, η` are
/// recomputed with fresh η coins. Levels `1..=l` of `chain` stay valid.
pub fn resample_hidden_slice(
    fb: &BijectiveShuffling,
    chain: &HiddenChain,
    level: usize,
    seed: u64,
) -> Result<BijectiveShuffling> {
    let h = chain
        .level(level)
        .ok_or_else(|| Error::InvalidParameter(format!("level {level} not sampled")))?;
    let seeds = SeedSpec::new(seed);
    let mut perms: Vec<Permutation> = fb.shuffling().perms().to_vec();
    for (j, perm) in perms.iter_mut().enumerate().skip(level) {
        let domain = h.members(j);
        let mut targets = h.members(j + 1);
        targets.shuffle(&mut seeds.rng(Stream::Resample, j as u64));
        let mut table = perm.table().to_vec();
        for (x, y) in domain.into_iter().zip(targets) {
            table[x as usize] = y;
        }
        *perm = Permutation::from_table(perm.bits(), table)?;
    }
    let sh = build_shuffling(fb.d(), fb.function().clone(), perms)?;
    build_bijective_shuffling(sh, seeds.derive(Stream::Eta, 0))
}
