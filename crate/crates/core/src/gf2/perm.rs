use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seed::rng_from;
use crate::{Error, Result};

/// Largest domain exponent for tabulated permutations.
pub const MAX_PERMUTATION_BITS: usize = 24;

/// A bijection of `0..2^bits` stored as an image table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    bits: usize,
    table: Vec<u32>,
}

impl Permutation {
    pub fn identity(bits: usize) -> Result<Self> {
        check_bits(bits)?;
        Ok(Self {
            bits,
            table: (0..1u32 << bits).collect(),
        })
    }

    /// Wraps a table after checking that it is a bijection.
    pub fn from_table(bits: usize, table: Vec<u32>) -> Result<Self> {
        check_bits(bits)?;
        if table.len() != 1usize << bits {
            return Err(Error::WidthMismatch {
                expected: 1 << bits,
                actual: table.len(),
            });
        }
        let perm = Self { bits, table };
        perm.check_bijection()?;
        Ok(perm)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Permutation {
            bits: self.bits,
            table: inv,
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.bits != other.bits {
            return Err(Error::WidthMismatch {
                expected: self.bits,
                actual: other.bits,
            });
        }
        Ok(Permutation {
            bits: self.bits,
            table: other.table.iter().map(|&x| self.apply(x)).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn check_bijection(&self) -> Result<()> {
        check_bijective_table(&self.table)
    }
}

/// Fails with the first collision found, or on an out-of-range image.
pub(crate) fn check_bijective_table(table: &[u32]) -> Result<()> {
    let mut seen = vec![u32::MAX; table.len()];
    for (x, &y) in table.iter().enumerate() {
        let slot = seen.get_mut(y as usize).ok_or_else(|| {
            Error::InvalidParameter(format!("image {y} outside domain of size {}", table.len()))
        })?;
        if *slot != u32::MAX {
            return Err(Error::NotInjective {
                first: u64::from(*slot),
                second: x as u64,
                image: u64::from(y),
            });
        }
        *slot = x as u32;
    }
    Ok(())
}

fn check_bits(bits: usize) -> Result<()> {
    if bits > MAX_PERMUTATION_BITS {
        return Err(Error::Resource {
            what: "permutation table bits",
            required: bits,
            available: MAX_PERMUTATION_BITS,
        });
    }
    Ok(())
}

/// Uniform permutation of `0..2^bits` via Fisher–Yates.
pub fn sample_permutation(bits: usize, seed: u64) -> Result<Permutation> {
    let mut perm = Permutation::identity(bits)?;
    perm.table.shuffle(&mut rng_from(seed));
    Ok(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn zero_bits_is_identity_on_one_element() {
        let p = sample_permutation(0, 3).unwrap();
        assert_eq!(p.table(), &[0]);
    }

    #[test]
    fn inverse_composes_to_identity() {
        for seed in 0..20 {
            let p = sample_permutation(6, seed).unwrap();
            assert!(p.compose(&p.inverse()).unwrap().is_identity());
            assert!(p.inverse().compose(&p).unwrap().is_identity());
        }
    }

    #[test]
    fn too_wide_is_resource_error() {
        assert!(matches!(
            sample_permutation(25, 0),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn non_bijection_rejected() {
        assert!(matches!(
            Permutation::from_table(2, vec![0, 1, 1, 3]),
            Err(Error::NotInjective { image: 1, .. })
        ));
    }

    #[test]
    fn all_24_permutations_of_four_points_are_uniform() {
        let trials = 10_000u64;
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        for seed in 0..trials {
            let p = sample_permutation(2, crate::seed::mix64(seed)).unwrap();
            *counts.entry(p.table().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 24);
        let expected = trials as f64 / 24.0;
        let sigma = (trials as f64 * (1.0 / 24.0) * (23.0 / 24.0)).sqrt();
        for (perm, c) in counts {
            assert!(
                (c as f64 - expected).abs() <= 3.0 * sigma,
                "{perm:?} seen {c} times"
            );
        }
    }
}
