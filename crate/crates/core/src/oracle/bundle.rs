//! Versioned container for a sampled bijective shuffling.
//!
//! Layout: the 8-byte magic `BSSPORC1`, a little-endian `u32` header length,
//! the JSON [`BundleHeader`], then binary [`TableData`] records in order:
//! `f`, `f_0 … f_{d-1}`, `f_d′`, `ζ`, `η`.

use serde::{Deserialize, Serialize};

use super::{build_shuffling, empty_set, BijectiveShuffling};
use crate::gf2::{FunctionMode, Permutation, SimonsInstance, TableData};
use crate::{Error, Result};

pub const BUNDLE_MAGIC: &[u8; 8] = b"BSSPORC1";
pub const BUNDLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleHeader {
    pub version: u32,
    pub n: usize,
    pub d: usize,
    pub mode: FunctionMode,
    pub period: Option<u64>,
    /// Master seed and stream indices the oracle was drawn from.
    pub seed_lineage: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleBundle {
    pub header: BundleHeader,
    pub oracle: BijectiveShuffling,
}

impl OracleBundle {
    pub fn new(oracle: BijectiveShuffling, seed_lineage: Vec<u64>) -> Self {
        let header = BundleHeader {
            version: BUNDLE_VERSION,
            n: oracle.n(),
            d: oracle.d(),
            mode: oracle.mode(),
            period: oracle.function().period().map(|s| s.value()),
            seed_lineage,
        };
        Self { header, oracle }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = serde_json::to_vec(&self.header)?;
        let mut out = Vec::new();
        out.extend_from_slice(BUNDLE_MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        let fb = &self.oracle;
        let bits = fb.domain_bits() as u32;
        TableData::new(fb.n() as u32, fb.function().table().to_vec()).write_binary(&mut out);
        for j in 0..fb.d() {
            TableData::new(bits, fb.perm(j).table().to_vec()).write_binary(&mut out);
        }
        TableData::new(bits, fb.final_table().to_vec()).write_binary(&mut out);
        for set in [fb.zeta_bits(), fb.eta_bits()] {
            TableData::new(1, set.iter().map(|b| u32::from(*b)).collect()).write_binary(&mut out);
        }
        Ok(out)
    }

    /// Decodes and re-validates every invariant of the stored oracle.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let rest = bytes
            .strip_prefix(BUNDLE_MAGIC.as_slice())
            .ok_or_else(|| Error::Format("missing oracle bundle magic".into()))?;
        if rest.len() < 4 {
            return Err(Error::Format("truncated bundle header".into()));
        }
        let (len, rest) = rest.split_at(4);
        let len = u32::from_le_bytes(len.try_into().expect("4 bytes")) as usize;
        if rest.len() < len {
            return Err(Error::Format("truncated bundle header".into()));
        }
        let (header, mut rest) = rest.split_at(len);
        let header: BundleHeader = serde_json::from_slice(header)?;
        if header.version != BUNDLE_VERSION {
            return Err(Error::Format(format!("unsupported bundle version {}", header.version)));
        }
        let mut next = || -> Result<TableData> {
            let (t, r) = TableData::read_binary(rest)?;
            rest = r;
            Ok(t)
        };
        let f = next()?;
        let period = header.period.map(|s| s as u32);
        let f = SimonsInstance::from_parts(header.n, header.mode, f.values, period)?;
        let bits = (header.d + 2) * header.n;
        let perms = (0..header.d)
            .map(|_| Permutation::from_table(bits, next()?.values))
            .collect::<Result<Vec<_>>>()?;
        let final_table = next()?.values;
        let zeta = next()?.values;
        let eta_table = next()?.values;
        let sh = build_shuffling(header.d, f, perms)?;
        let mut eta = empty_set(sh.domain_size());
        if eta_table.len() != eta.len() {
            return Err(Error::Format("η table has the wrong length".into()));
        }
        for (i, &b) in eta_table.iter().enumerate() {
            eta.set(i, b == 1);
        }
        let oracle = BijectiveShuffling::from_parts(sh, eta)?;
        let stored_zeta = oracle
            .zeta_bits()
            .iter()
            .map(|b| u32::from(*b))
            .eq(zeta.iter().copied());
        if oracle.final_table() != final_table.as_slice() || !stored_zeta {
            return Err(Error::Format("stored f_d′ or ζ disagrees with the permutations".into()));
        }
        Ok(Self { header, oracle })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{sample_injective_function, sample_simons_function};
    use crate::oracle::sample_bijective_shuffling;
    use crate::seed::{SeedSpec, Stream};

    #[test]
    fn round_trip_both_modes() {
        let seeds = SeedSpec::new(21);
        let f = sample_simons_function(2, seeds.derive(Stream::Function, 0)).unwrap();
        let g = sample_injective_function(2, seeds.derive(Stream::Function, 1)).unwrap();
        for f in [f, g] {
            let b = OracleBundle::new(sample_bijective_shuffling(2, f, &seeds).unwrap(), vec![21]);
            let bytes = b.to_bytes().unwrap();
            assert_eq!(OracleBundle::from_bytes(&bytes).unwrap(), b);
        }
    }

    #[test]
    fn corrupted_eta_is_rejected() {
        let seeds = SeedSpec::new(4);
        let f = sample_simons_function(1, seeds.derive(Stream::Function, 0)).unwrap();
        let fb = sample_bijective_shuffling(1, f, &seeds).unwrap();
        let x = fb.shuffling().set(1)[0];
        let mut bytes = OracleBundle::new(fb, vec![]).to_bytes().unwrap();
        // last table is η: 8 values of 4 bytes each
        let pos = bytes.len() - 4 * (8 - x as usize);
        bytes[pos] ^= 1;
        assert!(OracleBundle::from_bytes(&bytes).is_err());
        assert!(OracleBundle::from_bytes(b"nope").is_err());
    }
}
