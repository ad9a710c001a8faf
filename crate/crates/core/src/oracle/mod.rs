//! The bijective shuffling oracle, hidden sets, shadows and their
//! realisation as basis permutations.

mod bundle;
mod flags;
mod hidden;
mod shadow;
mod shuffling;
mod unitary;

pub use bundle::{BundleHeader, OracleBundle, BUNDLE_MAGIC, BUNDLE_VERSION};
pub use flags::{semiclassical_flag_sets, FlagPack};
pub use hidden::{
    resample_hidden_slice, sample_hidden_chain, sample_hidden_sets, slice_levels, HiddenChain,
    HiddenSets, LevelSlice, LevelSlices, SliceTable,
};
pub use shadow::{build_shadow, ShadowOracle};
pub use shuffling::{
    build_bijective_shuffling, build_shuffling, sample_bijective_shuffling, BijectiveShuffling,
    Shuffling,
};
pub use unitary::{
    complete_permutation, oracle_unitary, OracleKind, OracleTables, OracleUnitary, SlotValue,
    MAX_BLOCK_BITS,
};

use bitvec::prelude::{BitVec, Lsb0};

/// Bitset over an oracle domain.
pub type DomainSet = BitVec<u64, Lsb0>;

pub(crate) fn empty_set(size: usize) -> DomainSet {
    bitvec::bitvec![u64, Lsb0; 0; size]
}
