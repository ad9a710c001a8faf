//! Oracles as explicit permutations of computational basis states.
//!
//! A query slot has local registers `value` (m = (d+2)n bits), `out`
//! (m bits, used only by the standard tag-0 query), three flag ancillas
//! `zeta`, `eta`, `xi`, and a tag. Per tag:
//!
//! * tag 0: `out ^= f_0(value)`;
//! * tags 1..d-1: `(value, xi)` permuted by an in-place block whose
//!   promised part is `(x, 0) ↦ (f_i(x), 0)` (shadow: `(g_i(x), ξ_i(x))`);
//! * tag d: `(value, zeta, eta, xi)` permuted by a block whose promised
//!   part is `(x, 0, 0, 0) ↦ (f_d′(x), ζ(x), η(x), 0)`
//!   (shadow: `(g_d(x), ζ_g(x), η_g(x), ξ_d(x))`);
//! * any other tag: identity.
//!
//! Inputs off the promise (nonzero flag ancillas) are matched to the
//! leftover outputs in ascending order by [`complete_permutation`].

use serde::{Deserialize, Serialize};

use super::{BijectiveShuffling, ShadowOracle};
use crate::sim::SlotBinding;
use crate::{Error, Result};

/// Widest in-place block that will be tabulated.
pub const MAX_BLOCK_BITS: usize = 22;
/// Widest composite slot for [`OracleUnitary::full_table`].
const MAX_FULL_TABLE_BITS: usize = 24;

/// Promised behaviour of an oracle, table by table.
pub trait OracleTables {
    fn n(&self) -> usize;
    fn d(&self) -> usize;
    fn kind(&self) -> OracleKind;
    /// `f_0(x)`.
    fn standard(&self, x: u32) -> u32;
    /// Tags `1..d`: new value and `ξ` output.
    fn in_place(&self, tag: usize, x: u32) -> (u32, u8);
    /// Tag `d`: new value, `ζ`, `η`, `ξ`.
    fn last(&self, x: u32) -> (u32, u8, u8, u8);
}

impl OracleTables for BijectiveShuffling {
    fn n(&self) -> usize {
        BijectiveShuffling::n(self)
    }

    fn d(&self) -> usize {
        BijectiveShuffling::d(self)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Real
    }

    fn standard(&self, x: u32) -> u32 {
        self.perm(0).apply(x)
    }

    fn in_place(&self, tag: usize, x: u32) -> (u32, u8) {
        (self.perm(tag).apply(x), 0)
    }

    fn last(&self, x: u32) -> (u32, u8, u8, u8) {
        (self.final_total(x), self.zeta(x), self.eta(x), 0)
    }
}

impl OracleTables for ShadowOracle {
    fn n(&self) -> usize {
        ShadowOracle::n(self)
    }

    fn d(&self) -> usize {
        ShadowOracle::d(self)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Shadow {
            level: self.level(),
            c: self.constant(),
        }
    }

    fn standard(&self, x: u32) -> u32 {
        self.layer(0, x)
    }

    fn in_place(&self, tag: usize, x: u32) -> (u32, u8) {
        (self.layer(tag, x), self.xi(tag, x))
    }

    fn last(&self, x: u32) -> (u32, u8, u8, u8) {
        let d = self.d();
        (ShadowOracle::last(self, x), self.zeta(x), self.eta(x), self.xi(d, x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Real,
    Shadow { level: usize, c: u8 },
}

/// Register contents of one query slot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SlotValue {
    pub tag: u64,
    pub value: u64,
    pub out: u64,
    pub zeta: u8,
    pub eta: u8,
    pub xi: u8,
}

impl SlotValue {
    pub fn query(tag: u64, value: u64) -> Self {
        Self {
            tag,
            value,
            ..Self::default()
        }
    }

    /// Flag ancillas all zero.
    pub fn is_promised(&self) -> bool {
        self.zeta == 0 && self.eta == 0 && self.xi == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct InPlaceBlock {
    flag_bits: usize,
    table: Vec<u32>,
}

/// A total, bijective realisation of an oracle on query slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleUnitary {
    n: usize,
    d: usize,
    kind: OracleKind,
    standard: Vec<u32>,
    /// Blocks for tags `1..=d`.
    blocks: Vec<InPlaceBlock>,
}

impl OracleUnitary {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    /// Bits of the value register, `(d+2)n`.
    pub fn value_bits(&self) -> usize {
        (self.d + 2) * self.n
    }

    /// `⌈log2(d+1)⌉`.
    pub fn tag_bits(&self) -> usize {
        (usize::BITS - self.d.leading_zeros()) as usize
    }

    /// Width of the composite slot `[value | out | zeta | eta | xi | tag]`.
    pub fn composite_width(&self) -> usize {
        2 * self.value_bits() + 3 + self.tag_bits()
    }

    /// Width and table of the in-place block for `tag ∈ 1..=d`.
    pub fn block(&self, tag: usize) -> Option<(usize, &[u32])> {
        let b = self.blocks.get(tag.checked_sub(1)?)?;
        Some((self.value_bits() + b.flag_bits, &b.table))
    }

    pub fn standard_table(&self) -> &[u32] {
        &self.standard
    }

    /// Acts on one slot. Out-of-range registers are a width error.
    pub fn map_slot(&self, slot: SlotValue) -> Result<SlotValue> {
        let m = self.value_bits();
        if slot.value >> m != 0 || slot.out >> m != 0 {
            return Err(Error::WidthMismatch {
                expected: m,
                actual: 64 - (slot.value | slot.out).leading_zeros() as usize,
            });
        }
        let mut res = slot;
        match slot.tag as usize {
            0 => res.out ^= u64::from(self.standard[slot.value as usize]),
            t if t >= 1 && t < self.d => {
                let b = &self.blocks[t - 1];
                let local = slot.value | (u64::from(slot.xi & 1) << m);
                let image = u64::from(b.table[local as usize]);
                res.value = image & ((1 << m) - 1);
                res.xi = ((image >> m) & 1) as u8;
            }
            t if t == self.d => {
                let b = &self.blocks[t - 1];
                let local = slot.value
                    | (u64::from(slot.zeta & 1) << m)
                    | (u64::from(slot.eta & 1) << (m + 1))
                    | (u64::from(slot.xi & 1) << (m + 2));
                let image = u64::from(b.table[local as usize]);
                res.value = image & ((1 << m) - 1);
                res.zeta = ((image >> m) & 1) as u8;
                res.eta = ((image >> (m + 1)) & 1) as u8;
                res.xi = ((image >> (m + 2)) & 1) as u8;
            }
            _ => {}
        }
        Ok(res)
    }

    /// Maps one basis index of a state through all bound slots.
    pub fn map_basis(&self, index: u64, slots: &[SlotBinding]) -> Result<u64> {
        let mut out = index;
        for b in slots {
            let read = |f: Option<crate::sim::Field>| f.map_or(0, |f| f.get(index));
            let slot = SlotValue {
                tag: b.tag_of(index),
                value: b.value.get(index),
                out: read(b.out),
                zeta: read(b.zeta) as u8,
                eta: read(b.eta) as u8,
                xi: read(b.xi) as u8,
            };
            let image = self.map_slot(slot)?;
            out = b.value.set(out, image.value)?;
            out = write(out, b.out, image.out, "out")?;
            out = write(out, b.zeta, u64::from(image.zeta), "zeta")?;
            out = write(out, b.eta, u64::from(image.eta), "eta")?;
            out = write(out, b.xi, u64::from(image.xi), "xi")?;
        }
        Ok(out)
    }

    fn encode_composite(&self, s: SlotValue) -> u64 {
        let m = self.value_bits();
        s.value
            | (s.out << m)
            | (u64::from(s.zeta) << (2 * m))
            | (u64::from(s.eta) << (2 * m + 1))
            | (u64::from(s.xi) << (2 * m + 2))
            | (s.tag << (2 * m + 3))
    }

    fn decode_composite(&self, i: u64) -> SlotValue {
        let m = self.value_bits();
        let mask = (1u64 << m) - 1;
        SlotValue {
            value: i & mask,
            out: (i >> m) & mask,
            zeta: ((i >> (2 * m)) & 1) as u8,
            eta: ((i >> (2 * m + 1)) & 1) as u8,
            xi: ((i >> (2 * m + 2)) & 1) as u8,
            tag: i >> (2 * m + 3),
        }
    }

    /// The whole oracle as a table over the composite slot basis.
    pub fn full_table(&self) -> Result<Vec<u32>> {
        let w = self.composite_width();
        if w > MAX_FULL_TABLE_BITS {
            return Err(Error::Resource {
                what: "composite oracle table bits",
                required: w,
                available: MAX_FULL_TABLE_BITS,
            });
        }
        (0..1u64 << w)
            .map(|i| {
                let image = self.map_slot(self.decode_composite(i))?;
                Ok(self.encode_composite(image) as u32)
            })
            .collect()
    }
}

fn write(index: u64, field: Option<crate::sim::Field>, value: u64, name: &str) -> Result<u64> {
    match field {
        Some(f) => f.set(index, value),
        None if value == 0 => Ok(index),
        None => Err(Error::ContractViolation(format!(
            "oracle wrote a nonzero {name} bit but the slot binds no {name} register"
        ))),
    }
}

/// Extends a partial injection to a bijection of `0..partial.len()`.
///
/// Defined entries are kept; undefined inputs are matched to unused outputs,
/// both in ascending order.
pub fn complete_permutation(partial: &[Option<u32>]) -> Result<Vec<u32>> {
    let size = partial.len();
    let mut used = vec![u32::MAX; size];
    for (x, image) in partial.iter().enumerate() {
        if let Some(y) = *image {
            let slot = used.get_mut(y as usize).ok_or_else(|| {
                Error::InvalidParameter(format!("image {y} outside space of size {size}"))
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
    }
    let mut free = used
        .iter()
        .enumerate()
        .filter(|(_, &u)| u == u32::MAX)
        .map(|(y, _)| y as u32);
    Ok(partial
        .iter()
        .map(|image| match image {
            Some(y) => *y,
            None => free.next().expect("free outputs match undefined inputs"),
        })
        .collect())
}

/// Tabulates an oracle source as blocks of basis permutations.
pub fn oracle_unitary<T: OracleTables + ?Sized>(source: &T) -> Result<OracleUnitary> {
    let (n, d) = (source.n(), source.d());
    let m = (d + 2) * n;
    if m + 3 > MAX_BLOCK_BITS {
        return Err(Error::Resource {
            what: "oracle block bits",
            required: m + 3,
            available: MAX_BLOCK_BITS,
        });
    }
    let domain = 1u32 << m;
    let standard = (0..domain).map(|x| source.standard(x)).collect();
    let mut blocks = Vec::with_capacity(d);
    for tag in 1..=d {
        let flag_bits = if tag == d { 3 } else { 1 };
        let mut partial = vec![None; 1 << (m + flag_bits)];
        for x in 0..domain {
            let image = if tag == d {
                let (v, z, e, xi) = source.last(x);
                v | (u32::from(z) << m) | (u32::from(e) << (m + 1)) | (u32::from(xi) << (m + 2))
            } else {
                let (v, xi) = source.in_place(tag, x);
                v | (u32::from(xi) << m)
            };
            partial[x as usize] = Some(image);
        }
        blocks.push(InPlaceBlock {
            flag_bits,
            table: complete_permutation(&partial)?,
        });
    }
    Ok(OracleUnitary {
        n,
        d,
        kind: source.kind(),
        standard,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{sample_simons_function, FunctionMode, Permutation, SimonsInstance};
    use crate::oracle::{build_bijective_shuffling, build_shuffling, sample_bijective_shuffling};
    use crate::seed::{SeedSpec, Stream};

    fn worked_example() -> BijectiveShuffling {
        let f = SimonsInstance::from_parts(1, FunctionMode::Simon, vec![1, 1], Some(1)).unwrap();
        let sh = build_shuffling(1, f, vec![Permutation::identity(3).unwrap()]).unwrap();
        build_bijective_shuffling(sh, 0).unwrap()
    }

    #[test]
    fn completion_of_total_bijection_is_unchanged() {
        let table = vec![3, 0, 2, 1];
        let partial: Vec<_> = table.iter().map(|&y| Some(y)).collect();
        assert_eq!(complete_permutation(&partial).unwrap(), table);
    }

    #[test]
    fn completion_matches_ascending() {
        // identity on the even half
        let partial = vec![Some(0), None, Some(2), None, Some(4), None, Some(6), None];
        assert_eq!(complete_permutation(&partial).unwrap(), vec![0, 1, 2, 3, 4, 5, 6, 7]);
        let partial = vec![Some(1), None, None, Some(0)];
        assert_eq!(complete_permutation(&partial).unwrap(), vec![1, 2, 3, 0]);
    }

    #[test]
    fn completion_detects_collisions() {
        assert!(matches!(
            complete_permutation(&[Some(1), Some(1), None]),
            Err(Error::NotInjective { first: 0, second: 1, image: 1 })
        ));
    }

    #[test]
    fn worked_example_block_is_bijection() {
        let fb = worked_example();
        let u = oracle_unitary(&fb).unwrap();
        let (width, table) = u.block(1).unwrap();
        assert_eq!(width, 6);
        crate::gf2::Permutation::from_table(6, table.to_vec()).unwrap();
        let image = u.map_slot(SlotValue::query(1, 0)).unwrap();
        assert_eq!((image.value, image.zeta, image.eta, image.xi), (1, 1, fb.eta(0), 0));
    }

    #[test]
    fn in_place_and_standard_tags() {
        let seeds = SeedSpec::new(3);
        let f = sample_simons_function(1, seeds.derive(Stream::Function, 0)).unwrap();
        let fb = sample_bijective_shuffling(3, f, &seeds).unwrap();
        let u = oracle_unitary(&fb).unwrap();
        for x in 0..32u64 {
            let img = u.map_slot(SlotValue::query(1, x)).unwrap();
            assert_eq!(img.value, u64::from(fb.perm(1).apply(x as u32)));
            assert!(img.is_promised());
            let img = u.map_slot(SlotValue { out: 5, ..SlotValue::query(0, x) }).unwrap();
            assert_eq!(img.out, 5 ^ u64::from(fb.perm(0).apply(x as u32)));
            assert_eq!(img.value, x);
            let img = u.map_slot(SlotValue::query(4, x)).unwrap();
            assert_eq!(img, SlotValue::query(4, x));
        }
    }

    #[test]
    fn full_table_is_bijection_n1_d1() {
        let u = oracle_unitary(&worked_example()).unwrap();
        assert_eq!(u.composite_width(), 10);
        let t = u.full_table().unwrap();
        Permutation::from_table(10, t.clone()).unwrap();
        // applying twice stays a permutation but is not the identity
        let twice: Vec<u32> = t.iter().map(|&y| t[y as usize]).collect();
        Permutation::from_table(10, twice.clone()).unwrap();
        assert!(twice.iter().enumerate().any(|(i, &y)| i as u32 != y));
    }

    #[test]
    fn unbound_flag_write_is_an_error() {
        let u = oracle_unitary(&worked_example()).unwrap();
        let layout_value = crate::sim::Field::new(0, 3);
        let slot = SlotBinding::fixed(1, layout_value);
        // ζ(0) = 1 has nowhere to go
        assert!(matches!(u.map_basis(0, &[slot]), Err(Error::ContractViolation(_))));
    }
}
