//! Flat table serialization: a width header followed by the value array.
//!
//! Binary layout (little endian): `u32 width`, `u64 count`, `count × u32`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableData {
    /// Bit width of each stored value.
    pub width: u32,
    pub values: Vec<u32>,
}

impl TableData {
    pub fn new(width: u32, values: Vec<u32>) -> Self {
        Self { width, values }
    }

    pub fn write_binary(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }

    /// Reads one table from the front of `bytes`, returning the remainder.
    pub fn read_binary(bytes: &[u8]) -> Result<(Self, &[u8])> {
        let (width, rest) = take::<4>(bytes)?;
        let (count, mut rest) = take::<8>(rest)?;
        let width = u32::from_le_bytes(width);
        let count = usize::try_from(u64::from_le_bytes(count))
            .map_err(|_| Error::Format("table length overflows usize".into()))?;
        if rest.len() < count.saturating_mul(4) {
            return Err(Error::Format(format!(
                "table declares {count} values but only {} bytes remain",
                rest.len()
            )));
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let (v, r) = take::<4>(rest)?;
            values.push(u32::from_le_bytes(v));
            rest = r;
        }
        if width < 32 && values.iter().any(|&v| v >> width != 0) {
            return Err(Error::Format(format!("value exceeds declared width {width}")));
        }
        Ok((Self { width, values }, rest))
    }
}

fn take<const N: usize>(bytes: &[u8]) -> Result<([u8; N], &[u8])> {
    if bytes.len() < N {
        return Err(Error::Format("truncated table".into()));
    }
    let (head, rest) = bytes.split_at(N);
    Ok((head.try_into().expect("split at N"), rest))
}
