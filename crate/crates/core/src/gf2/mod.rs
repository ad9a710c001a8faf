//! Bit-vector algebra over GF(2), affine system solving and the function
//! samplers the oracles are built from.

mod functions;
mod linear;
mod perm;
mod table;

pub use functions::{sample_injective_function, sample_simons_function, FunctionMode, SimonsInstance};
pub use linear::{coefficient_rank, gf2_dot, solve_affine_system, AffineEquation, AffineSolution};
pub use perm::{sample_permutation, Permutation, MAX_PERMUTATION_BITS};
pub use table::TableData;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Widest word supported by [`BitWord`].
pub const MAX_WORD_BITS: usize = 62;

/// An element of Z_2^m stored as an integer together with its width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitWord {
    value: u64,
    width: u8,
}

impl BitWord {
    pub fn new(value: u64, width: usize) -> Result<Self> {
        if width > MAX_WORD_BITS {
            return Err(Error::InvalidParameter(format!(
                "bit width {width} exceeds {MAX_WORD_BITS}"
            )));
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::InvalidParameter(format!(
                "value {value:#x} does not fit in {width} bits"
            )));
        }
        Ok(Self {
            value,
            width: width as u8,
        })
    }

    pub fn zero(width: usize) -> Self {
        Self::new(0, width).expect("zero fits any supported width")
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn bit(self, i: usize) -> bool {
        (self.value >> i) & 1 == 1
    }

    pub fn xor(self, other: BitWord) -> Result<BitWord> {
        check_widths(self, other)?;
        Ok(BitWord {
            value: self.value ^ other.value,
            width: self.width,
        })
    }
}

impl std::fmt::Display for BitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.width == 0 {
            return write!(f, "ε");
        }
        write!(f, "{:0width$b}", self.value, width = self.width as usize)
    }
}

fn check_widths(u: BitWord, v: BitWord) -> Result<()> {
    if u.width != v.width {
        return Err(Error::WidthMismatch {
            expected: u.width(),
            actual: v.width(),
        });
    }
    Ok(())
}
