use serde::{Deserialize, Serialize};

use super::{check_widths, BitWord};
use crate::{Error, Result};

/// Inner product mod 2.
pub fn gf2_dot(u: BitWord, v: BitWord) -> Result<u8> {
    check_widths(u, v)?;
    Ok(((u.value() & v.value()).count_ones() & 1) as u8)
}

/// One linear constraint `s · j = b` on an unknown `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineEquation {
    pub j: BitWord,
    pub b: u8,
}

impl AffineEquation {
    pub fn new(j: BitWord, b: u8) -> Self {
        Self { j, b: b & 1 }
    }

    pub fn is_satisfied_by(&self, s: BitWord) -> Result<bool> {
        Ok(gf2_dot(self.j, s)? == self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AffineSolution {
    Unique(BitWord),
    /// Consistent with coefficient rank below `n`; the solution set is an
    /// affine subspace of dimension `n - rank` containing `particular`.
    Underdetermined { rank: usize, particular: BitWord },
    Inconsistent,
}

impl AffineSolution {
    pub fn is_consistent(&self) -> bool {
        !matches!(self, AffineSolution::Inconsistent)
    }

    /// True if some nonzero vector satisfies every equation.
    pub fn admits_nonzero(&self) -> bool {
        match self {
            AffineSolution::Unique(s) => !s.is_zero(),
            // a coset of a nonzero subspace has at least two elements
            AffineSolution::Underdetermined { .. } => true,
            AffineSolution::Inconsistent => false,
        }
    }
}

/// Coefficient rank of a list of equations (ignores the right-hand sides).
pub fn coefficient_rank(eqs: &[AffineEquation], n: usize) -> usize {
    let mut rows: Vec<u64> = eqs.iter().map(|e| e.j.value()).collect();
    eliminate(&mut rows, n).len()
}

/// Gauss-Jordan elimination in place; returns the pivot columns in row order.
/// Pivots on the lowest-index column with a set bit.
fn eliminate(rows: &mut [u64], columns: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..columns {
        let bit = 1u64 << col;
        let Some(found) = (next..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(next, found);
        let pivot_row = rows[next];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    pivots
}

/// Solves `s · j_i = b_i` over GF(2) for `s ∈ Z_2^n`.
pub fn solve_affine_system(eqs: &[AffineEquation], n: usize) -> Result<AffineSolution> {
    if n > super::MAX_WORD_BITS {
        return Err(Error::InvalidParameter(format!("system width {n} too large")));
    }
    for e in eqs {
        if e.j.width() != n {
            return Err(Error::WidthMismatch {
                expected: n,
                actual: e.j.width(),
            });
        }
    }
    if eqs.is_empty() {
        return Ok(AffineSolution::Underdetermined {
            rank: 0,
            particular: BitWord::zero(n),
        });
    }
    // augmented bit sits at column n
    let mut rows: Vec<u64> = eqs
        .iter()
        .map(|e| e.j.value() | (u64::from(e.b) << n))
        .collect();
    let pivots = eliminate(&mut rows, n);
    let rank = pivots.len();
    if rows[rank..].iter().any(|&r| r != 0) {
        // every remaining row has a zero coefficient part
        return Ok(AffineSolution::Inconsistent);
    }
    let mut s = 0u64;
    for (row, &col) in rows.iter().zip(&pivots) {
        if (row >> n) & 1 == 1 {
            s |= 1 << col;
        }
    }
    let s = BitWord::new(s, n)?;
    if rank == n {
        Ok(AffineSolution::Unique(s))
    } else {
        Ok(AffineSolution::Underdetermined { rank, particular: s })
    }
}
