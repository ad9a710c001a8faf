use std::collections::BTreeMap;

use super::state::check_entries;
use super::{Amplitude, Gate, QuantumState, MAX_SPARSE_WIDTH, PRUNE_EPSILON};
use crate::{Error, Result};

/// Basis index → amplitude map. Oracle calls only relabel keys, so the
/// support stays small for the circuits studied here.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    width: usize,
    amps: BTreeMap<u64, Amplitude>,
}

impl SparseState {
    fn check_width(width: usize) -> Result<()> {
        if width > MAX_SPARSE_WIDTH {
            return Err(Error::Resource {
                what: "sparse state qubits",
                required: width,
                available: MAX_SPARSE_WIDTH,
            });
        }
        Ok(())
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() > PRUNE_EPSILON);
    }
}

impl QuantumState for SparseState {
    fn zero(width: usize) -> Result<Self> {
        Self::check_width(width)?;
        Ok(Self {
            width,
            amps: BTreeMap::from([(0, Amplitude::new(1.0, 0.0))]),
        })
    }

    fn from_entries(width: usize, entries: &[(u64, Amplitude)]) -> Result<Self> {
        Self::check_width(width)?;
        check_entries(width, entries)?;
        let mut amps = BTreeMap::new();
        for &(i, a) in entries {
            *amps.entry(i).or_insert(Amplitude::new(0.0, 0.0)) += a;
        }
        let mut s = Self { width, amps };
        s.prune();
        Ok(s)
    }

    fn width(&self) -> usize {
        self.width
    }

    fn amplitude(&self, index: u64) -> Amplitude {
        self.amps
            .get(&index)
            .copied()
            .unwrap_or(Amplitude::new(0.0, 0.0))
    }

    fn entries(&self) -> Vec<(u64, Amplitude)> {
        self.amps.iter().map(|(&i, &a)| (i, a)).collect()
    }

    fn support_size(&self) -> usize {
        self.amps.len()
    }

    fn apply_gate(&mut self, gate: &Gate) {
        let mut out: BTreeMap<u64, Amplitude> = BTreeMap::new();
        if let Some((q, m)) = gate.single_matrix() {
            for (&i, &a) in &self.amps {
                let b = ((i >> q) & 1) as usize;
                for r in 0..2 {
                    let c = m[r][b];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let j = (i & !(1 << q)) | ((r as u64) << q);
                    *out.entry(j).or_default() += c * a;
                }
            }
        } else if let Some((first, second, m)) = gate.two_matrix() {
            for (&i, &a) in &self.amps {
                let col = (((i >> first) & 1) << 1 | ((i >> second) & 1)) as usize;
                let base = i & !(1 << first) & !(1 << second);
                for (r, row) in m.iter().enumerate() {
                    let c = row[col];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let j = base | (((r as u64) >> 1) << first) | (((r as u64) & 1) << second);
                    *out.entry(j).or_default() += c * a;
                }
            }
        }
        self.amps = out;
        self.prune();
    }

    fn map_basis<F>(&mut self, map: F) -> Result<()>
    where
        F: Fn(u64) -> Result<u64>,
    {
        let mut out = BTreeMap::new();
        for (&i, &a) in &self.amps {
            let j = map(i)?;
            if self.width < 64 && j >> self.width != 0 {
                return Err(Error::WidthMismatch {
                    expected: self.width,
                    actual: 64 - j.leading_zeros() as usize,
                });
            }
            if out.insert(j, a).is_some() {
                return Err(Error::NotInjective {
                    first: u64::MAX,
                    second: i,
                    image: j,
                });
            }
        }
        self.amps = out;
        Ok(())
    }

    fn project(&mut self, keep: &dyn Fn(u64) -> bool, scale: f64) {
        self.amps.retain(|&i, _| keep(i));
        for a in self.amps.values_mut() {
            *a *= scale;
        }
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }
}
