use super::state::check_entries;
use super::{caps, Amplitude, Gate, QuantumState};
use crate::{Error, Result};

/// Full amplitude vector of length `2^width`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    width: usize,
    amps: Vec<Amplitude>,
}

impl DenseState {
    fn check_width(width: usize) -> Result<()> {
        let cap = caps().dense_qubits;
        if width > cap {
            return Err(Error::Resource {
                what: "dense state qubits",
                required: width,
                available: cap,
            });
        }
        Ok(())
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidParameter("length is not a power of two".into()));
        }
        let width = amps.len().trailing_zeros() as usize;
        Self::check_width(width)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > super::NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!("state norm² is {norm}, expected 1")));
        }
        Ok(Self { width, amps })
    }
}

impl QuantumState for DenseState {
    fn zero(width: usize) -> Result<Self> {
        Self::check_width(width)?;
        let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << width];
        amps[0] = Amplitude::new(1.0, 0.0);
        Ok(Self { width, amps })
    }

    fn from_entries(width: usize, entries: &[(u64, Amplitude)]) -> Result<Self> {
        Self::check_width(width)?;
        check_entries(width, entries)?;
        let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << width];
        for &(i, a) in entries {
            amps[i as usize] += a;
        }
        Ok(Self { width, amps })
    }

    fn width(&self) -> usize {
        self.width
    }

    fn amplitude(&self, index: u64) -> Amplitude {
        self.amps
            .get(index as usize)
            .copied()
            .unwrap_or(Amplitude::new(0.0, 0.0))
    }

    fn entries(&self) -> Vec<(u64, Amplitude)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(|(i, &a)| (i as u64, a))
            .collect()
    }

    fn apply_gate(&mut self, gate: &Gate) {
        if let Some((q, m)) = gate.single_matrix() {
            let bit = 1usize << q;
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                    self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                    self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        } else if let Some((first, second, m)) = gate.two_matrix() {
            let (bf, bs) = (1usize << first, 1usize << second);
            for i in 0..self.amps.len() {
                if i & (bf | bs) != 0 {
                    continue;
                }
                let idx = [i, i | bs, i | bf, i | bf | bs];
                let a = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| m[r][c] * a[c]).sum();
                }
            }
        }
    }

    fn map_basis<F>(&mut self, map: F) -> Result<()>
    where
        F: Fn(u64) -> Result<u64>,
    {
        let zero = Amplitude::new(0.0, 0.0);
        let mut out = vec![zero; self.amps.len()];
        let mut written = vec![false; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            if a == zero {
                continue;
            }
            let j = map(i as u64)? as usize;
            if j >= out.len() {
                return Err(Error::WidthMismatch {
                    expected: self.width,
                    actual: 64 - (j as u64).leading_zeros() as usize,
                });
            }
            if written[j] {
                return Err(Error::NotInjective {
                    first: u64::MAX,
                    second: i as u64,
                    image: j as u64,
                });
            }
            written[j] = true;
            out[j] = a;
        }
        self.amps = out;
        Ok(())
    }

    fn project(&mut self, keep: &dyn Fn(u64) -> bool, scale: f64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if keep(i as u64) {
                *a *= scale;
            } else {
                *a = Amplitude::new(0.0, 0.0);
            }
        }
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}
