use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BitWord, MAX_PERMUTATION_BITS};
use crate::seed::rng_from;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionMode {
    /// Two-to-one with a hidden period.
    Simon,
    /// One-to-one.
    Injective,
}

impl std::fmt::Display for FunctionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FunctionMode::Simon => "simon",
            FunctionMode::Injective => "injective",
        })
    }
}

impl std::str::FromStr for FunctionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simon" => Ok(FunctionMode::Simon),
            "injective" => Ok(FunctionMode::Injective),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

/// A function `Z_2^n → Z_2^n` given by its truth table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonsInstance {
    n: usize,
    mode: FunctionMode,
    table: Vec<u32>,
    period: Option<u32>,
}

impl SimonsInstance {
    /// Validates the table against the mode before wrapping it.
    pub fn from_parts(
        n: usize,
        mode: FunctionMode,
        table: Vec<u32>,
        period: Option<u32>,
    ) -> Result<Self> {
        check_n(n)?;
        if table.len() != 1 << n {
            return Err(Error::WidthMismatch {
                expected: 1 << n,
                actual: table.len(),
            });
        }
        if table.iter().any(|&v| (v as u64) >> n != 0) {
            return Err(Error::InvalidParameter("table value exceeds n bits".into()));
        }
        let instance = Self {
            n,
            mode,
            table,
            period,
        };
        instance.check_invariants()?;
        Ok(instance)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> FunctionMode {
        self.mode
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn eval(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn period(&self) -> Option<BitWord> {
        self.period
            .map(|s| BitWord::new(u64::from(s), self.n).expect("period fits n bits"))
    }

    pub fn check_invariants(&self) -> Result<()> {
        let mut distinct = self.table.clone();
        distinct.sort_unstable();
        distinct.dedup();
        match (self.mode, self.period) {
            (FunctionMode::Simon, Some(s)) => {
                if s == 0 || (s as u64) >> self.n != 0 {
                    return Err(Error::InvalidParameter(format!("invalid period {s}")));
                }
                for x in 0..self.table.len() as u32 {
                    if self.table[x as usize] != self.table[(x ^ s) as usize] {
                        return Err(Error::InvalidParameter(format!(
                            "f({x}) != f({x} ^ s)"
                        )));
                    }
                }
                if distinct.len() != 1 << (self.n - 1) {
                    return Err(Error::InvalidParameter(
                        "simon table is not two-to-one".into(),
                    ));
                }
            }
            (FunctionMode::Injective, None) => {
                if distinct.len() != self.table.len() {
                    return Err(Error::InvalidParameter("table is not injective".into()));
                }
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "period must be present exactly in simon mode".into(),
                ))
            }
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_PERMUTATION_BITS {
        return Err(Error::Resource {
            what: "function table bits",
            required: n,
            available: MAX_PERMUTATION_BITS,
        });
    }
    Ok(())
}

/// Uniform two-to-one function with a uniform nonzero period.
///
/// Cosets `{x, x ^ s}` are enumerated by their lowest representative and
/// assigned the first `2^(n-1)` entries of a shuffled codomain.
pub fn sample_simons_function(n: usize, seed: u64) -> Result<SimonsInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "n must be at least 1 for a nonzero period to exist".into(),
        ));
    }
    check_n(n)?;
    let mut rng = rng_from(seed);
    let size = 1u32 << n;
    let s = rng.random_range(1..size);
    let mut codomain: Vec<u32> = (0..size).collect();
    codomain.shuffle(&mut rng);
    let mut table = vec![0u32; size as usize];
    let mut next = codomain.iter();
    for x in 0..size {
        let partner = x ^ s;
        if x < partner {
            let v = *next.next().expect("2^(n-1) cosets fit in the codomain");
            table[x as usize] = v;
            table[partner as usize] = v;
        }
    }
    Ok(SimonsInstance {
        n,
        mode: FunctionMode::Simon,
        table,
        period: Some(s),
    })
}

/// Uniform one-to-one function `Z_2^n → Z_2^n`.
pub fn sample_injective_function(n: usize, seed: u64) -> Result<SimonsInstance> {
    check_n(n)?;
    let mut table: Vec<u32> = (0..1u32 << n).collect();
    table.shuffle(&mut rng_from(seed));
    Ok(SimonsInstance {
        n,
        mode: FunctionMode::Injective,
        table,
        period: None,
    })
}
