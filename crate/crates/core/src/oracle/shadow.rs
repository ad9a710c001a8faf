use serde::{Deserialize, Serialize};

use super::{empty_set, BijectiveShuffling, DomainSet, HiddenSets};
use crate::gf2::{Permutation, TableData};
use crate::Result;

/// The shadow of a bijective shuffling in the level-`l` hidden sets.
///
/// Inside a hidden set every table acts as the identity and the flags read
/// `c`; outside it agrees with the real oracle and `ξ` reads `c ⊕ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowOracle {
    n: usize,
    d: usize,
    level: usize,
    c: u8,
    /// `f_0, …, f_{l-1}`, untouched.
    prefix: Vec<Permutation>,
    /// `g_l, …, g_d`.
    g: Vec<Vec<u32>>,
    /// `ξ_l, …, ξ_d`.
    xi: Vec<DomainSet>,
    zeta: DomainSet,
    eta: DomainSet,
}

impl ShadowOracle {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn constant(&self) -> u8 {
        self.c
    }

    pub fn domain_bits(&self) -> usize {
        (self.d + 2) * self.n
    }

    /// `f_j` for `j < l`, `g_j` otherwise (`j < d`).
    pub fn layer(&self, j: usize, x: u32) -> u32 {
        if j < self.level {
            self.prefix[j].apply(x)
        } else {
            self.g[j - self.level][x as usize]
        }
    }

    /// `ξ_j(x)` for `l ≤ j ≤ d`; layers below `l` carry no flag.
    pub fn xi(&self, j: usize, x: u32) -> u8 {
        if j < self.level {
            0
        } else {
            u8::from(self.xi[j - self.level][x as usize])
        }
    }

    pub fn last(&self, x: u32) -> u32 {
        self.g[self.d - self.level][x as usize]
    }

    pub fn zeta(&self, x: u32) -> u8 {
        u8::from(self.zeta[x as usize])
    }

    pub fn eta(&self, x: u32) -> u8 {
        u8::from(self.eta[x as usize])
    }

    /// Canonical byte encoding of every table, for equality checks.
    pub fn to_bytes(&self) -> Vec<u8> {
        let bits = self.domain_bits() as u32;
        let mut out = Vec::new();
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.d as u32).to_le_bytes());
        out.extend_from_slice(&(self.level as u32).to_le_bytes());
        out.push(self.c);
        for p in &self.prefix {
            TableData::new(bits, p.table().to_vec()).write_binary(&mut out);
        }
        for g in &self.g {
            TableData::new(bits, g.clone()).write_binary(&mut out);
        }
        for set in self.xi.iter().chain([&self.zeta, &self.eta]) {
            TableData::new(1, set.iter().map(|b| u32::from(*b)).collect()).write_binary(&mut out);
        }
        out
    }
}

/// Builds the shadow `G` of `fb` in `hidden` with constant bit `c`.
pub fn build_shadow(fb: &BijectiveShuffling, hidden: &HiddenSets, c: u8) -> Result<ShadowOracle> {
    let c = c & 1;
    let (d, l) = (fb.d(), hidden.level());
    let size = fb.domain_size();
    let mut g = Vec::with_capacity(d - l + 1);
    let mut xi = Vec::with_capacity(d - l + 1);
    for j in l..=d {
        let inside = hidden.set(j);
        let table: Vec<u32> = (0..size as u32)
            .map(|x| {
                if inside[x as usize] {
                    x
                } else if j < d {
                    fb.perm(j).apply(x)
                } else {
                    fb.final_total(x)
                }
            })
            .collect();
        g.push(table);
        let mut flags = empty_set(size);
        for x in 0..size {
            flags.set(x, (u8::from(inside[x]) ^ c ^ 1) == 1);
        }
        xi.push(flags);
    }
    let last = hidden.set(d);
    let mut zeta = empty_set(size);
    let mut eta = empty_set(size);
    for x in 0..size {
        let (z, e) = if last[x] {
            (c, c)
        } else {
            (fb.zeta(x as u32), fb.eta(x as u32))
        };
        zeta.set(x, z == 1);
        eta.set(x, e == 1);
    }
    Ok(ShadowOracle {
        n: fb.n(),
        d,
        level: l,
        c,
        prefix: fb.shuffling().perms()[..l].to_vec(),
        g,
        xi,
        zeta,
        eta,
    })
}
