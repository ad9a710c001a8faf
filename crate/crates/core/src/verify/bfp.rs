use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{mean_and_stderr, SIGMA_ALLOWANCE};
use crate::gf2::FunctionMode;
use crate::oracle::{sample_hidden_chain, FlagPack};
use crate::parallel::run_trials;
use crate::schemes::sample_instance;
use crate::seed::{SeedSpec, Stream};
use crate::sim::{find_probability, Amplitude, Field, RegisterLayout, Role, SlotBinding, SparseState, QuantumState};
use crate::{Error, Result};

/// Rounding allowance on top of the statistical one.
const NUMERIC_SLACK: f64 = 1e-12;

/// Query states whose finding probability is estimated. All are drawn
/// without looking at the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryFamily {
    /// `q` slots holding distinct uniformly random classical points.
    Points { q: usize },
    /// `q` slots, each an independent uniform superposition over `k`
    /// random points.
    Superposition { q: usize, k: usize },
    /// One slot in the uniform superposition over the whole domain.
    Uniform,
}

impl QueryFamily {
    /// Number of parallel query slots.
    pub fn q(&self) -> usize {
        match *self {
            QueryFamily::Points { q } | QueryFamily::Superposition { q, .. } => q,
            QueryFamily::Uniform => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfpReport {
    pub family: QueryFamily,
    pub n: usize,
    pub d: usize,
    pub level: usize,
    pub q: usize,
    /// `2^{-n}`.
    pub p: f64,
    /// `p · q`.
    pub bound: f64,
    pub trials: usize,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `estimate / bound`.
    pub ratio: f64,
    /// `estimate ≤ bound + 3σ`.
    pub within_bound: bool,
    pub samples: Vec<f64>,
}

impl BfpReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trial", "p_find"])?;
        for (t, p) in self.samples.iter().enumerate() {
            w.write_record([t.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn family_state<R: Rng + ?Sized>(
    family: QueryFamily,
    m: usize,
    tag: usize,
    rng: &mut R,
) -> Result<(SparseState, Vec<SlotBinding>, Field)> {
    let q = family.q();
    let mut r = RegisterLayout::new();
    let values: Vec<Field> = (0..q)
        .map(|k| r.push(&format!("q{k}"), Role::Query, m))
        .collect::<Result<_>>()?;
    let flag = r.push("find_flag", Role::Flag, 1)?;
    let slots = values.iter().map(|&v| SlotBinding::fixed(tag, v)).collect();
    let size = 1usize << m;
    let width = r.width();
    let state = match family {
        QueryFamily::Points { q } => {
            if q > size {
                return Err(Error::InvalidParameter(format!("{q} distinct points in a domain of {size}")));
            }
            let mut i = 0;
            for (f, x) in values.iter().zip(index::sample(rng, size, q)) {
                i = f.set(i, x as u64)?;
            }
            SparseState::basis(width, i)?
        }
        QueryFamily::Superposition { k, .. } => {
            if k == 0 || k > size {
                return Err(Error::InvalidParameter(format!("support {k} in a domain of {size}")));
            }
            let mut entries = vec![(0u64, Amplitude::new(1.0, 0.0))];
            let a = (k as f64).recip().sqrt();
            for f in &values {
                let points = index::sample(rng, size, k).into_vec();
                let mut next = Vec::with_capacity(entries.len() * k);
                for &(i, amp) in &entries {
                    for &x in &points {
                        next.push((f.set(i, x as u64)?, amp * a));
                    }
                }
                entries = next;
            }
            SparseState::from_entries(width, &entries)?
        }
        QueryFamily::Uniform => {
            let a = Amplitude::new((size as f64).recip().sqrt(), 0.0);
            let entries: Vec<_> = (0..size as u64).map(|x| (x, a)).collect();
            SparseState::from_entries(width, &entries)?
        }
    };
    Ok((state, slots, flag))
}

/// Estimates `E[P_find]` of queries with tag `level` against resampled
/// oracles and level-`level` hidden sets, and compares it with `p · q`.
pub fn check_bfp(
    family: QueryFamily,
    n: usize,
    d: usize,
    level: usize,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<BfpReport> {
    if level == 0 || level > d {
        return Err(Error::InvalidParameter(format!("level {level} outside 1..={d}")));
    }
    let m = (d + 2) * n;
    let master = SeedSpec::new(seed);
    let samples = run_trials(trials, threads, |t| {
        let seeds = master.fork(Stream::Trial, t as u64);
        let (state, slots, flag) = family_state(family, m, level, &mut seeds.rng(Stream::QueryState, 0))?;
        let fb = sample_instance(n, d, FunctionMode::Simon, &seeds)?;
        let chain = sample_hidden_chain(&fb, level, &seeds)?;
        let flags = FlagPack::from_hidden(chain.level(level).expect("sampled"));
        find_probability(&state, &flags, &slots, flag)
    })?;
    let (estimate, stderr) = mean_and_stderr(&samples);
    let q = family.q();
    let p = 0.5f64.powi(n as i32);
    let bound = p * q as f64;
    Ok(BfpReport {
        family,
        n,
        d,
        level,
        q,
        p,
        bound,
        trials,
        seed,
        estimate,
        stderr,
        ci_low: estimate - 1.96 * stderr,
        ci_high: estimate + 1.96 * stderr,
        ratio: estimate / bound,
        within_bound: estimate <= bound + SIGMA_ALLOWANCE * stderr + NUMERIC_SLACK,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_query_is_extremal() {
        let r = check_bfp(QueryFamily::Uniform, 1, 1, 1, 50, 1, None).unwrap();
        assert!((r.estimate - 0.5).abs() < 1e-12);
        assert!(r.samples.iter().all(|&p| (p - 0.5).abs() < 1e-12));
        assert!(r.within_bound);
    }

    #[test]
    fn single_point_hits_with_probability_p() {
        let r = check_bfp(QueryFamily::Points { q: 1 }, 2, 1, 1, 2000, 3, None).unwrap();
        assert!(r.within_bound);
        assert!((r.estimate - 0.25).abs() < 4.0 * r.stderr, "{}", r.estimate);
    }

    #[test]
    fn parallel_points_under_union_bound() {
        for q in 1..=3 {
            let r = check_bfp(QueryFamily::Points { q }, 1, 2, 2, 500, 4, None).unwrap();
            assert!(r.within_bound, "q={q}: {} vs {}", r.estimate, r.bound);
        }
    }

    #[test]
    fn superposition_family_runs() {
        let r = check_bfp(QueryFamily::Superposition { q: 2, k: 3 }, 1, 1, 1, 200, 5, None).unwrap();
        assert!(r.within_bound);
        assert_eq!(r.q, 2);
    }
}
