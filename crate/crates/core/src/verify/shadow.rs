use serde::{Deserialize, Serialize};

use crate::gf2::FunctionMode;
use crate::oracle::{build_shadow, oracle_unitary, sample_hidden_chain, OracleUnitary};
use crate::parallel::run_trials;
use crate::schemes::{guess_period, run_bssp_with, sample_instance, wilson_interval, BsspOptions, ZetaPolicy};
use crate::seed::{SeedSpec, Stream};
use crate::Result;

use super::SIGMA_ALLOWANCE;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowRow {
    pub oracle: String,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `|rate − baseline| ≤ 3σ` with σ the baseline's binomial error.
    pub near_baseline: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowReport {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    /// `1 / (2^n − 1)`.
    pub baseline: f64,
    pub baseline_sigma: f64,
    pub rows: Vec<ShadowRow>,
}

impl ShadowReport {
    pub fn row(&self, oracle: &str) -> Option<&ShadowRow> {
        self.rows.iter().find(|r| r.oracle == oracle)
    }
}

const ORACLES: [&str; 3] = ["real", "shadow_c0", "shadow_c1"];

/// Runs the search against `F_b` and against its level-1 shadows with
/// `c = 0` and `c = 1`, pairing measurement and guess seeds across the three.
pub fn shadow_indistinguishability_experiment(
    n: usize,
    d: usize,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<ShadowReport> {
    let master = SeedSpec::new(seed);
    let outcomes = run_trials(trials, threads, |t| {
        let seeds = master.fork(Stream::Trial, t as u64);
        let fb = sample_instance(n, d, FunctionMode::Simon, &seeds)?;
        let s = fb.function().period().expect("simon mode");
        let chain = sample_hidden_chain(&fb, 1, &seeds)?;
        let hidden = chain.level(1).expect("sampled");
        let oracles: [(OracleUnitary, ZetaPolicy); 3] = [
            (oracle_unitary(&fb)?, ZetaPolicy::Strict),
            (oracle_unitary(&build_shadow(&fb, hidden, 0)?)?, ZetaPolicy::Discard),
            (oracle_unitary(&build_shadow(&fb, hidden, 1)?)?, ZetaPolicy::Discard),
        ];
        oracles
            .iter()
            .map(|(u, zeta)| {
                let options = BsspOptions {
                    zeta: *zeta,
                    ..BsspOptions::search(n, d)
                };
                let r = run_bssp_with(u, &options, seeds.derive(Stream::Measurement, 0))?;
                let guess = guess_period(&r, &mut seeds.rng(Stream::Guess, 0))?;
                Ok(guess == s)
            })
            .collect::<Result<Vec<bool>>>()
    })?;
    let baseline = 1.0 / ((1u64 << n) - 1) as f64;
    let baseline_sigma = (baseline * (1.0 - baseline) / trials.max(1) as f64).sqrt();
    let rows = ORACLES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let successes = outcomes.iter().filter(|o| o[k]).count();
            let rate = successes as f64 / trials.max(1) as f64;
            let (ci_low, ci_high) = wilson_interval(successes, trials);
            ShadowRow {
                oracle: (*name).to_owned(),
                trials,
                successes,
                rate,
                ci_low,
                ci_high,
                near_baseline: (rate - baseline).abs() <= SIGMA_ALLOWANCE * baseline_sigma,
            }
        })
        .collect();
    Ok(ShadowReport {
        n,
        d,
        trials,
        seed,
        baseline,
        baseline_sigma,
        rows,
    })
}
