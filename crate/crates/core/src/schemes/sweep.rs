use serde::{Deserialize, Serialize};

use super::bssp::{guess_period, run_bssp_with, sample_instance, BsspOptions, ZetaPolicy};
use crate::gf2::{BitWord, FunctionMode};
use crate::oracle::oracle_unitary;
use crate::parallel::run_trials;
use crate::seed::{SeedSpec, Stream};
use crate::Result;
use rand::Rng;

/// Strategy used at one budget of the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// No quantum access: guess a uniform nonzero period.
    ClassicalGuess,
    /// The natural algorithm stopped after `calls` oracle calls.
    Truncated { calls: usize },
    /// The full `(d+1)`-call algorithm.
    Natural,
}

impl Strategy {
    pub fn for_budget(budget: usize, d: usize) -> Self {
        match budget {
            0 => Strategy::ClassicalGuess,
            b if b > d => Strategy::Natural,
            calls => Strategy::Truncated { calls },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub budget: usize,
    pub strategy: Strategy,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    /// `1 / (2^n − 1)`.
    pub baseline: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn row(&self, budget: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.budget == budget)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["budget", "strategy", "trials", "successes", "rate", "ci_low", "ci_high"])?;
        for r in &self.rows {
            let strategy = match r.strategy {
                Strategy::ClassicalGuess => "classical_guess".to_owned(),
                Strategy::Truncated { calls } => format!("truncated_{calls}"),
                Strategy::Natural => "natural".to_owned(),
            };
            w.write_record([
                r.budget.to_string(),
                strategy,
                r.trials.to_string(),
                r.successes.to_string(),
                r.rate.to_string(),
                r.ci_low.to_string(),
                r.ci_high.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// 95% Wilson score interval.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Success rate of each budget `0..=d+1` on the same per-trial instances.
pub fn run_depth_sweep(
    n: usize,
    d: usize,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<SweepTable> {
    let master = SeedSpec::new(seed);
    let budgets: Vec<usize> = (0..=d + 1).collect();
    let outcomes = run_trials(trials, threads, |t| {
        let seeds = master.fork(Stream::Trial, t as u64);
        let fb = sample_instance(n, d, FunctionMode::Simon, &seeds)?;
        let s = fb.function().period().expect("simon mode has a period");
        let u = oracle_unitary(&fb)?;
        budgets
            .iter()
            .map(|&b| {
                let mut rng = seeds.rng(Stream::Guess, b as u64);
                let guess = match Strategy::for_budget(b, d) {
                    Strategy::ClassicalGuess => BitWord::new(rng.random_range(1..1u64 << n), n)?,
                    strategy => {
                        let options = BsspOptions {
                            calls: b,
                            zeta: if strategy == Strategy::Natural {
                                ZetaPolicy::Strict
                            } else {
                                ZetaPolicy::Ignore
                            },
                            ..BsspOptions::search(n, d)
                        };
                        let r = run_bssp_with(&u, &options, seeds.derive(Stream::Measurement, b as u64))?;
                        guess_period(&r, &mut rng)?
                    }
                };
                Ok(guess == s)
            })
            .collect::<Result<Vec<bool>>>()
    })?;
    let rows = budgets
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let successes = outcomes.iter().filter(|o| o[k]).count();
            let (ci_low, ci_high) = wilson_interval(successes, trials);
            SweepRow {
                budget: b,
                strategy: Strategy::for_budget(b, d),
                trials,
                successes,
                rate: successes as f64 / trials.max(1) as f64,
                ci_low,
                ci_high,
            }
        })
        .collect();
    Ok(SweepTable {
        n,
        d,
        trials,
        seed,
        baseline: 1.0 / ((1u64 << n) - 1) as f64,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // p = 0.5, n = 100: 0.4038..0.5962
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_533).abs() < 1e-5);
    }

    #[test]
    fn sweep_jumps_at_full_depth() {
        let t = run_depth_sweep(2, 2, 60, 7, Some(2)).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t.row(3).unwrap().rate >= 0.9);
        assert!(t.row(2).unwrap().rate < 0.7);
        let again = run_depth_sweep(2, 2, 60, 7, Some(1)).unwrap();
        assert_eq!(t, again);
    }
}
