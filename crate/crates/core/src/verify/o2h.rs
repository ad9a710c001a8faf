use serde::{Deserialize, Serialize};

use super::query::{query_layout, random_query_fixture, QueryFixture, QueryLayout};
use super::{mean_and_stderr, SIGMA_ALLOWANCE};
use crate::gf2::FunctionMode;
use crate::oracle::{build_shadow, oracle_unitary, sample_hidden_chain, FlagPack, OracleUnitary};
use crate::parallel::run_trials;
use crate::schemes::sample_instance;
use crate::seed::{SeedSpec, Stream};
use crate::sim::{apply_basis_permutation, find_probability, outcome_distribution, pure_bures, QuantumState, SparseState};
use crate::{Error, Result};

/// Tolerance of the per-sample inequality and the single-call equality.
pub const O2H_TOLERANCE: f64 = 1e-9;

/// Shadow constant for the lemma checks. With `c = 1` the shadow writes
/// `ξ = 0` off the hidden sets, exactly like the real oracle.
pub const O2H_SHADOW_CONSTANT: u8 = 1;

/// A measurement-based test run on the oracle output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distinguisher {
    /// Always outputs 0.
    Ignore,
    /// Outputs 1 if any `ξ` ancilla reads 1.
    XiFlag,
    /// Outputs the `ζ` ancilla of the last-tag slot.
    ZetaFlag,
    /// Outputs the lowest bit of the last slot's value register.
    ValueBit,
}

impl Distinguisher {
    pub fn accept_probability<S: QuantumState>(&self, state: &S, layout: &QueryLayout) -> f64 {
        let qubits: Vec<usize> = match self {
            Distinguisher::Ignore => return 0.0,
            Distinguisher::XiFlag => layout.xi_qubits(),
            Distinguisher::ZetaFlag => layout.zeta_qubit().into_iter().collect(),
            Distinguisher::ValueBit => layout.slots.last().map(|s| s.value.offset).into_iter().collect(),
        };
        if qubits.is_empty() {
            return 0.0;
        }
        outcome_distribution(state, &qubits)
            .into_iter()
            .filter(|&(o, _)| o != 0)
            .map(|(_, p)| p)
            .sum::<f64>()
            + 0.0
    }
}

impl std::str::FromStr for Distinguisher {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ignore" => Distinguisher::Ignore,
            "xi_flag" | "xi" => Distinguisher::XiFlag,
            "zeta_flag" | "zeta" => Distinguisher::ZetaFlag,
            "value_bit" | "value" => Distinguisher::ValueBit,
            other => return Err(Error::InvalidParameter(format!("unknown distinguisher {other}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct O2hSample {
    pub trial: usize,
    pub bures: f64,
    pub p_find: f64,
    /// `√(2 P_find)`.
    pub bound: f64,
    /// `√(2 P_find) − B`.
    pub slack: f64,
    /// `|B² − 2 P_find|`.
    pub equality_gap: f64,
    pub violation: bool,
    pub pr_real: f64,
    pub pr_shadow: f64,
}

fn run_pair(
    layout: &QueryLayout,
    fixture: &QueryFixture,
    real: &OracleUnitary,
    shadow: &OracleUnitary,
    flags: &FlagPack,
) -> Result<(O2hSample, SparseState, SparseState)> {
    let mut u_psi = fixture.state.clone();
    for layer in &fixture.unitary {
        u_psi.apply_layer(layer)?;
    }
    let p_find = find_probability(&u_psi, flags, &layout.slots, layout.flag)?;
    let mut psi_real = u_psi.clone();
    apply_basis_permutation(&mut psi_real, real, &layout.slots)?;
    let mut psi_shadow = u_psi;
    apply_basis_permutation(&mut psi_shadow, shadow, &layout.slots)?;
    let bures = pure_bures(&psi_real, &psi_shadow);
    let bound = (2.0 * p_find).sqrt();
    let sample = O2hSample {
        trial: 0,
        bures,
        p_find,
        bound,
        slack: bound - bures,
        equality_gap: (bures * bures - 2.0 * p_find).abs(),
        violation: bures > bound + O2H_TOLERANCE,
        pr_real: 0.0,
        pr_shadow: 0.0,
    };
    Ok((sample, psi_real, psi_shadow))
}

/// Compares `F_b U ψ` with `G U ψ` for one tuple.
///
/// The caller is responsible for drawing `ψ` and `U` before the hidden
/// sets.
pub fn check_o2h_single(
    layout: &QueryLayout,
    fixture: &QueryFixture,
    real: &OracleUnitary,
    shadow: &OracleUnitary,
    flags: &FlagPack,
) -> Result<O2hSample> {
    Ok(run_pair(layout, fixture, real, shadow, flags)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct O2hReport {
    pub n: usize,
    pub d: usize,
    pub level: usize,
    pub distinguisher: Distinguisher,
    pub trials: usize,
    pub seed: u64,
    pub violations: usize,
    pub equality_failures: usize,
    pub max_equality_gap: f64,
    pub min_slack: f64,
    pub mean_bures: f64,
    pub mean_p_find: f64,
    /// `√(2 E[P_find])`.
    pub averaged_bound: f64,
    pub pr_real: f64,
    pub pr_shadow: f64,
    /// `|E Pr[A(F_b U ρ) = 1] − E Pr[A(G U ρ) = 1]|`.
    pub gap: f64,
    pub gap_stderr: f64,
    pub gap_within_bound: bool,
    pub samples: Vec<O2hSample>,
}

impl O2hReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.equality_failures == 0 && self.gap_within_bound
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Monte Carlo over `(F_b, S̄, ψ, U)` tuples at hidden level `level`.
pub fn estimate_o2h_expectation(
    n: usize,
    d: usize,
    level: usize,
    distinguisher: Distinguisher,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<O2hReport> {
    if level == 0 || level > d {
        return Err(Error::InvalidParameter(format!("level {level} outside 1..={d}")));
    }
    let tags: Vec<usize> = (0..=d).collect();
    let layout = query_layout(n, d, &tags, 1)?;
    let master = SeedSpec::new(seed);
    let samples = run_trials(trials, threads, |t| {
        let seeds = master.fork(Stream::Trial, t as u64);
        // ψ and U come first so they cannot depend on the hidden sets.
        let mut qrng = seeds.rng(Stream::QueryState, 0);
        let support = rand::Rng::random_range(&mut qrng, 1..=3);
        let layers = rand::Rng::random_range(&mut qrng, 1..=2);
        let fixture = random_query_fixture(&layout, support, layers, &mut qrng)?;
        let fb = sample_instance(n, d, FunctionMode::Simon, &seeds)?;
        let chain = sample_hidden_chain(&fb, level, &seeds)?;
        let hidden = chain.level(level).expect("chain sampled to level");
        let shadow = build_shadow(&fb, hidden, O2H_SHADOW_CONSTANT)?;
        let real = oracle_unitary(&fb)?;
        let shadow = oracle_unitary(&shadow)?;
        let flags = FlagPack::from_hidden(hidden);
        let (mut s, psi_real, psi_shadow) = run_pair(&layout, &fixture, &real, &shadow, &flags)?;
        s.trial = t;
        s.pr_real = distinguisher.accept_probability(&psi_real, &layout);
        s.pr_shadow = distinguisher.accept_probability(&psi_shadow, &layout);
        Ok(s)
    })?;
    let diffs: Vec<f64> = samples.iter().map(|s| s.pr_real - s.pr_shadow).collect();
    let (mean_diff, gap_stderr) = mean_and_stderr(&diffs);
    let mean = |f: fn(&O2hSample) -> f64| samples.iter().map(f).sum::<f64>() / trials.max(1) as f64;
    let mean_p_find = mean(|s| s.p_find);
    let averaged_bound = (2.0 * mean_p_find).sqrt();
    let gap = mean_diff.abs();
    Ok(O2hReport {
        n,
        d,
        level,
        distinguisher,
        trials,
        seed,
        violations: samples.iter().filter(|s| s.violation).count(),
        equality_failures: samples.iter().filter(|s| s.equality_gap > O2H_TOLERANCE).count(),
        max_equality_gap: samples.iter().map(|s| s.equality_gap).fold(0.0, f64::max),
        min_slack: samples.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min),
        mean_bures: mean(|s| s.bures),
        mean_p_find,
        averaged_bound,
        pr_real: mean(|s| s.pr_real),
        pr_shadow: mean(|s| s.pr_shadow),
        gap,
        gap_stderr,
        gap_within_bound: gap <= averaged_bound + SIGMA_ALLOWANCE * gap_stderr,
        samples,
    })
}
