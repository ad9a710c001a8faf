//! Distinguishes simon from injective oracles with 3n samples.
use bssp::gf2::FunctionMode;
use bssp::oracle::oracle_unitary;
use bssp::schemes::{run_bssp_decision, sample_instance, Verdict};
use bssp::seed::{SeedSpec, Stream};

fn main() -> bssp::Result<()> {
    let (n, d, trials) = (2, 2, 100);
    for mode in [FunctionMode::Simon, FunctionMode::Injective] {
        let mut says_simon = 0;
        for t in 0..trials {
            let seeds = SeedSpec::new(9).fork(Stream::Trial, t);
            let fb = sample_instance(n, d, mode, &seeds)?;
            let r = run_bssp_decision(&oracle_unitary(&fb)?, 3 * n, seeds.derive(Stream::Measurement, 0))?;
            if r.verdict == Some(Verdict::Simon) {
                says_simon += 1;
            }
        }
        println!("{mode}: said simon {says_simon}/{trials}");
    }
    Ok(())
}
