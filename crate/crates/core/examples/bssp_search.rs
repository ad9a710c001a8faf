//! Recovers the hidden period with d+1 oracle calls under the QC and CQ
//! schemes.
use bssp::gf2::FunctionMode;
use bssp::oracle::oracle_unitary;
use bssp::schemes::{run_bssp_with, sample_instance, BsspOptions, SchemeChoice};
use bssp::seed::{SeedSpec, Stream};

fn main() -> bssp::Result<()> {
    let (n, d) = (3, 2);
    let seeds = SeedSpec::new(42);
    let fb = sample_instance(n, d, FunctionMode::Simon, &seeds)?;
    let u = oracle_unitary(&fb)?;
    println!("true period {}", fb.function().period().expect("simon mode"));

    for scheme in [SchemeChoice::Qc, SchemeChoice::Cq] {
        let mut options = BsspOptions::search(n, d);
        options.scheme = scheme;
        let r = run_bssp_with(&u, &options, seeds.derive(Stream::Measurement, 0))?;
        println!(
            "{scheme:?}: period {:?} after {} samples, calls/sample {:?}, depth {}, gates {:?}",
            r.period.map(|p| p.to_string()),
            r.samples_used,
            r.calls_per_sample,
            r.depth,
            r.gate_set
        );
        for e in &r.equations {
            println!("  j={} b={}", e.j, e.b);
        }
    }
    Ok(())
}
