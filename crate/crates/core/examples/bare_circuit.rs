//! A single depth-bounded circuit with no mid-circuit measurement, run
//! under its call budget and one call short of it.
use bssp::gf2::FunctionMode;
use bssp::oracle::oracle_unitary;
use bssp::schemes::{bssp_circuit, bssp_layout, run_bare_qnc, sample_instance};
use bssp::seed::SeedSpec;

fn main() -> bssp::Result<()> {
    let (n, d) = (2, 1);
    let fb = sample_instance(n, d, FunctionMode::Simon, &SeedSpec::new(3))?;
    let u = oracle_unitary(&fb)?;
    let circuit = bssp_circuit(&bssp_layout(n, d, false)?, d + 1)?;
    let t = run_bare_qnc(&circuit, d + 1, &u, 0)?;
    println!("layers {:?}, oracle tags {:?}, outcome {:b} (p = {:.3})", t.gates, t.oracle_tags, t.outcome, t.probability);
    match run_bare_qnc(&circuit, d, &u, 0) {
        Err(e) => println!("budget {d}: {e}"),
        Ok(_) => println!("budget {d}: accepted"),
    }
    Ok(())
}
