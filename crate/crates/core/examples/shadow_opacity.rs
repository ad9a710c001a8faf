//! BSSP search against the real oracle and its level-1 shadows.
use bssp::verify::shadow_indistinguishability_experiment;

fn main() -> bssp::Result<()> {
    let r = shadow_indistinguishability_experiment(2, 2, 500, 5, None)?;
    println!("baseline {:.3} ± {:.3}", r.baseline, r.baseline_sigma);
    for row in &r.rows {
        println!("{}: {}/{} = {:.3}, near baseline {}", row.oracle, row.successes, row.trials, row.rate, row.near_baseline);
    }
    Ok(())
}
