//! Checks the one-way-to-hiding bound on random query states.
use bssp::verify::{estimate_o2h_expectation, Distinguisher};

fn main() -> bssp::Result<()> {
    for level in 1..=2 {
        let r = estimate_o2h_expectation(2, 2, level, Distinguisher::XiFlag, 500, 3, None)?;
        println!(
            "level {level}: violations {}, max |B²-2P| {:.1e}, mean B {:.4}, mean P_find {:.4}, gap {:.4} ± {:.4}",
            r.violations, r.max_equality_gap, r.mean_bures, r.mean_p_find, r.gap, r.gap_stderr
        );
    }
    Ok(())
}
