//! Estimates the finding probability of q parallel queries against p·q.
use bssp::verify::{check_bfp, QueryFamily};

fn main() -> bssp::Result<()> {
    for q in 1..=3 {
        for family in [QueryFamily::Points { q }, QueryFamily::Superposition { q, k: 3 }, QueryFamily::Uniform] {
            let r = check_bfp(family, 3, 2, 1, 1000, 11, None)?;
            println!(
                "{family:?}: estimate {:.4} ± {:.4}, bound {:.4}, within {}",
                r.estimate, r.stderr, r.bound, r.within_bound
            );
        }
    }
    Ok(())
}
