//! Success rate against the number of oracle calls per circuit.
use bssp::schemes::run_depth_sweep;

fn main() -> bssp::Result<()> {
    let t = run_depth_sweep(3, 3, 200, 1, None)?;
    println!("guessing baseline {:.3}", t.baseline);
    for row in &t.rows {
        println!(
            "calls {}: {:?} rate {:.3} [{:.3}, {:.3}]",
            row.budget, row.strategy, row.rate, row.ci_low, row.ci_high
        );
    }
    t.write_csv(std::io::stdout())
}
