//! Solves a small affine system over GF(2) and prints the solution set.
use bssp::gf2::{solve_affine_system, AffineEquation, AffineSolution, BitWord};

fn main() -> bssp::Result<()> {
    let eq = |j: u64, b: u8| Ok::<_, bssp::Error>(AffineEquation::new(BitWord::new(j, 3)?, b));
    let eqs = vec![eq(0b011, 1)?, eq(0b110, 0)?, eq(0b101, 1)?];
    match solve_affine_system(&eqs, 3)? {
        AffineSolution::Unique(s) => println!("unique solution {s}"),
        AffineSolution::Underdetermined { rank, particular } => {
            println!("rank {rank}, particular solution {particular}")
        }
        AffineSolution::Inconsistent => println!("inconsistent"),
    }
    Ok(())
}
