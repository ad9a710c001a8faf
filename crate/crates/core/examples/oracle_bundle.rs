//! Samples a bijective shuffling oracle, checks it, and round-trips it
//! through the binary bundle format.
use bssp::gf2::FunctionMode;
use bssp::oracle::{oracle_unitary, OracleBundle, SlotValue};
use bssp::schemes::sample_instance;
use bssp::seed::SeedSpec;

fn main() -> bssp::Result<()> {
    let (n, d) = (2, 2);
    let fb = sample_instance(n, d, FunctionMode::Simon, &SeedSpec::new(7))?;
    fb.check_invariants()?;
    println!("period {}", fb.function().period().expect("simon mode"));

    let u = oracle_unitary(&fb)?;
    for x in 0..1u64 << n {
        let mut slot = u.map_slot(SlotValue::query(0, x))?;
        let mut v = slot.out;
        for tag in 1..=d {
            slot = u.map_slot(SlotValue::query(tag as u64, v))?;
            v = slot.value;
        }
        println!("x={x:02b} f={v:02b} zeta={} eta={}", slot.zeta, slot.eta);
    }

    let bundle = OracleBundle::new(fb, vec![7]);
    let bytes = bundle.to_bytes()?;
    assert_eq!(OracleBundle::from_bytes(&bytes)?, bundle);
    println!("bundle is {} bytes", bytes.len());
    Ok(())
}
