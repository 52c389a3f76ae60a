//! Pointer-jumping forms of the box computation, which have no input size
//! limit.

use stackmonoid::bbox::{bbox_pipeline, pram_bbox};
use stackmonoid::executor::{Executor, PartitionConfig};
use stackmonoid::frontend::{gen_nested, gen_random};
use stackmonoid::oracle::seq_bbox;

fn main() -> stackmonoid::Result<()> {
    let exec = Executor::from_env();
    let cfg = PartitionConfig::new(128, 1)?;
    for (name, seq) in [("random", gen_random(20_000, 3, true)), ("nested", gen_nested(5_000))] {
        let want = seq_bbox(&seq)?;
        let pram = pram_bbox(&exec, &seq, cfg)?;
        println!(
            "{name:<6} n={:<6} pram: {} dispatches, {} rounds, settled after {}, agrees: {}",
            seq.len(),
            pram.stats.dispatches,
            pram.stats.rounds,
            pram.stats.converged_after,
            pram.result == want
        );
        match bbox_pipeline(&exec, &seq, cfg) {
            Ok(run) => println!("       partitioned agrees: {}", run.result == want),
            Err(e) => println!("       partitioned: {e}"),
        }
    }
    Ok(())
}
