//! All three parallel matchers against the sequential stack matcher.

use stackmonoid::executor::{Executor, PartitionConfig};
use stackmonoid::frontend::gen_random;
use stackmonoid::matching::{parenmatch, Algo};
use stackmonoid::oracle::seq_parenmatch;

fn main() -> stackmonoid::Result<()> {
    let small = stackmonoid::oracle::ParenSeq::from_parens("(()(()))()")?;
    let exec = Executor::from_env();
    let cfg = PartitionConfig::new(4, 1)?;
    let run = parenmatch(&exec, &small, cfg, Algo::WorkEfficient)?;
    println!("{} -> {:?}", small.to_parens(), run.out.as_slice());

    let big = gen_random(1 << 16, 42, false);
    let want = seq_parenmatch(&big)?;
    for (algo, w, k) in [(Algo::Core, 256, 1), (Algo::Simple, 256, 1), (Algo::WorkEfficient, 128, 4)] {
        let cfg = PartitionConfig::new(w, k)?;
        let run = parenmatch(&exec, &big, cfg, algo)?;
        println!(
            "{algo:<6} {cfg}: {} dispatches, max {} of {} probes, agrees: {}",
            run.stats.dispatches,
            run.stats.max_probes,
            run.stats.probe_bound,
            run.out == want
        );
    }
    Ok(())
}
