//! Per-partition stack slices and the stack in front of a partition,
//! rebuilt in parallel from the slices alone.

use stackmonoid::executor::{Executor, PartitionConfig};
use stackmonoid::matching::{materialize_prefix, we_slice_dispatch};
use stackmonoid::oracle::{seq_stack_snapshot, ParenSeq};

fn main() -> stackmonoid::Result<()> {
    let seq = ParenSeq::from_parens("((()(()((()()))(((")?;
    let exec = Executor::new(1).validating(true);
    let cfg = PartitionConfig::new(2, 2)?;
    let slices = we_slice_dispatch(&exec, &seq, cfg)?;
    for q in 0..slices.bic.len() {
        println!("partition {q}: bic {:?}, unmatched opens {:?}", slices.bic[q], slices.entries(q));
    }
    let m = slices.bic.len() - 1;
    let prefix = materialize_prefix(&exec, &slices, m, cfg)?;
    println!("stack before partition {m}: {:?} (depth {})", prefix.to_stack(), prefix.depth);
    println!("sequential:                {:?}", seq_stack_snapshot(&seq, m * cfg.partition_size())?);
    Ok(())
}
