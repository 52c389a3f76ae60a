//! Parallel parentheses matching.
//!
//! Three algorithms, all equal to [`crate::oracle::seq_parenmatch`]:
//!
//! * [`core_parenmatch`]: a Bic reduction tree over the whole input, built
//!   one level per dispatch, then an independent tree search per element.
//!   Unbounded input size, `O(lg n)` work per element.
//! * [`simple_parenmatch`]: two dispatches over partitions of `w` elements.
//!   The first reduces every partition to its stack slice, the second
//!   rebuilds the stack in front of each partition from those slices and
//!   resolves matches with a workgroup-local tree search.
//! * [`we_parenmatch`]: the same two dispatches with `k` elements per lane.
//!   The tree covers `k`-element chunks, and every lane resolves its
//!   elements sequentially with a small local stack, chunk bitmaps and links
//!   computed by two searches per lane.
//!
//! The two-dispatch algorithms accept up to `(w·k)²` elements.

mod pram;
mod prefix;
mod search;
mod simple;
mod slices;
mod we;

pub use pram::core_parenmatch;
pub use prefix::{materialize_prefix, PrefixSnapshot};
pub use search::{bic_search, core_tree_search, range_fold, tree_search, Search};
pub use simple::simple_parenmatch;
pub use slices::{slice_dispatch, we_slice_dispatch, Slices, StackSlice};
pub use we::we_parenmatch;

pub(crate) use prefix::{highest_bit, wg_materialize, PrefixPlan};
pub(crate) use slices::bic_at;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::executor::{Executor, PartitionConfig};
use crate::oracle::{Element, MatchOutput};

/// Selects a matching algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Core,
    Simple,
    WorkEfficient,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Core, Algo::Simple, Algo::WorkEfficient];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Core => "core",
            Algo::Simple => "simple",
            Algo::WorkEfficient => "we",
        }
    }

    /// Whether `n` elements fit this algorithm under `cfg`.
    pub fn supports(self, n: usize, cfg: PartitionConfig) -> bool {
        match self {
            Algo::Core => true,
            Algo::Simple => cfg.k() == 1 && n <= cfg.two_dispatch_limit(),
            Algo::WorkEfficient => n <= cfg.two_dispatch_limit(),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Algo::Core),
            "simple" => Ok(Algo::Simple),
            "we" | "work-efficient" => Ok(Algo::WorkEfficient),
            other => Err(Error::Config(format!(
                "unknown algorithm `{other}` (expected core, simple or we)"
            ))),
        }
    }
}

/// Work counters collected while matching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchStats {
    pub dispatches: u32,
    /// Tree searches run.
    pub searches: u64,
    /// Most tree nodes examined by a single search.
    pub max_probes: u32,
    /// `2·lg(span)` of the searched trees.
    pub probe_bound: u32,
    /// Sequential resolution operations per workgroup (work-efficient
    /// algorithm only): outputs, local pushes and pops, and moves down the
    /// stack outside the lane's own elements.
    pub resolution_ops: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchRun {
    pub out: MatchOutput,
    pub stats: MatchStats,
}

/// Runs `algo` on `elems`.
pub fn parenmatch(
    exec: &Executor,
    elems: &[Element],
    cfg: PartitionConfig,
    algo: Algo,
) -> Result<MatchRun> {
    match algo {
        Algo::Core => core_parenmatch(exec, elems, cfg),
        Algo::Simple => simple_parenmatch(exec, elems, cfg),
        Algo::WorkEfficient => we_parenmatch(exec, elems, cfg),
    }
}

pub(crate) fn check_limit(n: usize, cfg: PartitionConfig) -> Result<()> {
    if n > cfg.two_dispatch_limit() {
        return Err(Error::InputTooLarge {
            n,
            limit: cfg.two_dispatch_limit(),
            w: cfg.w(),
            k: cfg.k(),
        });
    }
    Ok(())
}
