use crate::bbox::{bbox_pipeline, pram_bbox, BBoxStats};
use crate::error::Result;
use crate::executor::{Executor, PartitionConfig};
use crate::matching::{parenmatch, Algo, MatchStats};
use crate::oracle::{seq_bbox, seq_parenmatch, BBoxResult, Element, MatchOutput};

/// Matches and bounding boxes of one scene.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOutput {
    pub matches: MatchOutput,
    pub bbox: BBoxResult,
    pub match_stats: MatchStats,
    pub bbox_stats: BBoxStats,
}

/// Matches with `algo`, then computes bounding boxes: link doubling and
/// union-tree ranges for [`Algo::Core`], the partitioned passes otherwise.
pub fn run_pipeline(
    exec: &Executor,
    elems: &[Element],
    cfg: PartitionConfig,
    algo: Algo,
) -> Result<PipelineOutput> {
    let matched = parenmatch(exec, elems, cfg, algo)?;
    let run = match algo {
        Algo::Core => pram_bbox(exec, elems, cfg)?,
        Algo::Simple | Algo::WorkEfficient => bbox_pipeline(exec, elems, cfg)?,
    };
    Ok(PipelineOutput {
        matches: matched.out,
        bbox: run.result,
        match_stats: matched.stats,
        bbox_stats: run.stats,
    })
}

/// Comparison of one pipeline run against the sequential oracles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub algo: Algo,
    pub cfg: PartitionConfig,
    pub matches_ok: bool,
    pub bbox_ok: bool,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.matches_ok && self.bbox_ok
    }
}

pub fn verify(exec: &Executor, elems: &[Element], cfg: PartitionConfig, algo: Algo) -> Result<Verdict> {
    let out = run_pipeline(exec, elems, cfg, algo)?;
    Ok(Verdict {
        algo,
        cfg,
        matches_ok: out.matches == seq_parenmatch(elems)?,
        bbox_ok: out.bbox == seq_bbox(elems)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::gen_random;

    #[test]
    fn all_algorithms_verify() {
        let exec = Executor::new(1).validating(true);
        let s = gen_random(600, 5, true);
        for algo in Algo::ALL {
            let cfg = PartitionConfig::new(32, if algo == Algo::Simple { 1 } else { 2 }).unwrap();
            assert!(verify(&exec, &s, cfg, algo).unwrap().passed(), "{algo}");
        }
    }
}
