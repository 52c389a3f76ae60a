use crate::error::Result;
use crate::executor::{
    tree_dispatch, ExecError, Executor, GlobalWrites, Kernel, PartitionConfig, ReductionTree,
    Workgroup,
};
use crate::monoid::Bic;
use crate::oracle::{Element, MatchOutput};

use super::{bic_at, core_tree_search, MatchRun, MatchStats};

struct SearchKernel<'a> {
    tree: &'a ReductionTree<Bic>,
    n: usize,
}

impl Kernel for SearchKernel<'_> {
    type Output = (GlobalWrites<i64>, u32);

    fn name(&self) -> &'static str {
        "core-search"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let k = wg.k();
        let base = wg.id() * wg.cfg().partition_size();
        let out = GlobalWrites::with_capacity("out", wg.id(), wg.cfg().partition_size());
        let mut max_probes = 0;
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k).map(|i| base + i).filter(|&i| i < self.n) {
                let (m, probes) = core_tree_search(self.tree, i);
                max_probes = max_probes.max(probes);
                out.write(lane, i, m);
            }
        })?;
        Ok((out, max_probes))
    }
}

/// Global tree build, one dispatch per level, followed by one search
/// dispatch. `cfg` only sets the grid shape.
pub fn core_parenmatch(exec: &Executor, elems: &[Element], cfg: PartitionConfig) -> Result<MatchRun> {
    let n = elems.len();
    let mut stats = MatchStats::default();
    if n == 0 {
        return Ok(MatchRun { out: MatchOutput::default(), stats });
    }
    let span = n.next_power_of_two();
    let (tree, dispatches) =
        tree_dispatch(exec, cfg, span, Bic::IDENTITY, |i| bic_at(elems, i), Bic::combine)?;
    let outs = exec.dispatch(cfg.grid_for(n), cfg, &SearchKernel { tree: &tree, n })?;
    stats.dispatches = dispatches + 1;
    stats.searches = n as u64;
    stats.probe_bound = 2 * span.trailing_zeros();
    let mut logs = Vec::with_capacity(outs.len());
    for (log, probes) in outs {
        stats.max_probes = stats.max_probes.max(probes);
        logs.push(log);
    }
    let mut out = vec![0i64; n];
    exec.apply(&mut out, logs)?;
    Ok(MatchRun { out: MatchOutput(out), stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{parse_parens, seq_parenmatch};

    #[test]
    fn examples() {
        let exec = Executor::new(1).validating(true);
        let cfg = PartitionConfig::new(2, 1).unwrap();
        let run = |s: &str| core_parenmatch(&exec, &parse_parens(s), cfg).unwrap().out.0;
        assert_eq!(run("()"), [-1, 0]);
        assert_eq!(run("(())"), [-1, 0, 1, 0]);
        assert_eq!(run(""), Vec::<i64>::new());
        assert_eq!(run("("), [-1]);
    }

    #[test]
    fn sixteen_elements() {
        let exec = Executor::new(1).validating(true);
        let elems = parse_parens("(()(.))((.)(()((");
        for (w, k) in [(2, 1), (4, 2), (8, 4)] {
            let cfg = PartitionConfig::new(w, k).unwrap();
            let run = core_parenmatch(&exec, &elems, cfg).unwrap();
            assert_eq!(run.out, seq_parenmatch(&elems).unwrap());
            assert_eq!(run.stats.dispatches, 6);
            assert!(run.stats.max_probes <= run.stats.probe_bound);
        }
    }
}
