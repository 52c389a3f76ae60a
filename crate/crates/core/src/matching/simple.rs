use crate::error::{Error, Result};
use crate::executor::{
    wg_tree_build, ExecError, Executor, GlobalWrites, Kernel, PartitionConfig, SharedTree,
    Workgroup,
};
use crate::monoid::Bic;
use crate::oracle::{Element, MatchOutput};

use super::{
    bic_at, bic_search, check_limit, slice_dispatch, wg_materialize, MatchRun, MatchStats, Slices,
};

struct MainKernel<'a> {
    elems: &'a [Element],
    slices: &'a Slices,
}

impl Kernel for MainKernel<'_> {
    type Output = (GlobalWrites<i64>, u32);

    fn name(&self) -> &'static str {
        "simple-main"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let w = wg.size();
        let m = wg.id();
        let p = m * w;
        let idx = &self.slices.idx;
        let prefix = wg_materialize(wg, m, &self.slices.bic, 0u32, |q, slot| idx[q * w + slot])?;

        let mut tree = SharedTree::new(wg, "tree", w, Bic::IDENTITY);
        wg.step(&mut tree, |lane, tree| {
            tree.set_leaf(lane, lane.id(), bic_at(self.elems, p + lane.id()));
        })?;
        wg_tree_build(wg, &mut tree, Bic::combine)?;

        let out = GlobalWrites::with_capacity("out", m, w);
        let mut max_probes = 0;
        wg.step(&mut (), |lane, _| {
            let t = lane.id();
            if p + t >= self.elems.len() {
                return;
            }
            let s = bic_search(&tree, t, Bic::IDENTITY);
            max_probes = max_probes.max(s.probes);
            let r = if s.start > 0 {
                (p + s.start - 1) as i64
            } else {
                prefix.at(s.acc.a).map_or(-1, i64::from)
            };
            out.write(lane, p + t, r);
        })?;
        Ok((out, max_probes))
    }
}

/// Two dispatches with one element per lane: stack slices, then per
/// partition the prefix snapshot, a `w`-leaf Bic tree and a search per
/// element. Searches that run off the start of the partition index the
/// snapshot with their count of unmatched closes.
pub fn simple_parenmatch(
    exec: &Executor,
    elems: &[Element],
    cfg: PartitionConfig,
) -> Result<MatchRun> {
    if cfg.k() != 1 {
        return Err(Error::Config(format!(
            "the simple algorithm needs k=1, got k={}",
            cfg.k()
        )));
    }
    check_limit(elems.len(), cfg)?;
    let mut stats = MatchStats::default();
    if elems.is_empty() {
        return Ok(MatchRun { out: MatchOutput::default(), stats });
    }
    let slices = slice_dispatch(exec, elems, cfg)?;
    let outs = exec.dispatch(slices.partitions(), cfg, &MainKernel { elems, slices: &slices })?;
    stats.dispatches = 2;
    stats.searches = elems.len() as u64;
    stats.probe_bound = 2 * cfg.w().trailing_zeros();
    let mut logs = Vec::with_capacity(outs.len());
    for (log, probes) in outs {
        stats.max_probes = stats.max_probes.max(probes);
        logs.push(log);
    }
    let mut out = vec![0i64; elems.len()];
    exec.apply(&mut out, logs)?;
    Ok(MatchRun { out: MatchOutput(out), stats })
}
