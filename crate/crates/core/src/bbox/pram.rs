use crate::error::Result;
use crate::executor::{
    tree_dispatch, ExecError, Executor, GlobalWrites, Kernel, PartitionConfig, ReductionTree,
    TreeView, Workgroup,
};
use crate::matching::{core_parenmatch, range_fold};
use crate::monoid::{BBox, Intersect, Monoid, Union};
use crate::oracle::{clip_value, union_value, BBoxResult, Element};

use super::{BBoxRun, BBoxStats, ScanValue};

/// Links and values for link doubling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkState<M> {
    /// Parent of every element, `-1` at the root level. Always `link[i] < i`.
    pub link: Vec<i64>,
    pub val: Vec<M>,
}

/// The clip pass state: parents from a matcher, clip boxes as values.
pub type ClipState = LinkState<Intersect>;

impl ClipState {
    pub fn for_clip(elems: &[Element], parents: &[i64]) -> Self {
        LinkState {
            link: parents.to_vec(),
            val: elems.iter().map(clip_value).collect(),
        }
    }
}

/// Outcome of link doubling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Doubled<M> {
    /// Fold over every element's ancestors, root first, then itself.
    pub val: Vec<M>,
    pub rounds: u32,
    /// First round after which every link was terminal.
    pub converged_after: u32,
}

struct RoundKernel<'a, M> {
    state: &'a LinkState<M>,
}

impl<M: ScanValue> Kernel for RoundKernel<'_, M> {
    type Output = (GlobalWrites<i64>, GlobalWrites<M>);

    fn name(&self) -> &'static str {
        "link-double"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let k = wg.k();
        let base = wg.id() * wg.cfg().partition_size();
        let n = self.state.link.len();
        let link = GlobalWrites::new("link", wg.id());
        let val = GlobalWrites::new("val", wg.id());
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k).map(|i| base + i).filter(|&i| i < n) {
                let l = self.state.link[i];
                if l >= 0 {
                    let l = l as usize;
                    val.write(lane, i, self.state.val[l].combine(&self.state.val[i]));
                    link.write(lane, i, self.state.link[l]);
                }
            }
        })?;
        Ok((link, val))
    }
}

/// `⌈lg n⌉` rounds of link doubling, one dispatch per round. Every round
/// reads the previous round's buffers and writes fresh ones, so after round
/// `r` each element has folded in its chain of `2^r` parents.
pub fn link_double<M: ScanValue>(
    exec: &Executor,
    mut state: LinkState<M>,
    cfg: PartitionConfig,
) -> Result<Doubled<M>> {
    let n = state.link.len();
    assert_eq!(n, state.val.len());
    let rounds = n.next_power_of_two().trailing_zeros();
    let terminal = |s: &LinkState<M>| s.link.iter().all(|&l| l < 0);
    let mut converged_after = if terminal(&state) { 0 } else { u32::MAX };
    for round in 1..=rounds {
        let outs = exec.dispatch(cfg.grid_for(n), cfg, &RoundKernel { state: &state })?;
        let mut next = state.clone();
        let (links, vals): (Vec<_>, Vec<_>) = outs.into_iter().unzip();
        exec.apply(&mut next.link, links)?;
        exec.apply(&mut next.val, vals)?;
        state = next;
        if converged_after == u32::MAX && terminal(&state) {
            converged_after = round;
        }
    }
    Ok(Doubled {
        val: state.val,
        rounds,
        converged_after,
    })
}

/// Clipped boxes by link doubling over the parent links.
pub fn clip_link_double(
    exec: &Executor,
    state: ClipState,
    cfg: PartitionConfig,
) -> Result<Doubled<Intersect>> {
    link_double(exec, state, cfg)
}

/// Union tree over the clipped leaf boxes, one dispatch per level.
pub fn union_tree_dispatch(
    exec: &Executor,
    elems: &[Element],
    clipped: &[BBox],
    cfg: PartitionConfig,
) -> Result<(ReductionTree<Union>, u32)> {
    let span = elems.len().next_power_of_two();
    let leaf = |i: usize| elems.get(i).map_or(Union::identity(), |e| union_value(e, clipped[i]));
    Ok(tree_dispatch(exec, cfg, span, Union::identity(), leaf, |a, b| a.combine(&b))?)
}

/// Union of the leaves strictly between `open` and `close`.
pub fn blend_range_union<V: TreeView<Node = Union>>(tree: &V, open: usize, close: usize) -> BBox {
    debug_assert!(open < close);
    range_fold(tree, open + 1, close, Union::identity(), |a, b| a.combine(&b)).acc.0
}

struct BlendKernel<'a> {
    tree: &'a ReductionTree<Union>,
    opens: &'a [i64],
    elems: &'a [Element],
}

impl Kernel for BlendKernel<'_> {
    type Output = GlobalWrites<Option<BBox>>;

    fn name(&self) -> &'static str {
        "blend-range"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let k = wg.k();
        let base = wg.id() * wg.cfg().partition_size();
        let out = GlobalWrites::new("at_close", wg.id());
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k).map(|i| base + i).filter(|&i| i < self.elems.len()) {
                if self.elems[i].is_close() && self.opens[i] >= 0 {
                    let u = blend_range_union(self.tree, self.opens[i] as usize, i);
                    out.write(lane, i, Some(u));
                }
            }
        })?;
        Ok(out)
    }
}

/// Bounding boxes with global-memory algorithms only: the core matcher,
/// link doubling for clips, and a range reduction over a union tree per
/// close. No size limit.
pub fn pram_bbox(exec: &Executor, elems: &[Element], cfg: PartitionConfig) -> Result<BBoxRun> {
    let n = elems.len();
    let matched = core_parenmatch(exec, elems, cfg)?;
    let mut stats = BBoxStats {
        dispatches: matched.stats.dispatches,
        ..BBoxStats::default()
    };
    let doubled = clip_link_double(exec, ClipState::for_clip(elems, &matched.out), cfg)?;
    stats.dispatches += doubled.rounds;
    stats.rounds = doubled.rounds;
    stats.converged_after = doubled.converged_after;
    let clipped: Vec<BBox> = doubled.val.into_iter().map(|v| v.0).collect();

    let (tree, levels) = union_tree_dispatch(exec, elems, &clipped, cfg)?;
    let kernel = BlendKernel {
        tree: &tree,
        opens: &matched.out,
        elems,
    };
    let logs = exec.dispatch(cfg.grid_for(n), cfg, &kernel)?;
    let mut union_at_close = vec![None; n];
    exec.apply(&mut union_at_close, logs)?;
    let opens: Vec<i64> = elems
        .iter()
        .zip(matched.out.iter())
        .map(|(e, &o)| if e.is_close() { o } else { -1 })
        .collect();
    let union_at_open = super::scatter_to_open(exec, &union_at_close, &opens, cfg)?;
    stats.dispatches += levels + 2;
    stats.max_probes = matched.stats.max_probes;
    stats.probe_bound = matched.stats.probe_bound;
    Ok(BBoxRun {
        result: BBoxResult {
            clipped,
            union_at_close,
            union_at_open,
        },
        matches: matched.out,
        stats,
    })
}
