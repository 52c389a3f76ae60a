use crate::error::Result;
use crate::executor::{
    wg_chunked_scan, wg_tree_build, Direction, ExecError, Executor, GlobalWrites, Kernel,
    PartitionConfig, SharedTree, Workgroup,
};
use crate::matching::{bic_at, check_limit, tree_search, PrefixPlan, Slices};
use crate::monoid::Bic;
use crate::oracle::Element;

use super::ScanValue;

#[inline]
fn combine<M: ScanValue>(a: M, b: M) -> M {
    a.combine(&b)
}

#[inline]
fn value_at<M: ScanValue>(values: &[M], i: usize) -> M {
    values.get(i).copied().unwrap_or_else(M::identity)
}

struct UpSliceKernel<'a, M> {
    values: &'a [M],
    slices: &'a Slices,
}

impl<M: ScanValue> Kernel for UpSliceKernel<'_, M> {
    type Output = (GlobalWrites<M>, M);

    fn name(&self) -> &'static str {
        "up-slice"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let part = w * k;
        let q = wg.id();
        let p = q * part;

        let mut suffix = wg.shared("suffix", part, M::identity());
        wg.step(&mut suffix, |lane, suffix| {
            for i in lane.chunk(k) {
                suffix.set(lane, i, value_at(self.values, p + i));
            }
        })?;
        let mut lane_totals = wg.shared("lane_totals", w, M::identity());
        wg_chunked_scan(
            wg,
            &mut suffix,
            &mut lane_totals,
            k,
            M::identity(),
            combine,
            Direction::Reverse,
            true,
        )?;

        // Each surviving open takes the fold of everything after it.
        let live = self.slices.bic[q].b as usize;
        let out = GlobalWrites::new("slice_val_up", q);
        wg.step(&mut (), |lane, _| {
            for s in lane.chunk(k).filter(|&s| s < live) {
                let after = self.slices.idx[p + s] as usize - p + 1;
                let v = if after < part { suffix.get(after) } else { M::identity() };
                out.write(lane, p + s, v);
            }
        })?;
        Ok((out, suffix.get(0)))
    }
}

/// Up-pass slice values: for every slice entry, the fold of the values
/// after it up to the end of its partition. Also returns every partition's
/// full fold.
pub fn up_slice_dispatch<M: ScanValue>(
    exec: &Executor,
    values: &[M],
    slices: &Slices,
    cfg: PartitionConfig,
) -> Result<(Vec<M>, Vec<M>)> {
    check_partition(slices, cfg)?;
    let grid = slices.partitions();
    let outs = exec.dispatch(grid, cfg, &UpSliceKernel { values, slices })?;
    let mut val = vec![M::identity(); slices.idx.len()];
    let mut totals = Vec::with_capacity(grid);
    let mut logs = Vec::with_capacity(grid);
    for (log, total) in outs {
        logs.push(log);
        totals.push(total);
    }
    exec.apply(&mut val, logs)?;
    Ok((val, totals))
}

/// Result of an up pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpResult<M> {
    /// For every close, the fold strictly between its open and itself.
    pub at_close: Vec<Option<M>>,
    /// The same values moved to the matching opens.
    pub at_open: Vec<Option<M>>,
    /// Matching open of every close, `-1` elsewhere.
    pub opens: Vec<i64>,
    pub max_probes: u32,
    pub probe_bound: u32,
}

struct UpMainKernel<'a, M> {
    elems: &'a [Element],
    values: &'a [M],
    slices: &'a Slices,
    slice_val: &'a [M],
    totals: &'a [M],
}

type UpMainOut<M> = (GlobalWrites<Option<M>>, GlobalWrites<i64>, u32);

impl<M: ScanValue> Kernel for UpMainKernel<'_, M> {
    type Output = UpMainOut<M>;

    fn name(&self) -> &'static str {
        "up-main"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<UpMainOut<M>, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let part = w * k;
        let m = wg.id();
        let p = m * part;
        let n = self.elems.len();

        // Folds of the whole partitions between each earlier partition and
        // this one, as a reverse exclusive scan.
        let plan = PrefixPlan::build(wg, m, &self.slices.bic)?;
        let mut between = wg.shared("between", part, M::identity());
        wg.step(&mut between, |lane, between| {
            for q in lane.chunk(k).filter(|&q| q < m) {
                between.set(lane, q, self.totals[q]);
            }
        })?;
        let mut lane_totals = wg.shared("lane_totals", w, M::identity());
        wg_chunked_scan(
            wg,
            &mut between,
            &mut lane_totals,
            k,
            M::identity(),
            combine,
            Direction::Reverse,
            false,
        )?;
        let prefix = plan.emit(wg, (0u32, M::identity()), |q, slot| {
            let e = q * part + slot;
            (self.slices.idx[e], self.slice_val[e].combine(&between.get(q)))
        })?;

        let identity = (Bic::IDENTITY, M::identity());
        let mut tree = SharedTree::new(wg, "tree", part, identity);
        wg.step(&mut tree, |lane, tree| {
            for i in lane.chunk(k) {
                tree.set_leaf(lane, i, (bic_at(self.elems, p + i), value_at(self.values, p + i)));
            }
        })?;
        wg_tree_build(wg, &mut tree, combine)?;

        let at_close = GlobalWrites::new("at_close", m);
        let opens = GlobalWrites::new("opens", m);
        let mut max_probes = 0;
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k).filter(|&i| p + i < n && self.elems[p + i].is_close()) {
                let s = tree_search(&tree, i, identity, combine, |q, _| q.0.b == 0);
                max_probes = max_probes.max(s.probes);
                let (open, v) = if s.start > 0 {
                    ((p + s.start - 1) as i64, s.acc.1)
                } else if let Some((g, before)) = prefix.at(s.acc.0.a) {
                    (i64::from(g), before.combine(&s.acc.1))
                } else {
                    continue;
                };
                at_close.write(lane, p + i, Some(v));
                opens.write(lane, p + i, open);
            }
        })?;
        Ok((at_close, opens, max_probes))
    }
}

struct ScatterKernel<'a, M> {
    at_close: &'a [Option<M>],
    opens: &'a [i64],
}

impl<M: Copy + Send + Sync> Kernel for ScatterKernel<'_, M> {
    type Output = GlobalWrites<Option<M>>;

    fn name(&self) -> &'static str {
        "scatter"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let k = wg.k();
        let base = wg.id() * wg.cfg().partition_size();
        let out = GlobalWrites::new("at_open", wg.id());
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k).map(|i| base + i).filter(|&i| i < self.opens.len()) {
                if let (Some(v), open) = (self.at_close[i], self.opens[i]) {
                    if open >= 0 {
                        out.write(lane, open as usize, Some(v));
                    }
                }
            }
        })?;
        Ok(out)
    }
}

/// Moves every close's value to its matching open with one global write per
/// close.
pub fn scatter_to_open<M: Copy + Send + Sync>(
    exec: &Executor,
    at_close: &[Option<M>],
    opens: &[i64],
    cfg: PartitionConfig,
) -> Result<Vec<Option<M>>> {
    let n = opens.len();
    let logs = exec.dispatch(cfg.grid_for(n), cfg, &ScatterKernel { at_close, opens })?;
    let mut at_open = vec![None; n];
    exec.apply(&mut at_open, logs)?;
    Ok(at_open)
}

/// Second up-pass dispatch.
///
/// Rebuilds the stack in front of each partition with, for every entry, the
/// fold of all values after it up to the partition start. A `(Bic, M)` tree
/// search from each close then either stops on its open inside the partition,
/// with the fold of the span in hand, or runs off the start and picks the
/// stack entry its count of unmatched closes selects.
pub fn up_main_dispatch<M: ScanValue>(
    exec: &Executor,
    elems: &[Element],
    values: &[M],
    slices: &Slices,
    slice_val: &[M],
    totals: &[M],
    cfg: PartitionConfig,
) -> Result<UpResult<M>> {
    let n = elems.len();
    let kernel = UpMainKernel {
        elems,
        values,
        slices,
        slice_val,
        totals,
    };
    let outs = exec.dispatch(slices.partitions(), cfg, &kernel)?;
    let mut result = UpResult {
        at_close: vec![None; n],
        at_open: Vec::new(),
        opens: vec![-1; n],
        max_probes: 0,
        probe_bound: 2 * cfg.partition_size().trailing_zeros(),
    };
    let (mut close_logs, mut open_logs) = (Vec::new(), Vec::new());
    for (c, o, probes) in outs {
        close_logs.push(c);
        open_logs.push(o);
        result.max_probes = result.max_probes.max(probes);
    }
    exec.apply(&mut result.at_close, close_logs)?;
    exec.apply(&mut result.opens, open_logs)?;
    Ok(result)
}

/// All up-pass dispatches: for every close the fold of `values` strictly
/// inside its span, also scattered to the open. `slices` are the stack
/// slices of `elems` under `cfg`.
pub fn up_sweep<M: ScanValue>(
    exec: &Executor,
    elems: &[Element],
    values: &[M],
    slices: &Slices,
    cfg: PartitionConfig,
) -> Result<UpResult<M>> {
    assert_eq!(elems.len(), values.len());
    check_limit(elems.len(), cfg)?;
    let (slice_val, totals) = up_slice_dispatch(exec, values, slices, cfg)?;
    let mut result = up_main_dispatch(exec, elems, values, slices, &slice_val, &totals, cfg)?;
    result.at_open = scatter_to_open(exec, &result.at_close, &result.opens, cfg)?;
    Ok(result)
}

fn check_partition(slices: &Slices, cfg: PartitionConfig) -> Result<()> {
    if slices.partition_size() != cfg.partition_size() {
        return Err(crate::Error::Config(format!(
            "slices have partition size {}, config {cfg} has {}",
            slices.partition_size(),
            cfg.partition_size()
        )));
    }
    Ok(())
}
