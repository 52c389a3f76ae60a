use crate::error::Result;
use crate::executor::{
    wg_chunked_scan, wg_scan, wg_tree_build, Direction, ExecError, Executor, GlobalWrites, Kernel,
    PartitionConfig, SharedTree, Workgroup,
};
use crate::matching::{bic_at, bic_search, check_limit, PrefixPlan, Slices};
use crate::monoid::Bic;
use crate::oracle::Element;

use super::ScanValue;

/// Stack slices whose entries also carry a value: for a down pass, the
/// inclusive scan of the entries' input values within the partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSlices<M> {
    pub slices: Slices,
    /// Laid out like `slices.idx`.
    pub val: Vec<M>,
}

impl<M: Copy> ValueSlices<M> {
    pub fn values(&self, q: usize) -> &[M] {
        let start = q * self.slices.partition_size();
        &self.val[start..start + self.slices.bic[q].b as usize]
    }
}

#[inline]
fn combine<M: ScanValue>(a: M, b: M) -> M {
    a.combine(&b)
}

struct DownSliceKernel<'a, M> {
    elems: &'a [Element],
    values: &'a [M],
}

type DownSliceOut<M> = (GlobalWrites<u32>, GlobalWrites<M>, Bic);

impl<M: ScanValue> Kernel for DownSliceKernel<'_, M> {
    type Output = DownSliceOut<M>;

    fn name(&self) -> &'static str {
        "down-slice"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<DownSliceOut<M>, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let part = w * k;
        let p = wg.id() * part;

        let mut partials = wg.shared("partials", w, Bic::IDENTITY);
        wg.step(&mut partials, |lane, partials| {
            let acc = lane
                .chunk(k)
                .fold(Bic::IDENTITY, |acc, i| acc.combine(bic_at(self.elems, p + i)));
            partials.set(lane, lane.id(), acc);
        })?;
        wg_scan(wg, &mut partials, w, Bic::IDENTITY, Bic::combine, Direction::Reverse, true)?;
        let total = partials.get(0);

        // Compaction: surviving opens move to their slot, values to shared
        // memory.
        let idx = GlobalWrites::new("slice_idx", wg.id());
        let mut comp = wg.shared("compacted", part, M::identity());
        wg.step(&mut comp, |lane, comp| {
            let t = lane.id();
            let mut acc = if t + 1 < w { partials.get(t + 1) } else { Bic::IDENTITY };
            for i in lane.chunk(k).rev() {
                let x = bic_at(self.elems, p + i);
                let next = x.combine(acc);
                if x.b == 1 && acc.a == 0 {
                    let slot = (total.b - next.b) as usize;
                    idx.write(lane, p + slot, (p + i) as u32);
                    comp.set(lane, slot, self.values[p + i]);
                }
                acc = next;
            }
        })?;

        let mut lane_totals = wg.shared("lane_totals", w, M::identity());
        wg_chunked_scan(
            wg,
            &mut comp,
            &mut lane_totals,
            k,
            M::identity(),
            combine,
            Direction::Forward,
            true,
        )?;

        let val = GlobalWrites::new("slice_val", wg.id());
        wg.step(&mut (), |lane, _| {
            for s in lane.chunk(k).filter(|&s| s < total.b as usize) {
                val.write(lane, p + s, comp.get(s));
            }
        })?;
        Ok((idx, val, total))
    }
}

/// First dispatch of a down pass: stack slices of `w·k`-element partitions,
/// each entry paired with the inclusive scan of entry values in its slice.
pub fn down_slice_dispatch<M: ScanValue>(
    exec: &Executor,
    elems: &[Element],
    values: &[M],
    cfg: PartitionConfig,
) -> Result<ValueSlices<M>> {
    assert_eq!(elems.len(), values.len());
    let grid = cfg.grid_for(elems.len());
    let outs = exec.dispatch(grid, cfg, &DownSliceKernel { elems, values })?;
    let part = cfg.partition_size();
    let mut idx = vec![0u32; grid * part];
    let mut val = vec![M::identity(); grid * part];
    let mut bic = Vec::with_capacity(grid);
    let (mut idx_logs, mut val_logs) = (Vec::with_capacity(grid), Vec::with_capacity(grid));
    for (i, v, total) in outs {
        idx_logs.push(i);
        val_logs.push(v);
        bic.push(total);
    }
    exec.apply(&mut idx, idx_logs)?;
    exec.apply(&mut val, val_logs)?;
    Ok(ValueSlices {
        slices: Slices::new(part, bic, idx),
        val,
    })
}

/// Result of a down pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownResult<M> {
    /// Values of all ancestors, root first, then the element's own.
    pub folded: Vec<M>,
    /// Parent of each element, the same as the matcher's output.
    pub parents: Vec<i64>,
    /// Link doubling rounds run per partition.
    pub rounds: u32,
    /// Most rounds any partition needed before all of its links ended.
    pub converged_after: u32,
    pub max_probes: u32,
    pub probe_bound: u32,
}

struct DownMainKernel<'a, M> {
    elems: &'a [Element],
    values: &'a [M],
    slices: &'a ValueSlices<M>,
    rounds: u32,
}

type DownMainOut<M> = (GlobalWrites<M>, GlobalWrites<i64>, u32, u32);

impl<M: ScanValue> Kernel for DownMainKernel<'_, M> {
    type Output = DownMainOut<M>;

    fn name(&self) -> &'static str {
        "down-main"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<DownMainOut<M>, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let part = w * k;
        let m = wg.id();
        let p = m * part;
        let n = self.elems.len();
        let slices = &self.slices.slices;

        // Fold of the surviving chain of every earlier partition, as an
        // exclusive scan over partitions.
        let plan = PrefixPlan::build(wg, m, &slices.bic)?;
        let mut chain = wg.shared("chain", part, M::identity());
        wg.step(&mut chain, |lane, chain| {
            for q in lane.chunk(k).filter(|&q| q < m) {
                let s = plan.surv(q) as usize;
                if s > 0 {
                    chain.set(lane, q, self.slices.val[q * part + s - 1]);
                }
            }
        })?;
        let mut lane_totals = wg.shared("lane_totals", w, M::identity());
        wg_chunked_scan(
            wg,
            &mut chain,
            &mut lane_totals,
            k,
            M::identity(),
            combine,
            Direction::Forward,
            false,
        )?;
        let prefix = plan.emit(wg, (0u32, M::identity()), |q, slot| {
            let e = q * part + slot;
            (slices.idx[e], chain.get(q).combine(&self.slices.val[e]))
        })?;

        let mut tree = SharedTree::new(wg, "tree", part, Bic::IDENTITY);
        wg.step(&mut tree, |lane, tree| {
            for i in lane.chunk(k) {
                tree.set_leaf(lane, i, bic_at(self.elems, p + i));
            }
        })?;
        wg_tree_build(wg, &mut tree, Bic::combine)?;

        // Parents: local ones are followed by link doubling, parents in
        // earlier partitions come with their full fold from the prefix.
        let mut val = wg.shared("val", part, M::identity());
        let mut link = wg.shared("link", part, -1i32);
        let parents = GlobalWrites::with_capacity("parents", m, part);
        let mut max_probes = 0;
        wg.step(&mut (&mut val, &mut link), |lane, (val, link)| {
            for i in lane.chunk(k).filter(|&i| p + i < n) {
                let own = self.values[p + i];
                let s = bic_search(&tree, i, Bic::IDENTITY);
                max_probes = max_probes.max(s.probes);
                if s.start > 0 {
                    val.set(lane, i, own);
                    link.set(lane, i, s.start as i32 - 1);
                    parents.write(lane, p + i, (p + s.start - 1) as i64);
                } else if let Some((g, above)) = prefix.at(s.acc.a) {
                    val.set(lane, i, above.combine(&own));
                    parents.write(lane, p + i, i64::from(g));
                } else {
                    val.set(lane, i, own);
                    parents.write(lane, p + i, -1);
                }
            }
        })?;

        let mut converged_after = if link.as_slice().iter().all(|&l| l < 0) { 0 } else { u32::MAX };
        for round in 1..=self.rounds {
            wg.step(&mut (&mut val, &mut link), |lane, (val, link)| {
                for i in lane.chunk(k) {
                    let l = link.get(i);
                    if l >= 0 {
                        let l = l as usize;
                        val.set(lane, i, val.get(l).combine(&val.get(i)));
                        link.set(lane, i, link.get(l));
                    }
                }
            })?;
            if converged_after == u32::MAX && link.as_slice().iter().all(|&l| l < 0) {
                converged_after = round;
            }
        }

        let folded = GlobalWrites::with_capacity("folded", m, part);
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k).filter(|&i| p + i < n) {
                folded.write(lane, p + i, val.get(i));
            }
        })?;
        Ok((folded, parents, converged_after, max_probes))
    }
}

/// Second dispatch of a down pass.
///
/// Rebuilds the stack in front of the partition with each entry's full
/// ancestor fold, then searches an element-level Bic tree for every
/// element's parent. Parents before the partition contribute their fold
/// directly; chains of local parents are collapsed by `⌈lg(w·k)⌉`
/// double-buffered rounds of link doubling.
pub fn down_main_dispatch<M: ScanValue>(
    exec: &Executor,
    elems: &[Element],
    values: &[M],
    slices: &ValueSlices<M>,
    cfg: PartitionConfig,
) -> Result<DownResult<M>> {
    let part = cfg.partition_size();
    let rounds = part.trailing_zeros();
    let grid = slices.slices.partitions();
    let kernel = DownMainKernel {
        elems,
        values,
        slices,
        rounds,
    };
    let outs = exec.dispatch(grid, cfg, &kernel)?;
    let mut result = DownResult {
        folded: vec![M::identity(); elems.len()],
        parents: vec![-1; elems.len()],
        rounds,
        converged_after: 0,
        max_probes: 0,
        probe_bound: 2 * rounds,
    };
    let (mut fold_logs, mut parent_logs) = (Vec::with_capacity(grid), Vec::with_capacity(grid));
    for (f, pa, conv, probes) in outs {
        fold_logs.push(f);
        parent_logs.push(pa);
        result.converged_after = result.converged_after.max(conv);
        result.max_probes = result.max_probes.max(probes);
    }
    exec.apply(&mut result.folded, fold_logs)?;
    exec.apply(&mut result.parents, parent_logs)?;
    Ok(result)
}

/// Both down-pass dispatches: for every element the fold of `values` over
/// its ancestors, root first, followed by its own value.
pub fn down_sweep<M: ScanValue>(
    exec: &Executor,
    elems: &[Element],
    values: &[M],
    cfg: PartitionConfig,
) -> Result<(DownResult<M>, ValueSlices<M>)> {
    check_limit(elems.len(), cfg)?;
    let slices = down_slice_dispatch(exec, elems, values, cfg)?;
    let result = down_main_dispatch(exec, elems, values, &slices, cfg)?;
    Ok((result, slices))
}
