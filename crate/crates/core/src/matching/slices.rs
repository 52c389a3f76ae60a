use crate::error::Result;
use crate::executor::{
    wg_scan, Direction, ExecError, Executor, GlobalWrites, Kernel, PartitionConfig, Workgroup,
};
use crate::monoid::{bic_from_element, Bic};
use crate::oracle::Element;

/// The stack-monoid reduction of one partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackSlice {
    pub partition: usize,
    /// Unmatched opens of the partition, bottom to top.
    pub indices: Vec<u32>,
    pub total: Bic,
}

/// Output of a slice dispatch, laid out as in global memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slices {
    part: usize,
    /// Bic reduction of every partition.
    pub bic: Vec<Bic>,
    /// Partition `q` keeps its unmatched opens at `q·P .. q·P + bic[q].b`.
    pub idx: Vec<u32>,
}

impl Slices {
    pub(crate) fn new(part: usize, bic: Vec<Bic>, idx: Vec<u32>) -> Self {
        Slices { part, bic, idx }
    }

    pub fn partition_size(&self) -> usize {
        self.part
    }

    pub fn partitions(&self) -> usize {
        self.bic.len()
    }

    pub fn entries(&self, q: usize) -> &[u32] {
        let start = q * self.part;
        &self.idx[start..start + self.bic[q].b as usize]
    }

    pub fn slice(&self, q: usize) -> StackSlice {
        StackSlice {
            partition: q,
            indices: self.entries(q).to_vec(),
            total: self.bic[q],
        }
    }

    pub fn to_vec(&self) -> Vec<StackSlice> {
        (0..self.partitions()).map(|q| self.slice(q)).collect()
    }
}

#[inline]
pub(crate) fn bic_at(elems: &[Element], i: usize) -> Bic {
    elems.get(i).map_or(Bic::IDENTITY, bic_from_element)
}

struct SliceKernel<'a> {
    elems: &'a [Element],
}

type SliceOut = (GlobalWrites<u32>, Bic);

impl Kernel for SliceKernel<'_> {
    type Output = SliceOut;

    fn name(&self) -> &'static str {
        "slice"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<SliceOut, ExecError> {
        let w = wg.size();
        let p = wg.id() * w;
        let mut scan = wg.shared("scan", w, Bic::IDENTITY);
        wg.step(&mut scan, |lane, scan| {
            scan.set(lane, lane.id(), bic_at(self.elems, p + lane.id()));
        })?;
        wg_scan(wg, &mut scan, w, Bic::IDENTITY, Bic::combine, Direction::Reverse, true)?;

        let total = scan.get(0);
        let out = GlobalWrites::new("slice_idx", wg.id());
        wg.step(&mut (), |lane, _| {
            let t = lane.id();
            let after = if t + 1 < w { scan.get(t + 1) } else { Bic::IDENTITY };
            if p + t < self.elems.len() && self.elems[p + t].is_open() && after.a == 0 {
                let slot = (total.b - scan.get(t).b) as usize;
                out.write(lane, p + slot, (p + t) as u32);
            }
        })?;
        Ok((out, total))
    }
}

/// Stack slices of `w`-element partitions, one lane per element: a reverse
/// Bic scan followed by compaction of the opens no later close consumes.
pub fn slice_dispatch(exec: &Executor, elems: &[Element], cfg: PartitionConfig) -> Result<Slices> {
    if cfg.k() != 1 {
        return Err(crate::Error::Config(format!(
            "slice_dispatch handles one element per lane, got k={}",
            cfg.k()
        )));
    }
    let grid = cfg.grid_for(elems.len());
    let outs = exec.dispatch(grid, cfg, &SliceKernel { elems })?;
    Ok(collect(exec, outs, cfg.partition_size())?)
}

struct WeSliceKernel<'a> {
    elems: &'a [Element],
}

impl Kernel for WeSliceKernel<'_> {
    type Output = SliceOut;

    fn name(&self) -> &'static str {
        "we-slice"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<SliceOut, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let p = wg.id() * w * k;
        let mut part = wg.shared("partials", w, Bic::IDENTITY);
        wg.step(&mut part, |lane, part| {
            let acc = lane
                .chunk(k)
                .fold(Bic::IDENTITY, |acc, i| acc.combine(bic_at(self.elems, p + i)));
            part.set(lane, lane.id(), acc);
        })?;
        wg_scan(wg, &mut part, w, Bic::IDENTITY, Bic::combine, Direction::Reverse, true)?;

        let total = part.get(0);
        let out = GlobalWrites::new("slice_idx", wg.id());
        wg.step(&mut (), |lane, _| {
            let t = lane.id();
            let mut acc = if t + 1 < w { part.get(t + 1) } else { Bic::IDENTITY };
            for i in lane.chunk(k).rev() {
                let x = bic_at(self.elems, p + i);
                let next = x.combine(acc);
                if x.b == 1 && acc.a == 0 {
                    let slot = (total.b - next.b) as usize;
                    out.write(lane, p + slot, (p + i) as u32);
                }
                acc = next;
            }
        })?;
        Ok((out, total))
    }
}

/// Stack slices of `w·k`-element partitions: each lane reduces its `k`
/// elements, the lane totals are reverse-scanned, and each lane walks its
/// elements backwards from its carry-in to emit the surviving opens.
pub fn we_slice_dispatch(
    exec: &Executor,
    elems: &[Element],
    cfg: PartitionConfig,
) -> Result<Slices> {
    let grid = cfg.grid_for(elems.len());
    let outs = exec.dispatch(grid, cfg, &WeSliceKernel { elems })?;
    Ok(collect(exec, outs, cfg.partition_size())?)
}

fn collect(exec: &Executor, outs: Vec<SliceOut>, part: usize) -> Result<Slices, ExecError> {
    let mut idx = vec![0u32; outs.len() * part];
    let mut bic = Vec::with_capacity(outs.len());
    let mut logs = Vec::with_capacity(outs.len());
    for (log, total) in outs {
        bic.push(total);
        logs.push(log);
    }
    exec.apply(&mut idx, logs)?;
    Ok(Slices { part, bic, idx })
}
