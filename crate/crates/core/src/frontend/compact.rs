use crate::error::Result;
use crate::executor::{
    wg_chunked_scan, wg_scan, Direction, ExecError, Executor, GlobalWrites, Kernel, PartitionConfig,
    Workgroup,
};
use crate::oracle::Element;

use super::SceneRecord;

fn add(a: u32, b: u32) -> u32 {
    a + b
}

struct CountKernel<'a> {
    records: &'a [SceneRecord],
}

impl Kernel for CountKernel<'_> {
    type Output = u32;

    fn name(&self) -> &'static str {
        "compact-count"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<u32, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let p = wg.id() * w * k;
        let mut counts = wg.shared("counts", w, 0u32);
        wg.step(&mut counts, |lane, counts| {
            let c = lane
                .chunk(k)
                .filter(|&i| self.records.get(p + i).is_some_and(|r| r.element().is_some()))
                .count();
            counts.set(lane, lane.id(), c as u32);
        })?;
        wg_scan(wg, &mut counts, w, 0, add, Direction::Reverse, true)?;
        Ok(counts.get(0))
    }
}

struct OffsetKernel<'a> {
    totals: &'a [u32],
}

impl Kernel for OffsetKernel<'_> {
    type Output = Vec<u32>;

    fn name(&self) -> &'static str {
        "compact-offsets"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Vec<u32>, ExecError> {
        let w = wg.size();
        let chunk = self.totals.len().div_ceil(w).max(1);
        let mut data = wg.shared("offsets", w * chunk, 0u32);
        wg.step(&mut data, |lane, data| {
            for i in lane.chunk(chunk).filter(|&i| i < self.totals.len()) {
                data.set(lane, i, self.totals[i]);
            }
        })?;
        let mut partials = wg.shared("partials", w, 0u32);
        wg_chunked_scan(wg, &mut data, &mut partials, chunk, 0, add, Direction::Forward, false)?;
        Ok(data.as_slice()[..self.totals.len()].to_vec())
    }
}

struct ScatterKernel<'a> {
    records: &'a [SceneRecord],
    offsets: &'a [u32],
}

impl Kernel for ScatterKernel<'_> {
    type Output = (GlobalWrites<Element>, GlobalWrites<u32>);

    fn name(&self) -> &'static str {
        "compact-scatter"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let p = wg.id() * w * k;
        let base = self.offsets[wg.id()] as usize;
        let keep = |i: usize| self.records.get(p + i).and_then(SceneRecord::element);

        let mut pos = wg.shared("positions", w * k, 0u32);
        wg.step(&mut pos, |lane, pos| {
            for i in lane.chunk(k) {
                pos.set(lane, i, u32::from(keep(i).is_some()));
            }
        })?;
        let mut partials = wg.shared("partials", w, 0u32);
        wg_chunked_scan(wg, &mut pos, &mut partials, k, 0, add, Direction::Forward, false)?;

        let elems = GlobalWrites::new("elements", wg.id());
        let map = GlobalWrites::new("source", wg.id());
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k) {
                if let Some(e) = keep(i) {
                    let dst = base + pos.get(i) as usize;
                    elems.write(lane, dst, e);
                    map.write(lane, dst, (p + i) as u32);
                }
            }
        })?;
        Ok((elems, map))
    }
}

/// Drops non-structural records with a parallel exclusive sum scan of
/// keep-flags: per-partition counts, one workgroup scanning the counts, and
/// a scatter to the scanned positions. Returns the elements and, for each,
/// the index of its record.
pub fn compact_structure(
    exec: &Executor,
    records: &[SceneRecord],
    cfg: PartitionConfig,
) -> Result<(Vec<Element>, Vec<u32>)> {
    let grid = cfg.grid_for(records.len());
    let totals = exec.dispatch(grid, cfg, &CountKernel { records })?;
    let offsets = exec
        .dispatch(1, cfg, &OffsetKernel { totals: &totals })?
        .pop()
        .expect("one workgroup");
    let n = (offsets[grid - 1] + totals[grid - 1]) as usize;
    let outs = exec.dispatch(grid, cfg, &ScatterKernel { records, offsets: &offsets })?;
    let (elem_logs, map_logs): (Vec<_>, Vec<_>) = outs.into_iter().unzip();
    let mut elems = vec![Element::Close; n];
    let mut map = vec![0u32; n];
    exec.apply(&mut elems, elem_logs)?;
    exec.apply(&mut map, map_logs)?;
    Ok((elems, map))
}
