use crate::error::Result;
use crate::executor::{
    wg_scan, Direction, ExecError, Executor, Kernel, PartitionConfig, SharedArray, Workgroup,
};
use crate::monoid::Bic;

use super::Slices;

/// The top of the stack at the start of a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixSnapshot {
    /// Full stack depth at the partition start.
    pub depth: u32,
    /// The top `min(depth, w·k)` entries, top first.
    pub values: Vec<u32>,
}

impl PrefixSnapshot {
    /// Entries bottom to top, as the sequential matcher's stack.
    pub fn to_stack(&self) -> Vec<u32> {
        self.values.iter().rev().copied().collect()
    }
}

/// Shared-memory view of a materialized prefix.
pub(crate) struct Prefix<T: Copy> {
    pub depth: u32,
    pub values: SharedArray<T>,
}

impl<T: Copy> Prefix<T> {
    /// Entry `d` below the top, or `None` past the bottom of the stack.
    #[inline]
    pub fn at(&self, d: u32) -> Option<T> {
        (d < self.depth).then(|| self.values.get(d as usize))
    }
}

/// Survivor bookkeeping for the stack in front of partition `m`.
///
/// Every lane owns a segment of `k` preceding partitions. The segment Bics
/// are reverse-scanned, and each lane then scans its own partitions
/// backwards, which gives `rev[q] = Bic(partitions q..m)`. The opens of
/// partition `q` that survive to the start of `m` are the bottom
/// `rev[q].b - rev[q+1].b` entries of its slice. A per-segment bitmap marks
/// partitions with survivors, and an exclusive max-scan over segments links
/// each segment to the closest earlier one with survivors.
pub(crate) struct PrefixPlan {
    m: usize,
    depth: u32,
    rev: SharedArray<Bic>,
    bits: SharedArray<u32>,
    link: SharedArray<i32>,
}

impl PrefixPlan {
    pub fn build(wg: &mut Workgroup, m: usize, slice_bic: &[Bic]) -> Result<Self, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let cap = w * k;
        debug_assert!(m <= cap);
        let part = |q: usize| if q < m { slice_bic[q] } else { Bic::IDENTITY };

        let mut seg = wg.shared("seg", w, Bic::IDENTITY);
        wg.step(&mut seg, |lane, seg| {
            let acc = lane.chunk(k).fold(Bic::IDENTITY, |acc, q| acc.combine(part(q)));
            seg.set(lane, lane.id(), acc);
        })?;
        wg_scan(wg, &mut seg, w, Bic::IDENTITY, Bic::combine, Direction::Reverse, true)?;

        let mut rev = wg.shared("slice_rev", cap + 1, Bic::IDENTITY);
        let mut bits = wg.shared("seg_bits", w, 0u32);
        wg.step(&mut (&mut rev, &mut bits), |lane, (rev, bits)| {
            let t = lane.id();
            let mut acc = if t + 1 < w { seg.get(t + 1) } else { Bic::IDENTITY };
            let mut mask = 0u32;
            for q in lane.chunk(k).rev() {
                let next = part(q).combine(acc);
                if next.b > acc.b {
                    mask |= 1 << (q - t * k);
                }
                rev.set(lane, q, next);
                acc = next;
            }
            bits.set(lane, t, mask);
        })?;

        let mut link = wg.shared("seg_link", w, -1i32);
        if k > 1 {
            wg.step(&mut link, |lane, link| {
                let t = lane.id();
                link.set(lane, t, if bits.get(t) != 0 { t as i32 } else { -1 });
            })?;
            wg_scan(wg, &mut link, w, -1, i32::max, Direction::Forward, false)?;
        }

        Ok(PrefixPlan {
            m,
            depth: seg.get(0).b,
            rev,
            bits,
            link,
        })
    }

    /// Opens of partition `q` still on the stack at the start of `m`.
    #[inline]
    pub fn surv(&self, q: usize) -> u32 {
        self.rev.get(q).b - self.rev.get(q + 1).b
    }

    /// Fills the top `w·k` stack entries, top first. Depths `d` map to the
    /// partition with `rev[q+1].b <= d < rev[q].b`: each lane binary-searches
    /// its first depth and walks down through the bitmaps and links for the
    /// rest. `entry(q, slot)` loads slot `slot` of partition `q`'s slice.
    pub fn emit<T: Copy>(
        &self,
        wg: &mut Workgroup,
        init: T,
        entry: impl Fn(usize, usize) -> T,
    ) -> Result<Prefix<T>, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let cap = w * k;
        let live = (self.depth as usize).min(cap);
        let mut values = wg.shared("prefix", cap, init);
        wg.step(&mut values, |lane, values| {
            let d0 = lane.id() * k;
            if d0 >= live {
                return;
            }
            // Largest q with rev[q].b > d0; rev[0].b = depth > d0.
            let (mut lo, mut hi) = (0, self.m);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.rev.get(mid).b as usize > d0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut q = lo;
            for d in d0..(d0 + k).min(live) {
                if d >= self.rev.get(q).b as usize {
                    q = next_survivor(q, k, &self.bits, &self.link);
                }
                let slot = self.rev.get(q).b as usize - 1 - d;
                values.set(lane, d, entry(q, slot));
            }
        })?;
        Ok(Prefix {
            depth: self.depth,
            values,
        })
    }
}

/// Builds the top `w·k` stack entries in front of partition `m`.
pub(crate) fn wg_materialize<T: Copy>(
    wg: &mut Workgroup,
    m: usize,
    slice_bic: &[Bic],
    init: T,
    entry: impl Fn(usize, usize) -> T,
) -> Result<Prefix<T>, ExecError> {
    PrefixPlan::build(wg, m, slice_bic)?.emit(wg, init, entry)
}

/// Closest partition below `q` with surviving opens.
fn next_survivor(
    q: usize,
    k: usize,
    bits: &SharedArray<u32>,
    link: &SharedArray<i32>,
) -> usize {
    let s = q / k;
    let below = bits.get(s) & ((1u32 << (q % k)) - 1);
    if below != 0 {
        return s * k + highest_bit(below);
    }
    let s = link.get(s);
    debug_assert!(s >= 0, "stack walk ran past the bottom");
    let s = s as usize;
    s * k + highest_bit(bits.get(s))
}

#[inline]
pub(crate) fn highest_bit(x: u32) -> usize {
    31 - x.leading_zeros() as usize
}

struct PrefixKernel<'a> {
    m: usize,
    slices: &'a Slices,
}

impl Kernel for PrefixKernel<'_> {
    type Output = PrefixSnapshot;

    fn name(&self) -> &'static str {
        "prefix"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<PrefixSnapshot, ExecError> {
        let part = self.slices.partition_size();
        let idx = &self.slices.idx;
        let prefix = wg_materialize(wg, self.m, &self.slices.bic, 0u32, |q, slot| idx[q * part + slot])?;
        let live = (prefix.depth as usize).min(prefix.values.len());
        Ok(PrefixSnapshot {
            depth: prefix.depth,
            values: prefix.values.as_slice()[..live].to_vec(),
        })
    }
}

/// Runs the materialization for partition `m` on its own as a one-workgroup
/// dispatch. `slices` must come from a slice dispatch with the same `cfg`.
pub fn materialize_prefix(
    exec: &Executor,
    slices: &Slices,
    m: usize,
    cfg: PartitionConfig,
) -> Result<PrefixSnapshot> {
    if slices.partition_size() != cfg.partition_size() {
        return Err(crate::Error::Config(format!(
            "slices have partition size {}, config {cfg} has {}",
            slices.partition_size(),
            cfg.partition_size()
        )));
    }
    if m > cfg.partition_size() || m > slices.partitions() {
        return Err(crate::Error::Config(format!(
            "partition {m} is out of reach of a {cfg} prefix"
        )));
    }
    let mut out = exec.dispatch(1, cfg, &PrefixKernel { m, slices })?;
    Ok(out.pop().expect("one workgroup"))
}
