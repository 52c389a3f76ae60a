use crate::error::Result;
use crate::executor::{
    wg_tree_build, ExecError, Executor, GlobalWrites, Kernel, PartitionConfig, SharedArray,
    SharedTree, Workgroup,
};
use crate::monoid::Bic;
use crate::oracle::{Element, MatchOutput};

use super::{
    bic_at, bic_search, check_limit, highest_bit, we_slice_dispatch, wg_materialize, MatchRun,
    MatchStats, Search, Slices,
};

/// Index of the `a`-th highest set bit of `x`, counting from 0.
#[inline]
fn select_from_top(mut x: u32, a: u32) -> usize {
    for _ in 0..a {
        x &= !(1 << highest_bit(x));
    }
    debug_assert!(x != 0, "bitmap has too few unmatched opens");
    highest_bit(x)
}

/// Turns a chunk-level search into a stack reference.
///
/// A search that stops at chunk boundary `c > 0` lands in chunk `c - 1`,
/// `A = acc.a` entries below the top of that chunk's unmatched opens.
/// Otherwise the reference is depth `A` of the prefix snapshot, encoded as
/// `-1 - A`.
#[inline]
fn resolve(s: &Search<Bic>, bits: &SharedArray<u32>, k: usize) -> i32 {
    if s.start > 0 {
        let c = s.start - 1;
        (c * k + select_from_top(bits.get(c), s.acc.a)) as i32
    } else {
        -1 - s.acc.a as i32
    }
}

struct MainKernel<'a> {
    elems: &'a [Element],
    slices: &'a Slices,
}

impl Kernel for MainKernel<'_> {
    type Output = (GlobalWrites<i64>, u32, u64);

    fn name(&self) -> &'static str {
        "we-main"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<Self::Output, ExecError> {
        let (w, k) = (wg.size(), wg.k());
        let part = w * k;
        let m = wg.id();
        let p = m * part;
        let n = self.elems.len();

        // 1. Stack entries in front of the partition.
        let idx = &self.slices.idx;
        let prefix =
            wg_materialize(wg, m, &self.slices.bic, 0u32, |q, slot| idx[q * part + slot])?;

        // 2. Chunk reductions, bitmaps of chunk-unmatched opens, and the
        //    reduction of each chunk up to its lowest unmatched open.
        let mut tree = SharedTree::new(wg, "tree", w, Bic::IDENTITY);
        let mut bits = wg.shared("bits", w, 0u32);
        let mut below = wg.shared("below_lowest", w, Bic::IDENTITY);
        wg.step(&mut (&mut tree, &mut bits, &mut below), |lane, (tree, bits, below)| {
            let t = lane.id();
            let base = p + t * k;
            let mut acc = Bic::IDENTITY;
            let mut mask = 0u32;
            for j in (0..k).rev() {
                let x = bic_at(self.elems, base + j);
                if x.b == 1 && acc.a == 0 {
                    mask |= 1 << j;
                }
                acc = x.combine(acc);
            }
            tree.set_leaf(lane, t, acc);
            bits.set(lane, t, mask);
            if mask != 0 {
                let lowest = mask.trailing_zeros() as usize;
                let pre = (0..lowest).fold(Bic::IDENTITY, |a, j| a.combine(bic_at(self.elems, base + j)));
                below.set(lane, t, pre);
            }
        })?;
        wg_tree_build(wg, &mut tree, Bic::combine)?;

        // 3. Stack top at each chunk start, and below each chunk's lowest
        //    unmatched open.
        let mut first = wg.shared("first", w, 0i32);
        let mut link = wg.shared("link", w, 0i32);
        let mut max_probes = 0;
        wg.step(&mut (&mut first, &mut link), |lane, (first, link)| {
            let t = lane.id();
            let s = bic_search(&tree, t, Bic::IDENTITY);
            max_probes = max_probes.max(s.probes);
            first.set(lane, t, resolve(&s, &bits, k));
            if bits.get(t) != 0 {
                let s = bic_search(&tree, t, below.get(t));
                max_probes = max_probes.max(s.probes);
                link.set(lane, t, resolve(&s, &bits, k));
            }
        })?;

        // 4. Sequential resolution within each chunk.
        let out = GlobalWrites::with_capacity("out", m, part);
        let mut ops = 0u64;
        wg.step(&mut (), |lane, _| {
            let t = lane.id();
            let mut top = first.get(t);
            let mut stack = [0u32; 32];
            let mut sp = 0;
            for i in lane.chunk(k) {
                if p + i >= n {
                    break;
                }
                let r = if sp > 0 {
                    (p + stack[sp - 1] as usize) as i64
                } else if top >= 0 {
                    (p + top as usize) as i64
                } else {
                    prefix.at((-1 - top) as u32).map_or(-1, i64::from)
                };
                out.write(lane, p + i, r);
                ops += 1;
                match self.elems[p + i] {
                    Element::Open(_) => {
                        stack[sp] = i as u32;
                        sp += 1;
                        ops += 1;
                    }
                    Element::Close if sp > 0 => {
                        sp -= 1;
                        ops += 1;
                    }
                    Element::Close => {
                        top = if top >= 0 {
                            let (c, b) = (top as usize / k, top as usize % k);
                            let lower = bits.get(c) & ((1u32 << b) - 1);
                            if lower != 0 {
                                (c * k + highest_bit(lower)) as i32
                            } else {
                                link.get(c)
                            }
                        } else {
                            top - 1
                        };
                        ops += 1;
                    }
                    Element::Leaf(_) => {}
                }
            }
        })?;
        Ok((out, max_probes, ops))
    }
}

/// Two dispatches with `k` elements per lane.
///
/// The main dispatch rebuilds the prefix snapshot, reduces every lane's
/// chunk to a Bic tree leaf plus a bitmap of its chunk-unmatched opens, and
/// runs two searches per lane: one for the stack top at the chunk start and
/// one for the entry below the chunk's lowest unmatched open. Chained
/// together these describe every stack snapshot at chunk boundaries, so each
/// lane then matches its `k` elements sequentially with amortized `O(1)`
/// work per element.
pub fn we_parenmatch(exec: &Executor, elems: &[Element], cfg: PartitionConfig) -> Result<MatchRun> {
    check_limit(elems.len(), cfg)?;
    let mut stats = MatchStats::default();
    if elems.is_empty() {
        return Ok(MatchRun { out: MatchOutput::default(), stats });
    }
    let slices = we_slice_dispatch(exec, elems, cfg)?;
    let outs = exec.dispatch(slices.partitions(), cfg, &MainKernel { elems, slices: &slices })?;
    stats.dispatches = 2;
    stats.probe_bound = 2 * cfg.w().trailing_zeros();
    let mut logs = Vec::with_capacity(outs.len());
    for (log, probes, ops) in outs {
        stats.max_probes = stats.max_probes.max(probes);
        stats.resolution_ops.push(ops);
        logs.push(log);
    }
    stats.searches = 2 * (slices.partitions() * cfg.w()) as u64;
    let mut out = vec![0i64; elems.len()];
    exec.apply(&mut out, logs)?;
    Ok(MatchRun { out: MatchOutput(out), stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{parse_parens, seq_parenmatch};

    fn cfg(w: usize, k: usize) -> PartitionConfig {
        PartitionConfig::new(w, k).unwrap()
    }

    #[test]
    fn chains_and_alternation() {
        let exec = Executor::new(1).validating(true);
        let opens = parse_parens(&"(".repeat(40));
        let run = we_parenmatch(&exec, &opens, cfg(2, 4)).unwrap();
        assert_eq!(run.out.0, (-1..39).collect::<Vec<i64>>());
        let alt = parse_parens(&"()".repeat(20));
        let run = we_parenmatch(&exec, &alt, cfg(4, 2)).unwrap();
        let want: Vec<i64> = (0..40).map(|i| if i % 2 == 0 { -1 } else { i - 1 }).collect();
        assert_eq!(run.out.0, want);
    }

    #[test]
    fn select_bits() {
        assert_eq!(select_from_top(0b1011_0100, 0), 7);
        assert_eq!(select_from_top(0b1011_0100, 1), 5);
        assert_eq!(select_from_top(0b1011_0100, 3), 2);
    }

    #[test]
    fn mixed_input_all_configs() {
        let elems = parse_parens(
            "((()(.)())((()))(.(()()(()))).)(((()((((()).(((()()))((()))))((((((.)))()(()(((",
        );
        let want = seq_parenmatch(&elems).unwrap();
        let exec = Executor::new(1).validating(true);
        for (w, k) in [(2, 1), (2, 2), (2, 4), (4, 2), (4, 4), (2, 8), (8, 1), (8, 2), (16, 1), (2, 32)] {
            let c = cfg(w, k);
            if elems.len() > c.two_dispatch_limit() {
                assert!(we_parenmatch(&exec, &elems, c).is_err());
                continue;
            }
            let run = we_parenmatch(&exec, &elems, c).unwrap();
            assert_eq!(run.out, want, "w={w} k={k}");
            assert!(run.stats.max_probes <= run.stats.probe_bound);
        }
    }
}
