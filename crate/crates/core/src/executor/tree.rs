use super::{
    Commit, CommitCtx, ExecError, Executor, GlobalWrites, Kernel, Lane, PartitionConfig,
    SharedArray, Workgroup,
};

/// Start of level `level` in the flat layout of a tree with `span` leaves.
///
/// Level 0 holds the leaves at `0..span`, level 1 follows at `span..3span/2`,
/// and so on up to the root at `2span-2`.
#[inline]
pub fn level_offset(span: usize, level: u32) -> usize {
    if level == 0 {
        0
    } else {
        2 * span - (span >> (level - 1))
    }
}

/// Read access to a complete binary reduction tree.
///
/// Node `(j, i)` covers leaves `i·2^j .. (i+1)·2^j`.
pub trait TreeView {
    type Node: Copy;

    /// Number of leaves, a power of two.
    fn span(&self) -> usize;

    fn node(&self, level: u32, index: usize) -> Self::Node;

    fn levels(&self) -> u32 {
        self.span().trailing_zeros() + 1
    }

    fn root(&self) -> Self::Node {
        self.node(self.levels() - 1, 0)
    }
}

/// A reduction tree in global memory, `2·span − 1` nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTree<T> {
    span: usize,
    nodes: Vec<T>,
}

impl<T: Copy> ReductionTree<T> {
    /// Wraps an already built flat layout.
    pub fn from_nodes(span: usize, nodes: Vec<T>) -> Self {
        assert!(span.is_power_of_two(), "tree span {span} is not a power of two");
        assert_eq!(nodes.len(), 2 * span - 1);
        ReductionTree { span, nodes }
    }

    /// Builds the tree sequentially, padding the leaves with `identity`.
    pub fn build(leaves: &[T], identity: T, combine: impl Fn(T, T) -> T) -> Self {
        let span = leaves.len().next_power_of_two().max(1);
        let mut nodes = Vec::with_capacity(2 * span - 1);
        nodes.extend_from_slice(leaves);
        nodes.resize(span, identity);
        let mut start = 0;
        let mut width = span;
        while width > 1 {
            for i in 0..width / 2 {
                let v = combine(nodes[start + 2 * i], nodes[start + 2 * i + 1]);
                nodes.push(v);
            }
            start += width;
            width /= 2;
        }
        ReductionTree { span, nodes }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.nodes
    }

    pub fn leaves(&self) -> &[T] {
        &self.nodes[..self.span]
    }

    pub fn level(&self, level: u32) -> &[T] {
        let start = level_offset(self.span, level);
        &self.nodes[start..start + (self.span >> level)]
    }
}

impl<T: Copy> TreeView for ReductionTree<T> {
    type Node = T;

    fn span(&self) -> usize {
        self.span
    }

    #[inline]
    fn node(&self, level: u32, index: usize) -> T {
        self.nodes[level_offset(self.span, level) + index]
    }
}

/// A reduction tree in workgroup shared memory.
pub struct SharedTree<T: Copy> {
    span: usize,
    arr: SharedArray<T>,
}

impl<T: Copy> SharedTree<T> {
    pub fn new(wg: &Workgroup, name: &'static str, span: usize, identity: T) -> Self {
        assert!(span.is_power_of_two(), "tree span {span} is not a power of two");
        SharedTree {
            span,
            arr: wg.shared(name, 2 * span - 1, identity),
        }
    }

    #[inline]
    pub fn set_leaf(&self, lane: Lane, index: usize, value: T) {
        self.arr.set(lane, index, value);
    }

    pub fn as_slice(&self) -> &[T] {
        self.arr.as_slice()
    }
}

impl<T: Copy> Commit for SharedTree<T> {
    fn commit(&mut self, ctx: &CommitCtx) -> Result<(), ExecError> {
        self.arr.commit(ctx)
    }
}

impl<T: Copy> TreeView for SharedTree<T> {
    type Node = T;

    fn span(&self) -> usize {
        self.span
    }

    #[inline]
    fn node(&self, level: u32, index: usize) -> T {
        self.arr.get(level_offset(self.span, level) + index)
    }
}

/// Up-sweep over the leaves of `tree`: one step per level, each parent the
/// combination of its two children.
pub fn wg_tree_build<T: Copy>(
    wg: &mut Workgroup,
    tree: &mut SharedTree<T>,
    combine: impl Fn(T, T) -> T,
) -> Result<(), ExecError> {
    let w = wg.size();
    let span = tree.span;
    for level in 1..tree.levels() {
        let width = span >> level;
        let dst = level_offset(span, level);
        wg.step(tree, |lane, tree| {
            for i in (lane.id()..width).step_by(w) {
                let v = combine(tree.node(level - 1, 2 * i), tree.node(level - 1, 2 * i + 1));
                tree.arr.set(lane, dst + i, v);
            }
        })?;
    }
    Ok(())
}

struct LevelKernel<'a, T, L, C> {
    below: Option<&'a [T]>,
    width: usize,
    leaf: &'a L,
    combine: &'a C,
}

impl<T, L, C> Kernel for LevelKernel<'_, T, L, C>
where
    T: Copy + Send + Sync,
    L: Fn(usize) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    type Output = GlobalWrites<T>;

    fn name(&self) -> &'static str {
        "tree-level"
    }

    fn run(&self, wg: &mut Workgroup) -> Result<GlobalWrites<T>, ExecError> {
        let k = wg.k();
        let base = wg.id() * wg.cfg().partition_size();
        let out = GlobalWrites::with_capacity("tree", wg.id(), wg.cfg().partition_size());
        wg.step(&mut (), |lane, _| {
            for i in lane.chunk(k).map(|i| base + i).filter(|&i| i < self.width) {
                let v = match self.below {
                    None => (self.leaf)(i),
                    Some(below) => (self.combine)(below[2 * i], below[2 * i + 1]),
                };
                out.write(lane, i, v);
            }
        })?;
        Ok(out)
    }
}

/// Builds a global reduction tree with `span` leaves, one dispatch per level
/// with a lane per node. Returns the tree and the number of dispatches.
pub fn tree_dispatch<T, L, C>(
    exec: &Executor,
    cfg: PartitionConfig,
    span: usize,
    identity: T,
    leaf: L,
    combine: C,
) -> Result<(ReductionTree<T>, u32), ExecError>
where
    T: Copy + Send + Sync,
    L: Fn(usize) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    assert!(span.is_power_of_two(), "tree span {span} is not a power of two");
    let mut nodes = vec![identity; 2 * span - 1];
    let mut dispatches = 0;
    let mut level = 0;
    while span >> level > 0 {
        let width = span >> level;
        let (lo, hi) = nodes.split_at_mut(level_offset(span, level));
        let below = (level > 0).then(|| &lo[level_offset(span, level - 1)..]);
        let kernel = LevelKernel {
            below,
            width,
            leaf: &leaf,
            combine: &combine,
        };
        let logs = exec.dispatch(cfg.grid_for(width), cfg, &kernel)?;
        exec.apply(&mut hi[..width], logs)?;
        dispatches += 1;
        level += 1;
    }
    Ok((ReductionTree { span, nodes }, dispatches))
}
