use crate::executor::TreeView;
use crate::monoid::Bic;

/// Outcome of a tree search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Search<T> {
    /// Leaf position where the accepted range starts.
    pub start: usize,
    /// Fold of the accepted range `start..i1`, combined with the initial
    /// value on the right.
    pub acc: T,
    /// Tree nodes examined.
    pub probes: u32,
}

/// Greedy leftward walk over `tree` from leaf position `i1`.
///
/// Grows the range `start..i1` one aligned node at a time, first upwards
/// then downwards, and keeps a node iff `accept(node ⊕ acc, new_start)`.
/// `accept` must be monotone: once a start is rejected, every smaller start
/// is too. Examines at most `2·lg(span)` nodes.
pub fn tree_search<V: TreeView>(
    tree: &V,
    i1: usize,
    init: V::Node,
    combine: impl Fn(V::Node, V::Node) -> V::Node,
    accept: impl Fn(&V::Node, usize) -> bool,
) -> Search<V::Node> {
    let height = tree.levels() - 1;
    let mut i = i1;
    let mut p = init;
    let mut probes = 0;
    let mut j = 0;
    while j < height {
        if i & (1 << j) != 0 {
            let q = combine(tree.node(j, (i >> j) - 1), p);
            probes += 1;
            if accept(&q, i - (1 << j)) {
                p = q;
                i -= 1 << j;
            } else {
                break;
            }
        }
        j += 1;
    }
    if i > 0 {
        while j > 0 {
            j -= 1;
            let q = combine(tree.node(j, (i >> j) - 1), p);
            probes += 1;
            if accept(&q, i - (1 << j)) {
                p = q;
                i -= 1 << j;
            }
        }
    }
    Search {
        start: i,
        acc: p,
        probes,
    }
}

/// Smallest `i` with `Bic(s[i..i1]).b == 0` over a Bic tree.
#[inline]
pub fn bic_search<V: TreeView<Node = Bic>>(tree: &V, i1: usize, init: Bic) -> Search<Bic> {
    tree_search(tree, i1, init, Bic::combine, |q, _| q.b == 0)
}

/// Enclosing or matching open of position `i1`, or `-1` when the search
/// reaches the start of the tree.
pub fn core_tree_search<V: TreeView<Node = Bic>>(tree: &V, i1: usize) -> (i64, u32) {
    let s = bic_search(tree, i1, Bic::IDENTITY);
    (s.start as i64 - 1, s.probes)
}

/// Fold of the leaves `lo..hi` by the same walk, accepting nodes that stay
/// inside the range.
pub fn range_fold<V: TreeView>(
    tree: &V,
    lo: usize,
    hi: usize,
    identity: V::Node,
    combine: impl Fn(V::Node, V::Node) -> V::Node,
) -> Search<V::Node> {
    tree_search(tree, hi, identity, combine, |_, start| start >= lo)
}
