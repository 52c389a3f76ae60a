//! Bounding boxes of tree-structured scenes.
//!
//! Clips flow down the tree: every element's box is intersected with the
//! boxes of all of its clip ancestors. Blends flow up: every close receives
//! the union of the clipped leaf boxes strictly inside its span. Both passes
//! are generic over any [`Monoid`] and come in two forms:
//!
//! * global-memory PRAM form ([`pram_bbox`]): parent links from the core
//!   matcher, link doubling for the down pass, range reductions over a union
//!   tree for the up pass;
//! * partitioned form ([`bbox_pipeline`]): stack slices carry values as well
//!   as indices, so two dispatches per pass suffice for `n ≤ (w·k)²`.
//!
//! ```
//! use stackmonoid::bbox::bbox_pipeline;
//! use stackmonoid::executor::{Executor, PartitionConfig};
//! use stackmonoid::monoid::BBox;
//! use stackmonoid::oracle::Element;
//!
//! let elems = [
//!     Element::clip(BBox::new(0, 0, 10, 10)),
//!     Element::blend(),
//!     Element::Leaf(BBox::new(5, 5, 20, 20)),
//!     Element::Close,
//!     Element::Close,
//! ];
//! let exec = Executor::default();
//! let run = bbox_pipeline(&exec, &elems, PartitionConfig::new(4, 1).unwrap()).unwrap();
//! assert_eq!(run.result.clipped[2], BBox::new(5, 5, 10, 10));
//! assert_eq!(run.result.union_at_open[1], Some(BBox::new(5, 5, 10, 10)));
//! ```

mod down;
mod pram;
mod up;

pub use down::{down_main_dispatch, down_slice_dispatch, down_sweep, DownResult, ValueSlices};
pub use pram::{
    blend_range_union, clip_link_double, link_double, pram_bbox, union_tree_dispatch, ClipState,
    Doubled, LinkState,
};
pub use up::{scatter_to_open, up_main_dispatch, up_slice_dispatch, up_sweep, UpResult};

use crate::error::Result;
use crate::executor::{Executor, PartitionConfig};
use crate::matching::Slices;
use crate::monoid::{BBox, Intersect, Monoid, Union};
use crate::oracle::{clip_value, union_value, BBoxResult, Element, MatchOutput};

/// Values the parallel passes can carry.
pub trait ScanValue: Monoid + Copy + Send + Sync {}

impl<M: Monoid + Copy + Send + Sync> ScanValue for M {}

/// Counters from a bounding-box run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BBoxStats {
    pub dispatches: u32,
    /// Link doubling rounds run.
    pub rounds: u32,
    /// Rounds after which all links had ended.
    pub converged_after: u32,
    pub max_probes: u32,
    pub probe_bound: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBoxRun {
    pub result: BBoxResult,
    /// Parent of every element, as the matcher's output.
    pub matches: MatchOutput,
    pub stats: BBoxStats,
}

/// Union values for the up pass.
pub fn union_values(elems: &[Element], clipped: &[BBox]) -> Vec<Union> {
    elems.iter().zip(clipped).map(|(e, c)| union_value(e, *c)).collect()
}

/// Stack slices paired with the inclusive intersection scan of the entries'
/// clip boxes.
pub fn bbox_slice_dispatch(
    exec: &Executor,
    elems: &[Element],
    cfg: PartitionConfig,
) -> Result<ValueSlices<Intersect>> {
    let values: Vec<Intersect> = elems.iter().map(clip_value).collect();
    down_slice_dispatch(exec, elems, &values, cfg)
}

/// Clipped box of every element from the slices of [`bbox_slice_dispatch`].
pub fn bbox_clip_dispatch(
    exec: &Executor,
    elems: &[Element],
    slices: &ValueSlices<Intersect>,
    cfg: PartitionConfig,
) -> Result<DownResult<Intersect>> {
    crate::matching::check_limit(elems.len(), cfg)?;
    let values: Vec<Intersect> = elems.iter().map(clip_value).collect();
    down_main_dispatch(exec, elems, &values, slices, cfg)
}

/// Union of the clipped leaves inside every close's span, at the close and
/// scattered to its open.
pub fn bbox_union_dispatch(
    exec: &Executor,
    elems: &[Element],
    slices: &Slices,
    clipped: &[BBox],
    cfg: PartitionConfig,
) -> Result<UpResult<Union>> {
    up_sweep(exec, elems, &union_values(elems, clipped), slices, cfg)
}

/// Both partitioned passes: four dispatches plus the scatter, sharing one
/// set of stack slices.
pub fn bbox_pipeline(exec: &Executor, elems: &[Element], cfg: PartitionConfig) -> Result<BBoxRun> {
    crate::matching::check_limit(elems.len(), cfg)?;
    let slices = bbox_slice_dispatch(exec, elems, cfg)?;
    let down = bbox_clip_dispatch(exec, elems, &slices, cfg)?;
    let clipped: Vec<BBox> = down.folded.iter().map(|v| v.0).collect();
    let up = bbox_union_dispatch(exec, elems, &slices.slices, &clipped, cfg)?;
    let stats = BBoxStats {
        dispatches: 5,
        rounds: down.rounds,
        converged_after: down.converged_after,
        max_probes: down.max_probes.max(up.max_probes),
        probe_bound: down.probe_bound,
    };
    Ok(BBoxRun {
        result: BBoxResult {
            clipped,
            union_at_close: up.at_close.into_iter().map(|u| u.map(|u| u.0)).collect(),
            union_at_open: up.at_open.into_iter().map(|u| u.map(|u| u.0)).collect(),
        },
        matches: MatchOutput(down.parents),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{seq_bbox, seq_parenmatch, ParenSeq};

    fn leaf(x0: i32, y0: i32, x1: i32, y1: i32) -> Element {
        Element::Leaf(BBox::new(x0, y0, x1, y1))
    }

    fn clip(x0: i32, y0: i32, x1: i32, y1: i32) -> Element {
        Element::clip(BBox::new(x0, y0, x1, y1))
    }

    fn cfg(w: usize, k: usize) -> PartitionConfig {
        PartitionConfig::new(w, k).unwrap()
    }

    fn check(elems: &[Element], c: PartitionConfig) {
        let exec = Executor::new(1).validating(true);
        let want = seq_bbox(elems).unwrap();
        let run = bbox_pipeline(&exec, elems, c).unwrap();
        assert_eq!(run.result, want, "{c}");
        assert_eq!(run.matches, seq_parenmatch(elems).unwrap());
        assert!(run.stats.max_probes <= run.stats.probe_bound);
        let pram = pram_bbox(&exec, elems, c).unwrap();
        assert_eq!(pram.result, want, "pram {c}");
    }

    #[test]
    fn nested_clips() {
        let elems = [clip(0, 0, 10, 10), clip(5, 5, 20, 20), leaf(0, 0, 100, 100), Element::Close, Element::Close];
        let exec = Executor::new(1).validating(true);
        let run = bbox_pipeline(&exec, &elems, cfg(4, 1)).unwrap();
        assert_eq!(run.result.clipped[2], BBox::new(5, 5, 10, 10));
        let disjoint = [clip(0, 0, 1, 1), leaf(5, 5, 6, 6), Element::Close];
        let run = bbox_pipeline(&exec, &disjoint, cfg(2, 1)).unwrap();
        assert!(run.result.clipped[1].is_empty());
        for c in [cfg(2, 2), cfg(4, 1)] {
            check(&elems, c);
            check(&disjoint, c);
        }
    }

    #[test]
    fn slice_boxes() {
        let a = BBox::new(0, 0, 10, 10);
        let exec = Executor::new(1).validating(true);
        let elems = [Element::clip(a), clip(5, 5, 20, 20)];
        let s = bbox_slice_dispatch(&exec, &elems, cfg(2, 1)).unwrap();
        assert_eq!(s.slices.entries(0), &[0, 1]);
        assert_eq!(s.values(0), &[Intersect(a), Intersect(BBox::new(5, 5, 10, 10))]);
        let s = bbox_slice_dispatch(&exec, &[Element::blend(), leaf(1, 1, 2, 2)], cfg(2, 1)).unwrap();
        assert_eq!(s.values(0), &[Intersect(BBox::INFINITE)]);
        let s = bbox_slice_dispatch(&exec, &[leaf(1, 1, 2, 2), leaf(0, 0, 1, 1)], cfg(2, 1)).unwrap();
        assert!(s.values(0).is_empty());
    }

    #[test]
    fn blends() {
        let exec = Executor::new(1).validating(true);
        let elems = [Element::blend(), leaf(0, 0, 1, 1), leaf(2, 2, 3, 3), Element::Close];
        let run = bbox_pipeline(&exec, &elems, cfg(2, 1)).unwrap();
        assert_eq!(run.result.union_at_close[3], Some(BBox::new(0, 0, 3, 3)));
        assert_eq!(run.result.union_at_open[0], Some(BBox::new(0, 0, 3, 3)));
        let empty = [Element::blend(), Element::Close];
        let run = bbox_pipeline(&exec, &empty, cfg(2, 1)).unwrap();
        assert_eq!(run.result.union_at_close[1], Some(BBox::EMPTY));
        let nested = [Element::blend(), Element::blend(), leaf(0, 0, 1, 1), Element::Close, Element::Close];
        let run = bbox_pipeline(&exec, &nested, cfg(4, 1)).unwrap();
        assert_eq!(run.result.union_at_close[4], Some(BBox::new(0, 0, 1, 1)));
        for c in [cfg(2, 2), cfg(4, 1), cfg(4, 4)] {
            check(&elems, c);
            check(&nested, c);
        }
    }

    #[test]
    fn deep_nesting_across_partitions() {
        let mut elems = Vec::new();
        for d in 0..40 {
            elems.push(if d % 3 == 0 { Element::blend() } else { clip(d, -d, 200 - d, 150 + d) });
            elems.push(leaf(d * 2, d, d * 3 + 5, d + 9));
        }
        elems.push(leaf(-5, -5, 300, 300));
        elems.extend((0..40).flat_map(|d| [leaf(d, d, d + 1, d + 1), Element::Close]));
        ParenSeq::new(elems.clone()).unwrap();
        for c in [cfg(2, 8), cfg(4, 4), cfg(8, 2), cfg(16, 1), cfg(8, 4), cfg(2, 32)] {
            check(&elems, c);
        }
    }

    #[test]
    fn depth_100_chain_converges_in_seven_rounds() {
        let mut elems: Vec<Element> = (0..100).map(|d| clip(-1000 + d, -1000, 1000 - d, 1000)).collect();
        elems.push(leaf(-2000, 0, 2000, 1));
        elems.extend(std::iter::repeat(Element::Close).take(100));
        let exec = Executor::new(1).validating(true);
        let parents = seq_parenmatch(&elems).unwrap();
        let state = ClipState::for_clip(&elems, &parents);
        let doubled = clip_link_double(&exec, state, cfg(8, 4)).unwrap();
        assert!(doubled.converged_after <= 7);
        let want = seq_bbox(&elems).unwrap().clipped;
        assert_eq!(doubled.val.iter().map(|v| v.0).collect::<Vec<_>>(), want);
        check(&elems, cfg(8, 4));
        check(&elems, cfg(16, 2));
    }

    #[test]
    fn root_leaf_keeps_its_box() {
        let elems = [leaf(3, 4, 5, 6)];
        let exec = Executor::new(1).validating(true);
        let state = ClipState::for_clip(&elems, &[-1]);
        let doubled = clip_link_double(&exec, state, cfg(2, 1)).unwrap();
        assert_eq!(doubled.val[0].0, BBox::new(3, 4, 5, 6));
        assert_eq!(doubled.converged_after, 0);
        check(&elems, cfg(2, 1));
        check(&[], cfg(2, 1));
    }

    #[test]
    fn range_union() {
        let exec = Executor::new(1);
        let elems = [Element::blend(), leaf(0, 0, 1, 1), leaf(2, 2, 3, 3), Element::Close, Element::blend(), Element::Close];
        let clipped = seq_bbox(&elems).unwrap().clipped;
        let (tree, _) = union_tree_dispatch(&exec, &elems, &clipped, cfg(2, 1)).unwrap();
        assert_eq!(blend_range_union(&tree, 0, 3), BBox::new(0, 0, 3, 3));
        assert_eq!(blend_range_union(&tree, 4, 5), BBox::EMPTY);
    }

    #[test]
    fn too_large() {
        let exec = Executor::new(1);
        let elems = vec![leaf(0, 0, 1, 1); 5];
        assert!(bbox_pipeline(&exec, &elems, cfg(2, 1)).is_err());
        assert!(pram_bbox(&exec, &elems, cfg(2, 1)).is_ok());
    }
}
