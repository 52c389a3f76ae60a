//! Input model and sequential reference implementations.
//!
//! Everything here is a straightforward single-threaded walk with an explicit
//! stack. The parallel algorithms in [`crate::matching`] and [`crate::bbox`]
//! are tested against these functions.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::monoid::{BBox, Intersect, Monoid, Union};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpenKind {
    /// Intersects every descendant with its box.
    Clip(BBox),
    /// Composites its descendants; its box is the union of theirs.
    Blend,
}

/// One element of a flattened tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Open(OpenKind),
    Close,
    Leaf(BBox),
}

impl Element {
    pub const fn clip(bbox: BBox) -> Self {
        Element::Open(OpenKind::Clip(bbox))
    }

    pub const fn blend() -> Self {
        Element::Open(OpenKind::Blend)
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Element::Open(_))
    }

    pub fn is_close(&self) -> bool {
        matches!(self, Element::Close)
    }
}

/// Parses `(`, `)` and `.` (leaf with an empty box) into elements.
///
/// Whitespace is skipped; other characters panic. The result is not checked
/// for underflow, so unbalanced partitions like `")(()("` can be built.
pub fn parse_parens(s: &str) -> Vec<Element> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '(' => Element::blend(),
            ')' => Element::Close,
            '.' => Element::Leaf(BBox::EMPTY),
            other => panic!("unexpected character {other:?} in paren string"),
        })
        .collect()
}

/// Position of the first close that would pop an empty stack.
pub fn first_underflow(elems: &[Element]) -> Option<usize> {
    let mut depth = 0usize;
    for (i, e) in elems.iter().enumerate() {
        match e {
            Element::Open(_) => depth += 1,
            Element::Close if depth == 0 => return Some(i),
            Element::Close => depth -= 1,
            Element::Leaf(_) => {}
        }
    }
    None
}

/// A validated, underflow-free element sequence.
///
/// Trailing unmatched opens are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParenSeq {
    elements: Vec<Element>,
}

impl ParenSeq {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        if let Some(position) = first_underflow(&elements) {
            return Err(Error::Underflow { position });
        }
        if elements.len() as u64 >= u32::MAX as u64 {
            return Err(Error::InputTooLarge {
                n: elements.len(),
                limit: u32::MAX as usize - 1,
                w: 0,
                k: 0,
            });
        }
        Ok(ParenSeq { elements })
    }

    pub fn from_parens(s: &str) -> Result<Self> {
        ParenSeq::new(parse_parens(s))
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    /// Renders opens, closes and leaves as `(`, `)` and `.`.
    pub fn to_parens(&self) -> String {
        self.elements
            .iter()
            .map(|e| match e {
                Element::Open(_) => '(',
                Element::Close => ')',
                Element::Leaf(_) => '.',
            })
            .collect()
    }

    /// Largest stack depth reached.
    pub fn max_depth(&self) -> usize {
        let mut depth = 0usize;
        let mut max = 0;
        for e in &self.elements {
            match e {
                Element::Open(_) => {
                    depth += 1;
                    max = max.max(depth);
                }
                Element::Close => depth -= 1,
                Element::Leaf(_) => {}
            }
        }
        max
    }
}

impl Deref for ParenSeq {
    type Target = [Element];
    fn deref(&self) -> &[Element] {
        &self.elements
    }
}

/// Per-element parent reference: the enclosing open for opens and leaves,
/// the matching open for closes, `-1` at the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MatchOutput(pub Vec<i64>);

impl MatchOutput {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// Checks `out[i] < i` and that every chain of references reaches `-1`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (i, &p) in self.0.iter().enumerate() {
            if p >= i as i64 || p < -1 {
                return Err(format!("out[{i}] = {p} is not a valid parent"));
            }
        }
        // out[i] < i makes every chain strictly decreasing, so it terminates.
        Ok(())
    }
}

impl Deref for MatchOutput {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

/// The sequential matcher: `out[i]` is the stack top before element `i`.
pub fn seq_parenmatch(elems: &[Element]) -> Result<MatchOutput> {
    let mut stack: Vec<i64> = vec![-1];
    let mut out = Vec::with_capacity(elems.len());
    for (i, e) in elems.iter().enumerate() {
        out.push(*stack.last().unwrap());
        match e {
            Element::Open(_) => stack.push(i as i64),
            Element::Close => {
                if stack.len() == 1 {
                    return Err(Error::Underflow { position: i });
                }
                stack.pop();
            }
            Element::Leaf(_) => {}
        }
    }
    Ok(MatchOutput(out))
}

/// Stack contents (bottom to top, without the root sentinel) before
/// element `j` is processed.
pub fn seq_stack_snapshot(elems: &[Element], j: usize) -> Result<Vec<u32>> {
    let mut stack = Vec::new();
    for (i, e) in elems[..j].iter().enumerate() {
        match e {
            Element::Open(_) => stack.push(i as u32),
            Element::Close => {
                if stack.pop().is_none() {
                    return Err(Error::Underflow { position: i });
                }
            }
            Element::Leaf(_) => {}
        }
    }
    Ok(stack)
}

/// For every element, `values` of its root-most ancestor through its parent,
/// then its own value, folded in that order. A close's parent is its open.
pub fn seq_ancestor_fold<M: Monoid>(elems: &[Element], values: &[M]) -> Result<Vec<M>> {
    assert_eq!(elems.len(), values.len());
    let mut stack: Vec<M> = Vec::new();
    let mut out = Vec::with_capacity(elems.len());
    for (i, e) in elems.iter().enumerate() {
        let above = stack.last().cloned().unwrap_or_else(M::identity);
        let v = above.combine(&values[i]);
        match e {
            Element::Open(_) => stack.push(v.clone()),
            Element::Close => {
                if stack.pop().is_none() {
                    return Err(Error::Underflow { position: i });
                }
            }
            Element::Leaf(_) => {}
        }
        out.push(v);
    }
    Ok(out)
}

/// For every matched close, the fold of `values` strictly between it and its
/// open; `None` elsewhere.
pub fn seq_span_fold<M: Monoid>(elems: &[Element], values: &[M]) -> Result<Vec<Option<M>>> {
    assert_eq!(elems.len(), values.len());
    let mut stack: Vec<M> = Vec::new();
    let mut out = vec![None; elems.len()];
    for (i, e) in elems.iter().enumerate() {
        match e {
            Element::Open(_) => {
                if let Some(top) = stack.last_mut() {
                    *top = top.combine(&values[i]);
                }
                stack.push(M::identity());
            }
            Element::Close => {
                let inner = stack.pop().ok_or(Error::Underflow { position: i })?;
                if let Some(top) = stack.last_mut() {
                    *top = top.combine(&inner).combine(&values[i]);
                }
                out[i] = Some(inner);
            }
            Element::Leaf(_) => {
                if let Some(top) = stack.last_mut() {
                    *top = top.combine(&values[i]);
                }
            }
        }
    }
    Ok(out)
}

/// Own value of an element in the clip pass: clip opens and leaves carry
/// their box, blend opens and closes are the identity.
pub fn clip_value(e: &Element) -> Intersect {
    match e {
        Element::Open(OpenKind::Clip(b)) | Element::Leaf(b) => Intersect(*b),
        Element::Open(OpenKind::Blend) | Element::Close => Intersect(BBox::INFINITE),
    }
}

/// Own value of an element in the union pass: leaves carry their clipped
/// box, everything else is empty.
pub fn union_value(e: &Element, clipped: BBox) -> Union {
    match e {
        Element::Leaf(_) => Union(clipped),
        _ => Union(BBox::EMPTY),
    }
}

/// Clipped box of every element.
pub fn seq_clip(elems: &[Element]) -> Result<Vec<BBox>> {
    let values: Vec<Intersect> = elems.iter().map(clip_value).collect();
    Ok(seq_ancestor_fold(elems, &values)?
        .into_iter()
        .map(|v| v.0)
        .collect())
}

/// Union of the clipped leaf boxes inside every matched close's span.
pub fn seq_blend(elems: &[Element], clipped: &[BBox]) -> Result<Vec<Option<BBox>>> {
    let values: Vec<Union> = elems
        .iter()
        .zip(clipped)
        .map(|(e, c)| union_value(e, *c))
        .collect();
    Ok(seq_span_fold(elems, &values)?
        .into_iter()
        .map(|v| v.map(|u| u.0))
        .collect())
}

/// Clip and union results for a scene.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BBoxResult {
    /// Clipped box per element.
    pub clipped: Vec<BBox>,
    /// Union per matched close.
    pub union_at_close: Vec<Option<BBox>>,
    /// The same unions, moved to the matching open.
    pub union_at_open: Vec<Option<BBox>>,
}

/// Clip pass followed by the union pass.
pub fn seq_bbox(elems: &[Element]) -> Result<BBoxResult> {
    let clipped = seq_clip(elems)?;
    let union_at_close = seq_blend(elems, &clipped)?;
    let matches = seq_parenmatch(elems)?;
    let mut union_at_open = vec![None; elems.len()];
    for (i, u) in union_at_close.iter().enumerate() {
        if let Some(u) = u {
            union_at_open[matches[i] as usize] = Some(*u);
        }
    }
    Ok(BBoxResult {
        clipped,
        union_at_close,
        union_at_open,
    })
}
