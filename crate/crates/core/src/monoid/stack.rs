use std::ops::Range;

use super::{Bic, Monoid};
use crate::oracle::Element;

/// The stack monoid over element indices.
///
/// `a` is the number of unmatched closes, `l` holds the indices of unmatched
/// opens from bottom to top. A prefix reduction is a snapshot of the
/// sequential matcher's stack.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StackMonoid {
    pub a: u32,
    pub l: Vec<u32>,
}

impl StackMonoid {
    pub fn new(a: u32, l: Vec<u32>) -> Self {
        StackMonoid { a, l }
    }

    /// The [`Bic`] image `(a, |l|)`.
    pub fn project(&self) -> Bic {
        Bic::new(self.a, self.l.len() as u32)
    }

    pub fn top(&self) -> Option<u32> {
        self.l.last().copied()
    }
}

impl Monoid for StackMonoid {
    fn identity() -> Self {
        StackMonoid::default()
    }

    fn combine(&self, rhs: &Self) -> Self {
        let pops = (rhs.a as usize).min(self.l.len());
        let keep = self.l.len() - pops;
        let mut l = Vec::with_capacity(keep + rhs.l.len());
        l.extend_from_slice(&self.l[..keep]);
        l.extend_from_slice(&rhs.l);
        StackMonoid {
            a: self.a + rhs.a - pops as u32,
            l,
        }
    }
}

pub fn stk_from_element(e: &Element, idx: u32) -> StackMonoid {
    match e {
        Element::Open(_) => StackMonoid::new(0, vec![idx]),
        Element::Close => StackMonoid::new(1, Vec::new()),
        Element::Leaf(_) => StackMonoid::default(),
    }
}

/// Reduction of `elems[range]`, with payloads being the global indices.
pub fn stk_reduce(elems: &[Element], range: Range<usize>) -> StackMonoid {
    let mut acc = StackMonoid::default();
    for i in range {
        match &elems[i] {
            Element::Open(_) => acc.l.push(i as u32),
            Element::Close => {
                if acc.l.pop().is_none() {
                    acc.a += 1;
                }
            }
            Element::Leaf(_) => {}
        }
    }
    acc
}

/// The last `min(k, |l|)` values of `x.l`, order preserved.
pub fn stk_suffix(x: &StackMonoid, k: usize) -> &[u32] {
    &x.l[x.l.len().saturating_sub(k)..]
}
