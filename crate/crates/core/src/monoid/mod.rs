//! Monoids used by the matching and bounding-box algorithms.
//!
//! Three algebras carry all of the work:
//!
//! | Type | Role |
//! |------|------|
//! | [`Bic`] | bicyclic semigroup, counts unmatched closes / opens |
//! | [`StackMonoid`] | like [`Bic`] but keeps the indices of unmatched opens |
//! | [`Intersect`], [`Union`] | bounding-box algebras over [`BBox`] |
//!
//! Every type implements [`Monoid`], so the generic scan and tree code in
//! [`crate::executor`] works over any of them.

mod bbox;
mod bic;
mod stack;

pub use bbox::{BBox, Intersect, Union, MAXCOORD, MINCOORD};
pub use bic::{bic_from_element, bic_reduce, Bic};
pub use stack::{stk_from_element, stk_reduce, stk_suffix, StackMonoid};

/// An associative operation with a two-sided identity.
pub trait Monoid: Clone {
    fn identity() -> Self;
    fn combine(&self, rhs: &Self) -> Self;
}

/// Left fold of `items` under `M`.
pub fn fold<'a, M: Monoid + 'a>(items: impl IntoIterator<Item = &'a M>) -> M {
    items
        .into_iter()
        .fold(M::identity(), |acc, x| acc.combine(x))
}

/// Sequential inclusive scan, the reference for every parallel scan.
pub fn inclusive_scan<M: Monoid>(items: &[M]) -> Vec<M> {
    let mut acc = M::identity();
    items
        .iter()
        .map(|x| {
            acc = acc.combine(x);
            acc.clone()
        })
        .collect()
}

/// Sequential reverse inclusive scan: `out[i] = items[i] ⊕ … ⊕ items[n-1]`.
pub fn reverse_inclusive_scan<M: Monoid>(items: &[M]) -> Vec<M> {
    let mut out = vec![M::identity(); items.len()];
    let mut acc = M::identity();
    for (i, x) in items.iter().enumerate().rev() {
        acc = x.combine(&acc);
        out[i] = acc.clone();
    }
    out
}

impl Monoid for () {
    fn identity() -> Self {}
    fn combine(&self, _: &Self) -> Self {}
}

impl<A: Monoid, B: Monoid> Monoid for (A, B) {
    fn identity() -> Self {
        (A::identity(), B::identity())
    }
    fn combine(&self, rhs: &Self) -> Self {
        (self.0.combine(&rhs.0), self.1.combine(&rhs.1))
    }
}

/// Addition on `u64`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sum(pub u64);

impl Monoid for Sum {
    fn identity() -> Self {
        Sum(0)
    }
    fn combine(&self, rhs: &Self) -> Self {
        Sum(self.0 + rhs.0)
    }
}

/// Maximum on `i64`, identity `i64::MIN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Max(pub i64);

impl Monoid for Max {
    fn identity() -> Self {
        Max(i64::MIN)
    }
    fn combine(&self, rhs: &Self) -> Self {
        Max(self.0.max(rhs.0))
    }
}
