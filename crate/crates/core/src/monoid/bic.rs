use std::fmt;
use std::ops::Range;

use super::Monoid;
use crate::oracle::Element;

/// Element of the bicyclic semigroup.
///
/// `a` counts unmatched close parentheses and `b` unmatched open ones.
/// The reduction of a string tells how many elements it pops from the stack
/// that precedes it (`a`) and how many it leaves pushed (`b`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bic {
    pub a: u32,
    pub b: u32,
}

impl Bic {
    pub const IDENTITY: Bic = Bic { a: 0, b: 0 };
    pub const OPEN: Bic = Bic { a: 0, b: 1 };
    pub const CLOSE: Bic = Bic { a: 1, b: 0 };

    pub const fn new(a: u32, b: u32) -> Self {
        Bic { a, b }
    }

    #[inline]
    pub fn combine(self, rhs: Bic) -> Bic {
        let m = self.b.min(rhs.a);
        Bic {
            a: self.a + rhs.a - m,
            b: self.b + rhs.b - m,
        }
    }
}

impl Monoid for Bic {
    fn identity() -> Self {
        Bic::IDENTITY
    }
    #[inline]
    fn combine(&self, rhs: &Self) -> Self {
        Bic::combine(*self, *rhs)
    }
}

impl fmt::Debug for Bic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Maps an element to its generator: open `(0, 1)`, close `(1, 0)`, leaf
/// identity.
#[inline]
pub fn bic_from_element(e: &Element) -> Bic {
    match e {
        Element::Open(_) => Bic::OPEN,
        Element::Close => Bic::CLOSE,
        Element::Leaf(_) => Bic::IDENTITY,
    }
}

/// Reduction of `elems[range]`.
pub fn bic_reduce(elems: &[Element], range: Range<usize>) -> Bic {
    elems[range]
        .iter()
        .fold(Bic::IDENTITY, |acc, e| acc.combine(bic_from_element(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::parse_parens;
    use proptest::prelude::*;

    #[test]
    fn generators() {
        let s = parse_parens("().");
        assert_eq!(bic_from_element(&s[0]), Bic::new(0, 1));
        assert_eq!(bic_from_element(&s[1]), Bic::new(1, 0));
        assert_eq!(bic_from_element(&s[2]), Bic::new(0, 0));
    }

    #[test]
    fn combine_examples() {
        assert_eq!(Bic::new(0, 0).combine(Bic::new(2, 1)), Bic::new(2, 1));
        assert_eq!(Bic::new(0, 1).combine(Bic::new(1, 0)), Bic::new(0, 0));
        assert_eq!(Bic::new(1, 0).combine(Bic::new(0, 1)), Bic::new(1, 1));
    }

    #[test]
    fn reduce_examples() {
        let s = parse_parens("))()(");
        assert_eq!(bic_reduce(&s, 0..s.len()), Bic::new(2, 1));
        assert_eq!(bic_reduce(&[], 0..0), Bic::IDENTITY);
        let s = parse_parens("(()");
        assert_eq!(bic_reduce(&s, 0..3), Bic::new(0, 1));
    }

    fn bic() -> impl Strategy<Value = Bic> {
        (0u32..50, 0u32..50).prop_map(|(a, b)| Bic::new(a, b))
    }

    proptest! {
        #[test]
        fn associative(x in bic(), y in bic(), z in bic()) {
            prop_assert_eq!(x.combine(y).combine(z), x.combine(y.combine(z)));
            prop_assert_eq!(x.combine(Bic::IDENTITY), x);
            prop_assert_eq!(Bic::IDENTITY.combine(x), x);
        }

        #[test]
        fn b_grows_as_start_moves_left(s in "[()]{0,40}") {
            let elems = parse_parens(&s);
            let j = elems.len();
            let mut last = 0;
            for i in (0..=j).rev() {
                let b = bic_reduce(&elems, i..j).b;
                prop_assert!(b >= last);
                last = b;
            }
        }
    }
}
