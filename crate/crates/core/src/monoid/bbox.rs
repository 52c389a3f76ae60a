use std::fmt;

use super::Monoid;

pub const MINCOORD: i32 = i32::MIN;
pub const MAXCOORD: i32 = i32::MAX;

/// Axis-aligned box with inclusive integer bounds.
///
/// Any box with `x0 > x1` or `y0 > y1` is empty. The canonical empty and
/// infinite boxes are the identities of [`Union`] and [`Intersect`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BBox {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl BBox {
    pub const EMPTY: BBox = BBox::new(MAXCOORD, MAXCOORD, MINCOORD, MINCOORD);
    pub const INFINITE: BBox = BBox::new(MINCOORD, MINCOORD, MAXCOORD, MAXCOORD);

    pub const fn new(x0: i32, y0: i32, x1: i32, y1: i32) -> Self {
        BBox { x0, y0, x1, y1 }
    }

    pub fn is_empty(&self) -> bool {
        self.x0 > self.x1 || self.y0 > self.y1
    }

    pub fn intersect(&self, other: &BBox) -> BBox {
        BBox {
            x0: self.x0.max(other.x0),
            y0: self.y0.max(other.y0),
            x1: self.x1.min(other.x1),
            y1: self.y1.min(other.y1),
        }
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    /// Maps every empty box to [`BBox::EMPTY`].
    pub fn canonical(&self) -> BBox {
        if self.is_empty() {
            BBox::EMPTY
        } else {
            *self
        }
    }
}

impl fmt::Debug for BBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == BBox::EMPTY {
            f.write_str("EMPTY")
        } else if *self == BBox::INFINITE {
            f.write_str("INFINITE")
        } else {
            write!(f, "({}, {}, {}, {})", self.x0, self.y0, self.x1, self.y1)
        }
    }
}

/// Intersection monoid; clips flow down the tree with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Intersect(pub BBox);

impl Monoid for Intersect {
    fn identity() -> Self {
        Intersect(BBox::INFINITE)
    }
    #[inline]
    fn combine(&self, rhs: &Self) -> Self {
        Intersect(self.0.intersect(&rhs.0))
    }
}

/// Union monoid; blends flow up the tree with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Union(pub BBox);

impl Monoid for Union {
    fn identity() -> Self {
        Union(BBox::EMPTY)
    }
    #[inline]
    fn combine(&self, rhs: &Self) -> Self {
        Union(self.0.union(&rhs.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let b = BBox::new(1, 2, 3, 4);
        assert_eq!(BBox::INFINITE.intersect(&b), b);
        assert_eq!(BBox::EMPTY.union(&b), b);
        assert_eq!(
            BBox::new(0, 0, 10, 10).intersect(&BBox::new(5, 5, 20, 20)),
            BBox::new(5, 5, 10, 10)
        );
        assert!(BBox::new(0, 0, 1, 1).intersect(&BBox::new(5, 5, 6, 6)).is_empty());
        assert!(!BBox::new(3, 3, 3, 3).is_empty());
        assert_eq!(BBox::new(5, 0, 1, 9).canonical(), BBox::EMPTY);
    }

    fn coord() -> impl Strategy<Value = i32> {
        prop_oneof![
            8 => -1000i32..1000,
            1 => Just(MINCOORD),
            1 => Just(MAXCOORD),
        ]
    }

    fn bbox() -> impl Strategy<Value = BBox> {
        (coord(), coord(), coord(), coord()).prop_map(|(a, b, c, d)| BBox::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn intersect_laws(x in bbox(), y in bbox(), z in bbox()) {
            let (x, y, z) = (Intersect(x), Intersect(y), Intersect(z));
            prop_assert_eq!(x.combine(&y).combine(&z), x.combine(&y.combine(&z)));
            prop_assert_eq!(x.combine(&y), y.combine(&x));
            prop_assert_eq!(x.combine(&x), x);
            prop_assert_eq!(x.combine(&Intersect::identity()), x);
        }

        #[test]
        fn union_laws(x in bbox(), y in bbox(), z in bbox()) {
            let (x, y, z) = (Union(x), Union(y), Union(z));
            prop_assert_eq!(x.combine(&y).combine(&z), x.combine(&y.combine(&z)));
            prop_assert_eq!(x.combine(&y), y.combine(&x));
            prop_assert_eq!(x.combine(&x), x);
            prop_assert_eq!(Union::identity().combine(&x), x);
        }
    }
}
