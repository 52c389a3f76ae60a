//! The bicyclic semigroup, the stack monoid and box monoids on small inputs.

use stackmonoid::monoid::{bic_reduce, stk_reduce, BBox, Bic, Intersect, Monoid, Union};
use stackmonoid::oracle::parse_parens;

fn main() {
    let elems = parse_parens("))()(");
    println!("bic  ))()(  = {:?}", bic_reduce(&elems, 0..elems.len()));
    println!("(0,2) + (1,0) = {:?}", Bic::new(0, 2).combine(Bic::new(1, 0)));

    let elems = parse_parens("(()((");
    let stk = stk_reduce(&elems, 0..elems.len());
    println!("stack (()((  = {stk:?}, top {:?}, projects to {:?}", stk.top(), stk.project());

    let a = BBox::new(0, 0, 10, 10);
    let b = BBox::new(5, -5, 20, 8);
    println!("{a:?} & {b:?} = {:?}", Intersect(a).combine(&Intersect(b)).0);
    println!("{a:?} | {b:?} = {:?}", Union(a).combine(&Union(b)).0);
    println!("disjoint intersection is empty: {}", a.intersect(&BBox::new(11, 11, 12, 12)).is_empty());
}
