use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::monoid::BBox;
use crate::oracle::{Element, ParenSeq};

/// Coordinates of generated boxes stay within `±GEN_EXTENT`.
pub const GEN_EXTENT: i32 = 1 << 12;

fn random_box(rng: &mut ChaCha8Rng) -> BBox {
    let x0 = rng.gen_range(-GEN_EXTENT..GEN_EXTENT);
    let y0 = rng.gen_range(-GEN_EXTENT..GEN_EXTENT);
    let x1 = x0 + rng.gen_range(0..GEN_EXTENT);
    let y1 = y0 + rng.gen_range(0..GEN_EXTENT);
    BBox::new(x0, y0, x1, y1)
}

/// Random underflow-free sequence of `n` elements, a pure function of
/// `(n, seed, scene)`.
///
/// Push and pop are equally likely except at depth zero, where only push is
/// possible. With `scene` set, each step is first a leaf with probability
/// 1/4, and opens are clips with a random box or blends with equal odds.
/// Without it only blends and closes are produced.
pub fn gen_random(n: usize, seed: u64, scene: bool) -> ParenSeq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut depth = 0usize;
    let mut elems = Vec::with_capacity(n);
    for _ in 0..n {
        if scene && rng.gen_ratio(1, 4) {
            elems.push(Element::Leaf(random_box(&mut rng)));
            continue;
        }
        if depth > 0 && rng.gen_bool(0.5) {
            depth -= 1;
            elems.push(Element::Close);
        } else {
            depth += 1;
            elems.push(if scene && rng.gen_bool(0.5) {
                Element::clip(random_box(&mut rng))
            } else {
                Element::blend()
            });
        }
    }
    ParenSeq::new(elems).expect("generator never underflows")
}

/// `depth` nested blends around a leaf, all closed: `n = 2·depth + 1`.
pub fn gen_nested(depth: usize) -> ParenSeq {
    let mut elems = vec![Element::blend(); depth];
    elems.push(Element::Leaf(BBox::new(0, 0, 1, 1)));
    elems.extend(std::iter::repeat(Element::Close).take(depth));
    ParenSeq::new(elems).expect("balanced")
}
