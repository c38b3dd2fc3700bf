//! The weighted inner product, norm and metric on eventually-constant
//! sequences.  The explicit part is summed termwise and the common tail is
//! folded into a single closed-form remainder, so no truncation is involved.

use crate::point::Point;
use crate::weights::WeightSequence;

/// <x, y>_a = sum_i a_i^2 x_i y_i.
pub fn inner_product(x: &Point, y: &Point, w: &WeightSequence) -> f64 {
    let k = x.prefix.len().max(y.prefix.len()).max(w.prefix.len());
    let mut acc = 0.0;
    for i in 1..=k {
        let a = w.weight(i);
        acc += a * a * x.coord(i) * y.coord(i);
    }
    acc + x.tail_value * y.tail_value * w.tail_sq_sum(k)
}

pub fn norm(x: &Point, w: &WeightSequence) -> f64 {
    inner_product(x, x, w).max(0.0).sqrt()
}

/// d_a(x, y) = ||x - y||_a.
pub fn distance(x: &Point, y: &Point, w: &WeightSequence) -> f64 {
    norm(&x.sub(y), w)
}
