//! Randomized algebraic properties of the weighted inner product and of
//! cylinder subdivision.

use hcube::{distance, inner_product, norm, BasicCylinder, IntervalKind, Point, WeightSequence};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn point() -> impl Strategy<Value = Point> {
    (
        prop::collection::vec(-1.0f64..1.0, 0..8),
        -1.0f64..1.0,
    )
        .prop_map(|(prefix, tail)| Point::new(prefix, tail))
}

fn weights() -> impl Strategy<Value = WeightSequence> {
    (
        prop::collection::vec(0.05f64..1.0, 0..5),
        0.05f64..1.0,
        0.1f64..0.9,
    )
        .prop_map(|(prefix, start, ratio)| WeightSequence::new(prefix, start, ratio).unwrap())
}

fn cylinder() -> impl Strategy<Value = BasicCylinder> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..5).prop_map(|ends| {
        let coords = ends
            .into_iter()
            .map(|(a, b)| IntervalKind::classify(a.min(b), a.max(b)).unwrap())
            .collect();
        BasicCylinder::new(coords).unwrap()
    })
}

proptest! {
    #[test]
    fn inner_product_is_bilinear(
        u in point(), v in point(), x in point(),
        s in -2.0f64..2.0, w in weights(),
    ) {
        let lhs = inner_product(&u.scale(s).add(&v), &x, &w);
        let rhs = s * inner_product(&u, &x, &w) + inner_product(&v, &x, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn inner_product_is_symmetric(u in point(), v in point(), w in weights()) {
        let a = inner_product(&u, &v, &w);
        let b = inner_product(&v, &u, &w);
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn cauchy_schwarz(u in point(), v in point(), w in weights()) {
        let lhs = inner_product(&u, &v, &w).abs();
        prop_assert!(lhs <= norm(&u, &w) * norm(&v, &w) + 1e-12);
    }

    #[test]
    fn triangle_inequality(u in point(), v in point(), x in point(), w in weights()) {
        let d = distance(&u, &x, &w);
        prop_assert!(d <= distance(&u, &v, &w) + distance(&v, &x, &w) + 1e-12);
    }

    #[test]
    fn tail_sum_recurrence(w in weights(), k in 0usize..12) {
        let wk = w.weight(k + 1);
        let lhs = w.tail_sq_sum(k);
        let rhs = wk * wk + w.tail_sq_sum(k + 1);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn subdivision_preserves_volume(
        j in cylinder(),
        parts in prop::collection::vec(1u32..5, 4),
    ) {
        let mut map = BTreeMap::new();
        for (idx, p) in parts.iter().enumerate() {
            map.insert(idx + 1, *p);
        }
        let pieces = j.subdivide(&map).unwrap();
        let total: f64 = pieces.iter().map(|p| p.volume()).sum();
        prop_assert!((total - j.volume()).abs() <= 1e-12);
        let expected: u64 = parts.iter().map(|&p| p as u64).product();
        prop_assert_eq!(pieces.len() as u64, expected);
    }
}
