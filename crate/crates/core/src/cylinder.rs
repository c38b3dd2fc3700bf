//! Basic cylinders: axis-aligned infinite-dimensional intervals with
//! finitely many restricted coordinates, their index taxonomy, volumes,
//! diameters, intersections and the exact product measure on finite unions.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::weights::WeightSequence;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Endpoint tolerance for membership, intersection and re-classification.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// One coordinate of a basic cylinder.  The five kinds mirror the index
/// sets of the taxonomy: left-anchored `[0, p2]`, interior `[p1, p2]`,
/// right-anchored `[p1, 1]`, singleton `{p1}` and the full edge `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalKind {
    LeftAnchored { p2: f64 },
    Interior { p1: f64, p2: f64 },
    RightAnchored { p1: f64 },
    Singleton { p1: f64 },
    Full,
}

impl IntervalKind {
    pub fn lo(&self) -> f64 {
        match *self {
            IntervalKind::LeftAnchored { .. } | IntervalKind::Full => 0.0,
            IntervalKind::Interior { p1, .. }
            | IntervalKind::RightAnchored { p1 }
            | IntervalKind::Singleton { p1 } => p1,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            IntervalKind::RightAnchored { .. } | IntervalKind::Full => 1.0,
            IntervalKind::LeftAnchored { p2 } | IntervalKind::Interior { p2, .. } => p2,
            IntervalKind::Singleton { p1 } => p1,
        }
    }

    pub fn length(&self) -> f64 {
        self.hi() - self.lo()
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self, IntervalKind::Singleton { .. })
    }

    /// Re-classifies a closed subinterval of [0,1] into the five kinds.
    pub fn classify(lo: f64, hi: f64) -> Result<IntervalKind> {
        if lo > hi + ENDPOINT_TOL {
            return Err(Error::InvalidCylinder(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        if lo < -ENDPOINT_TOL || hi > 1.0 + ENDPOINT_TOL {
            return Err(Error::InvalidCylinder(format!(
                "interval [{lo}, {hi}] escapes [0,1]"
            )));
        }
        let lo = lo.clamp(0.0, 1.0);
        let hi = hi.clamp(0.0, 1.0);
        let at_zero = lo <= ENDPOINT_TOL;
        let at_one = hi >= 1.0 - ENDPOINT_TOL;
        Ok(if hi - lo <= ENDPOINT_TOL {
            IntervalKind::Singleton { p1: lo }
        } else if at_zero && at_one {
            IntervalKind::Full
        } else if at_zero {
            IntervalKind::LeftAnchored { p2: hi }
        } else if at_one {
            IntervalKind::RightAnchored { p1: lo }
        } else {
            IntervalKind::Interior { p1: lo, p2: hi }
        })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            IntervalKind::LeftAnchored { p2 } => 0.0 < p2 && p2 < 1.0,
            IntervalKind::Interior { p1, p2 } => 0.0 < p1 && p1 < p2 && p2 < 1.0,
            IntervalKind::RightAnchored { p1 } => 0.0 < p1 && p1 < 1.0,
            IntervalKind::Singleton { p1 } => (0.0..=1.0).contains(&p1),
            IntervalKind::Full => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCylinder(format!("invalid interval {self:?}")))
        }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo() - tol && x <= self.hi() + tol
    }
}

/// An axis-aligned infinite-dimensional interval.  Coordinates beyond the
/// explicit prefix are the full edge [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicCylinder {
    pub coords: Vec<IntervalKind>,
}

/// The free-direction set of a basic cylinder: all of the naturals minus
/// the finitely many pinned coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSet {
    /// 1-based indices of the pinned (singleton) coordinates.
    pub excluded: Vec<usize>,
    /// Always true for basic cylinders: the set is cofinite in the naturals.
    pub cofinite: bool,
}

impl BasicCylinder {
    pub fn new(coords: Vec<IntervalKind>) -> Result<Self> {
        for c in &coords {
            c.validate()?;
        }
        Ok(Self { coords })
    }

    /// The whole cube: every coordinate full.
    pub fn cube() -> Self {
        Self { coords: Vec::new() }
    }

    /// The 1-based coordinate interval (full beyond the prefix).
    pub fn interval(&self, i: usize) -> IntervalKind {
        assert!(i >= 1, "coordinates are 1-based");
        *self.coords.get(i - 1).unwrap_or(&IntervalKind::Full)
    }

    /// Extends the explicit prefix with full edges up to length `len`.
    pub fn extended(&self, len: usize) -> Self {
        let mut coords = self.coords.clone();
        while coords.len() < len {
            coords.push(IntervalKind::Full);
        }
        Self { coords }
    }

    pub fn lambda_set(&self) -> LambdaSet {
        let excluded = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_singleton())
            .map(|(i, _)| i + 1)
            .collect();
        LambdaSet {
            excluded,
            cofinite: true,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.coords.iter().any(|c| c.is_singleton())
    }

    /// Elementary volume: the product of edge lengths, zero when any
    /// coordinate is pinned.  Tail edges contribute factor 1.
    pub fn volume(&self) -> f64 {
        if self.is_degenerate() {
            return 0.0;
        }
        self.coords.iter().map(|c| c.length()).product()
    }

    /// sqrt(sum a_i^2 len_i^2); the supremum of pairwise distances is
    /// attained at diagonally opposite corners, so this is exact.
    pub fn diameter(&self, w: &WeightSequence) -> f64 {
        self.diameter_sq(w).sqrt()
    }

    pub fn diameter_sq(&self, w: &WeightSequence) -> f64 {
        let k = self.coords.len();
        let explicit: f64 = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let a = w.weight(i + 1);
                let len = c.length();
                a * a * len * len
            })
            .sum();
        explicit + w.tail_sq_sum(k)
    }

    /// Lower-left and diagonally opposite upper-right corner.
    pub fn corners(&self) -> (Point, Point) {
        let lower = Point::new(self.coords.iter().map(|c| c.lo()).collect(), 0.0);
        let upper = Point::new(self.coords.iter().map(|c| c.hi()).collect(), 1.0);
        (lower, upper)
    }

    pub fn contains_point(&self, x: &Point, tol: f64) -> bool {
        let k = self.coords.len().max(x.prefix.len());
        (1..=k).all(|i| self.interval(i).contains(x.coord(i), tol))
            && x.tail_value >= -tol
            && x.tail_value <= 1.0 + tol
    }

    /// Coordinatewise intersection; `None` when some coordinate pair is
    /// disjoint.  Zero-length intersections collapse to singletons.
    pub fn intersect(&self, other: &BasicCylinder) -> Option<BasicCylinder> {
        let k = self.coords.len().max(other.coords.len());
        let mut coords = Vec::with_capacity(k);
        for i in 1..=k {
            let a = self.interval(i);
            let b = other.interval(i);
            let lo = a.lo().max(b.lo());
            let hi = a.hi().min(b.hi());
            match IntervalKind::classify(lo, hi) {
                Ok(c) => coords.push(c),
                Err(_) => return None,
            }
        }
        Some(BasicCylinder { coords })
    }

    /// Splits the named coordinates into equal closed parts; the output
    /// grid is ordered lexicographically in the part indices.
    pub fn subdivide(&self, per_coord_parts: &BTreeMap<usize, u32>) -> Result<Vec<BasicCylinder>> {
        let mut max_idx = self.coords.len();
        for (&i, &parts) in per_coord_parts {
            if parts == 0 {
                return Err(Error::InvalidCylinder(format!(
                    "zero parts requested for coordinate {i}"
                )));
            }
            if self.interval(i).is_singleton() {
                return Err(Error::InvalidCylinder(format!(
                    "cannot subdivide the pinned coordinate {i}"
                )));
            }
            max_idx = max_idx.max(i);
        }
        let base = self.extended(max_idx);
        let split: Vec<(usize, u32, f64, f64)> = per_coord_parts
            .iter()
            .map(|(&i, &parts)| {
                let iv = base.interval(i);
                (i, parts, iv.lo(), iv.hi())
            })
            .collect();

        let total: u64 = split.iter().map(|&(_, p, _, _)| p as u64).product();
        let mut out = Vec::with_capacity(total as usize);
        let mut counter = vec![0u32; split.len()];
        loop {
            let mut coords = base.coords.clone();
            for (slot, &(i, parts, lo, hi)) in split.iter().enumerate() {
                let step = (hi - lo) / parts as f64;
                let k = counter[slot] as f64;
                let (a, b) = (lo + k * step, if counter[slot] + 1 == parts { hi } else { lo + (k + 1.0) * step });
                coords[i - 1] = IntervalKind::classify(a, b)?;
            }
            out.push(BasicCylinder { coords });

            // lexicographic increment, most significant slot first
            let mut slot = split.len();
            loop {
                if slot == 0 {
                    return Ok(out);
                }
                slot -= 1;
                counter[slot] += 1;
                if counter[slot] < split[slot].1 {
                    break;
                }
                counter[slot] = 0;
            }
        }
    }
}

/// A finite union of basic cylinders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderUnion {
    pub members: Vec<BasicCylinder>,
}

impl CylinderUnion {
    pub fn new(members: Vec<BasicCylinder>) -> Self {
        Self { members }
    }

    pub fn contains_point(&self, x: &Point, tol: f64) -> bool {
        self.members.iter().any(|m| m.contains_point(x, tol))
    }
}

/// Maximum union size accepted by the inclusion-exclusion sum.
pub const PI_MEASURE_MAX_MEMBERS: usize = 20;

/// Exact product measure of a finite union of basic cylinders via
/// inclusion-exclusion.  Degenerate intersections contribute nothing.
pub fn pi_measure(union: &CylinderUnion) -> Result<f64> {
    let k = union.members.len();
    if k > PI_MEASURE_MAX_MEMBERS {
        return Err(Error::Unsupported(format!(
            "inclusion-exclusion over {k} members exceeds the limit of {PI_MEASURE_MAX_MEMBERS}"
        )));
    }
    let mut total = 0.0;
    'mask: for mask in 1u32..(1u32 << k) {
        let mut inter: Option<BasicCylinder> = None;
        for (j, member) in union.members.iter().enumerate() {
            if mask & (1 << j) == 0 {
                continue;
            }
            inter = Some(match inter {
                None => member.clone(),
                Some(cur) => match cur.intersect(member) {
                    Some(next) => next,
                    None => continue 'mask,
                },
            });
        }
        if let Some(cyl) = inter {
            let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * cyl.volume();
        }
    }
    Ok(total.clamp(0.0, 1.0))
}
