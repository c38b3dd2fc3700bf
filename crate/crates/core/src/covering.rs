//! Delta-covering generation and validation: grid partitions of the cube,
//! translation coverings of a cylinder with near-optimal total volume, and
//! refine-then-map coverings of isometric images.

use crate::cylinder::{BasicCylinder, CylinderUnion, IntervalKind};
use crate::error::{Error, Result};
use crate::isometry::{Cylinder, Isometry, Report};
use crate::point::Point;
use crate::weights::WeightSequence;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default ceiling on the number of emitted cells.
pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

/// Shaves a relative hair off delta so selection rules produce strictly
/// smaller diameters even when the arithmetic lands on the boundary.
fn effective_delta(delta: f64) -> f64 {
    delta * (1.0 - 1e-9)
}

/// Floor with a nudge against values sitting just below an exact integer
/// from rounding (0.7 - 0.2 is not exactly 0.5 in binary); rounding up
/// only ever adds cells, which keeps coverings valid.
pub fn nudged_floor(x: f64) -> u64 {
    (x + 1e-12).floor().max(0.0) as u64
}

// compensated summation: plain f64 sums drift past 1e-12 at ~10^6 cells
fn kahan_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for x in it {
        let y = x - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

fn too_many_cells(cells: &Vec<Cylinder>) -> bool {
    cells.len() > 10_000
}

/// What a covering covers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverTarget {
    Cube,
    Basic { cylinder: BasicCylinder },
    Union { union: CylinderUnion },
    Image { union: CylinderUnion, map: Isometry },
}

impl CoverTarget {
    /// Draws a point of the target (for images, a point of the source
    /// mapped forward).
    fn sample(&self, rng: &mut impl Rng, explicit_len: usize) -> Point {
        let sample_basic = |j: &BasicCylinder, rng: &mut dyn rand::RngCore| -> Point {
            let len = j.coords.len().max(explicit_len);
            let prefix = (1..=len)
                .map(|i| {
                    let iv = j.interval(i);
                    let (lo, hi) = (iv.lo(), iv.hi());
                    if hi > lo {
                        rng.gen_range(lo..=hi)
                    } else {
                        lo
                    }
                })
                .collect();
            Point::new(prefix, rng.gen_range(0.0..=1.0))
        };
        match self {
            CoverTarget::Cube => sample_basic(&BasicCylinder::cube(), rng),
            CoverTarget::Basic { cylinder } => sample_basic(cylinder, rng),
            CoverTarget::Union { union } => {
                let k = rng.gen_range(0..union.members.len());
                sample_basic(&union.members[k], rng)
            }
            CoverTarget::Image { union, map } => {
                let k = rng.gen_range(0..union.members.len());
                map.apply(&sample_basic(&union.members[k], rng))
            }
        }
    }
}

/// One gridded axis of a cell lookup: cells step uniformly from `lo` in
/// source coordinate `coord`.
#[derive(Debug, Clone)]
pub struct LookupDim {
    pub coord: usize,
    pub lo: f64,
    pub step: f64,
    pub count: u64,
}

/// Direct cell addressing for coverings whose cells form a uniform grid
/// in source coordinates, in the lexicographic emission order (last axis
/// fastest).  All cells must share one isometry.
#[derive(Debug, Clone)]
pub struct GridLookup {
    pub dims: Vec<LookupDim>,
    pub map: Isometry,
}

impl GridLookup {
    /// Index of the cell whose source-grid slot contains the pulled-back
    /// point, clamped into range.
    fn index_of(&self, source_point: &Point) -> usize {
        let mut idx: usize = 0;
        for d in &self.dims {
            let t = (((source_point.coord(d.coord) - d.lo) / d.step).floor() as i64)
                .clamp(0, d.count as i64 - 1) as usize;
            idx = idx * d.count as usize + t;
        }
        idx
    }

    /// Indices of the cell and its grid neighbors, for probes landing on
    /// cell boundaries within floating-point noise.
    fn neighborhood(&self, source_point: &Point) -> Vec<usize> {
        let slots: Vec<(i64, i64)> = self
            .dims
            .iter()
            .map(|d| {
                let t = (((source_point.coord(d.coord) - d.lo) / d.step).floor() as i64)
                    .clamp(0, d.count as i64 - 1);
                (t, d.count as i64)
            })
            .collect();
        let mut out = Vec::new();
        let mut pick = vec![-1i64; slots.len()];
        'enumerate: loop {
            let mut idx: usize = 0;
            let mut ok = true;
            for (s, &(t, count)) in slots.iter().enumerate() {
                let v = t + pick[s];
                if v < 0 || v >= count {
                    ok = false;
                    break;
                }
                idx = idx * count as usize + v as usize;
            }
            if ok {
                out.push(idx);
            }
            let mut s = slots.len();
            loop {
                if s == 0 {
                    break 'enumerate;
                }
                s -= 1;
                pick[s] += 1;
                if pick[s] <= 1 {
                    break;
                }
                pick[s] = -1;
            }
        }
        out
    }
}

/// A validated delta-covering: every cell diameter is below delta and the
/// member volumes are summed exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Covering {
    pub target: CoverTarget,
    /// Suppressed in JSON above 10^4 cells; the summary fields remain.
    #[serde(default, skip_serializing_if = "too_many_cells")]
    pub cells: Vec<Cylinder>,
    pub delta: f64,
    pub total_volume: f64,
    pub cell_count: usize,
    /// (n, m) when the covering came from the n-coordinate, m-part grid.
    pub grid_params: Option<(usize, u32)>,
    /// Populated by constructors whose cells form a uniform source grid;
    /// lost over serialization, in which case validation falls back to a
    /// linear scan.
    #[serde(skip)]
    pub lookup: Option<GridLookup>,
}

impl Covering {
    pub fn max_diameter(&self, w: &WeightSequence) -> f64 {
        self.cells
            .iter()
            .map(|c| c.diameter(w))
            .fold(0.0, f64::max)
    }
}

/// Grid parameters for covering the cube at scale delta: the number of
/// explicit coordinates n takes half the squared-delta budget out of the
/// tail, the per-coordinate part count m takes the other half out of the
/// explicit prefix.
pub fn grid_params(w: &WeightSequence, delta: f64) -> Result<(usize, u32)> {
    if !(delta > 0.0) {
        return Err(Error::Infeasible("delta must be positive".into()));
    }
    let d = effective_delta(delta);
    let half = d * d / 2.0;
    let n = w.min_prefix_for_tail(half);
    let explicit = w.sq_prefix_sum(n);
    let mut m = (explicit / half).sqrt().ceil().max(1.0) as u32;
    // strictness: the full cell diameter must stay below delta
    while explicit / ((m as f64) * (m as f64)) + w.tail_sq_sum(n) >= delta * delta {
        m += 1;
    }
    Ok((n, m))
}

/// Exact grid partition of the cube into cells of diameter below delta.
pub fn grid_covering(w: &WeightSequence, delta: f64, budget: u64) -> Result<Covering> {
    let cube = BasicCylinder::cube();
    if cube.diameter(w) < delta {
        return Ok(Covering {
            target: CoverTarget::Cube,
            cells: vec![Cylinder::axis_aligned(cube)],
            delta,
            total_volume: 1.0,
            cell_count: 1,
            grid_params: Some((0, 1)),
            lookup: None,
        });
    }
    let (n, m) = grid_params(w, delta)?;
    let needed = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut parts = BTreeMap::new();
    for i in 1..=n {
        parts.insert(i, m);
    }
    let pieces = cube.subdivide(&parts)?;
    let total_volume = kahan_sum(pieces.iter().map(|p| p.volume()));
    let cell_count = pieces.len();
    let cells = pieces.into_iter().map(Cylinder::axis_aligned).collect();
    let lookup = GridLookup {
        dims: (1..=n)
            .map(|i| LookupDim {
                coord: i,
                lo: 0.0,
                step: 1.0 / m as f64,
                count: m as u64,
            })
            .collect(),
        map: Isometry::identity(),
    };
    Ok(Covering {
        target: CoverTarget::Cube,
        cells,
        delta,
        total_volume,
        cell_count,
        grid_params: Some((n, m)),
        lookup: Some(lookup),
    })
}

/// The translation-covering plan for a cylinder: the shrunken block edge
/// b*, the per-coordinate translation counts and the product count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficientCoveringPlan {
    pub source: BasicCylinder,
    pub b_star: f64,
    /// (coordinate, translation count) for every covered coordinate.
    pub per_coord_counts: Vec<(usize, u64)>,
    pub count: u64,
}

/// Covered coordinates: the explicit edges that are neither pinned nor the
/// full edge.
fn covered_coords(j: &BasicCylinder) -> Vec<usize> {
    j.coords
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            !matches!(c, IntervalKind::Singleton { .. } | IntervalKind::Full)
        })
        .map(|(i, _)| i + 1)
        .collect()
}

/// Squared diameter of the shrunken block: covered edges have length b,
/// everything else keeps its edge.
fn shrunken_diam_sq(j: &BasicCylinder, covered: &[usize], b: f64, w: &WeightSequence) -> f64 {
    let k = j.coords.len();
    let explicit: f64 = (1..=k)
        .map(|i| {
            let a = w.weight(i);
            let len = if covered.contains(&i) {
                b
            } else {
                j.interval(i).length()
            };
            a * a * len * len
        })
        .sum();
    explicit + w.tail_sq_sum(k)
}

fn plan_at(j: &BasicCylinder, covered: &[usize], b: f64) -> EfficientCoveringPlan {
    let per_coord_counts: Vec<(usize, u64)> = covered
        .iter()
        .map(|&i| (i, nudged_floor(j.interval(i).length() / b) + 1))
        .collect();
    let count = per_coord_counts
        .iter()
        .map(|&(_, c)| c)
        .fold(1u64, |a, c| a.saturating_mul(c));
    EfficientCoveringPlan {
        source: j.clone(),
        b_star: b,
        per_coord_counts,
        count,
    }
}

/// Exact total volume of the plan's translated blocks, accounting for the
/// clamp of the last block at the cube wall.
fn plan_total_volume(j: &BasicCylinder, plan: &EfficientCoveringPlan) -> f64 {
    if j.is_degenerate() {
        return 0.0;
    }
    let b = plan.b_star;
    plan.per_coord_counts
        .iter()
        .map(|&(i, c)| {
            let iv = j.interval(i);
            let lo = iv.lo();
            let span = (c - 1) as f64 * b;
            let last = (lo + c as f64 * b).min(1.0) - (lo + span);
            span + last
        })
        .product()
}

/// Builds a covering of K = f(J) by translations of the shrunken block,
/// with total volume at most vol(K) + epsilon.  The block edge is chosen
/// on a halving ladder so that tightening epsilon can only shrink it.
pub fn efficient_covering(
    k: &Cylinder,
    delta: f64,
    epsilon: f64,
    w: &WeightSequence,
    budget: u64,
) -> Result<(Covering, EfficientCoveringPlan)> {
    let j = &k.source;
    let covered = covered_coords(j);
    let vol = j.volume();

    // the covered edges can shrink to zero, but the full edges and the
    // tail are immovable; if they already exceed delta no block fits
    let floor_sq = shrunken_diam_sq(j, &covered, 0.0, w);
    if floor_sq >= delta * delta {
        return Err(Error::Infeasible(format!(
            "immovable edges give diameter {} >= delta {}",
            floor_sq.sqrt(),
            delta
        )));
    }
    if covered.is_empty() {
        // nothing to translate: the cylinder is its own single-cell covering
        let covering = Covering {
            target: CoverTarget::Basic {
                cylinder: j.clone(),
            },
            cells: vec![k.clone()],
            delta,
            total_volume: vol,
            cell_count: 1,
            grid_params: None,
            lookup: None,
        };
        return Ok((covering, plan_at(j, &covered, 1.0)));
    }

    let b0 = covered
        .iter()
        .map(|&i| j.interval(i).length())
        .fold(f64::INFINITY, f64::min);
    let mut chosen = None;
    let mut b = b0;
    for _ in 0..200 {
        let plan = plan_at(j, &covered, b);
        let ok_diam = shrunken_diam_sq(j, &covered, b, w) < delta * delta;
        let excess = plan_total_volume(j, &plan) - vol;
        if ok_diam && excess <= epsilon {
            if plan.count as u128 > budget as u128 {
                return Err(Error::BudgetExceeded {
                    needed: plan.count as u128,
                    budget,
                });
            }
            chosen = Some(plan);
            break;
        }
        b /= 2.0;
    }
    let plan = chosen.ok_or_else(|| {
        Error::Infeasible("no block edge satisfies the diameter and excess bounds".into())
    })?;

    // enumerate the translations lexicographically
    let b = plan.b_star;
    let mut cells = Vec::with_capacity(plan.count as usize);
    let mut counter = vec![0u64; covered.len()];
    'outer: loop {
        let mut coords = j.coords.clone();
        for (slot, &(i, _)) in plan.per_coord_counts.iter().enumerate() {
            let iv = j.interval(i);
            let lo = iv.lo() + counter[slot] as f64 * b;
            let hi = (lo + b).min(1.0);
            coords[i - 1] = IntervalKind::classify(lo, hi)?;
        }
        cells.push(Cylinder::new(
            BasicCylinder { coords },
            k.map.clone(),
        ));
        let mut slot = covered.len();
        loop {
            if slot == 0 {
                break 'outer;
            }
            slot -= 1;
            counter[slot] += 1;
            if counter[slot] < plan.per_coord_counts[slot].1 {
                break;
            }
            counter[slot] = 0;
        }
    }
    let total_volume = kahan_sum(cells.iter().map(|c| c.volume));
    let covering = Covering {
        target: if k.map.is_identity() {
            CoverTarget::Basic {
                cylinder: j.clone(),
            }
        } else {
            CoverTarget::Image {
                union: CylinderUnion::new(vec![j.clone()]),
                map: k.map.clone(),
            }
        },
        cells,
        delta,
        cell_count: plan.count as usize,
        total_volume,
        grid_params: None,
        lookup: Some(GridLookup {
            dims: plan
                .per_coord_counts
                .iter()
                .map(|&(i, count)| LookupDim {
                    coord: i,
                    lo: j.interval(i).lo(),
                    step: b,
                    count,
                })
                .collect(),
            map: k.map.clone(),
        }),
    };
    Ok((covering, plan))
}

/// Part counts that refine a basic cylinder into pieces of diameter below
/// delta, splitting the squared budget evenly over the explicit
/// coordinates after the tail took its half.
pub fn refinement_parts(
    j: &BasicCylinder,
    delta: f64,
    w: &WeightSequence,
) -> Result<(BasicCylinder, BTreeMap<usize, u32>, u128)> {
    let d = effective_delta(delta);
    let half = d * d / 2.0;
    let len = j.coords.len().max(w.min_prefix_for_tail(half));
    let base = j.extended(len);
    let per_coord = (half / len.max(1) as f64).sqrt();
    let mut parts = BTreeMap::new();
    let mut count: u128 = 1;
    for i in 1..=len {
        let iv = base.interval(i);
        if iv.is_singleton() {
            continue;
        }
        let need = (w.weight(i) * iv.length() / per_coord).ceil().max(1.0) as u32;
        if need > 1 {
            parts.insert(i, need);
        }
        count = count.saturating_mul(need as u128);
    }
    Ok((base, parts, count))
}

/// Covers f(U) by refining each member below delta and carrying each piece
/// through the map with its source volume.
pub fn cover_image_union(
    union: &CylinderUnion,
    f: &Isometry,
    delta: f64,
    w: &WeightSequence,
    budget: u64,
) -> Result<Covering> {
    let mut cells: Vec<Cylinder> = Vec::new();
    let mut needed: u128 = 0;
    let mut lookup = None;
    for j in &union.members {
        let (base, parts, count) = refinement_parts(j, delta, w)?;
        needed += count;
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        // direct cell addressing only works with a single member grid
        if union.members.len() == 1 {
            lookup = Some(GridLookup {
                dims: parts
                    .iter()
                    .map(|(&i, &p)| {
                        let iv = base.interval(i);
                        LookupDim {
                            coord: i,
                            lo: iv.lo(),
                            step: iv.length() / p as f64,
                            count: p as u64,
                        }
                    })
                    .collect(),
                map: f.clone(),
            });
        }
        let pieces = base.subdivide(&parts)?;
        cells.extend(
            pieces
                .into_iter()
                .map(|piece| Cylinder::new(piece, f.clone())),
        );
    }
    let total_volume = kahan_sum(cells.iter().map(|c| c.volume));
    let cell_count = cells.len();
    Ok(Covering {
        target: CoverTarget::Image {
            union: union.clone(),
            map: f.clone(),
        },
        cells,
        delta,
        total_volume,
        cell_count,
        grid_params: None,
        lookup,
    })
}

/// Checks cell diameters analytically and containment by seeded sampling
/// of the target; any uncovered probe is reported as a witness.
pub fn validate_covering(
    c: &Covering,
    probes: usize,
    w: &WeightSequence,
    seed: u64,
) -> Report {
    for cell in &c.cells {
        let d = cell.diameter(w);
        if d >= c.delta {
            return Report::failed(
                d - c.delta,
                serde_json::json!({ "reason": "cell diameter", "diameter": d }),
            );
        }
    }
    let explicit_len = c
        .cells
        .iter()
        .map(|cell| cell.source.coords.len())
        .max()
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..probes)
        .map(|_| c.target.sample(&mut rng, explicit_len))
        .collect();
    // uniform-grid coverings admit direct cell addressing; anything else
    // falls back to the linear scan.  A stale lookup (cell list edited
    // after construction) is detected by the count mismatch.
    let lookup = c.lookup.as_ref().filter(|lk| {
        lk.dims
            .iter()
            .map(|d| d.count as usize)
            .product::<usize>()
            == c.cells.len()
    });
    let pullback = lookup.and_then(|lk| {
        if lk.map.is_identity() {
            None
        } else {
            Some(lk.map.inverse())
        }
    });
    let uncovered = points.par_iter().find_any(|x| {
        if let Some(lk) = lookup {
            let src = match &pullback {
                Some(g) => g.apply(x),
                None => (*x).clone(),
            };
            let idx = lk.index_of(&src);
            if c.cells[idx].contains_point(x, 1e-9) {
                return false;
            }
            // boundary probes can land one slot off through rounding
            return !lk
                .neighborhood(&src)
                .into_iter()
                .any(|idx| c.cells[idx].contains_point(x, 1e-9));
        }
        !c.cells.iter().any(|cell| cell.contains_point(x, 1e-9))
    });
    match uncovered {
        Some(x) => Report::failed(
            1.0,
            serde_json::json!({ "reason": "uncovered point", "point": x }),
        ),
        None => Report::passed(0.0),
    }
}
