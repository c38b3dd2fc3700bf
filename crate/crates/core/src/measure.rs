//! Covering-based outer-measure upper bounds and the invariance
//! experiments that compare them against the elementary product measure.

use crate::covering::{grid_covering, grid_params, nudged_floor};
use crate::cylinder::{pi_measure, BasicCylinder, CylinderUnion};
use crate::error::{Error, Result};
use crate::isometry::Isometry;
use crate::point::Point;
use crate::weights::WeightSequence;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default shrinking sequence of covering scales.
pub const DEFAULT_SCHEDULE: [f64; 5] = [0.5, 0.3, 0.2, 0.1, 0.05];

/// Minimal number of consecutive cells of the m-part grid on [0, 1]
/// needed to cover [lo, hi]; endpoints sitting on a grid line do not drag
/// in the touching cell.
fn grid_cells_meeting(lo: f64, hi: f64, m: u32) -> u64 {
    let m_f = m as f64;
    let t_min = (((lo * m_f + 1e-12).floor() as i64).max(0)).min(m as i64 - 1);
    let t_max = (((hi * m_f - 1e-12).ceil() as i64 - 1).max(t_min)).min(m as i64 - 1);
    (t_max - t_min + 1) as u64
}

/// Upper bound for a single member from the cube grid restricted to the
/// cells it meets: (number of meeting cells) / m^n.  The count is closed
/// form, so no cells are materialized and no budget applies.
fn restricted_grid_bound(j: &BasicCylinder, n: usize, m: u32) -> f64 {
    let mut bound = 1.0;
    for i in 1..=n {
        let iv = j.interval(i);
        let c = grid_cells_meeting(iv.lo(), iv.hi(), m);
        bound *= c as f64 / m as f64;
    }
    bound
}

/// Best available covering upper bound at scale delta, summed over the
/// members; the per-member sum keeps the bound subadditive by
/// construction.
pub fn mu_delta_upper(union: &CylinderUnion, delta: f64, w: &WeightSequence) -> Result<f64> {
    if union.members.is_empty() {
        return Ok(0.0);
    }
    let (n, m) = grid_params(w, delta)?;
    let mut total = 0.0;
    for j in &union.members {
        // partitioning the member itself always achieves exactly its
        // volume (zero for degenerate members), so that caps the
        // restricted-grid count
        total += restricted_grid_bound(j, n, m).min(j.volume());
    }
    Ok(total)
}

/// One row of a bound schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaBound {
    pub delta: f64,
    pub upper: f64,
}

/// The measure estimate for a finite union: covering bounds over a
/// shrinking schedule next to the exact elementary measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub union: CylinderUnion,
    pub bounds: Vec<DeltaBound>,
    pub pi: f64,
    pub min_upper: f64,
    pub final_gap: f64,
    pub pass: bool,
}

/// Runs the schedule of covering bounds and checks each against the
/// elementary measure from below.
pub fn mu_estimate(
    union: &CylinderUnion,
    schedule: &[f64],
    w: &WeightSequence,
) -> Result<MeasureEstimate> {
    let pi = pi_measure(union)?;
    let bounds: Vec<DeltaBound> = schedule
        .iter()
        .map(|&delta| {
            mu_delta_upper(union, delta, w).map(|upper| DeltaBound { delta, upper })
        })
        .collect::<Result<_>>()?;
    let min_upper = bounds
        .iter()
        .map(|b| b.upper)
        .fold(f64::INFINITY, f64::min);
    let final_gap = bounds.last().map(|b| b.upper - pi).unwrap_or(f64::NAN);
    let pass = bounds.iter().all(|b| b.upper >= pi - 1e-9);
    Ok(MeasureEstimate {
        union: union.clone(),
        bounds,
        pi,
        min_upper,
        final_gap,
        pass,
    })
}

/// One row of the full-cube grid experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridRow {
    pub delta: f64,
    pub n: usize,
    pub m: u32,
    pub cells: usize,
    pub total_volume: f64,
    pub max_diameter: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubeMeasureReport {
    pub rows: Vec<GridRow>,
    pub pass: bool,
}

/// Partitions the cube at every scale in the schedule and checks that the
/// cell volumes always sum to one.
pub fn cube_measure_experiment(
    w: &WeightSequence,
    schedule: &[f64],
    budget: u64,
) -> Result<CubeMeasureReport> {
    let rows: Vec<GridRow> = schedule
        .par_iter()
        .map(|&delta| {
            let cov = grid_covering(w, delta, budget)?;
            let (n, m) = cov.grid_params.unwrap_or((0, 1));
            Ok(GridRow {
                delta,
                n,
                m,
                cells: cov.cell_count,
                total_volume: cov.total_volume,
                max_diameter: cov.max_diameter(w),
            })
        })
        .collect::<Result<_>>()?;
    let pass = rows
        .iter()
        .all(|r| (r.total_volume - 1.0).abs() < 1e-9 && r.max_diameter < r.delta);
    Ok(CubeMeasureReport { rows, pass })
}

/// Counts grid cells in the (i, j)-plane meeting the image of a rectangle
/// under a 2x2 orthogonal block plus offset, by the separating-axis test
/// against each candidate cell.
fn rotated_block_cells(
    rect: [[f64; 2]; 2], // [[lo_i, hi_i], [lo_j, hi_j]]
    u: [[f64; 2]; 2],    // columns of the orthogonal block
    offset: [f64; 2],
    m: u32,
) -> u64 {
    let mid = [
        (rect[0][0] + rect[0][1]) / 2.0,
        (rect[1][0] + rect[1][1]) / 2.0,
    ];
    let center = [
        offset[0] + u[0][0] * mid[0] + u[0][1] * mid[1],
        offset[1] + u[1][0] * mid[0] + u[1][1] * mid[1],
    ];
    let half = [
        (rect[0][1] - rect[0][0]) / 2.0,
        (rect[1][1] - rect[1][0]) / 2.0,
    ];
    // half-extent vectors of the rotated rectangle
    let e1 = [u[0][0] * half[0], u[1][0] * half[0]];
    let e2 = [u[0][1] * half[1], u[1][1] * half[1]];
    let rx = e1[0].abs() + e2[0].abs();
    let ry = e1[1].abs() + e2[1].abs();
    let m_f = m as f64;
    let h = 0.5 / m_f;
    let ti = grid_range(center[0] - rx, center[0] + rx, m);
    let tj = grid_range(center[1] - ry, center[1] + ry, m);
    let axes: [[f64; 2]; 4] = [
        [1.0, 0.0],
        [0.0, 1.0],
        [u[0][0], u[1][0]],
        [u[0][1], u[1][1]],
    ];
    let mut count = 0u64;
    for a in ti.0..=ti.1 {
        for b in tj.0..=tj.1 {
            let cell_c = [(a as f64 + 0.5) / m_f, (b as f64 + 0.5) / m_f];
            let mut separated = false;
            for ax in &axes {
                let dist = (ax[0] * (center[0] - cell_c[0]) + ax[1] * (center[1] - cell_c[1])).abs();
                let r_rect = (ax[0] * e1[0] + ax[1] * e1[1]).abs()
                    + (ax[0] * e2[0] + ax[1] * e2[1]).abs();
                let r_cell = h * (ax[0].abs() + ax[1].abs());
                if dist > r_rect + r_cell + 1e-12 {
                    separated = true;
                    break;
                }
            }
            if !separated {
                count += 1;
            }
        }
    }
    count
}

/// Clamped part-index range of grid cells meeting [lo, hi].
fn grid_range(lo: f64, hi: f64, m: u32) -> (i64, i64) {
    let m_f = m as f64;
    let t_min = ((lo * m_f - 1.0 + 1e-12).ceil() as i64).max(0);
    let t_max = (nudged_floor(hi * m_f) as i64).min(m as i64 - 1);
    (t_min, t_max.max(t_min - 1))
}

/// Upper bound for the image of one member under a general isometry at
/// grid scale (n, m): the linear action is split into independent
/// coordinate blocks; size-one blocks map intervals, size-two blocks are
/// counted by the separating-axis test; larger coupled blocks are
/// unsupported.
fn rotated_grid_bound(j: &BasicCylinder, f: &Isometry, n: usize, m: u32) -> Result<f64> {
    let gen_len = f.gens.iter().map(|g| g.max_index()).max().unwrap_or(0);
    let len = n
        .max(j.coords.len())
        .max(gen_len)
        .max(f.base_in.prefix.len())
        .max(f.base_out.prefix.len());
    let (cols, offset) = f.linear_action(len);
    // group coordinates coupled by the linear action
    let mut block_of: Vec<usize> = (0..len).collect();
    for k in 0..len {
        for r in 0..len {
            if cols[k][r].abs() > 1e-12 && r != k {
                // union the two blocks (tiny len: plain relabel)
                let (a, b) = (block_of[k], block_of[r]);
                if a != b {
                    let target = a.min(b);
                    for s in block_of.iter_mut() {
                        if *s == a || *s == b {
                            *s = target;
                        }
                    }
                }
            }
        }
    }
    let mut bound = 1.0;
    let mut seen = vec![false; len];
    for k in 0..len {
        if seen[k] {
            continue;
        }
        let members: Vec<usize> = (k..len).filter(|&r| block_of[r] == block_of[k]).collect();
        for &r in &members {
            seen[r] = true;
        }
        match members.len() {
            1 => {
                let i = members[0];
                if i >= n {
                    continue;
                }
                let iv = j.interval(i + 1);
                let s = cols[i][i];
                let (a, b) = (offset[i] + s * iv.lo(), offset[i] + s * iv.hi());
                let c = grid_cells_meeting(a.min(b), a.max(b), m);
                bound *= c as f64 / m as f64;
            }
            2 => {
                let (i, jj) = (members[0], members[1]);
                let ivi = j.interval(i + 1);
                let ivj = j.interval(jj + 1);
                let rect = [[ivi.lo(), ivi.hi()], [ivj.lo(), ivj.hi()]];
                let u = [[cols[i][i], cols[jj][i]], [cols[i][jj], cols[jj][jj]]];
                let off = [offset[i], offset[jj]];
                if jj < n {
                    let c = rotated_block_cells(rect, u, off, m);
                    bound *= c as f64 / (m as f64 * m as f64);
                } else if i < n {
                    // only the first coordinate of the block is gridded:
                    // project the rotated rectangle onto it
                    let corners = [
                        (rect[0][0], rect[1][0]),
                        (rect[0][0], rect[1][1]),
                        (rect[0][1], rect[1][0]),
                        (rect[0][1], rect[1][1]),
                    ];
                    let xs: Vec<f64> = corners
                        .iter()
                        .map(|&(x, y)| off[0] + u[0][0] * x + u[0][1] * y)
                        .collect();
                    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let c = grid_cells_meeting(lo, hi, m);
                    bound *= c as f64 / m as f64;
                }
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "linear action couples {} coordinates; only pairs are supported",
                    members.len()
                )))
            }
        }
    }
    Ok(bound)
}

/// One schedule row of an invariance experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub delta: f64,
    pub pi_e: f64,
    pub upper_fe: f64,
    pub gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub pi_e: f64,
    pub axis_preserving: bool,
    /// Exact product measure of the image, available when the map sends
    /// cylinders to cylinders.
    pub pi_fe: Option<f64>,
    pub rows: Vec<InvarianceRow>,
    pub pass: bool,
}

/// Checks a mapped sample point stays in the cube, naming the escaping
/// coordinate.
fn check_in_cube(y: &Point) -> Result<()> {
    for (idx, &v) in y.prefix.iter().enumerate() {
        if !(-1e-9..=1.0 + 1e-9).contains(&v) {
            return Err(Error::EscapesCube {
                coord: idx + 1,
                value: v,
            });
        }
    }
    let t = y.tail_value;
    if !(-1e-9..=1.0 + 1e-9).contains(&t) {
        return Err(Error::EscapesCube {
            coord: y.prefix.len() + 1,
            value: t,
        });
    }
    Ok(())
}

/// Compares the exact measure of a union against covering bounds for its
/// isometric image over a shrinking schedule.  Axis-preserving maps are
/// checked for exact equality; rotations get a gridded upper bound whose
/// gap must be tightest at the finest scale and at most `gap_target` there.
pub fn invariance_experiment(
    union: &CylinderUnion,
    f: &Isometry,
    schedule: &[f64],
    w: &WeightSequence,
    tol: f64,
    gap_target: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    let pi_e = pi_measure(union)?;

    // probe that the image stays in the cube before any counting
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in &union.members {
        let len = j.coords.len().max(4);
        for _ in 0..200 {
            let prefix: Vec<f64> = (1..=len)
                .map(|i| {
                    let iv = j.interval(i);
                    if iv.hi() > iv.lo() {
                        rng.gen_range(iv.lo()..=iv.hi())
                    } else {
                        iv.lo()
                    }
                })
                .collect();
            let x = Point::new(prefix, rng.gen_range(0.0..=1.0));
            check_in_cube(&f.apply(&x))?;
        }
    }

    let axis_preserving = f.is_axis_preserving();
    let (pi_fe, image_union) = if axis_preserving {
        let images: Vec<BasicCylinder> = union
            .members
            .iter()
            .map(|j| f.map_basic_cylinder(j))
            .collect::<Result<_>>()?;
        let u = CylinderUnion::new(images);
        (Some(pi_measure(&u)?), Some(u))
    } else {
        (None, None)
    };

    let rows: Vec<InvarianceRow> = schedule
        .iter()
        .map(|&delta| {
            let upper_fe = match &image_union {
                Some(u) => mu_delta_upper(u, delta, w)?,
                None => {
                    let (n, m) = grid_params(w, delta)?;
                    union
                        .members
                        .iter()
                        .map(|j| rotated_grid_bound(j, f, n, m))
                        .sum::<Result<f64>>()?
                }
            };
            let gap = upper_fe - pi_e;
            Ok(InvarianceRow {
                delta,
                pi_e,
                upper_fe,
                gap,
                pass: gap >= -tol,
            })
        })
        .collect::<Result<_>>()?;

    let pass = if axis_preserving {
        (pi_fe.unwrap() - pi_e).abs() <= tol && rows.iter().all(|r| r.pass)
    } else {
        // grid resolution does not refine monotonically in delta, so only
        // require the finest scale to give the tightest gap
        let shrinking = match rows.split_last() {
            Some((last, rest)) => rest.iter().all(|r| last.gap <= r.gap + 1e-9),
            None => false,
        };
        let final_ok = rows.last().map(|r| r.gap <= gap_target).unwrap_or(false);
        rows.iter().all(|r| r.pass) && shrinking && final_ok
    };

    Ok(InvarianceReport {
        pi_e,
        axis_preserving,
        pi_fe,
        rows,
        pass,
    })
}
