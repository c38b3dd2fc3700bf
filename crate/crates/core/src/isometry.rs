//! Distance-preserving maps built from generators: translations,
//! coordinate reflections, weight-compatible permutations and rotations of
//! equal-weight coordinate pairs.  Sampled maps are checked for the
//! distance and inner-product (Gram) conditions that the extension
//! operator requires.

use crate::cylinder::{BasicCylinder, IntervalKind};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::space::{distance, inner_product};
use crate::weights::WeightSequence;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Translation { c: Point },
    Reflection { i: usize },
    Permutation { map: Vec<(usize, usize)> },
    Rotation { i: usize, j: usize, theta: f64 },
}

impl Generator {
    pub fn max_index(&self) -> usize {
        match self {
            Generator::Translation { c } => c.prefix.len(),
            Generator::Reflection { i } => *i,
            Generator::Permutation { map } => {
                map.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0)
            }
            Generator::Rotation { i, j, .. } => (*i).max(*j),
        }
    }

    fn inverse(&self) -> Generator {
        match self {
            Generator::Translation { c } => Generator::Translation { c: c.scale(-1.0) },
            Generator::Reflection { i } => Generator::Reflection { i: *i },
            Generator::Permutation { map } => Generator::Permutation {
                map: map.iter().map(|&(a, b)| (b, a)).collect(),
            },
            Generator::Rotation { i, j, theta } => Generator::Rotation {
                i: *i,
                j: *j,
                theta: -theta,
            },
        }
    }

    /// Applies the generator to an explicit coordinate vector in place.
    fn apply_to(&self, v: &mut [f64]) {
        match self {
            Generator::Translation { c } => {
                for (k, x) in v.iter_mut().enumerate() {
                    *x += c.coord(k + 1);
                }
            }
            Generator::Reflection { i } => v[i - 1] = -v[i - 1],
            Generator::Permutation { map } => {
                let old = v.to_vec();
                for &(from, to) in map {
                    v[to - 1] = old[from - 1];
                }
            }
            Generator::Rotation { i, j, theta } => {
                let (s, c) = theta.sin_cos();
                let (a, b) = (v[i - 1], v[j - 1]);
                v[i - 1] = c * a - s * b;
                v[j - 1] = s * a + c * b;
            }
        }
    }

    fn validate(&self, w: &WeightSequence) -> Result<()> {
        let weights_equal = |a: usize, b: usize| {
            let (wa, wb) = (w.weight(a), w.weight(b));
            (wa - wb).abs() <= 1e-12 * wa.max(wb)
        };
        match self {
            Generator::Translation { .. } | Generator::Reflection { .. } => Ok(()),
            Generator::Rotation { i, j, .. } => {
                if i == j {
                    return Err(Error::InvalidIsometry(format!(
                        "rotation needs two distinct coordinates, got {i} twice"
                    )));
                }
                if !weights_equal(*i, *j) {
                    return Err(Error::InvalidIsometry(format!(
                        "rotation on coordinates {i},{j} with unequal weights"
                    )));
                }
                Ok(())
            }
            Generator::Permutation { map } => {
                let mut sources: Vec<usize> = map.iter().map(|&(a, _)| a).collect();
                let mut targets: Vec<usize> = map.iter().map(|&(_, b)| b).collect();
                sources.sort_unstable();
                targets.sort_unstable();
                sources.dedup();
                targets.dedup();
                if sources.len() != map.len() || sources != targets {
                    return Err(Error::InvalidIsometry(
                        "permutation map is not a bijection of its support".into(),
                    ));
                }
                for &(a, b) in map {
                    if !weights_equal(a, b) {
                        return Err(Error::InvalidIsometry(format!(
                            "permutation moves coordinate {a} to {b} with unequal weights"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// A composed map x -> base_out + G(x - base_in), where G runs the
/// generator list in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    #[serde(rename = "p")]
    pub base_in: Point,
    #[serde(rename = "q")]
    pub base_out: Point,
    pub gens: Vec<Generator>,
}

impl Isometry {
    pub fn new(
        base_in: Point,
        base_out: Point,
        gens: Vec<Generator>,
        w: &WeightSequence,
    ) -> Result<Self> {
        for g in &gens {
            g.validate(w)?;
        }
        Ok(Self {
            base_in,
            base_out,
            gens,
        })
    }

    pub fn identity() -> Self {
        Self {
            base_in: Point::zero(),
            base_out: Point::zero(),
            gens: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.gens.is_empty() && self.base_in == self.base_out
    }

    /// True when no generator is a rotation: the map sends coordinate axes
    /// to coordinate axes.
    pub fn is_axis_preserving(&self) -> bool {
        !self
            .gens
            .iter()
            .any(|g| matches!(g, Generator::Rotation { .. }))
    }

    fn explicit_len(&self, extra: usize) -> usize {
        self.gens
            .iter()
            .map(|g| g.max_index())
            .chain([
                self.base_in.prefix.len(),
                self.base_out.prefix.len(),
                extra,
            ])
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, x: &Point) -> Point {
        let len = self.explicit_len(x.prefix.len());
        let mut v: Vec<f64> = (1..=len)
            .map(|i| x.coord(i) - self.base_in.coord(i))
            .collect();
        let mut tail = x.tail_value - self.base_in.tail_value;
        for g in &self.gens {
            g.apply_to(&mut v);
            if let Generator::Translation { c } = g {
                tail += c.tail_value;
            }
        }
        let prefix = v
            .iter()
            .enumerate()
            .map(|(k, d)| d + self.base_out.coord(k + 1))
            .collect();
        Point::new(prefix, tail + self.base_out.tail_value)
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            base_in: self.base_out.clone(),
            base_out: self.base_in.clone(),
            gens: self.gens.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// Composition: (self . other)(x) = self(other(x)).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        // other maps x to q' + G'(x - p'); fold the base shifts into
        // translations so a single generator list realizes the composite.
        let mut gens = Vec::new();
        gens.extend(other.gens.iter().cloned());
        gens.push(Generator::Translation {
            c: other.base_out.sub(&self.base_in),
        });
        gens.extend(self.gens.iter().cloned());
        Isometry {
            base_in: other.base_in.clone(),
            base_out: self.base_out.clone(),
            gens,
        }
    }

    /// The linear part of the map on the first `len` coordinates, as
    /// column-major columns U e_k, together with the affine offset f(0),
    /// so that f(x) = offset + U x coordinatewise.
    pub fn linear_action(&self, len: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.explicit_len(len);
        let run = |v0: Vec<f64>| -> Vec<f64> {
            let mut v = v0;
            for g in &self.gens {
                g.apply_to(&mut v);
            }
            v
        };
        let gen_origin = run(vec![0.0; n]);
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let img = run(e);
            cols.push(img.iter().zip(&gen_origin).map(|(a, b)| a - b).collect());
        }
        // f(0) = q + G(-p): push the negated base through the generators
        let shifted = run((1..=n).map(|i| -self.base_in.coord(i)).collect());
        let offset = (1..=n)
            .map(|i| self.base_out.coord(i) + shifted[i - 1])
            .collect();
        (cols, offset)
    }

    /// Exact image of a basic cylinder under an axis-preserving map.
    /// Errors when the image leaves the unit cube or when the map involves
    /// rotations.
    pub fn map_basic_cylinder(&self, j: &BasicCylinder) -> Result<BasicCylinder> {
        if !self.is_axis_preserving() {
            return Err(Error::Unsupported(
                "cannot map a basic cylinder through a rotation and stay axis-aligned".into(),
            ));
        }
        let len = self.explicit_len(j.coords.len());
        let jx = j.extended(len);
        // push each coordinate interval through the map as an endpoint pair
        let mut los: Vec<f64> = (1..=len)
            .map(|i| jx.interval(i).lo() - self.base_in.coord(i))
            .collect();
        let mut his: Vec<f64> = (1..=len)
            .map(|i| jx.interval(i).hi() - self.base_in.coord(i))
            .collect();
        let mut tail_shift = -self.base_in.tail_value;
        for g in &self.gens {
            match g {
                Generator::Reflection { i } => {
                    let (lo, hi) = (los[i - 1], his[i - 1]);
                    los[i - 1] = -hi;
                    his[i - 1] = -lo;
                }
                Generator::Translation { c } => {
                    tail_shift += c.tail_value;
                    for k in 0..len {
                        los[k] += c.coord(k + 1);
                        his[k] += c.coord(k + 1);
                    }
                }
                Generator::Permutation { .. } => {
                    g.apply_to(&mut los);
                    g.apply_to(&mut his);
                }
                Generator::Rotation { .. } => unreachable!(),
            }
        }
        tail_shift += self.base_out.tail_value;
        if tail_shift.abs() > 1e-12 {
            return Err(Error::EscapesCube {
                coord: len + 1,
                value: tail_shift,
            });
        }
        let mut coords = Vec::with_capacity(len);
        for k in 0..len {
            let lo = los[k] + self.base_out.coord(k + 1);
            let hi = his[k] + self.base_out.coord(k + 1);
            let iv = IntervalKind::classify(lo, hi).map_err(|_| Error::EscapesCube {
                coord: k + 1,
                value: if lo < 0.0 { lo } else { hi },
            })?;
            coords.push(iv);
        }
        Ok(BasicCylinder { coords })
    }
}

/// An isometric image of a basic cylinder, carried as (source, map) with
/// the volume inherited from the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub source: BasicCylinder,
    pub map: Isometry,
    pub volume: f64,
}

impl Cylinder {
    pub fn new(source: BasicCylinder, map: Isometry) -> Self {
        let volume = source.volume();
        Self {
            source,
            map,
            volume,
        }
    }

    pub fn axis_aligned(source: BasicCylinder) -> Self {
        Self::new(source, Isometry::identity())
    }

    /// Diameter is isometry-invariant, so it is read off the source.
    pub fn diameter(&self, w: &WeightSequence) -> f64 {
        self.source.diameter(w)
    }

    pub fn contains_point(&self, x: &Point, tol: f64) -> bool {
        if self.map.is_identity() {
            return self.source.contains_point(x, tol);
        }
        self.source.contains_point(&self.map.inverse().apply(x), tol)
    }
}

/// A sampled surjective map: pairs (x_i, y_i = f(x_i)) with a designated
/// base pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledMap {
    pub pairs: Vec<(Point, Point)>,
    /// Index of the base pair (p, q) within `pairs`.
    #[serde(default)]
    pub base: usize,
}

impl SampledMap {
    pub fn new(pairs: Vec<(Point, Point)>, base: usize) -> Result<Self> {
        if base >= pairs.len() {
            return Err(Error::InvalidIsometry(
                "base index outside the sample list".into(),
            ));
        }
        Ok(Self { pairs, base })
    }

    /// Samples an isometry at the given points; the first point becomes
    /// the base pair.
    pub fn from_isometry(f: &Isometry, points: &[Point]) -> Self {
        let pairs = points.iter().map(|x| (x.clone(), f.apply(x))).collect();
        Self { pairs, base: 0 }
    }

    pub fn p(&self) -> &Point {
        &self.pairs[self.base].0
    }

    pub fn q(&self) -> &Point {
        &self.pairs[self.base].1
    }
}

/// Outcome of a numerical verification; `witness` names the offending
/// item when the check fails.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub pass: bool,
    pub max_violation: f64,
    pub witness: Option<serde_json::Value>,
}

impl Report {
    pub fn passed(max_violation: f64) -> Self {
        Self {
            pass: true,
            max_violation,
            witness: None,
        }
    }

    pub fn failed(max_violation: f64, witness: serde_json::Value) -> Self {
        Self {
            pass: false,
            max_violation,
            witness: Some(witness),
        }
    }
}

/// Checks |d_a(y_i, y_j) - d_a(x_i, x_j)| <= tol over all sample pairs.
pub fn verify_isometry(m: &SampledMap, w: &WeightSequence, tol: f64) -> Report {
    let mut worst = 0.0;
    let mut witness = None;
    for i in 0..m.pairs.len() {
        for j in (i + 1)..m.pairs.len() {
            let dx = distance(&m.pairs[i].0, &m.pairs[j].0, w);
            let dy = distance(&m.pairs[i].1, &m.pairs[j].1, w);
            let v = (dx - dy).abs();
            if v > worst {
                worst = v;
                witness = Some(serde_json::json!({ "pair": [i, j] }));
            }
        }
    }
    if worst <= tol {
        Report::passed(worst)
    } else {
        Report::failed(worst, witness.unwrap())
    }
}

/// Checks <y_i - q, y_j - q>_a = <x_i - p, x_j - p>_a within tol; this is
/// the precondition for building the extension operator.
pub fn gram_check(m: &SampledMap, w: &WeightSequence, tol: f64) -> Report {
    let p = m.p();
    let q = m.q();
    let mut worst = 0.0;
    let mut witness = None;
    for i in 0..m.pairs.len() {
        for j in i..m.pairs.len() {
            let gx = inner_product(&m.pairs[i].0.sub(p), &m.pairs[j].0.sub(p), w);
            let gy = inner_product(&m.pairs[i].1.sub(q), &m.pairs[j].1.sub(q), w);
            let v = (gx - gy).abs();
            if v > worst {
                worst = v;
                witness = Some(serde_json::json!({ "pair": [i, j] }));
            }
        }
    }
    if worst <= tol {
        Report::passed(worst)
    } else {
        Report::failed(worst, witness.unwrap())
    }
}
