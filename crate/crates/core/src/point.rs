//! Points of the weighted sequence space: an explicit prefix plus an
//! eventually-constant tail.  This class is closed under the finite affine
//! combinations used everywhere else and contains every cylinder corner.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub prefix: Vec<f64>,
    /// Value of every coordinate beyond the prefix.
    #[serde(rename = "tail")]
    pub tail_value: f64,
}

impl Point {
    pub fn new(prefix: Vec<f64>, tail_value: f64) -> Self {
        Self { prefix, tail_value }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Vec::new(), c)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn ones() -> Self {
        Self::constant(1.0)
    }

    /// The 1-based coordinate x_i.
    pub fn coord(&self, i: usize) -> f64 {
        assert!(i >= 1, "coordinates are 1-based");
        *self.prefix.get(i - 1).unwrap_or(&self.tail_value)
    }

    /// Unit vector e_i (1 in the i-th position, zeros elsewhere).
    pub fn unit(i: usize) -> Self {
        assert!(i >= 1);
        let mut prefix = vec![0.0; i];
        prefix[i - 1] = 1.0;
        Self::new(prefix, 0.0)
    }

    /// Extends the explicit prefix with tail copies up to length `len`.
    pub fn padded(&self, len: usize) -> Self {
        let mut prefix = self.prefix.clone();
        while prefix.len() < len {
            prefix.push(self.tail_value);
        }
        Self::new(prefix, self.tail_value)
    }

    /// True when every coordinate lies in [0,1] (tolerance on the ends).
    pub fn in_cube(&self, tol: f64) -> bool {
        self.prefix
            .iter()
            .chain(std::iter::once(&self.tail_value))
            .all(|&x| x >= -tol && x <= 1.0 + tol)
    }

    fn zip_with(&self, other: &Point, f: impl Fn(f64, f64) -> f64) -> Point {
        let len = self.prefix.len().max(other.prefix.len());
        let prefix = (1..=len).map(|i| f(self.coord(i), other.coord(i))).collect();
        Point::new(prefix, f(self.tail_value, other.tail_value))
    }

    pub fn add(&self, other: &Point) -> Point {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.prefix.iter().map(|&x| s * x).collect(), s * self.tail_value)
    }

    /// p + sum_k alpha_k (x_k - p), computed coordinatewise.
    pub fn combine(base: &Point, terms: &[(f64, Point)]) -> Point {
        let mut acc = base.clone();
        for (alpha, x) in terms {
            acc = acc.add(&x.sub(base).scale(*alpha));
        }
        acc
    }

    /// Coordinatewise equality with tolerance.
    pub fn approx_eq(&self, other: &Point, tol: f64) -> bool {
        let len = self.prefix.len().max(other.prefix.len());
        (1..=len).all(|i| (self.coord(i) - other.coord(i)).abs() <= tol)
            && (self.tail_value - other.tail_value).abs() <= tol
    }
}
