//! Square-summable weight sequences with closed-form tail sums.
//!
//! A weight sequence is an explicit positive prefix `a_1..a_n` followed by a
//! geometric tail `a_{n+k} = tail_start * tail_ratio^{k-1}` with ratio in
//! (0,1).  This family is closed under everything the rest of the crate
//! needs and every tail sum of squares has a closed form, so norms and
//! distances over infinitely many coordinates are computed exactly.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    pub prefix: Vec<f64>,
    pub tail_start: f64,
    pub tail_ratio: f64,
    /// Cumulative sums of a_i^2 over the prefix; `sq_cumsum[k]` = sum of the
    /// first k squared weights.  Rebuilt on construction, skipped by serde.
    #[serde(skip)]
    sq_cumsum: Vec<f64>,
}

impl WeightSequence {
    pub fn new(prefix: Vec<f64>, tail_start: f64, tail_ratio: f64) -> Result<Self> {
        if prefix.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidWeights(
                "every explicit weight must be positive and finite".into(),
            ));
        }
        if !(tail_start > 0.0) || !tail_start.is_finite() {
            return Err(Error::InvalidWeights("tail_start must be positive".into()));
        }
        if !(tail_ratio > 0.0 && tail_ratio < 1.0) {
            return Err(Error::InvalidWeights("tail_ratio must lie in (0,1)".into()));
        }
        let mut w = Self {
            prefix,
            tail_start,
            tail_ratio,
            sq_cumsum: Vec::new(),
        };
        w.rebuild_cache();
        Ok(w)
    }

    /// The standard example a_i = 2^{-i}: empty prefix, tail 1/2, ratio 1/2.
    pub fn dyadic() -> Self {
        Self::new(Vec::new(), 0.5, 0.5).unwrap()
    }

    fn rebuild_cache(&mut self) {
        let mut acc = 0.0;
        let mut sums = Vec::with_capacity(self.prefix.len() + 1);
        sums.push(0.0);
        for &a in &self.prefix {
            acc += a * a;
            sums.push(acc);
        }
        self.sq_cumsum = sums;
    }

    /// Weight a_i for the 1-based coordinate index i.
    pub fn weight(&self, i: usize) -> f64 {
        assert!(i >= 1, "coordinates are 1-based");
        let n = self.prefix.len();
        if i <= n {
            self.prefix[i - 1]
        } else {
            self.tail_start * self.tail_ratio.powi((i - n - 1) as i32)
        }
    }

    /// Sum of the first k squared weights.
    pub fn sq_prefix_sum(&self, k: usize) -> f64 {
        let n = self.prefix.len();
        if k <= n {
            self.sq_cumsum[k]
        } else {
            // explicit prefix plus a partial geometric tail
            self.sq_cumsum[n] + self.tail_sq_sum(n) - self.tail_sq_sum(k)
        }
    }

    /// Closed-form tail remainder T(k) = sum_{i > k} a_i^2.
    pub fn tail_sq_sum(&self, k: usize) -> f64 {
        let n = self.prefix.len();
        let r2 = self.tail_ratio * self.tail_ratio;
        let geo_full = self.tail_start * self.tail_start / (1.0 - r2);
        if k >= n {
            // first term is a_{k+1} = tail_start * ratio^{k-n}
            geo_full * r2.powi((k - n) as i32)
        } else {
            (self.sq_cumsum[n] - self.sq_cumsum[k]) + geo_full
        }
    }

    /// Total sum of squares, sum_i a_i^2.
    pub fn total_sq_sum(&self) -> f64 {
        self.tail_sq_sum(0)
    }

    /// Smallest k with T(k) <= bound.
    pub fn min_prefix_for_tail(&self, bound: f64) -> usize {
        let mut k = 0;
        while self.tail_sq_sum(k) > bound {
            k += 1;
        }
        k
    }

    /// Reconstructs cached sums after deserialization and revalidates.
    pub fn validate(mut self) -> Result<Self> {
        self.rebuild_cache();
        Self::new(self.prefix, self.tail_start, self.tail_ratio)
    }
}
