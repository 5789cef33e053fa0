use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Breakpoints on `[0, R]` whose first `n_geom` intervals grow geometrically
/// and whose remaining intervals all equal the last geometric one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotGrid<T> {
    pub radius: T,
    pub breakpoints: Vec<T>,
    pub n_geom: usize,
    pub ratio: T,
}

impl<T: Real> KnotGrid<T> {
    /// Grid for a basis of `n + 2` splines of order `k`, i.e. `n - k + 3`
    /// intervals.
    pub fn build(radius: T, n: usize, k: usize, n_geom: usize, ratio: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Parameter(format!("box radius must be positive, got {radius}")));
        }
        if !(ratio > T::one()) {
            return Err(Error::Parameter(format!("geometric ratio must exceed 1, got {ratio}")));
        }
        if k < 2 || n <= k {
            return Err(Error::Parameter(format!("need n > k >= 2, got n = {n}, k = {k}")));
        }
        let intervals = n - k + 3;
        if n_geom >= intervals {
            return Err(Error::Parameter(format!(
                "n_geom = {n_geom} must be below the interval count {intervals}"
            )));
        }

        // Lengths in units of the first interval, then one scale factor.
        let mut rel = Vec::with_capacity(intervals);
        let mut len = T::one();
        for i in 0..n_geom {
            if i > 0 {
                len *= ratio;
            }
            rel.push(len);
        }
        let tail = if n_geom == 0 { T::one() } else { len };
        rel.resize(intervals, tail);
        // Sum smallest first.
        let total: T = rel.iter().copied().sum();
        let d = radius / total;

        let mut breakpoints = Vec::with_capacity(intervals + 1);
        breakpoints.push(T::zero());
        let mut acc = T::zero();
        for l in &rel[..intervals - 1] {
            acc += *l * d;
            breakpoints.push(acc);
        }
        breakpoints.push(radius);

        Ok(Self { radius, breakpoints, n_geom, ratio })
    }

    pub fn intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn interval_lengths(&self) -> Vec<T> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }
}
