//! Radial B-spline basis on `[0, R]` with the first and last spline removed,
//! plus the quadrature and banded assembly used by both structure solvers.

mod banded;
mod grid;
mod quadrature;

pub use banded::BandedMatrix;
pub use grid::KnotGrid;
pub use quadrature::{gauss_legendre, QuadratureRule};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Parameters that fully determine a [`RadialBasis`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisParams {
    /// Retained spline count.
    pub n: usize,
    /// Spline order (polynomial degree + 1).
    pub k: usize,
    /// Box radius in bohr.
    pub radius: f64,
    pub n_geom: usize,
    pub ratio: f64,
}

impl BasisParams {
    /// The box `R = 250 / Z` at the given size and head grading.
    pub fn scaled_box(z: f64, n: usize, k: usize, n_geom: usize, ratio: f64) -> Self {
        Self { n, k, radius: 250.0 / z, n_geom, ratio }
    }
}

/// Which factor of the integrand a spline contributes on one side of
/// `∫ F_i(r) w(r) G_j(r) dr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Value,
    Derivative,
    /// `B(r) / r`, bounded because every retained spline vanishes at 0.
    OverR,
}

/// Radial weight function together with its pole order at the origin.
pub struct Kernel<'a, T> {
    f: Box<dyn Fn(T) -> T + Sync + 'a>,
    pole_order: u32,
}

impl<'a, T: Real> Kernel<'a, T> {
    pub fn unit() -> Self {
        Self { f: Box::new(|_| T::one()), pole_order: 0 }
    }

    pub fn power(p: i32) -> Self {
        Self { f: Box::new(move |r: T| r.powi(p)), pole_order: if p < 0 { (-p) as u32 } else { 0 } }
    }

    /// `-Z / r`
    pub fn coulomb(z: T) -> Self {
        Self { f: Box::new(move |r: T| -z / r), pole_order: 1 }
    }

    pub fn custom(f: impl Fn(T) -> T + Sync + 'a, pole_order: u32) -> Self {
        Self { f: Box::new(f), pole_order }
    }

    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    pub fn eval(&self, r: T) -> T {
        (self.f)(r)
    }
}

/// Retained B-splines `B_2 … B_{n+1}` of order `k` on an open knot vector.
#[derive(Debug, Clone)]
pub struct RadialBasis<T> {
    pub grid: KnotGrid<T>,
    pub order: usize,
    pub params: BasisParams,
    knots: Vec<T>,
    quadrature: QuadratureRule<T>,
    /// Values and derivatives of the `k` raw splines alive on each node.
    node_values: Vec<T>,
    node_derivs: Vec<T>,
}

impl<T: Real> RadialBasis<T> {
    pub fn new(params: BasisParams) -> Result<Self> {
        let grid = KnotGrid::build(
            T::of(params.radius),
            params.n,
            params.k,
            params.n_geom,
            T::of(params.ratio),
        )?;
        let k = params.k;
        let mut knots = vec![T::zero(); k - 1];
        knots.extend_from_slice(&grid.breakpoints);
        knots.extend(std::iter::repeat_n(grid.radius, k - 1));

        // Order k is exact for overlap and stiffness integrands; the extra
        // points resolve the 1/r and 1/r² weights on the graded head.
        let quadrature = QuadratureRule::new(&grid.breakpoints, k + 3);
        let mut basis = Self {
            grid,
            order: k,
            params,
            knots,
            quadrature,
            node_values: Vec::new(),
            node_derivs: Vec::new(),
        };
        basis.tabulate();
        Ok(basis)
    }

    /// Retained spline count `n`.
    pub fn len(&self) -> usize {
        self.params.n
    }

    pub fn is_empty(&self) -> bool {
        self.params.n == 0
    }

    pub fn radius(&self) -> T {
        self.grid.radius
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn quadrature(&self) -> &QuadratureRule<T> {
        &self.quadrature
    }

    fn raw_count(&self) -> usize {
        self.params.n + 2
    }

    fn tabulate(&mut self) {
        let k = self.order;
        let qn = self.quadrature.nodes.len();
        let per = self.quadrature.points_per_interval;
        let mut vals = vec![T::zero(); qn * k];
        let mut ders = vec![T::zero(); qn * k];
        for (q, &x) in self.quadrature.nodes.iter().enumerate() {
            let mu = k - 1 + q / per;
            let (v, d) = self.local(mu, x);
            vals[q * k..(q + 1) * k].copy_from_slice(&v);
            ders[q * k..(q + 1) * k].copy_from_slice(&d);
        }
        self.node_values = vals;
        self.node_derivs = ders;
    }

    /// Knot span `mu` with `t[mu] <= x < t[mu + 1]`; `x = R` maps to the last
    /// non-empty span.
    fn span(&self, x: T) -> usize {
        let k = self.order;
        let last = k - 1 + self.grid.intervals() - 1;
        if x >= self.grid.radius {
            return last;
        }
        let bp = &self.grid.breakpoints;
        let idx = bp.partition_point(|b| *b <= x);
        (k - 1 + idx.saturating_sub(1)).min(last)
    }

    /// Raw spline values of order `ord` alive on span `mu`: indices
    /// `mu - ord + 1 ..= mu`.
    fn values_of_order(&self, mu: usize, x: T, ord: usize) -> Vec<T> {
        let t = &self.knots;
        let p = ord - 1;
        let mut n = vec![T::zero(); ord];
        let mut left = vec![T::zero(); ord];
        let mut right = vec![T::zero(); ord];
        n[0] = T::one();
        for j in 1..=p {
            left[j] = x - t[mu + 1 - j];
            right[j] = t[mu + j] - x;
            let mut saved = T::zero();
            for r in 0..j {
                let temp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        n
    }

    /// Values and first derivatives of raw splines `mu - k + 1 ..= mu`.
    fn local(&self, mu: usize, x: T) -> (Vec<T>, Vec<T>) {
        let k = self.order;
        let t = &self.knots;
        let vals = self.values_of_order(mu, x, k);
        let lower = self.values_of_order(mu, x, k - 1);
        let km1 = T::of_usize(k - 1);
        let mut ders = vec![T::zero(); k];
        for (a, d) in ders.iter_mut().enumerate() {
            let i = mu + 1 - k + a;
            // B_{i,k-1} lives at lower[a - 1], B_{i+1,k-1} at lower[a].
            let mut s = T::zero();
            if a >= 1 {
                let den = t[i + k - 1] - t[i];
                if den > T::zero() {
                    s += lower[a - 1] / den;
                }
            }
            if a < k - 1 {
                let den = t[i + k] - t[i + 1];
                if den > T::zero() {
                    s -= lower[a] / den;
                }
            }
            *d = km1 * s;
        }
        (vals, ders)
    }

    /// Nonzero retained splines at `r` as `(index, value, derivative)`.
    pub fn eval_splines(&self, r: T) -> Result<Vec<(usize, T, T)>> {
        if !(r >= T::zero() && r <= self.grid.radius) {
            return Err(Error::Domain { r: r.to_f64_lossy(), box_radius: self.grid.radius.to_f64_lossy() });
        }
        let k = self.order;
        let mu = self.span(r);
        let (v, d) = self.local(mu, r);
        let first = mu + 1 - k;
        Ok((0..k)
            .filter_map(|a| {
                let raw = first + a;
                (raw >= 1 && raw <= self.params.n).then(|| (raw - 1, v[a], d[a]))
            })
            .collect())
    }

    /// Sum of all `n + 2` raw splines at `r` (partition of unity).
    pub fn raw_sum(&self, r: T) -> T {
        let mu = self.span(r);
        self.values_of_order(mu, r, self.order).into_iter().sum()
    }

    /// Evaluates `Σ c_i B_i(r)` and its derivative.
    pub fn expand(&self, coeffs: &[T], r: T) -> Result<(T, T)> {
        assert_eq!(coeffs.len(), self.len());
        let mut v = T::zero();
        let mut d = T::zero();
        for (i, b, db) in self.eval_splines(r)? {
            v += coeffs[i] * b;
            d += coeffs[i] * db;
        }
        Ok((v, d))
    }

    /// `∫ F_i(r) w(r) G_j(r) dr` over all retained spline pairs.
    pub fn assemble(&self, left: Factor, kernel: &Kernel<'_, T>, right: Factor) -> Result<BandedMatrix<T>> {
        if kernel.pole_order() > 1 {
            return Err(Error::SingularKernel(kernel.pole_order()));
        }
        let k = self.order;
        let n = self.len();
        let per = self.quadrature.points_per_interval;
        let mut m = BandedMatrix::zeros(n, k - 1, left == right);
        let mut fl = vec![T::zero(); k];
        let mut fr = vec![T::zero(); k];
        for (q, (&r, &w)) in self.quadrature.nodes.iter().zip(&self.quadrature.weights).enumerate() {
            let first = q / per; // raw index of first live spline
            let wk = w * kernel.eval(r);
            let vals = &self.node_values[q * k..(q + 1) * k];
            let ders = &self.node_derivs[q * k..(q + 1) * k];
            for a in 0..k {
                fl[a] = pick(left, vals[a], ders[a], r);
                fr[a] = pick(right, vals[a], ders[a], r);
            }
            for a in 0..k {
                let ra = first + a;
                if ra == 0 || ra > n {
                    continue;
                }
                let la = fl[a] * wk;
                for b in 0..k {
                    let rb = first + b;
                    if rb == 0 || rb > n {
                        continue;
                    }
                    m.add(ra - 1, rb - 1, la * fr[b]);
                }
            }
        }
        Ok(m)
    }

    pub fn overlap(&self) -> BandedMatrix<T> {
        self.assemble(Factor::Value, &Kernel::unit(), Factor::Value).expect("regular kernel")
    }

    /// Radial grid of all quadrature nodes with weights, for callers that
    /// integrate expanded functions directly.
    pub fn nodes(&self) -> (&[T], &[T]) {
        (&self.quadrature.nodes, &self.quadrature.weights)
    }

    /// Values of `Σ c_i B_i` at every quadrature node.
    pub fn expand_on_nodes(&self, coeffs: &[T]) -> Vec<T> {
        let k = self.order;
        let n = self.len();
        let per = self.quadrature.points_per_interval;
        (0..self.quadrature.nodes.len())
            .map(|q| {
                let first = q / per;
                let vals = &self.node_values[q * k..(q + 1) * k];
                (0..k)
                    .filter(|a| first + a >= 1 && first + a <= n)
                    .map(|a| coeffs[first + a - 1] * vals[a])
                    .sum()
            })
            .collect()
    }

    #[allow(dead_code)]
    fn raw_len(&self) -> usize {
        self.raw_count()
    }
}

#[inline]
fn pick<T: Real>(f: Factor, v: T, d: T, r: T) -> T {
    match f {
        Factor::Value => v,
        Factor::Derivative => d,
        Factor::OverR => v / r,
    }
}
