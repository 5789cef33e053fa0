use crate::error::{Error, Result};
use crate::real::Real;

/// Square band matrix with equal lower and upper half-bandwidth, stored row
/// by row as `2 * half_bandwidth + 1` diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    dim: usize,
    half_bandwidth: usize,
    data: Vec<T>,
    pub symmetric: bool,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(dim: usize, half_bandwidth: usize, symmetric: bool) -> Self {
        Self { dim, half_bandwidth, data: vec![T::zero(); dim * (2 * half_bandwidth + 1)], symmetric }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i.abs_diff(j) <= self.half_bandwidth
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        i * (2 * self.half_bandwidth + 1) + (j + self.half_bandwidth - i)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            T::zero()
        }
    }

    /// Panics if `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "({i}, {j}) outside half-bandwidth {}", self.half_bandwidth);
        let o = self.offset(i, j);
        self.data[o] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "({i}, {j}) outside half-bandwidth {}", self.half_bandwidth);
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    /// Column range `[lo, hi)` of the band in row `i`.
    pub fn row_span(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.half_bandwidth), (i + self.half_bandwidth + 1).min(self.dim))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim, self.half_bandwidth, self.symmetric);
        for i in 0..self.dim {
            let (lo, hi) = self.row_span(i);
            for j in lo..hi {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + s * other`, both with the same shape.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.half_bandwidth, other.half_bandwidth);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += s * *b;
        }
        out.symmetric = self.symmetric && other.symmetric;
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let (lo, hi) = self.row_span(i);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// `xᵀ A y`
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        x.iter().zip(self.matvec(y)).map(|(a, b)| *a * b).sum()
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            let (lo, hi) = self.row_span(i);
            for j in lo..hi {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.dim;
        let mut d = vec![T::zero(); n * n];
        for i in 0..n {
            let (lo, hi) = self.row_span(i);
            for j in lo..hi {
                d[i * n + j] = self.get(i, j);
            }
        }
        d
    }

    /// Lower Cholesky factor `L` with `A = L Lᵀ`, stored in the same band
    /// layout (upper part zero). Requires a symmetric positive definite matrix.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.dim;
        let b = self.half_bandwidth;
        let mut l = Self::zeros(n, b, false);
        for j in 0..n {
            let lo = j.saturating_sub(b);
            let mut diag = self.get(j, j);
            for p in lo..j {
                let v = l.get(j, p);
                diag -= v * v;
            }
            if !(diag > T::zero()) {
                return Err(Error::Parameter(format!(
                    "matrix is not positive definite (pivot {j} = {diag})"
                )));
            }
            let ljj = diag.sqrt();
            l.set(j, j, ljj);
            for i in (j + 1)..(j + b + 1).min(n) {
                let mut s = self.get(i, j);
                for p in i.saturating_sub(b).max(lo)..j {
                    s -= l.get(i, p) * l.get(j, p);
                }
                l.set(i, j, s / ljj);
            }
        }
        Ok(l)
    }

    /// Solves `L x = rhs` in place for a lower band factor.
    pub fn forward_substitute(&self, x: &mut [T]) {
        let b = self.half_bandwidth;
        for i in 0..self.dim {
            let mut s = x[i];
            for p in i.saturating_sub(b)..i {
                s -= self.get(i, p) * x[p];
            }
            x[i] = s / self.get(i, i);
        }
    }

    /// Solves `Lᵀ x = rhs` in place for a lower band factor.
    pub fn backward_substitute_transposed(&self, x: &mut [T]) {
        let b = self.half_bandwidth;
        for i in (0..self.dim).rev() {
            let mut s = x[i];
            for p in (i + 1)..(i + b + 1).min(self.dim) {
                s -= self.get(p, i) * x[p];
            }
            x[i] = s / self.get(i, i);
        }
    }
}
