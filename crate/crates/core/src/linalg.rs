//! Dense and banded symmetric eigensolvers.
//!
//! The generalized problem `H c = E S c` with banded `H` and banded SPD `S`
//! is reduced with the band Cholesky factor of `S` to a standard dense
//! symmetric problem, which is tridiagonalized with Householder reflections
//! and diagonalized by the implicit QL algorithm.

use crate::bspline::BandedMatrix;
use crate::error::{Error, Result};
use crate::real::Real;

/// Eigenpairs sorted by ascending eigenvalue; `vectors[i]` belongs to
/// `values[i]`.
#[derive(Debug, Clone)]
pub struct EigenPairs<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

/// All eigenpairs of `H c = E S c`, with eigenvectors normalized to
/// `cᵀ S c = 1`.
pub fn generalized_banded_eigen<T: Real>(h: &BandedMatrix<T>, s: &BandedMatrix<T>) -> Result<EigenPairs<T>> {
    let n = h.dim();
    assert_eq!(n, s.dim());
    let l = s.cholesky()?;

    // X = L⁻¹ H, column by column (H symmetric so rows of H are columns).
    let mut x = vec![T::zero(); n * n]; // column-major: x[j * n + i]
    for j in 0..n {
        let col = &mut x[j * n..(j + 1) * n];
        let (lo, hi) = h.row_span(j);
        for i in lo..hi {
            col[i] = h.get(i, j);
        }
        l.forward_substitute(col);
    }
    // A = X L⁻ᵀ = (L⁻¹ Xᵀ)ᵀ; rows of X become right-hand sides.
    let mut a = vec![T::zero(); n * n]; // row-major a[i * n + j]
    let mut row = vec![T::zero(); n];
    for i in 0..n {
        for j in 0..n {
            row[j] = x[j * n + i];
        }
        l.forward_substitute(&mut row);
        a[i * n..(i + 1) * n].copy_from_slice(&row);
    }
    // Symmetrize the round-off.
    for i in 0..n {
        for j in 0..i {
            let m = (a[i * n + j] + a[j * n + i]) / T::of(2.0);
            a[i * n + j] = m;
            a[j * n + i] = m;
        }
    }

    let (values, z) = symmetric_eigen(a, n)?;
    let mut vectors = Vec::with_capacity(n);
    let mut v = vec![T::zero(); n];
    for k in 0..n {
        v.copy_from_slice(&z[k * n..(k + 1) * n]);
        l.backward_substitute_transposed(&mut v);
        vectors.push(v.clone());
    }
    Ok(EigenPairs { values, vectors })
}

/// Eigen-decomposition of a dense symmetric row-major matrix. Returns the
/// ascending eigenvalues and a row-major matrix whose row `k` is the
/// orthonormal eigenvector of eigenvalue `k`.
pub fn symmetric_eigen<T: Real>(mut v: Vec<T>, n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    if n == 0 {
        return Ok((d, v));
    }
    tred2(&mut v, &mut d, &mut e, n);
    transpose_in_place(&mut v, n);
    tql2(&mut v, &mut d, &mut e, n)?;
    Ok((d, v))
}

fn transpose_in_place<T: Copy>(v: &mut [T], n: usize) {
    for i in 0..n {
        for j in 0..i {
            v.swap(i * n + j, j * n + i);
        }
    }
}

fn tred2<T: Real>(v: &mut [T], d: &mut [T], e: &mut [T], n: usize) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
                v[idx(j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let t = v[idx(k, j)] - (f * e[k] + g * d[k]);
                    v[idx(k, j)] = t;
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n.saturating_sub(1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    let t = v[idx(k, j)] - g * d[k];
                    v[idx(k, j)] = t;
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = T::zero();
    }
    v[idx(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// `v` holds the tred2 transformation transposed, so each eigenvector is a
/// contiguous row.
fn tql2<T: Real>(v: &mut [T], d: &mut [T], e: &mut [T], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Eigensolver {
                        channel: String::new(),
                        reason: format!("QL iteration did not converge for eigenvalue {l}"),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::of(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in (l + 2)..n {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (head, tail) = v.split_at_mut((i + 1) * n);
                    let row_i = &mut head[i * n..];
                    let row_i1 = &mut tail[..n];
                    for (vk, vk1) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                        let a = *vk;
                        let b = *vk1;
                        *vk1 = s * a + c * b;
                        *vk = c * a - s * b;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }

    // Sort ascending.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                v.swap(i * n + j, k * n + j);
            }
        }
    }
    Ok(())
}
