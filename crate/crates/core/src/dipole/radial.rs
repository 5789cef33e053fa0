//! Radial dipole integrals in length and velocity form.
//!
//! All integrals are bilinear forms of coefficient vectors with banded
//! matrices built once per basis.

use rayon::prelude::*;

use crate::bspline::{BandedMatrix, Factor, Kernel, RadialBasis};
use crate::error::{Error, Result};
use crate::nonrel_structure::SchrodingerState;
use crate::real::Real;
use crate::rel_structure::{DiracState, KappaChannel};

/// Matrices needed by every radial dipole integral of one basis.
#[derive(Debug, Clone)]
pub struct DipoleOperators<T> {
    /// `⟨B_i|B_j⟩`
    pub overlap: BandedMatrix<T>,
    /// `⟨B_i|r|B_j⟩`
    pub position: BandedMatrix<T>,
    /// `⟨B_i|B_j'⟩`
    pub deriv: BandedMatrix<T>,
    /// `⟨B_i|1/r|B_j⟩`
    pub inv_r: BandedMatrix<T>,
}

impl<T: Real> DipoleOperators<T> {
    pub fn new(basis: &RadialBasis<T>) -> Result<Self> {
        Ok(Self {
            overlap: basis.overlap(),
            position: basis.assemble(Factor::Value, &Kernel::power(1), Factor::Value)?,
            deriv: basis.assemble(Factor::Value, &Kernel::unit(), Factor::Derivative)?,
            inv_r: basis.assemble(Factor::Value, &Kernel::power(-1), Factor::Value)?,
        })
    }

    /// `d/dr + s·λ/r` as a banded matrix.
    pub fn velocity_nr(&self, sign: i32, lambda: u32) -> BandedMatrix<T> {
        self.deriv.axpy(T::of((sign * lambda as i32) as f64), &self.inv_r)
    }
}

/// `Δ_fi = (−1)^{j_f−j_i} (κ_f − κ_i)`
pub fn delta_fi(f: KappaChannel, i: KappaChannel) -> i32 {
    let phase = if ((f.two_j() - i.two_j()) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
    phase * (f.kappa - i.kappa)
}

/// `∫ r (P_f P_i + Q_f Q_i) dr`
pub fn radial_length_rel<T: Real>(ops: &DipoleOperators<T>, f: &DiracState<T>, i: &DiracState<T>) -> T {
    ops.position.bilinear(&f.p, &i.p) + ops.position.bilinear(&f.q, &i.q)
}

/// `∫ [(1−δ) P_f Q_i − (1+δ) Q_f P_i] dr` with `δ = κ_f − κ_i`, which is
/// `(−1)^{j_f−j_i} Δ_fi`. This is the form for which `c·I_V = (E_i−E_f)·I_L`
/// holds with the small component sign used by the structure solver. The
/// coupling carries the remaining `−i c` factor.
pub fn radial_velocity_rel<T: Real>(ops: &DipoleOperators<T>, f: &DiracState<T>, i: &DiracState<T>) -> T {
    let d = T::of((f.channel.kappa - i.channel.kappa) as f64);
    let one = T::one();
    (one - d) * ops.overlap.bilinear(&f.p, &i.q) - (one + d) * ops.overlap.bilinear(&f.q, &i.p)
}

fn check_delta_l(lf: u32, li: u32) -> Result<()> {
    if (lf as i32 - li as i32).abs() != 1 {
        return Err(Error::Parameter(format!("dipole integral needs |Δl| = 1, got l_f = {lf}, l_i = {li}")));
    }
    Ok(())
}

/// `∫ r R_f R_i dr`
pub fn radial_length_nr<T: Real>(ops: &DipoleOperators<T>, f: &SchrodingerState<T>, i: &SchrodingerState<T>) -> Result<T> {
    check_delta_l(f.l, i.l)?;
    Ok(ops.position.bilinear(&f.coeffs, &i.coeffs))
}

/// `(s, λ)` of the first-order form `d/dr + s·λ/r`: `λ` is the larger of the
/// two orbital momenta and `s = +1` when the initial one is the larger.
pub fn velocity_branch(lf: u32, li: u32) -> (i32, u32) {
    if li > lf {
        (1, li)
    } else {
        (-1, lf)
    }
}

/// `∫ R_f (d/dr + s·λ/r) R_i dr` with [`velocity_branch`]; the coupling
/// carries the remaining `−i` factor.
pub fn radial_velocity_nr<T: Real>(ops: &DipoleOperators<T>, f: &SchrodingerState<T>, i: &SchrodingerState<T>) -> Result<T> {
    check_delta_l(f.l, i.l)?;
    let (s, lambda) = velocity_branch(f.l, i.l);
    Ok(radial_velocity_nr_with(ops, f, i, s, lambda))
}

/// Velocity integral with an explicit branch.
pub fn radial_velocity_nr_with<T: Real>(
    ops: &DipoleOperators<T>,
    f: &SchrodingerState<T>,
    i: &SchrodingerState<T>,
    sign: i32,
    lambda: u32,
) -> T {
    ops.deriv.bilinear(&f.coeffs, &i.coeffs) + T::of((sign * lambda as i32) as f64) * ops.inv_r.bilinear(&f.coeffs, &i.coeffs)
}

/// Row-major `rows × cols` matrix `Σ_t coef_t · (left_t[f]ᵀ M_t right_t[i])`
/// over several terms. Rows are computed in parallel.
pub(crate) fn bilinear_block<T: Real>(terms: &[(T, &[&[T]], &BandedMatrix<T>, &[&[T]])], rows: usize, cols: usize) -> Vec<T> {
    // M_t·right_t[i] for every term and column, then plain dot products.
    let images: Vec<Vec<Vec<T>>> =
        terms.iter().map(|(_, _, m, right)| right.par_iter().map(|v| m.matvec(v)).collect()).collect();
    let mut out = vec![T::zero(); rows * cols];
    out.par_chunks_mut(cols.max(1)).enumerate().for_each(|(f, row)| {
        for (t, (coef, left, _, _)) in terms.iter().enumerate() {
            let lf = left[f];
            for (i, slot) in row.iter_mut().enumerate() {
                let dot = lf.iter().zip(&images[t][i]).fold(T::zero(), |acc, (a, b)| acc + *a * *b);
                *slot += *coef * dot;
            }
        }
    });
    out
}
