//! Interaction-picture right-hand side
//! `C'_K = −i e^{iE_K t} Σ_{K'} V_{KK'}(t) e^{−iE_{K'} t} C_{K'}`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::dipole::CouplingSet;
use crate::error::{Error, Result};
use crate::pulse::FieldProfile;
use crate::real::Real;

/// Elements per parallel work item inside one channel.
const CHUNK: usize = 64;

pub struct CouplingRhs<'a, T: Real> {
    set: &'a CouplingSet<T>,
    profile: &'a dyn FieldProfile,
    energies: Vec<T>,
    /// Per channel, the blocks touching it in a fixed order, flagged `true`
    /// where the channel is the bra.
    plan: Vec<Vec<(usize, bool)>>,
    rotated: Vec<Complex<T>>,
}

impl<'a, T: Real> CouplingRhs<'a, T> {
    pub fn new(set: &'a CouplingSet<T>, profile: &'a dyn FieldProfile) -> Self {
        let mut plan = vec![Vec::new(); set.channels.len()];
        for (b, blk) in set.blocks.iter().enumerate() {
            plan[blk.bra].push((b, true));
            plan[blk.ket].push((b, false));
        }
        Self { set, profile, energies: set.energies(), plan, rotated: vec![Complex::new(T::zero(), T::zero()); set.len()] }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn eval(&mut self, t: T, c: &[Complex<T>], out: &mut [Complex<T>]) {
        let zero = Complex::new(T::zero(), T::zero());
        let (field, potential) = self.profile.profiles(t.to_f64_lossy());
        let gamma = self.set.profile(T::of(field), T::of(potential));
        if gamma == zero {
            out.fill(zero);
            return;
        }
        let energies = &self.energies;
        self.rotated.par_iter_mut().zip(c.par_iter()).zip(energies.par_iter()).for_each(|((x, c), e)| {
            let (s, co) = (*e * t).sin_cos();
            *x = *c * Complex::new(co, -s);
        });
        let x = &self.rotated;
        let set = self.set;

        let mut slices = Vec::with_capacity(set.channels.len());
        let mut rest = out;
        for ch in &set.channels {
            let (head, tail) = rest.split_at_mut(ch.len);
            slices.push(head);
            rest = tail;
        }
        slices.into_par_iter().zip(self.plan.par_iter()).enumerate().for_each(|(ch, (y, plan))| {
            let off = set.channels[ch].offset;
            y.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, y)| {
                let k0 = chunk * CHUNK;
                let k1 = k0 + y.len();
                y.fill(zero);
                let mut acc = vec![zero; y.len()];
                for &(b, is_bra) in plan {
                    let blk = &set.blocks[b];
                    if is_bra {
                        let xk = &x[set.channels[blk.ket].offset..][..blk.cols];
                        for (yf, f) in y.iter_mut().zip(k0..k1) {
                            let row = &blk.data[f * blk.cols..(f + 1) * blk.cols];
                            let s = row.iter().zip(xk).fold(zero, |s, (m, x)| s + *x * *m);
                            *yf = *yf + gamma * s;
                        }
                    } else {
                        let xb = &x[set.channels[blk.bra].offset..][..blk.rows];
                        acc.fill(zero);
                        for (f, xf) in xb.iter().enumerate() {
                            let row = &blk.data[f * blk.cols + k0..f * blk.cols + k1];
                            for (a, m) in acc.iter_mut().zip(row) {
                                *a = *a + *xf * *m;
                            }
                        }
                        let gc = gamma.conj();
                        for (yi, a) in y.iter_mut().zip(&acc) {
                            *yi = *yi + gc * *a;
                        }
                    }
                }
                for (yk, e) in y.iter_mut().zip(&energies[off + k0..off + k1]) {
                    let (s, co) = (*e * t).sin_cos();
                    // −i e^{iEt}
                    *yk = Complex::new(s, -co) * *yk;
                }
            });
        });
    }
}

/// One evaluation of the coupled system at time `t`.
pub fn rhs<T: Real>(t: T, c: &[Complex<T>], couplings: &CouplingSet<T>, profile: &dyn FieldProfile) -> Result<Vec<Complex<T>>> {
    if c.len() != couplings.len() {
        return Err(Error::Internal(format!("{} coefficients for {} states", c.len(), couplings.len())));
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); c.len()];
    CouplingRhs::new(couplings, profile).eval(t, c, &mut out);
    Ok(out)
}
