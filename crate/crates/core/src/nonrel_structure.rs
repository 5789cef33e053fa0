//! Radial Schrödinger problem per orbital momentum `l` in the same basis as
//! the Dirac solver. Positive-energy box states are kept.

use rayon::prelude::*;

use crate::bspline::{BandedMatrix, Factor, Kernel, RadialBasis};
use crate::error::{Error, Result};
use crate::linalg::generalized_banded_eigen;
use crate::real::Real;
use crate::rel_structure::{ClassCounts, StateClass};

#[derive(Debug, Clone)]
pub struct SchrodingerState<T> {
    pub energy: T,
    /// Coefficients of the reduced radial function `R_l(r) = r φ(r)`.
    pub coeffs: Vec<T>,
    pub l: u32,
    /// [`StateClass::Bound`] or [`StateClass::PositiveContinuum`].
    pub class: StateClass,
}

#[derive(Debug, Clone)]
pub struct NonrelSpectrum<T> {
    pub l: u32,
    pub states: Vec<SchrodingerState<T>>,
    pub counts: ClassCounts,
}

impl<T: Real> NonrelSpectrum<T> {
    pub fn bound_states(&self) -> impl Iterator<Item = &SchrodingerState<T>> {
        self.states.iter().filter(|s| s.class == StateClass::Bound)
    }
}

struct Operators<T> {
    overlap: BandedMatrix<T>,
    kinetic: BandedMatrix<T>,
    centrifugal: BandedMatrix<T>,
    coulomb: BandedMatrix<T>,
}

impl<T: Real> Operators<T> {
    fn new(basis: &RadialBasis<T>, z: T) -> Result<Self> {
        Ok(Self {
            overlap: basis.overlap(),
            kinetic: basis.assemble(Factor::Derivative, &Kernel::unit(), Factor::Derivative)?,
            centrifugal: basis.assemble(Factor::OverR, &Kernel::unit(), Factor::OverR)?,
            coulomb: basis.assemble(Factor::Value, &Kernel::coulomb(z), Factor::Value)?,
        })
    }

    fn hamiltonian(&self, l: u32) -> BandedMatrix<T> {
        let half = T::of(0.5);
        let ll = T::of((l * (l + 1)) as f64) * half;
        self.kinetic.scaled(half).axpy(ll, &self.centrifugal).axpy(T::one(), &self.coulomb)
    }
}

fn solve_with<T: Real>(ops: &Operators<T>, l: u32) -> Result<NonrelSpectrum<T>> {
    let h = ops.hamiltonian(l);
    let pairs = generalized_banded_eigen(&h, &ops.overlap).map_err(|e| Error::Eigensolver {
        channel: format!("l = {l}"),
        reason: e.to_string(),
    })?;
    let states: Vec<_> = pairs
        .values
        .into_iter()
        .zip(pairs.vectors)
        .map(|(energy, mut coeffs)| {
            let max = coeffs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if let Some(first) = coeffs.iter().find(|v| v.abs() > max * T::of(1e-6)) {
                if *first < T::zero() {
                    coeffs.iter_mut().for_each(|v| *v = -*v);
                }
            }
            let class = if energy > T::zero() { StateClass::PositiveContinuum } else { StateClass::Bound };
            SchrodingerState { energy, coeffs, l, class }
        })
        .collect();
    let counts = ClassCounts::tally(states.iter().map(|s| s.class));
    Ok(NonrelSpectrum { l, states, counts })
}

pub fn solve_channel_nr<T: Real>(basis: &RadialBasis<T>, z: T, l: u32) -> Result<NonrelSpectrum<T>> {
    solve_with(&Operators::new(basis, z)?, l)
}

#[derive(Debug, Clone)]
pub struct NonrelSpectra<T> {
    pub z: T,
    pub channels: Vec<NonrelSpectrum<T>>,
}

impl<T: Real> NonrelSpectra<T> {
    pub fn solve(basis: &RadialBasis<T>, z: T, l_max: u32) -> Result<Self> {
        let ops = Operators::new(basis, z)?;
        let channels = (0..=l_max).into_par_iter().map(|l| solve_with(&ops, l)).collect::<Result<Vec<_>>>()?;
        Ok(Self { z, channels })
    }

    pub fn channel(&self, l: u32) -> Option<&NonrelSpectrum<T>> {
        self.channels.iter().find(|c| c.l == l)
    }

    pub fn ground_state(&self) -> Result<&SchrodingerState<T>> {
        ground_state_nr(&self.channels)
    }
}

/// Lowest s state.
pub fn ground_state_nr<T: Real>(spectra: &[NonrelSpectrum<T>]) -> Result<&SchrodingerState<T>> {
    let s = spectra.iter().find(|c| c.l == 0).ok_or_else(|| Error::Config("l = 0 channel was not solved".into()))?;
    s.bound_states().next().ok_or_else(|| Error::NoBoundState("l = 0".into()))
}
