//! Reduction of final coefficients to yields and populations.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::dipole::CouplingSet;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rel_structure::StateClass;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChannelPopulation {
    pub channel: String,
    pub bound: f64,
    pub positive_continuum: f64,
    pub negative_energy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct YieldReport {
    /// Population of positive-energy continuum states.
    #[serde(rename = "yield")]
    pub ionization: f64,
    /// Population of the initial state.
    pub survival: f64,
    /// Population of the other bound states.
    pub bound_excitation: f64,
    /// Population of negative-energy states (Dirac only; never ionization).
    pub negative_energy: f64,
    /// `Σ|C|²`
    pub norm: f64,
    pub per_channel: Vec<ChannelPopulation>,
}

impl YieldReport {
    /// `yield + survival + excitation + NE − norm`
    pub fn partition_defect(&self) -> f64 {
        self.ionization + self.survival + self.bound_excitation + self.negative_energy - self.norm
    }
}

/// Populations of the coefficient vector `c` indexed by `couplings`.
pub fn ionization_yield<T: Real>(c: &[Complex<T>], couplings: &CouplingSet<T>) -> Result<YieldReport> {
    if c.len() != couplings.len() {
        return Err(Error::Internal(format!("{} coefficients for {} states", c.len(), couplings.len())));
    }
    let mut report = YieldReport {
        per_channel: couplings
            .channels
            .iter()
            .map(|ch| ChannelPopulation { channel: ch.label.clone(), ..Default::default() })
            .collect(),
        ..Default::default()
    };
    for (k, (z, s)) in c.iter().zip(&couplings.states).enumerate() {
        let p = z.norm_sqr().to_f64_lossy();
        let ch = &mut report.per_channel[s.channel];
        match s.class {
            StateClass::Bound if k == couplings.initial => {
                report.survival += p;
                ch.bound += p;
            }
            StateClass::Bound => {
                report.bound_excitation += p;
                ch.bound += p;
            }
            StateClass::PositiveContinuum => {
                report.ionization += p;
                ch.positive_continuum += p;
            }
            StateClass::NegativeEnergy => {
                report.negative_energy += p;
                ch.negative_energy += p;
            }
            StateClass::Spurious => {
                return Err(Error::Internal(format!("spurious state at index {k} in a coupling set")));
            }
        }
        report.norm += p;
    }
    Ok(report)
}

/// Minimum number of photons of energy `omega` that ionize the ground state:
/// `⌈I_p/ω⌉` with `I_p = Z²/2` or `c²(1 − √(1 − Z²/c²))`.
pub fn photon_count(z: f64, omega: f64, relativistic: bool, constants: &PhysicalConstants) -> Result<u64> {
    if !(omega > 0.0) {
        return Err(Error::Parameter(format!("photon energy must be positive, got {omega}")));
    }
    let ip = if relativistic {
        crate::rel_structure::ionization_potential(z, constants.c)
    } else {
        0.5 * z * z
    };
    Ok((ip / omega).ceil() as u64)
}

/// Photons needed to bridge the `2c²` gap to the negative-energy continuum.
pub fn pair_threshold_photons(omega: f64, constants: &PhysicalConstants) -> Result<u64> {
    if !(omega > 0.0) {
        return Err(Error::Parameter(format!("photon energy must be positive, got {omega}")));
    }
    Ok((2.0 * constants.c * constants.c / omega).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::{BasisParams, RadialBasis};
    use crate::dipole::{build_coupling, Gauge, Spectra};
    use crate::rel_structure::RelativisticSpectra;
    use proptest::prelude::*;

    #[test]
    fn photon_thresholds() {
        let c = PhysicalConstants::default();
        assert_eq!(photon_count(50.0, 500.0, true, &c).unwrap(), 3);
        assert_eq!(pair_threshold_photons(500.0, &c).unwrap(), 76);
        let omega = c.ev_to_au(15.0 * 80.0 * 80.0);
        assert!((omega - 3527.9).abs() < 0.05);
        assert_eq!(photon_count(80.0, omega, true, &c).unwrap(), 2);
        assert_eq!(photon_count(80.0, omega, false, &c).unwrap(), 1);
        assert!(photon_count(1.0, 0.0, false, &c).is_err());
    }

    fn small_set() -> CouplingSet<f64> {
        let basis = RadialBasis::new(BasisParams::scaled_box(10.0, 30, 6, 8, 1.2)).unwrap();
        let c = PhysicalConstants::default();
        let sp = RelativisticSpectra::solve(&basis, 10.0, 3, &c).unwrap();
        build_coupling(Spectra::Dirac(&sp), &basis, Gauge::Length, true, 3, &c).unwrap()
    }

    #[test]
    fn ground_state_only() {
        let set = small_set();
        let mut c = vec![Complex::new(0.0, 0.0); set.len()];
        c[set.initial] = Complex::new(0.6, 0.8);
        let r = ionization_yield(&c, &set).unwrap();
        assert_eq!(r.ionization, 0.0);
        assert!((r.survival - 1.0).abs() < 1e-15);
        assert!(ionization_yield(&c[1..], &set).is_err());
    }

    proptest! {
        #[test]
        fn partition_identity(seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)) {
            let set = small_set();
            let c: Vec<_> = (0..set.len()).map(|k| { let (a, b) = seed[k % seed.len()]; Complex::new(a * (k as f64 + 1.0).sin(), b / (k as f64 + 1.0)) }).collect();
            let r = ionization_yield(&c, &set).unwrap();
            prop_assert!(r.partition_defect().abs() <= 1e-12 * r.norm);
            let by_channel: f64 = r.per_channel.iter().map(|p| p.bound + p.positive_continuum + p.negative_energy).sum();
            prop_assert!((by_channel - r.norm).abs() <= 1e-12 * r.norm);
            prop_assert!(r.ionization >= 0.0 && r.negative_energy > 0.0);
        }
    }
}
