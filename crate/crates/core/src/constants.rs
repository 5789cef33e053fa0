//! Physical constants and unit conversions in atomic units.

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT: f64 = 137.035999;
/// One Hartree in electron volts.
pub const HARTREE_EV: f64 = 27.211386;
/// Intensity in W/cm² that corresponds to a peak field of one atomic unit.
pub const INTENSITY_AU_WCM2: f64 = 3.509445e16;
/// `λ[nm] · ω[a.u.]` for a photon.
pub const NM_TIMES_HARTREE: f64 = 45.56335;

/// The constant set used by a run. Stored in every manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hartree_ev: f64,
    pub intensity_au_wcm2: f64,
    pub nm_times_hartree: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c: SPEED_OF_LIGHT,
            hartree_ev: HARTREE_EV,
            intensity_au_wcm2: INTENSITY_AU_WCM2,
            nm_times_hartree: NM_TIMES_HARTREE,
        }
    }
}

impl PhysicalConstants {
    pub fn c<T: Real>(&self) -> T {
        T::of(self.c)
    }

    pub fn c2<T: Real>(&self) -> T {
        let c = self.c::<T>();
        c * c
    }

    /// Field strength `c³` above which real pair production becomes relevant.
    pub fn critical_field(&self) -> f64 {
        self.c.powi(3)
    }

    pub fn ev_to_au(&self, ev: f64) -> f64 {
        ev / self.hartree_ev
    }

    pub fn au_to_ev(&self, au: f64) -> f64 {
        au * self.hartree_ev
    }
}
