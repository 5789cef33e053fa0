//! Linearly polarized `cos²`-envelope pulse
//! `A(t) = A₀ cos²(πt/T) sin(ωt)` on `|t| < T/2`, zero outside.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{INTENSITY_AU_WCM2, NM_TIMES_HARTREE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    pub cycles: u32,
    /// Photon energy (a.u.).
    pub omega: f64,
    /// Peak intensity (W/cm²) when the pulse was specified that way.
    pub intensity_wcm2: Option<f64>,
    /// Nominal peak field (a.u.).
    pub f0: f64,
    /// `F₀/ω`
    pub a0: f64,
    /// `2πN/ω`
    pub duration: f64,
}

impl PulseParams {
    pub fn from_field(cycles: u32, omega: f64, f0: f64) -> Result<Self> {
        if cycles == 0 {
            return Err(Error::Parameter("pulse needs at least one cycle".into()));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Parameter(format!("photon energy must be positive, got {omega}")));
        }
        if !(f0 >= 0.0 && f0.is_finite()) {
            return Err(Error::Parameter(format!("peak field must be nonnegative, got {f0}")));
        }
        Ok(Self {
            cycles,
            omega,
            intensity_wcm2: None,
            f0,
            a0: f0 / omega,
            duration: 2.0 * PI * cycles as f64 / omega,
        })
    }

    pub fn from_intensity(cycles: u32, omega: f64, intensity_wcm2: f64) -> Result<Self> {
        if !(intensity_wcm2 >= 0.0 && intensity_wcm2.is_finite()) {
            return Err(Error::Parameter(format!("intensity must be nonnegative, got {intensity_wcm2}")));
        }
        let mut p = Self::from_field(cycles, omega, intensity_to_field(intensity_wcm2))?;
        p.intensity_wcm2 = Some(intensity_wcm2);
        Ok(p)
    }

    pub fn start(&self) -> f64 {
        -0.5 * self.duration
    }

    pub fn end(&self) -> f64 {
        0.5 * self.duration
    }

    /// One carrier period.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// `(τ, inside)` with `τ = t/T`.
    fn local(&self, t: f64) -> Option<f64> {
        let tau = t / self.duration;
        (tau.abs() < 0.5).then_some(tau)
    }

    pub fn vector_potential(&self, t: f64) -> f64 {
        let Some(tau) = self.local(t) else { return 0.0 };
        let env = (PI * tau).cos();
        self.a0 * env * env * (2.0 * PI * self.cycles as f64 * tau).sin()
    }

    /// `F = −dA/dt`
    pub fn electric_field(&self, t: f64) -> f64 {
        let Some(tau) = self.local(t) else { return 0.0 };
        let env = (PI * tau).cos();
        let phase = 2.0 * PI * self.cycles as f64 * tau;
        self.a0 * ((PI / self.duration) * (2.0 * PI * tau).sin() * phase.sin() - self.omega * env * env * phase.cos())
    }

    /// Both profiles at once.
    pub fn profiles(&self, t: f64) -> (f64, f64) {
        (self.electric_field(t), self.vector_potential(t))
    }
}

/// Source of the `(F(t), A(t))` pair driving a propagation.
pub trait FieldProfile: Sync {
    fn profiles(&self, t: f64) -> (f64, f64);
}

impl FieldProfile for PulseParams {
    fn profiles(&self, t: f64) -> (f64, f64) {
        PulseParams::profiles(self, t)
    }
}

/// Time-independent field and vector potential, for synthetic tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField {
    pub field: f64,
    pub vector_potential: f64,
}

impl FieldProfile for ConstantField {
    fn profiles(&self, _t: f64) -> (f64, f64) {
        (self.field, self.vector_potential)
    }
}

/// `F₀ = √(I / 3.509445·10¹⁶ W/cm²)`
pub fn intensity_to_field(intensity_wcm2: f64) -> f64 {
    (intensity_wcm2 / INTENSITY_AU_WCM2).sqrt()
}

pub fn field_to_intensity(f0: f64) -> f64 {
    f0 * f0 * INTENSITY_AU_WCM2
}

/// `ω = 45.56335 / λ[nm]`
pub fn wavelength_to_omega(nm: f64) -> f64 {
    NM_TIMES_HARTREE / nm
}

pub fn omega_to_wavelength(omega: f64) -> f64 {
    NM_TIMES_HARTREE / omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> PulseParams {
        PulseParams::from_intensity(20, 500.0, 5e23).unwrap()
    }

    #[test]
    fn unit_conversions() {
        assert!((intensity_to_field(3.509445e16) - 1.0).abs() < 1e-15);
        assert!((intensity_to_field(5e22) - 1193.6).abs() < 0.05);
        assert!((intensity_to_field(5e23) - 3774.6).abs() < 0.05);
        assert!((wavelength_to_omega(45.56335) - 1.0).abs() < 1e-15);
        assert!((wavelength_to_omega(0.05) - 911.267).abs() < 1e-3);
        assert!((wavelength_to_omega(0.15) - 303.7557).abs() < 1e-3);
        assert!((omega_to_wavelength(wavelength_to_omega(0.15)) - 0.15).abs() < 1e-15);
        assert!((field_to_intensity(intensity_to_field(5e22)) / 5e22 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vector_potential_values() {
        let p = fig1();
        assert!((p.duration - 2.0 * PI * 20.0 / 500.0).abs() < 1e-15);
        assert_eq!(p.vector_potential(0.0), 0.0);
        assert_eq!(p.vector_potential(p.end()), 0.0);
        assert_eq!(p.vector_potential(p.start()), 0.0);
        assert_eq!(p.vector_potential(3.0 * p.duration), 0.0);
        let t = p.duration / 80.0;
        let want = p.a0 * (PI / 80.0).cos().powi(2);
        assert!((p.vector_potential(t) - want).abs() < 1e-12 * p.a0);
    }

    #[test]
    fn field_integrates_to_zero() {
        let p = fig1();
        let m = 200_000;
        let h = p.duration / m as f64;
        // Simpson; F vanishes at both ends.
        let mut s = 0.0;
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * p.electric_field(p.start() + k as f64 * h);
        }
        let integral = s * h / 3.0;
        assert!(integral.abs() < 1e-9 * p.f0 * p.duration, "{integral}");
    }

    #[test]
    fn peak_field_close_to_nominal() {
        let p = PulseParams::from_field(20, 1.0, 1.0).unwrap();
        let peak = (0..200_001).map(|k| p.electric_field(p.start() + p.duration * k as f64 / 200_000.0).abs()).fold(0.0, f64::max);
        assert!((peak - p.a0 * p.omega).abs() < 1.0 / 20.0, "{peak}");
    }

    #[test]
    fn continuous_at_edges() {
        let p = fig1();
        let eps = 1e-9 * p.duration;
        for edge in [p.start(), p.end()] {
            assert!(p.vector_potential(edge - eps).abs() < 1e-12);
            assert!(p.vector_potential(edge + eps).abs() < 1e-12);
            assert!(p.electric_field(edge - eps).abs() < 1e-6 * p.f0);
            assert!(p.electric_field(edge + eps).abs() < 1e-6 * p.f0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PulseParams::from_field(0, 1.0, 1.0).is_err());
        assert!(PulseParams::from_field(5, -1.0, 1.0).is_err());
        assert!(PulseParams::from_intensity(5, 1.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn field_matches_finite_differences(u in -0.4999f64..0.4999, n in 1u32..40, omega in 0.05f64..5000.0) {
            let p = PulseParams::from_field(n, omega, 1.0).unwrap();
            let t = u * p.duration;
            let h = 1e-6 * p.duration;
            let fd = -(p.vector_potential(t + h) - p.vector_potential(t - h)) / (2.0 * h);
            let f = p.electric_field(t);
            prop_assert!((fd - f).abs() < 1e-6 * p.a0 * p.omega, "{} vs {}", fd, f);
        }

        #[test]
        fn vector_potential_is_odd(u in 0.0f64..0.6, n in 1u32..40) {
            let p = PulseParams::from_field(n, 3.0, 2.0).unwrap();
            let t = u * p.duration;
            prop_assert!((p.vector_potential(-t) + p.vector_potential(t)).abs() < 1e-12 * p.a0);
        }
    }
}
