//! Z-scaling of hydrogenlike dynamics, the relativistic ionization potential
//! shift, the effective charge `Z′` and the rate-scaling estimate.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::PulseParams;

/// `ΔI_p = c²(1 − √(1 − Z²/c²)) − Z²/2`
pub fn delta_ip(z: f64, c: f64) -> f64 {
    crate::rel_structure::ionization_potential(z, c) - 0.5 * z * z
}

/// `Z′ = √(2c²(1 − √(1 − Z²/c²)))`, the charge whose nonrelativistic
/// ionization potential equals the relativistic one of `Z`.
pub fn scaled_charge(z: f64, c: f64) -> f64 {
    (2.0 * crate::rel_structure::ionization_potential(z, c)).sqrt()
}

/// `γ = √(2 I_p) ω / F₀` with `I_p = Z²/2`.
pub fn keldysh(z: f64, omega: f64, f0: f64) -> f64 {
    z * omega / f0
}

/// A pulse mapped from hydrogen (`Z = 1`) to charge `Z`: `ω′ = Z²ω`,
/// `F₀′ = Z³F₀` (`I′ = Z⁶I`), `A₀′ = Z A₀`, `T′ = T/Z²`, box `R′ = R/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledConfig {
    pub z: f64,
    pub base: PulseParams,
    pub scaled: PulseParams,
    /// Paper default box `250/Z`.
    pub radius: f64,
}

pub fn scale_config(z: f64, base: &PulseParams) -> Result<ScaledConfig> {
    if !(z > 0.0) {
        return Err(Error::Parameter(format!("Z must be positive, got {z}")));
    }
    let mut scaled = PulseParams::from_field(base.cycles, z * z * base.omega, z.powi(3) * base.f0)?;
    scaled.intensity_wcm2 = base.intensity_wcm2.map(|i| i * z.powi(6));
    Ok(ScaledConfig { z, base: *base, scaled, radius: 250.0 / z })
}

impl ScaledConfig {
    /// Maps the scaled pulse back to `Z = 1`.
    pub fn unscale(&self) -> Result<PulseParams> {
        let z = self.z;
        let mut p = PulseParams::from_field(self.scaled.cycles, self.scaled.omega / (z * z), self.scaled.f0 / z.powi(3))?;
        p.intensity_wcm2 = self.scaled.intensity_wcm2.map(|i| i / z.powi(6));
        Ok(p)
    }
}

/// Ionization rates on a field grid, in Z-scaled units
/// (`F₀/Z³`, `Γ/Z²`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub f0: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct RateRow {
    f0_z3au: f64,
    gamma_z2au: f64,
}

impl RateTable {
    pub fn new(f0: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if f0.len() != gamma.len() || f0.len() < 2 {
            return Err(Error::Parameter("rate table needs at least two (F₀, Γ) pairs".into()));
        }
        if f0.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("rate table F₀ must be strictly increasing".into()));
        }
        if let Some(g) = gamma.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::Parameter(format!("rate table Γ must be finite and nonnegative, got {g}")));
        }
        Ok(Self { f0, gamma })
    }

    /// Reads CSV with header `f0_z3au,gamma_z2au`.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Config(format!("rate table: {e}")))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["f0_z3au", "gamma_z2au"] {
            return Err(Error::Config(format!("rate table header must be `f0_z3au,gamma_z2au`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let (mut f0, mut gamma) = (Vec::new(), Vec::new());
        for row in rdr.deserialize::<RateRow>() {
            let row = row.map_err(|e| Error::Config(format!("rate table: {e}")))?;
            f0.push(row.f0_z3au);
            gamma.push(row.gamma_z2au);
        }
        Self::new(f0, gamma)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("f0_z3au,gamma_z2au\n");
        for (f, g) in self.f0.iter().zip(&self.gamma) {
            out.push_str(&format!("{f:.17e},{g:.17e}\n"));
        }
        out
    }

    pub fn range(&self) -> (f64, f64) {
        (self.f0[0], self.f0[self.f0.len() - 1])
    }

    /// `(F₀, Γ)` of the largest tabulated rate.
    pub fn peak(&self) -> (f64, f64) {
        let k = (0..self.gamma.len()).fold(0, |best, k| if self.gamma[k] > self.gamma[best] { k } else { best });
        (self.f0[k], self.gamma[k])
    }

    /// Monotone cubic interpolant, of `ln Γ` when every rate is positive and
    /// of `Γ` otherwise. No extrapolation.
    pub fn interpolate(&self, f0: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(f0 >= lo && f0 <= hi) {
            return Err(Error::OutOfRange { query: f0, lo, hi });
        }
        if self.gamma.iter().all(|g| *g > 0.0) {
            let logs: Vec<f64> = self.gamma.iter().map(|g| g.ln()).collect();
            Ok(pchip(&self.f0, &logs, f0).exp())
        } else {
            Ok(pchip(&self.f0, &self.gamma, f0).max(0.0))
        }
    }
}

/// Fritsch–Carlson slopes with the Fritsch–Butland harmonic mean, as in
/// common PCHIP implementations.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip(x: &[f64], y: &[f64], q: f64) -> f64 {
    let d = pchip_slopes(x, y);
    let k = match x.partition_point(|v| *v <= q) {
        0 => 0,
        p => (p - 1).min(x.len() - 2),
    };
    let h = x[k + 1] - x[k];
    let t = (q - x[k]) / h;
    let (t2, t3) = (t * t, t * t * t);
    y[k] * (2.0 * t3 - 3.0 * t2 + 1.0) + h * d[k] * (t3 - 2.0 * t2 + t) + y[k + 1] * (-2.0 * t3 + 3.0 * t2) + h * d[k + 1] * (t3 - t2)
}

/// Relativistic estimate `Γ′(F₀) = (Z′/Z)² Γ(F₀ (Z/Z′)³)` on the mapped grid
/// `F₀′ = F₀ (Z′/Z)³`, which needs no interpolation.
pub fn rate_scale(table: &RateTable, z: f64, c: f64) -> RateTable {
    let s = scaled_charge(z, c) / z;
    RateTable { f0: table.f0.iter().map(|f| f * s.powi(3)).collect(), gamma: table.gamma.iter().map(|g| g * s * s).collect() }
}

/// `Γ′` at arbitrary fields, interpolating the input table; fails when
/// `F₀ (Z/Z′)³` leaves its range.
pub fn rate_scale_at(table: &RateTable, z: f64, c: f64, f0: &[f64]) -> Result<Vec<f64>> {
    let s = scaled_charge(z, c) / z;
    f0.iter().map(|f| Ok(s * s * table.interpolate(f / s.powi(3))?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{PhysicalConstants, SPEED_OF_LIGHT as C};
    use crate::pulse::{intensity_to_field, wavelength_to_omega};
    use proptest::prelude::*;

    #[test]
    fn ionization_potential_shift() {
        let small = delta_ip(1.0, C) / (1.0 / (8.0 * C * C));
        assert!((small - 1.0).abs() < 1e-4, "{small}");
        // Binomial series of c²(1 − √(1 − x)) − c²x/2, x = Z²/c².
        for z in [50.0, 80.0] {
            let x: f64 = z * z / (C * C);
            let (mut a, mut series) = (0.5, 0.0);
            for k in 2..200 {
                a *= (2.0 * k as f64 - 3.0) / (2.0 * k as f64);
                series += a * x.powi(k);
            }
            assert!((delta_ip(z, C) / (C * C * series) - 1.0).abs() < 1e-12);
        }
        let ip80 = delta_ip(80.0, C) + 3200.0;
        let photon = PhysicalConstants::default().ev_to_au(15.0 * 6400.0);
        assert!(photon < ip80);
    }

    #[test]
    fn effective_charge() {
        assert!((scaled_charge(50.0, C) - 50.88).abs() < 0.01, "{}", scaled_charge(50.0, C));
        assert!((scaled_charge(1e-3, C) / 1e-3 - 1.0).abs() < 1e-9);
        for z in 1..=90 {
            let z = z as f64;
            let zp = scaled_charge(z, C);
            let residual = zp * zp / 2.0 - C * C * (1.0 - (1.0 - z * z / (C * C)).sqrt());
            assert!(residual.abs() < 1e-10 * zp * zp, "Z={z}: {residual}");
            assert!(zp >= z);
        }
    }

    #[test]
    fn keldysh_endpoints() {
        let f0 = intensity_to_field(5e22);
        let g1 = keldysh(50.0, wavelength_to_omega(0.05), f0);
        let g2 = keldysh(50.0, wavelength_to_omega(0.15), f0);
        assert_eq!(format!("{g1:.2}"), "38.17");
        assert_eq!(format!("{g2:.2}"), "12.72");
        assert!(keldysh(50.0, 1.0, 1e300) < 1e-290);
    }

    #[test]
    fn config_scaling() {
        let base = PulseParams::from_intensity(20, 0.5, 1e13).unwrap();
        let one = scale_config(1.0, &base).unwrap();
        assert_eq!(one.scaled, base);
        let s = scale_config(40.0, &base).unwrap();
        assert!((s.scaled.intensity_wcm2.unwrap() / 4.096e22 - 1.0).abs() < 1e-12);
        assert!((s.scaled.a0 / (40.0 * base.a0) - 1.0).abs() < 1e-12);
        assert!((s.scaled.duration * 1600.0 / base.duration - 1.0).abs() < 1e-12);
        assert_eq!(s.scaled.cycles, base.cycles);
        assert!((s.radius - 6.25).abs() < 1e-15);
        let back = s.unscale().unwrap();
        assert!((back.omega - base.omega).abs() < 1e-15 && (back.f0 / base.f0 - 1.0).abs() < 1e-12);
        assert!(scale_config(0.0, &base).is_err());
    }

    fn peaked() -> RateTable {
        let f0: Vec<f64> = (1..=60).map(|k| 0.005 * k as f64).collect();
        let gamma = f0.iter().map(|f| (f / 0.1).powi(4) * (-(f / 0.1)).exp()).collect();
        RateTable::new(f0, gamma).unwrap()
    }

    #[test]
    fn rate_transform_moves_the_peak() {
        let t = peaked();
        let (fp, gp) = t.peak();
        let mut last = 0.0;
        for z in [36.0, 54.0, 86.0] {
            let s = scaled_charge(z, C) / z;
            let out = rate_scale(&t, z, C);
            let (fq, gq) = out.peak();
            assert!((fq / fp - s.powi(3)).abs() < 1e-12);
            assert!((gq / gp - s * s).abs() < 1e-12);
            assert!(gq > last);
            last = gq;
        }
        let identity = rate_scale(&t, 1e-4, C);
        assert!(identity.f0.iter().zip(&t.f0).all(|(a, b)| (a / b - 1.0).abs() < 1e-9));
    }

    #[test]
    fn interpolated_transform_and_range_errors() {
        let t = peaked();
        let z = 86.0;
        let exact = rate_scale(&t, z, C);
        let at = rate_scale_at(&t, z, C, &exact.f0[..50]).unwrap();
        for (a, b) in at.iter().zip(&exact.gamma) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
        let (lo, hi) = t.range();
        assert!(matches!(t.interpolate(hi * 1.01), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.interpolate(lo * 0.99), Err(Error::OutOfRange { .. })));
        assert!(rate_scale_at(&t, z, C, &[exact.f0[59] * 1.001]).is_err());
        // Smooth in between the nodes.
        let mid = t.interpolate(0.1025).unwrap();
        let want = 1.025f64.powi(4) * (-1.025f64).exp();
        assert!((mid / want - 1.0).abs() < 1e-4, "{mid} {want}");
    }

    #[test]
    fn csv_round_trip() {
        let t = peaked();
        let back = RateTable::from_csv(t.to_csv().as_bytes()).unwrap();
        assert_eq!(back, t);
        assert!(RateTable::from_csv("f,g\n1,2\n2,3\n".as_bytes()).is_err());
        assert!(RateTable::from_csv("f0_z3au,gamma_z2au\n2,1\n1,1\n".as_bytes()).is_err());
        assert!(RateTable::from_csv("f0_z3au,gamma_z2au\n1,-1\n2,1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn pchip_is_monotone_between_monotone_data(ys in proptest::collection::vec(0.0f64..1.0, 3..12), q in 0.0f64..1.0) {
            let mut acc = 0.0;
            let y: Vec<f64> = ys.iter().map(|v| { acc += v; acc }).collect();
            let x: Vec<f64> = (0..y.len()).map(|k| k as f64).collect();
            let p = q * (x.len() - 1) as f64;
            let k = (p.floor() as usize).min(x.len() - 2);
            let v = pchip(&x, &y, p);
            prop_assert!(v >= y[k] - 1e-12 && v <= y[k + 1] + 1e-12);
        }

        #[test]
        fn scale_unscale_round_trip(z in 1.0f64..92.0, omega in 0.01f64..10.0, n in 1u32..50) {
            let base = PulseParams::from_intensity(n, omega, 1e14).unwrap();
            let back = scale_config(z, &base).unwrap().unscale().unwrap();
            prop_assert!((back.omega / base.omega - 1.0).abs() < 1e-13);
            prop_assert!((back.f0 / base.f0 - 1.0).abs() < 1e-13);
            prop_assert!((back.intensity_wcm2.unwrap() / 1e14 - 1.0).abs() < 1e-12);
            prop_assert_eq!(back.cycles, n);
        }
    }
}
