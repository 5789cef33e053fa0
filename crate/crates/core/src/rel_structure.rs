//! Stationary radial Dirac problem per κ channel.
//!
//! Both radial components are expanded in the same retained B-spline set and
//! the coefficients interleaved as `(p₁, q₁, p₂, q₂, …)`, which gives a
//! `2n × 2n` banded generalized eigenproblem. All `2n` eigenpairs are kept:
//! the negative-energy branch is needed by velocity-gauge propagation.
//! Energies are stored with the rest energy `c²` subtracted.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bspline::{BandedMatrix, Factor, Kernel, RadialBasis};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::linalg::generalized_banded_eigen;
use crate::real::Real;

/// Relativistic angular quantum number. `κ = -(j + ½)` for `j = l + ½` and
/// `κ = j + ½` for `j = l - ½`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KappaChannel {
    pub kappa: i32,
}

impl KappaChannel {
    pub fn new(kappa: i32) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::Parameter("κ must be nonzero".into()));
        }
        Ok(Self { kappa })
    }

    /// `2j`
    pub fn two_j(&self) -> i32 {
        2 * self.kappa.abs() - 1
    }

    /// Orbital momentum of the large component.
    pub fn l(&self) -> i32 {
        if self.kappa < 0 {
            -self.kappa - 1
        } else {
            self.kappa
        }
    }

    /// Orbital momentum of the small component.
    pub fn l_bar(&self) -> i32 {
        if self.kappa < 0 {
            self.l() + 1
        } else {
            self.l() - 1
        }
    }

    pub fn j(&self) -> f64 {
        self.two_j() as f64 / 2.0
    }
}

impl fmt::Display for KappaChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const L: &[u8] = b"spdfghiklmnoqrtuv";
        let l = self.l() as usize;
        let letter = L.get(l).map_or('?', |&b| b as char);
        write!(f, "{letter}{}/2", self.two_j())
    }
}

/// Energy class of an eigenstate of either theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateClass {
    Bound,
    PositiveContinuum,
    NegativeEnergy,
    Spurious,
}

impl StateClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateClass::Bound => "bound",
            StateClass::PositiveContinuum => "positive-continuum",
            StateClass::NegativeEnergy => "negative-energy",
            StateClass::Spurious => "spurious",
        }
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub bound: usize,
    pub positive_continuum: usize,
    pub negative_energy: usize,
    pub spurious: usize,
}

impl ClassCounts {
    pub fn tally(classes: impl IntoIterator<Item = StateClass>) -> Self {
        let mut c = Self::default();
        for class in classes {
            match class {
                StateClass::Bound => c.bound += 1,
                StateClass::PositiveContinuum => c.positive_continuum += 1,
                StateClass::NegativeEnergy => c.negative_energy += 1,
                StateClass::Spurious => c.spurious += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct DiracState<T> {
    /// Energy minus `c²` (a.u.).
    pub energy: T,
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub channel: KappaChannel,
    pub class: StateClass,
}

#[derive(Debug, Clone)]
pub struct ChannelSpectrum<T> {
    pub channel: KappaChannel,
    /// Ascending in energy, spurious state included and flagged.
    pub states: Vec<DiracState<T>>,
    pub counts: ClassCounts,
}

impl<T: Real> ChannelSpectrum<T> {
    pub fn bound_states(&self) -> impl Iterator<Item = &DiracState<T>> {
        self.states.iter().filter(|s| s.class == StateClass::Bound)
    }
}

/// Closed-form Dirac–Coulomb energy `E_{nκ} - c²`.
pub fn dirac_coulomb_energy(z: f64, n: u32, kappa: i32, c: f64) -> f64 {
    let za = z / c;
    let k = kappa.abs() as f64;
    let nr = n as f64 - k;
    let gamma = (k * k - za * za).sqrt();
    let x = (za / (nr + gamma)).powi(2);
    // c²(1/√(1+x) − 1) without cancellation.
    -c * c * x / ((1.0 + x).sqrt() * (1.0 + (1.0 + x).sqrt()))
}

/// Relativistic ionization potential of the ground state `c²(1 − √(1 − Z²/c²))`.
pub fn ionization_potential(z: f64, c: f64) -> f64 {
    let x = (z / c).powi(2);
    c * c * x / (1.0 + (1.0 - x).sqrt())
}

/// All κ with `|κ| ≤ j_max + ½`, ordered by `j` then negative κ first.
pub fn enumerate_channels(two_j_max: i32) -> Vec<KappaChannel> {
    let mut out = Vec::new();
    let mut two_j = 1;
    while two_j <= two_j_max {
        let k = (two_j + 1) / 2;
        out.push(KappaChannel { kappa: -k });
        out.push(KappaChannel { kappa: k });
        two_j += 2;
    }
    out
}

/// Matrices shared by every κ of one basis and charge.
struct RadialOperators<T> {
    overlap: BandedMatrix<T>,
    coulomb: BandedMatrix<T>,
    inv_r: BandedMatrix<T>,
    /// `∫ B_i B_j'`
    deriv: BandedMatrix<T>,
}

impl<T: Real> RadialOperators<T> {
    fn new(basis: &RadialBasis<T>, z: T) -> Result<Self> {
        Ok(Self {
            overlap: basis.overlap(),
            coulomb: basis.assemble(Factor::Value, &Kernel::coulomb(z), Factor::Value)?,
            inv_r: basis.assemble(Factor::Value, &Kernel::power(-1), Factor::Value)?,
            deriv: basis.assemble(Factor::Value, &Kernel::unit(), Factor::Derivative)?,
        })
    }

    /// Interleaved Hamiltonian (with `c²` subtracted) and overlap.
    fn interleaved(&self, kappa: T, c: T) -> (BandedMatrix<T>, BandedMatrix<T>) {
        let n = self.overlap.dim();
        let hb = 2 * self.overlap.half_bandwidth() + 1;
        let mut h = BandedMatrix::zeros(2 * n, hb, true);
        let mut s = BandedMatrix::zeros(2 * n, hb, true);
        let two_c2 = T::of(2.0) * c * c;
        for i in 0..n {
            let (lo, hi) = self.overlap.row_span(i);
            for j in lo..hi {
                let sij = self.overlap.get(i, j);
                let uij = self.coulomb.get(i, j);
                let kij = kappa * self.inv_r.get(i, j);
                let dij = self.deriv.get(i, j);
                s.set(2 * i, 2 * j, sij);
                s.set(2 * i + 1, 2 * j + 1, sij);
                h.set(2 * i, 2 * j, uij);
                h.set(2 * i + 1, 2 * j + 1, uij - two_c2 * sij);
                h.set(2 * i, 2 * j + 1, c * (kij - dij));
                h.set(2 * i + 1, 2 * j, c * (kij + dij));
            }
        }
        (h, s)
    }
}

fn classify<T: Real>(energy: T, c2: T) -> StateClass {
    if energy < -c2 {
        StateClass::NegativeEnergy
    } else if energy < T::zero() {
        StateClass::Bound
    } else {
        StateClass::PositiveContinuum
    }
}

/// Flips the sign so the first significant large-component coefficient is
/// positive.
fn fix_sign<T: Real>(lead: &mut [T], other: &mut [T]) {
    let max = lead.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if let Some(first) = lead.iter().find(|v| v.abs() > max * T::of(1e-6)) {
        if *first < T::zero() {
            lead.iter_mut().for_each(|v| *v = -*v);
            other.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Solves one κ channel. For κ > 0 the lowest positive-energy eigenstate is
/// flagged [`StateClass::Spurious`].
pub fn solve_channel<T: Real>(
    basis: &RadialBasis<T>,
    z: T,
    channel: KappaChannel,
    constants: &PhysicalConstants,
) -> Result<ChannelSpectrum<T>> {
    let ops = RadialOperators::new(basis, z)?;
    solve_with(&ops, basis, z, channel, constants)
}

fn solve_with<T: Real>(
    ops: &RadialOperators<T>,
    basis: &RadialBasis<T>,
    z: T,
    channel: KappaChannel,
    constants: &PhysicalConstants,
) -> Result<ChannelSpectrum<T>> {
    let c: T = constants.c();
    if z >= c {
        return Err(Error::Unsupported(format!("Z = {z} is not below c = {c}")));
    }
    let (h, s) = ops.interleaved(T::of(channel.kappa as f64), c);
    let pairs = generalized_banded_eigen(&h, &s).map_err(|e| match e {
        Error::Eigensolver { reason, .. } => Error::Eigensolver { channel: channel.to_string(), reason },
        Error::Parameter(reason) => Error::Eigensolver { channel: channel.to_string(), reason },
        other => other,
    })?;
    let n = basis.len();
    let c2 = c * c;
    let mut states: Vec<DiracState<T>> = pairs
        .values
        .into_iter()
        .zip(pairs.vectors)
        .map(|(energy, v)| {
            let mut p: Vec<T> = (0..n).map(|i| v[2 * i]).collect();
            let mut q: Vec<T> = (0..n).map(|i| v[2 * i + 1]).collect();
            fix_sign(&mut p, &mut q);
            DiracState { energy, p, q, channel, class: classify(energy, c2) }
        })
        .collect();

    if channel.kappa > 0 {
        if let Some(sp) = states.iter_mut().find(|s| s.class != StateClass::NegativeEnergy) {
            sp.class = StateClass::Spurious;
        }
        // Cross-check the remaining lowest state against n = κ + 1.
        if let Some(low) = states.iter().find(|s| s.class == StateClass::Bound) {
            let want = dirac_coulomb_energy(z.to_f64_lossy(), channel.kappa as u32 + 1, channel.kappa, constants.c);
            let got = low.energy.to_f64_lossy();
            if ((got - want) / want).abs() > 1e-3 {
                log::warn!(
                    "channel {channel}: lowest retained bound state {got} differs from the analytic {want}; \
                     spurious-state identification may be off"
                );
            }
        }
    }
    let counts = ClassCounts::tally(states.iter().map(|s| s.class));
    Ok(ChannelSpectrum { channel, states, counts })
}

/// Spectra for every channel up to `j_max`, solved in parallel.
#[derive(Debug, Clone)]
pub struct RelativisticSpectra<T> {
    pub z: T,
    pub channels: Vec<ChannelSpectrum<T>>,
}

impl<T: Real> RelativisticSpectra<T> {
    pub fn solve(basis: &RadialBasis<T>, z: T, two_j_max: i32, constants: &PhysicalConstants) -> Result<Self> {
        if two_j_max < 1 || two_j_max % 2 == 0 {
            return Err(Error::Parameter(format!("j_max must be a half-integer ≥ 1/2, got {two_j_max}/2")));
        }
        let ops = RadialOperators::new(basis, z)?;
        let channels = enumerate_channels(two_j_max)
            .into_par_iter()
            .map(|ch| solve_with(&ops, basis, z, ch, constants))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { z, channels })
    }

    pub fn channel(&self, kappa: i32) -> Option<&ChannelSpectrum<T>> {
        self.channels.iter().find(|c| c.channel.kappa == kappa)
    }

    pub fn ground_state(&self) -> Result<&DiracState<T>> {
        ground_state(&self.channels)
    }
}

/// Lowest bound state of the κ = −1 channel.
pub fn ground_state<T: Real>(spectra: &[ChannelSpectrum<T>]) -> Result<&DiracState<T>> {
    let ch = spectra
        .iter()
        .find(|c| c.channel.kappa == -1)
        .ok_or_else(|| Error::Config("κ = −1 channel was not solved".into()))?;
    ch.bound_states().next().ok_or_else(|| Error::NoBoundState(ch.channel.to_string()))
}
