//! Static block-sparse dipole coupling between field-free eigenstates.
//!
//! Every block is stored once, for a bra channel `a` and ket channel `b`
//! with `a < b`, as the real matrix `M_ab = W · (radial integral)`. The time
//! dependent coupling is `V_ab(t) = γ(t) M_ab` and `V_ba(t) = γ̄(t) M_abᵀ`
//! with `γ = F(t)` in length gauge and `γ = −i s A(t)` in velocity gauge
//! (`s = c` for Dirac, 1 for Schrödinger).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bspline::{BandedMatrix, RadialBasis};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::nonrel_structure::NonrelSpectra;
use crate::real::Real;
use crate::rel_structure::{RelativisticSpectra, StateClass};

use super::angular::{angular_nonrel, angular_rel, NonrelLabel, RelLabel};
use super::radial::{bilinear_block, velocity_branch, DipoleOperators};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Dirac,
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Length,
    Velocity,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::Dirac => "dirac",
            Theory::Schrodinger => "schrodinger",
        })
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gauge::Length => "length",
            Gauge::Velocity => "velocity",
        })
    }
}

impl FromStr for Theory {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirac" => Ok(Theory::Dirac),
            "schrodinger" => Ok(Theory::Schrodinger),
            _ => Err(Error::Config(format!("theory: expected dirac or schrodinger, got `{s}`"))),
        }
    }
}

impl FromStr for Gauge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(Gauge::Length),
            "velocity" => Ok(Gauge::Velocity),
            _ => Err(Error::Config(format!("gauge: expected length or velocity, got `{s}`"))),
        }
    }
}

/// Solved spectra of either theory.
#[derive(Debug, Clone, Copy)]
pub enum Spectra<'a, T> {
    Dirac(&'a RelativisticSpectra<T>),
    Schrodinger(&'a NonrelSpectra<T>),
}

impl<T> Spectra<'_, T> {
    pub fn theory(&self) -> Theory {
        match self {
            Spectra::Dirac(_) => Theory::Dirac,
            Spectra::Schrodinger(_) => Theory::Schrodinger,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelInfo {
    pub label: String,
    /// Orbital momentum (of the large component for Dirac).
    pub l: i32,
    /// `2j`; equals `2l` for Schrödinger channels.
    pub two_j: i32,
    /// Zero for Schrödinger channels.
    pub kappa: i32,
    /// First index of the channel in the state vector.
    pub offset: usize,
    pub len: usize,
}

/// One included state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRef<T> {
    pub channel: usize,
    /// Position in the channel's solved spectrum.
    pub index: usize,
    pub energy: T,
    pub class: StateClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingBlock<T> {
    /// Channel index of the rows.
    pub bra: usize,
    /// Channel index of the columns.
    pub ket: usize,
    pub gauge: Gauge,
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub data: Vec<T>,
}

impl<T: Real> CouplingBlock<T> {
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.cols + col]
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet<T> {
    pub theory: Theory,
    pub gauge: Gauge,
    pub include_ne: bool,
    pub channels: Vec<ChannelInfo>,
    pub states: Vec<StateRef<T>>,
    pub blocks: Vec<CouplingBlock<T>>,
    /// State-vector index of the ground state.
    pub initial: usize,
    /// `c` for Dirac velocity gauge, 1 otherwise.
    pub profile_scale: T,
    /// `max|M_ba − σ M_abᵀ| / max|M|` over blocks, with `σ = ±1` per gauge.
    pub hermiticity_residual: T,
}

impl<T: Real> CouplingSet<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn energies(&self) -> Vec<T> {
        self.states.iter().map(|s| s.energy).collect()
    }

    /// Scalar time profile `γ(t)` multiplying every stored block.
    pub fn profile(&self, field: T, vector_potential: T) -> Complex<T> {
        match self.gauge {
            Gauge::Length => Complex::new(field, T::zero()),
            Gauge::Velocity => Complex::new(T::zero(), -self.profile_scale * vector_potential),
        }
    }

    /// Dense Hermitian matrix `V(t)` for a given profile; meant for tests and
    /// small systems.
    pub fn dense(&self, gamma: Complex<T>) -> Vec<Complex<T>> {
        let n = self.len();
        let mut v = vec![Complex::new(T::zero(), T::zero()); n * n];
        for b in &self.blocks {
            let (ra, rb) = (self.channels[b.bra].offset, self.channels[b.ket].offset);
            for f in 0..b.rows {
                for i in 0..b.cols {
                    let m = b.get(f, i);
                    v[(ra + f) * n + rb + i] = gamma * m;
                    v[(rb + i) * n + ra + f] = gamma.conj() * m;
                }
            }
        }
        v
    }
}

/// Rows of state vectors for one channel.
struct ChannelStates<'a, T> {
    info: ChannelInfo,
    /// Dirac `P` or Schrödinger `u` coefficients.
    large: Vec<&'a [T]>,
    /// Dirac `Q` coefficients; empty for Schrödinger.
    small: Vec<&'a [T]>,
    refs: Vec<StateRef<T>>,
}

fn included(class: StateClass, include_ne: bool) -> bool {
    match class {
        StateClass::Spurious => false,
        StateClass::NegativeEnergy => include_ne,
        StateClass::Bound | StateClass::PositiveContinuum => true,
    }
}

fn collect_channels<'a, T: Real>(
    spectra: Spectra<'a, T>,
    include_ne: bool,
    j_or_l_max: i32,
) -> Result<(Vec<ChannelStates<'a, T>>, usize)> {
    let mut out = Vec::new();
    let mut offset = 0;
    let mut initial = None;
    match spectra {
        Spectra::Dirac(sp) => {
            if j_or_l_max < 1 || j_or_l_max % 2 == 0 {
                return Err(Error::Config(format!("j_max must be a half-integer, got {j_or_l_max}/2")));
            }
            let ground = sp.ground_state()?.energy;
            for ch in crate::rel_structure::enumerate_channels(j_or_l_max) {
                let spec = sp
                    .channel(ch.kappa)
                    .ok_or_else(|| Error::Config(format!("channel {ch} (κ = {}) was not solved", ch.kappa)))?;
                let idx = out.len();
                let mut cs = ChannelStates {
                    info: ChannelInfo {
                        label: ch.to_string(),
                        l: ch.l(),
                        two_j: ch.two_j(),
                        kappa: ch.kappa,
                        offset,
                        len: 0,
                    },
                    large: Vec::new(),
                    small: Vec::new(),
                    refs: Vec::new(),
                };
                for (k, s) in spec.states.iter().enumerate() {
                    if !included(s.class, include_ne) {
                        continue;
                    }
                    if ch.kappa == -1 && initial.is_none() && s.energy == ground {
                        initial = Some(offset + cs.refs.len());
                    }
                    cs.large.push(&s.p);
                    cs.small.push(&s.q);
                    cs.refs.push(StateRef { channel: idx, index: k, energy: s.energy, class: s.class });
                }
                cs.info.len = cs.refs.len();
                offset += cs.info.len;
                out.push(cs);
            }
        }
        Spectra::Schrodinger(sp) => {
            if j_or_l_max < 0 {
                return Err(Error::Config(format!("l_max must be nonnegative, got {j_or_l_max}")));
            }
            let ground = sp.ground_state()?.energy;
            for l in 0..=j_or_l_max as u32 {
                let spec = sp.channel(l).ok_or_else(|| Error::Config(format!("channel l = {l} was not solved")))?;
                let idx = out.len();
                const L: &[u8] = b"spdfghiklmnoqrtuv";
                let mut cs = ChannelStates {
                    info: ChannelInfo {
                        label: L.get(l as usize).map_or(format!("l{l}"), |&b| (b as char).to_string()),
                        l: l as i32,
                        two_j: 2 * l as i32,
                        kappa: 0,
                        offset,
                        len: spec.states.len(),
                    },
                    large: Vec::new(),
                    small: Vec::new(),
                    refs: Vec::new(),
                };
                for (k, s) in spec.states.iter().enumerate() {
                    if l == 0 && initial.is_none() && s.energy == ground {
                        initial = Some(offset + k);
                    }
                    cs.large.push(&s.coeffs);
                    cs.refs.push(StateRef { channel: idx, index: k, energy: s.energy, class: s.class });
                }
                offset += cs.info.len;
                out.push(cs);
            }
        }
    }
    let initial = initial.ok_or_else(|| Error::Internal("ground state missing from the index map".into()))?;
    Ok((out, initial))
}

/// Static matrix `M_ab` for bra channel `a` and ket channel `b`, or `None`
/// when the pair is not dipole coupled.
fn block_matrix<T: Real>(
    theory: Theory,
    gauge: Gauge,
    ops: &DipoleOperators<T>,
    velocity_nr: &[BandedMatrix<T>],
    a: &ChannelStates<'_, T>,
    b: &ChannelStates<'_, T>,
) -> Option<Vec<T>> {
    let (rows, cols) = (a.refs.len(), b.refs.len());
    match theory {
        Theory::Dirac => {
            let ka = crate::rel_structure::KappaChannel { kappa: a.info.kappa };
            let kb = crate::rel_structure::KappaChannel { kappa: b.info.kappa };
            let w = angular_rel(RelLabel::half(ka), RelLabel::half(kb));
            if !w.allowed() || w.exact.is_zero() {
                return None;
            }
            let w: T = w.get();
            Some(match gauge {
                Gauge::Length => bilinear_block(
                    &[(w, &a.large, &ops.position, &b.large), (w, &a.small, &ops.position, &b.small)],
                    rows,
                    cols,
                ),
                Gauge::Velocity => {
                    let d = T::of((a.info.kappa - b.info.kappa) as f64);
                    let one = T::one();
                    bilinear_block(
                        &[(w * (one - d), &a.large, &ops.overlap, &b.small), (-w * (one + d), &a.small, &ops.overlap, &b.large)],
                        rows,
                        cols,
                    )
                }
            })
        }
        Theory::Schrodinger => {
            let w = angular_nonrel(NonrelLabel { l: a.info.l, m: 0 }, NonrelLabel { l: b.info.l, m: 0 });
            if !w.allowed() || w.exact.is_zero() {
                return None;
            }
            let w: T = w.get();
            let m = match gauge {
                Gauge::Length => &ops.position,
                Gauge::Velocity => {
                    let (s, lambda) = velocity_branch(a.info.l as u32, b.info.l as u32);
                    let slot = if s > 0 { 2 * lambda as usize + 1 } else { 2 * lambda as usize };
                    &velocity_nr[slot]
                }
            };
            Some(bilinear_block(&[(w, &a.large, m, &b.large)], rows, cols))
        }
    }
}

/// Assembles the static couplings of every dipole-coupled channel pair up to
/// `j_or_l_max` (`2j_max` for Dirac, `l_max` for Schrödinger). Spurious
/// states are always dropped and negative-energy states unless
/// `include_ne`. Each block is also computed with bra and ket swapped and the
/// pair is checked against the Hermiticity of the full operator.
pub fn build_coupling<T: Real>(
    spectra: Spectra<'_, T>,
    basis: &RadialBasis<T>,
    gauge: Gauge,
    include_ne: bool,
    j_or_l_max: i32,
    constants: &PhysicalConstants,
) -> Result<CouplingSet<T>> {
    let theory = spectra.theory();
    if theory == Theory::Schrodinger && include_ne {
        return Err(Error::Config("include_ne applies only to the Dirac theory".into()));
    }
    let (channels, initial) = collect_channels(spectra, include_ne, j_or_l_max)?;
    let ops = DipoleOperators::new(basis)?;
    // `d/dr ∓ λ/r` for every λ that can occur, indexed 2λ (+1 for s = +1).
    let velocity_nr: Vec<BandedMatrix<T>> = if theory == Theory::Schrodinger && gauge == Gauge::Velocity {
        (0..=2 * (j_or_l_max.max(0) as u32 + 1) + 1)
            .map(|k| ops.velocity_nr(if k % 2 == 1 { 1 } else { -1 }, k / 2))
            .collect()
    } else {
        Vec::new()
    };

    let pairs: Vec<(usize, usize)> =
        (0..channels.len()).flat_map(|a| (a + 1..channels.len()).map(move |b| (a, b))).collect();
    let sigma = match gauge {
        Gauge::Length => T::one(),
        Gauge::Velocity => -T::one(),
    };
    let built: Vec<(CouplingBlock<T>, T)> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let forward = block_matrix(theory, gauge, &ops, &velocity_nr, &channels[a], &channels[b])?;
            let backward = block_matrix(theory, gauge, &ops, &velocity_nr, &channels[b], &channels[a])
                .expect("dipole selection rules are symmetric");
            let (rows, cols) = (channels[a].refs.len(), channels[b].refs.len());
            let mut residual = T::zero();
            for f in 0..rows {
                for i in 0..cols {
                    residual = residual.max((backward[i * rows + f] - sigma * forward[f * cols + i]).abs());
                }
            }
            Some((CouplingBlock { bra: a, ket: b, gauge, rows, cols, data: forward }, residual))
        })
        .collect();

    let scale = built.iter().fold(T::zero(), |m, (b, _)| m.max(b.max_abs()));
    let residual = built.iter().fold(T::zero(), |m, (_, r)| m.max(*r));
    let hermiticity_residual = if scale > T::zero() { residual / scale } else { T::zero() };
    if hermiticity_residual > T::of(1e-12) {
        return Err(Error::NotHermitian { residual: hermiticity_residual.to_f64_lossy(), scale: scale.to_f64_lossy() });
    }
    let profile_scale = match (theory, gauge) {
        (Theory::Dirac, Gauge::Velocity) => constants.c(),
        _ => T::one(),
    };
    Ok(CouplingSet {
        theory,
        gauge,
        include_ne,
        states: channels.iter().flat_map(|c| c.refs.iter().copied()).collect(),
        channels: channels.into_iter().map(|c| c.info).collect(),
        blocks: built.into_iter().map(|(b, _)| b).collect(),
        initial,
        profile_scale,
        hermiticity_residual,
    })
}
