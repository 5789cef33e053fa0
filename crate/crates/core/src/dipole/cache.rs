//! Versioned binary cache of a [`CouplingSet`], keyed by a SHA-256 of every
//! input that determines it.
//!
//! Layout (little endian): magic `TDDECPL1`, `u32` version, 64 hex bytes of
//! key, then the set. Floats are stored as `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::bspline::BasisParams;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rel_structure::StateClass;

use super::coupling::{ChannelInfo, CouplingBlock, CouplingSet, Gauge, StateRef, Theory};

const MAGIC: &[u8; 8] = b"TDDECPL1";
pub const CACHE_VERSION: u32 = 1;

/// Hex SHA-256 over the inputs of [`super::build_coupling`].
pub fn cache_key(
    basis: &BasisParams,
    z: f64,
    theory: Theory,
    gauge: Gauge,
    include_ne: bool,
    j_or_l_max: i32,
    constants: &PhysicalConstants,
) -> String {
    let text = format!(
        "v{CACHE_VERSION};n={};k={};R={:e};ng={};g={:e};Z={:e};{theory};{gauge};ne={include_ne};max={j_or_l_max};c={:e}",
        basis.n, basis.k, basis.radius, basis.n_geom, basis.ratio, z, constants.c
    );
    hex::encode(Sha256::digest(text.as_bytes()))
}

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.0.write_all(b).map_err(Error::from)
    }
    fn u8(&mut self, v: u8) -> Result<()> {
        self.bytes(&[v])
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn i32(&mut self, v: i32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn u64(&mut self, v: usize) -> Result<()> {
        self.bytes(&(v as u64).to_le_bytes())
    }
    fn f64(&mut self, v: f64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b).map_err(|e| Error::Cache(format!("truncated cache file: {e}")))?;
        Ok(b)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<usize> {
        usize::try_from(u64::from_le_bytes(self.bytes()?)).map_err(|_| Error::Cache("length overflow".into()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
}

fn class_code(c: StateClass) -> u8 {
    match c {
        StateClass::Bound => 0,
        StateClass::PositiveContinuum => 1,
        StateClass::NegativeEnergy => 2,
        StateClass::Spurious => 3,
    }
}

fn class_from(code: u8) -> Result<StateClass> {
    Ok(match code {
        0 => StateClass::Bound,
        1 => StateClass::PositiveContinuum,
        2 => StateClass::NegativeEnergy,
        3 => StateClass::Spurious,
        _ => return Err(Error::Cache(format!("bad state class {code}"))),
    })
}

pub fn save<T: Real>(set: &CouplingSet<T>, key: &str, path: &Path) -> Result<()> {
    let mut w = Writer(BufWriter::new(File::create(path)?));
    w.bytes(MAGIC)?;
    w.u32(CACHE_VERSION)?;
    w.u64(key.len())?;
    w.bytes(key.as_bytes())?;
    w.u8(match set.theory {
        Theory::Dirac => 0,
        Theory::Schrodinger => 1,
    })?;
    w.u8(match set.gauge {
        Gauge::Length => 0,
        Gauge::Velocity => 1,
    })?;
    w.u8(set.include_ne as u8)?;
    w.u64(set.initial)?;
    w.f64(set.profile_scale.to_f64_lossy())?;
    w.f64(set.hermiticity_residual.to_f64_lossy())?;
    w.u64(set.channels.len())?;
    for ch in &set.channels {
        w.u64(ch.label.len())?;
        w.bytes(ch.label.as_bytes())?;
        w.i32(ch.l)?;
        w.i32(ch.two_j)?;
        w.i32(ch.kappa)?;
        w.u64(ch.offset)?;
        w.u64(ch.len)?;
    }
    w.u64(set.states.len())?;
    for s in &set.states {
        w.u64(s.channel)?;
        w.u64(s.index)?;
        w.f64(s.energy.to_f64_lossy())?;
        w.u8(class_code(s.class))?;
    }
    w.u64(set.blocks.len())?;
    for b in &set.blocks {
        w.u64(b.bra)?;
        w.u64(b.ket)?;
        w.u64(b.rows)?;
        w.u64(b.cols)?;
        for v in &b.data {
            w.f64(v.to_f64_lossy())?;
        }
    }
    w.0.flush()?;
    Ok(())
}

/// Loads a cached set; fails with [`Error::Cache`] when the file was written
/// for another key or format version.
pub fn load<T: Real>(path: &Path, key: &str) -> Result<CouplingSet<T>> {
    let mut r = Reader(BufReader::new(File::open(path)?));
    if &r.bytes::<8>()? != MAGIC {
        return Err(Error::Cache("not a coupling cache file".into()));
    }
    let version = r.u32()?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("cache version {version}, expected {CACHE_VERSION}")));
    }
    let klen = r.u64()?;
    let mut stored = vec![0u8; klen.min(1024)];
    r.0.read_exact(&mut stored).map_err(|e| Error::Cache(e.to_string()))?;
    if stored != key.as_bytes() {
        return Err(Error::Cache("cache key mismatch".into()));
    }
    let theory = match r.u8()? {
        0 => Theory::Dirac,
        1 => Theory::Schrodinger,
        t => return Err(Error::Cache(format!("bad theory tag {t}"))),
    };
    let gauge = match r.u8()? {
        0 => Gauge::Length,
        1 => Gauge::Velocity,
        g => return Err(Error::Cache(format!("bad gauge tag {g}"))),
    };
    let include_ne = r.u8()? != 0;
    let initial = r.u64()?;
    let profile_scale = T::of(r.f64()?);
    let hermiticity_residual = T::of(r.f64()?);
    let nch = r.u64()?;
    let mut channels = Vec::with_capacity(nch.min(1 << 16));
    for _ in 0..nch {
        let len = r.u64()?;
        let mut label = vec![0u8; len.min(256)];
        r.0.read_exact(&mut label).map_err(|e| Error::Cache(e.to_string()))?;
        channels.push(ChannelInfo {
            label: String::from_utf8(label).map_err(|e| Error::Cache(e.to_string()))?,
            l: r.i32()?,
            two_j: r.i32()?,
            kappa: r.i32()?,
            offset: r.u64()?,
            len: r.u64()?,
        });
    }
    let ns = r.u64()?;
    let mut states = Vec::with_capacity(ns.min(1 << 24));
    for _ in 0..ns {
        states.push(StateRef { channel: r.u64()?, index: r.u64()?, energy: T::of(r.f64()?), class: class_from(r.u8()?)? });
    }
    let nb = r.u64()?;
    let mut blocks = Vec::with_capacity(nb.min(1 << 16));
    for _ in 0..nb {
        let (bra, ket, rows, cols) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?);
        let data = (0..rows * cols).map(|_| r.f64().map(T::of)).collect::<Result<Vec<_>>>()?;
        blocks.push(CouplingBlock { bra, ket, gauge, rows, cols, data });
    }
    Ok(CouplingSet { theory, gauge, include_ne, channels, states, blocks, initial, profile_scale, hermiticity_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::RadialBasis;
    use crate::dipole::{build_coupling, Spectra};
    use crate::nonrel_structure::NonrelSpectra;

    #[test]
    fn round_trip_and_key_checks() {
        let params = BasisParams::scaled_box(1.0, 40, 6, 10, 1.1);
        let basis = RadialBasis::new(params).unwrap();
        let sp = NonrelSpectra::solve(&basis, 1.0, 2).unwrap();
        let c = PhysicalConstants::default();
        let set = build_coupling(Spectra::Schrodinger(&sp), &basis, Gauge::Velocity, false, 2, &c).unwrap();
        let key = cache_key(&params, 1.0, Theory::Schrodinger, Gauge::Velocity, false, 2, &c);
        let other = cache_key(&params, 1.0, Theory::Schrodinger, Gauge::Length, false, 2, &c);
        assert_ne!(key, other);
        assert_eq!(key.len(), 64);
        let dir = std::env::temp_dir().join(format!("tdde-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("set.bin");
        save(&set, &key, &path).unwrap();
        let back: CouplingSet<f64> = load(&path, &key).unwrap();
        assert_eq!(back, set);
        assert!(matches!(load::<f64>(&path, &other), Err(Error::Cache(_))));
        std::fs::write(&path, b"garbage").unwrap();
        assert!(matches!(load::<f64>(&path, &key), Err(Error::Cache(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
