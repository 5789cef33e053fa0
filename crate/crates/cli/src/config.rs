//! Flat `key = value` run configuration.
//!
//! The grammar is the scalar subset of TOML: one key per line, `#` comments,
//! strings in double quotes, and a single array-valued key (`sweep_values`)
//! for sweep files. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tdde::bspline::BasisParams;
use tdde::constants::PhysicalConstants;
use tdde::dipole::{Gauge, Theory};
use tdde::propagator::PropagationSettings;
use tdde::pulse::{wavelength_to_omega, PulseParams};
use toml::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Photon {
    EnergyAu(f64),
    WavelengthNm(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Strength {
    IntensityWcm2(f64),
    FieldAu(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub theory: Theory,
    pub z: f64,
    pub gauge: Gauge,
    pub include_ne: bool,
    /// `2 j_max` (Dirac) or `l_max` (Schrödinger).
    pub angular_max: i32,
    pub basis: BasisParams,
    pub cycles: u32,
    pub photon: Photon,
    pub strength: Strength,
    pub settings: PropagationSettings,
    pub output: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

pub const DEFAULT_BASIS_N: usize = 200;
pub const DEFAULT_BASIS_K: usize = 9;
pub const DEFAULT_N_GEOM: usize = 60;
pub const DEFAULT_RATIO: f64 = 1.2;

const RUN_KEYS: &[&str] = &[
    "theory",
    "z",
    "gauge",
    "include_ne",
    "j_max",
    "l_max",
    "basis_n",
    "basis_k",
    "basis_radius",
    "basis_n_geom",
    "basis_ratio",
    "cycles",
    "photon_energy_au",
    "wavelength_nm",
    "intensity_wcm2",
    "field_au",
    "rtol",
    "atol",
    "max_step",
    "max_order",
    "max_steps",
    "output",
    "cache_dir",
];

const SWEEP_KEYS: &[&str] = &["sweep_axis", "sweep_values", "sweep_parallelism"];

fn bad(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {msg}"))
}

/// Parsed but not yet interpreted key/value pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTable(BTreeMap<String, Value>);

impl FlatTable {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        let mut out = BTreeMap::new();
        for (k, v) in table {
            match &v {
                Value::Table(_) => return Err(bad(&k, "nested tables are not allowed")),
                Value::Array(a) if a.iter().any(|x| matches!(x, Value::Array(_) | Value::Table(_))) => {
                    return Err(bad(&k, "arrays must hold scalars"))
                }
                _ => {}
            }
            out.insert(k, v);
        }
        Ok(Self(out))
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.0.remove(key)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(x)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(v) => Err(bad(key, format!("expected a number, got {v}"))),
        }
    }

    fn uint(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            Some(v) => Err(bad(key, format!("expected a nonnegative integer, got {v}"))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(bad(key, format!("expected a string, got {v}"))),
        }
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(b)),
            Some(v) => Err(bad(key, format!("expected true or false, got {v}"))),
        }
    }

    fn reject_rest(self) -> Result<(), CliError> {
        match self.0.keys().next() {
            None => Ok(()),
            Some(k) if RUN_KEYS.contains(&k.as_str()) || SWEEP_KEYS.contains(&k.as_str()) => Err(bad(k, "not allowed here")),
            Some(k) => Err(bad(k, "unknown key")),
        }
    }
}

/// Parses `"11/2"`, `"5.5"` or `5.5` into `2j`.
pub fn parse_two_j(v: &Value) -> Result<i32, CliError> {
    let twice = match v {
        Value::String(s) => match s.split_once('/') {
            Some((num, "2")) => num.trim().parse::<i32>().map_err(|e| bad("j_max", e))?,
            Some(_) => return Err(bad("j_max", format!("expected n/2, got {s}"))),
            None => {
                let x: f64 = s.trim().parse().map_err(|e| bad("j_max", e))?;
                (2.0 * x).round() as i32
            }
        },
        Value::Float(x) => {
            if (2.0 * x).fract() != 0.0 {
                return Err(bad("j_max", format!("{x} is not a half-integer")));
            }
            (2.0 * x) as i32
        }
        v => return Err(bad("j_max", format!("expected a half-integer, got {v}"))),
    };
    if twice < 1 || twice % 2 == 0 {
        return Err(bad("j_max", format!("must be a half-integer ≥ 1/2, got {twice}/2")));
    }
    Ok(twice)
}

fn exactly_one<T>(a: Option<T>, ka: &str, b: Option<T>, kb: &str) -> Result<Result<T, T>, CliError> {
    match (a, b) {
        (Some(x), None) => Ok(Ok(x)),
        (None, Some(y)) => Ok(Err(y)),
        (Some(_), Some(_)) => Err(bad(ka, format!("conflicts with `{kb}`; give exactly one"))),
        (None, None) => Err(bad(ka, format!("missing; give exactly one of `{ka}` and `{kb}`"))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut t = FlatTable::parse(text)?;
        let cfg = Self::from_table(&mut t)?;
        t.reject_rest()?;
        Ok(cfg)
    }

    fn from_table(t: &mut FlatTable) -> Result<Self, CliError> {
        let theory: Theory = t.string("theory")?.ok_or_else(|| bad("theory", "missing"))?.parse().map_err(|e| bad("theory", e))?;
        let z = t.float("z")?.ok_or_else(|| bad("z", "missing"))?;
        let gauge: Gauge = match t.string("gauge")? {
            Some(g) => g.parse().map_err(|e| bad("gauge", e))?,
            None => Gauge::Length,
        };
        let include_ne = t.boolean("include_ne")?;
        let j_max = t.take("j_max").map(|v| parse_two_j(&v)).transpose()?;
        let l_max = t.uint("l_max")?;
        let angular_max = match theory {
            Theory::Dirac => {
                if l_max.is_some() {
                    return Err(bad("l_max", "not allowed for theory = \"dirac\"; use `j_max`"));
                }
                j_max.unwrap_or(1)
            }
            Theory::Schrodinger => {
                if include_ne.is_some() {
                    return Err(bad("include_ne", "not allowed for theory = \"schrodinger\""));
                }
                if j_max.is_some() {
                    return Err(bad("j_max", "not allowed for theory = \"schrodinger\"; use `l_max`"));
                }
                l_max.unwrap_or(1) as i32
            }
        };
        let usize_or = |t: &mut FlatTable, k: &str, d: usize| -> Result<usize, CliError> { Ok(t.uint(k)?.map_or(d, |v| v as usize)) };
        let basis = BasisParams {
            n: usize_or(t, "basis_n", DEFAULT_BASIS_N)?,
            k: usize_or(t, "basis_k", DEFAULT_BASIS_K)?,
            radius: t.float("basis_radius")?.unwrap_or(250.0 / z),
            n_geom: usize_or(t, "basis_n_geom", DEFAULT_N_GEOM)?,
            ratio: t.float("basis_ratio")?.unwrap_or(DEFAULT_RATIO),
        };
        let cycles = t.uint("cycles")?.map_or(20, |c| c as u32);
        let photon = match exactly_one(t.float("photon_energy_au")?, "photon_energy_au", t.float("wavelength_nm")?, "wavelength_nm")? {
            Ok(e) => Photon::EnergyAu(e),
            Err(l) => Photon::WavelengthNm(l),
        };
        let strength = match exactly_one(t.float("intensity_wcm2")?, "intensity_wcm2", t.float("field_au")?, "field_au")? {
            Ok(i) => Strength::IntensityWcm2(i),
            Err(f) => Strength::FieldAu(f),
        };
        let defaults = PropagationSettings::default();
        let settings = PropagationSettings {
            rtol: t.float("rtol")?.unwrap_or(defaults.rtol),
            atol: t.float("atol")?.unwrap_or(defaults.atol),
            max_step: t.float("max_step")?,
            max_order: usize_or(t, "max_order", defaults.max_order)?,
            max_steps: t.uint("max_steps")?.unwrap_or(defaults.max_steps),
            ..defaults
        };
        let cfg = Self {
            theory,
            z,
            gauge,
            include_ne: include_ne.unwrap_or(false),
            angular_max,
            basis,
            cycles,
            photon,
            strength,
            settings,
            output: t.string("output")?.map(PathBuf::from),
            cache_dir: t.string("cache_dir")?.map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(bad("z", format!("must be positive, got {}", self.z)));
        }
        if self.theory == Theory::Dirac {
            let c = PhysicalConstants::default().c;
            if self.z >= c {
                return Err(bad("z", format!("Z = {} reaches c; the point-nucleus Dirac problem has no bound state", self.z)));
            }
            if self.angular_max < 1 || self.angular_max % 2 == 0 {
                return Err(bad("j_max", format!("must be a half-integer ≥ 1/2, got {}/2", self.angular_max)));
            }
        } else if self.include_ne {
            return Err(bad("include_ne", "not allowed for theory = \"schrodinger\""));
        }
        if self.basis.k < 2 || self.basis.n < 2 {
            return Err(bad("basis_n", "basis needs n ≥ 2 and k ≥ 2"));
        }
        if !(self.basis.radius > 0.0) {
            return Err(bad("basis_radius", "must be positive"));
        }
        if !(self.basis.ratio >= 1.0) {
            return Err(bad("basis_ratio", "must be at least 1"));
        }
        if self.cycles == 0 {
            return Err(bad("cycles", "must be at least 1"));
        }
        match self.photon {
            Photon::EnergyAu(e) if !(e > 0.0 && e.is_finite()) => return Err(bad("photon_energy_au", "must be positive")),
            Photon::WavelengthNm(l) if !(l > 0.0 && l.is_finite()) => return Err(bad("wavelength_nm", "must be positive")),
            _ => {}
        }
        match self.strength {
            Strength::IntensityWcm2(i) if !(i >= 0.0 && i.is_finite()) => return Err(bad("intensity_wcm2", "must be nonnegative")),
            Strength::FieldAu(f) if !(f >= 0.0 && f.is_finite()) => return Err(bad("field_au", "must be nonnegative")),
            _ => {}
        }
        self.settings.validate().map_err(|e| {
            let msg = e.to_string();
            let key = ["rtol", "atol", "max_order", "max_step"].into_iter().find(|k| msg.contains(k)).unwrap_or("rtol");
            bad(key, msg)
        })
    }

    pub fn omega(&self) -> f64 {
        match self.photon {
            Photon::EnergyAu(e) => e,
            Photon::WavelengthNm(l) => wavelength_to_omega(l),
        }
    }

    pub fn pulse(&self) -> Result<PulseParams, CliError> {
        let omega = self.omega();
        match self.strength {
            Strength::IntensityWcm2(i) => PulseParams::from_intensity(self.cycles, omega, i),
            Strength::FieldAu(f) => PulseParams::from_field(self.cycles, omega, f),
        }
        .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Canonical flat map; every key is written, defaults included.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("theory", format!("\"{}\"", self.theory));
        put("z", float(self.z));
        put("gauge", format!("\"{}\"", self.gauge));
        match self.theory {
            Theory::Dirac => {
                put("include_ne", self.include_ne.to_string());
                put("j_max", format!("\"{}/2\"", self.angular_max));
            }
            Theory::Schrodinger => put("l_max", self.angular_max.to_string()),
        }
        put("basis_n", self.basis.n.to_string());
        put("basis_k", self.basis.k.to_string());
        put("basis_radius", float(self.basis.radius));
        put("basis_n_geom", self.basis.n_geom.to_string());
        put("basis_ratio", float(self.basis.ratio));
        put("cycles", self.cycles.to_string());
        match self.photon {
            Photon::EnergyAu(e) => put("photon_energy_au", float(e)),
            Photon::WavelengthNm(l) => put("wavelength_nm", float(l)),
        }
        match self.strength {
            Strength::IntensityWcm2(i) => put("intensity_wcm2", float(i)),
            Strength::FieldAu(f) => put("field_au", float(f)),
        }
        put("rtol", float(self.settings.rtol));
        put("atol", float(self.settings.atol));
        if let Some(h) = self.settings.max_step {
            put("max_step", float(h));
        }
        put("max_order", self.settings.max_order.to_string());
        put("max_steps", self.settings.max_steps.to_string());
        if let Some(p) = &self.output {
            put("output", quote(&p.to_string_lossy()));
        }
        if let Some(p) = &self.cache_dir {
            put("cache_dir", quote(&p.to_string_lossy()));
        }
        m
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_map() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of the physics inputs (output paths excluded).
    pub fn hash(&self) -> String {
        let mut m = self.to_map();
        m.remove("output");
        m.remove("cache_dir");
        let text: String = m.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Shortest round-trip form that TOML reads back as a float.
fn float(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    WavelengthNm,
    PhotonEnergyAu,
    JMax,
    Z,
    IntensityWcm2,
}

impl SweepAxis {
    pub fn key(&self) -> &'static str {
        match self {
            SweepAxis::WavelengthNm => "wavelength_nm",
            SweepAxis::PhotonEnergyAu => "photon_energy_au",
            SweepAxis::JMax => "j_max",
            SweepAxis::Z => "z",
            SweepAxis::IntensityWcm2 => "intensity_wcm2",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "wavelength_nm" | "wavelength" => SweepAxis::WavelengthNm,
            "photon_energy_au" | "photon_energy" => SweepAxis::PhotonEnergyAu,
            "j_max" => SweepAxis::JMax,
            "z" => SweepAxis::Z,
            "intensity_wcm2" | "intensity" => SweepAxis::IntensityWcm2,
            _ => return Err(bad("sweep_axis", format!("unknown axis `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub axis: SweepAxis,
    /// Axis values; `j_max` is stored as `j` (e.g. 5.5).
    pub values: Vec<f64>,
    pub parallelism: usize,
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut t = FlatTable::parse(text)?;
        let axis = SweepAxis::parse(&t.string("sweep_axis")?.ok_or_else(|| bad("sweep_axis", "missing"))?)?;
        let values = match t.take("sweep_values") {
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match (axis, v) {
                    (SweepAxis::JMax, v) => parse_two_j(v).map(|tj| tj as f64 / 2.0),
                    (_, Value::Float(x)) => Ok(*x),
                    (_, Value::Integer(i)) => Ok(*i as f64),
                    (_, v) => Err(bad("sweep_values", format!("expected numbers, got {v}"))),
                })
                .collect::<Result<Vec<_>, _>>()?,
            Some(v) => return Err(bad("sweep_values", format!("expected an array, got {v}"))),
            None => return Err(bad("sweep_values", "missing")),
        };
        let parallelism = t.uint("sweep_parallelism")?.map_or(1, |p| p.max(1) as usize);
        // The axis key may be absent from the base; fill it from the first point.
        if !t.0.contains_key(axis.key()) {
            if let Some(v) = values.first() {
                let filler = match axis {
                    SweepAxis::JMax => Value::String(format!("{}/2", (2.0 * v) as i32)),
                    _ => Value::Float(*v),
                };
                t.0.insert(axis.key().to_string(), filler);
            }
        }
        let base = RunConfig::from_table(&mut t)?;
        t.reject_rest()?;
        let spec = Self { base, axis, values, parallelism };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.values.is_empty() {
            return Err(bad("sweep_values", "grid is empty"));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(bad("sweep_values", "grid must be strictly increasing"));
        }
        for v in &self.values {
            self.point(*v)?;
        }
        Ok(())
    }

    /// The run configuration at one grid value.
    pub fn point(&self, v: f64) -> Result<RunConfig, CliError> {
        let mut c = self.base.clone();
        match self.axis {
            SweepAxis::WavelengthNm => c.photon = Photon::WavelengthNm(v),
            SweepAxis::PhotonEnergyAu => c.photon = Photon::EnergyAu(v),
            SweepAxis::IntensityWcm2 => c.strength = Strength::IntensityWcm2(v),
            SweepAxis::JMax => {
                if c.theory != Theory::Dirac {
                    return Err(bad("sweep_axis", "j_max sweeps need theory = \"dirac\""));
                }
                if (2.0 * v).fract() != 0.0 {
                    return Err(bad("sweep_values", format!("{v} is not a half-integer")));
                }
                c.angular_max = (2.0 * v) as i32;
            }
            SweepAxis::Z => {
                // Keep the box scaled with Z when it was defaulted.
                if (c.basis.radius - 250.0 / c.z).abs() <= 1e-12 * c.basis.radius {
                    c.basis.radius = 250.0 / v;
                }
                c.z = v;
            }
        }
        c.validate()?;
        Ok(c)
    }
}
