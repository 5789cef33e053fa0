//! Config → basis → spectra → couplings → propagation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use tdde::bspline::RadialBasis;
use tdde::constants::PhysicalConstants;
use tdde::dipole::{build_coupling, cache, CouplingSet, Spectra, Theory};
use tdde::nonrel_structure::NonrelSpectra;
use tdde::observables::YieldReport;
use tdde::propagator::{propagate, Checkpoint, Manifest, PropagationStats};
use tdde::rel_structure::{ClassCounts, RelativisticSpectra, StateClass};

use crate::config::RunConfig;
use crate::error::CliError;

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "TDDE_THREADS";

/// Sizes the global pool from [`THREADS_ENV`] when set. Later calls are no-ops.
pub fn configure_threads() -> Result<usize, CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(CliError::Config(format!("{THREADS_ENV} must be positive")));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

pub enum Structure {
    Dirac(RelativisticSpectra<f64>),
    Schrodinger(NonrelSpectra<f64>),
}

impl Structure {
    pub fn spectra(&self) -> Spectra<'_, f64> {
        match self {
            Structure::Dirac(s) => Spectra::Dirac(s),
            Structure::Schrodinger(s) => Spectra::Schrodinger(s),
        }
    }
}

pub fn solve_structure(cfg: &RunConfig) -> Result<(RadialBasis<f64>, Structure), CliError> {
    let basis = RadialBasis::new(cfg.basis)?;
    let constants = PhysicalConstants::default();
    let structure = match cfg.theory {
        Theory::Dirac => Structure::Dirac(RelativisticSpectra::solve(&basis, cfg.z, cfg.angular_max, &constants)?),
        Theory::Schrodinger => Structure::Schrodinger(NonrelSpectra::solve(&basis, cfg.z, cfg.angular_max as u32)?),
    };
    Ok((basis, structure))
}

/// Builds the coupling set, through the on-disk cache when `cache_dir` is set.
pub fn couplings(cfg: &RunConfig) -> Result<CouplingSet<f64>, CliError> {
    let constants = PhysicalConstants::default();
    let key = cache::cache_key(&cfg.basis, cfg.z, cfg.theory, cfg.gauge, cfg.include_ne, cfg.angular_max, &constants);
    let path = cfg.cache_dir.as_ref().map(|d| d.join(format!("{key}.bin")));
    if let Some(p) = &path {
        if p.exists() {
            match cache::load(p, &key) {
                Ok(set) => return Ok(set),
                Err(e) => eprintln!("warning: ignoring unreadable coupling cache {}: {e}", p.display()),
            }
        }
    }
    let (basis, structure) = solve_structure(cfg)?;
    let set = build_coupling(structure.spectra(), &basis, cfg.gauge, cfg.include_ne, cfg.angular_max, &constants)?;
    if let Some(p) = &path {
        std::fs::create_dir_all(p.parent().unwrap_or(Path::new(".")))?;
        cache::save(&set, &key, p)?;
    }
    Ok(set)
}

/// Result document of one propagation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(rename = "yield")]
    pub ionization: f64,
    pub survival: f64,
    pub negative_energy: f64,
    pub report: YieldReport,
    pub stats: PropagationStats,
    pub checkpoints: Vec<Checkpoint>,
    pub manifest: Manifest,
    pub constants: PhysicalConstants,
    pub config_hash: String,
    /// Setup plus propagation.
    pub total_wall_seconds: f64,
}

pub fn run(cfg: &RunConfig) -> Result<RunRecord, CliError> {
    cfg.validate()?;
    let threads = configure_threads()?;
    let t0 = Instant::now();
    let pulse = cfg.pulse()?;
    let set = couplings(cfg)?;
    let result = propagate(&set, &pulse, set.initial, &cfg.settings)?;
    let mut manifest = result.manifest;
    manifest.threads = threads;
    manifest.inputs = cfg.to_map();
    Ok(RunRecord {
        ionization: result.report.ionization,
        survival: result.report.survival,
        negative_energy: result.report.negative_energy,
        report: result.report,
        stats: result.stats,
        checkpoints: result.checkpoints,
        manifest,
        constants: PhysicalConstants::default(),
        config_hash: cfg.hash(),
        total_wall_seconds: t0.elapsed().as_secs_f64(),
    })
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `<prefix>.json` and `<prefix>_populations.csv`.
pub fn output_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let s = prefix.to_string_lossy();
    (PathBuf::from(format!("{s}.json")), PathBuf::from(format!("{s}_populations.csv")))
}

pub fn write_run(record: &RunRecord, prefix: &Path) -> Result<(), CliError> {
    let (json, csv_path) = output_paths(prefix);
    if let Some(d) = json.parent() {
        std::fs::create_dir_all(d)?;
    }
    std::fs::write(&json, serde_json::to_string_pretty(record)?)?;
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["channel", "bound", "positive_continuum", "negative_energy"])?;
    for p in &record.report.per_channel {
        w.write_record([p.channel.clone(), fmt17(p.bound), fmt17(p.positive_continuum), fmt17(p.negative_energy)])?;
    }
    w.flush()?;
    Ok(())
}

/// Written in place of the result when propagation aborts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRecord {
    pub error: String,
    pub config_hash: String,
    pub inputs: BTreeMap<String, String>,
}

pub fn write_failure(cfg: &RunConfig, err: &CliError, prefix: &Path) -> Result<(), CliError> {
    let (json, _) = output_paths(prefix);
    if let Some(d) = json.parent() {
        std::fs::create_dir_all(d)?;
    }
    let rec = FailureRecord { error: err.to_string(), config_hash: cfg.hash(), inputs: cfg.to_map() };
    std::fs::write(json, serde_json::to_string_pretty(&rec)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub channel: String,
    pub index: usize,
    pub class: StateClass,
    pub energy_au: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub theory: Theory,
    pub z: f64,
    pub per_channel: BTreeMap<String, ClassCounts>,
    pub total: ClassCounts,
    /// Flagged and left out of the rows.
    pub spurious_removed: usize,
    pub ground_energy_au: f64,
}

const L_LETTERS: &[u8] = b"spdfghiklmnoqrtuv";

pub fn eigen(cfg: &RunConfig) -> Result<(Vec<EigenRow>, EigenSummary), CliError> {
    cfg.validate()?;
    configure_threads()?;
    let (_, structure) = solve_structure(cfg)?;
    let mut rows = Vec::new();
    let mut per_channel = BTreeMap::new();
    let mut push = |label: String, states: Vec<(StateClass, f64)>| {
        per_channel.insert(label.clone(), ClassCounts::tally(states.iter().map(|s| s.0)));
        let kept = states.into_iter().filter(|s| s.0 != StateClass::Spurious);
        rows.extend(kept.enumerate().map(|(index, (class, energy_au))| EigenRow { channel: label.clone(), index, class, energy_au }));
    };
    let ground = match &structure {
        Structure::Dirac(sp) => {
            for ch in &sp.channels {
                push(ch.channel.to_string(), ch.states.iter().map(|s| (s.class, s.energy)).collect());
            }
            sp.ground_state()?.energy
        }
        Structure::Schrodinger(sp) => {
            for ch in &sp.channels {
                let label = (L_LETTERS.get(ch.l as usize).copied().unwrap_or(b'?') as char).to_string();
                push(label, ch.states.iter().map(|s| (s.class, s.energy)).collect());
            }
            sp.ground_state()?.energy
        }
    };
    let mut total = ClassCounts::default();
    for c in per_channel.values() {
        total.bound += c.bound;
        total.positive_continuum += c.positive_continuum;
        total.negative_energy += c.negative_energy;
        total.spurious += c.spurious;
    }
    let summary = EigenSummary { theory: cfg.theory, z: cfg.z, spurious_removed: total.spurious, per_channel, total, ground_energy_au: ground };
    Ok((rows, summary))
}

pub fn write_eigen_csv(rows: &[EigenRow], out: impl std::io::Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["channel", "index", "class", "energy_au"])?;
    for r in rows {
        w.write_record([r.channel.clone(), r.index.to_string(), r.class.to_string(), fmt17(r.energy_au)])?;
    }
    w.flush()?;
    Ok(())
}
