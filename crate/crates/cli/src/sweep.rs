//! Single-axis parameter sweeps with a long-format, resumable CSV.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SweepSpec;
use crate::error::CliError;
use crate::run::{fmt17, run, RunRecord};

pub const COLUMNS: [&str; 14] = [
    "axis",
    "value",
    "hash",
    "status",
    "yield",
    "survival",
    "bound_excitation",
    "negative_energy",
    "norm",
    "steps",
    "rejected_steps",
    "rhs_evaluations",
    "max_norm_defect",
    "error",
];

/// One CSV row, kept as text so resumed rows are copied verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub hash: String,
    pub status: String,
    #[serde(rename = "yield")]
    pub ionization: String,
    pub survival: String,
    pub bound_excitation: String,
    pub negative_energy: String,
    pub norm: String,
    pub steps: String,
    pub rejected_steps: String,
    pub rhs_evaluations: String,
    pub max_norm_defect: String,
    pub error: String,
}

impl SweepRow {
    fn ok(axis: &str, value: f64, hash: String, r: &RunRecord) -> Self {
        Self {
            axis: axis.into(),
            value: fmt17(value),
            hash,
            status: "ok".into(),
            ionization: fmt17(r.report.ionization),
            survival: fmt17(r.report.survival),
            bound_excitation: fmt17(r.report.bound_excitation),
            negative_energy: fmt17(r.report.negative_energy),
            norm: fmt17(r.report.norm),
            steps: r.stats.steps.to_string(),
            rejected_steps: r.stats.rejected_steps.to_string(),
            rhs_evaluations: r.stats.rhs_evaluations.to_string(),
            max_norm_defect: fmt17(r.stats.max_norm_defect),
            error: String::new(),
        }
    }

    fn failed(axis: &str, value: f64, hash: String, e: &CliError) -> Self {
        let blank = String::new;
        Self {
            axis: axis.into(),
            value: fmt17(value),
            hash,
            status: "error".into(),
            ionization: blank(),
            survival: blank(),
            bound_excitation: blank(),
            negative_energy: blank(),
            norm: blank(),
            steps: blank(),
            rejected_steps: blank(),
            rhs_evaluations: blank(),
            max_norm_defect: blank(),
            error: e.to_string(),
        }
    }

    pub fn yield_value(&self) -> Option<f64> {
        self.ionization.parse().ok()
    }
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<SweepRow>, _>>()?)
}

fn write_rows(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    if let Some(d) = path.parent() {
        std::fs::create_dir_all(d)?;
    }
    let tmp = path.with_extension("csv.partial");
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&tmp)?;
        w.write_record(COLUMNS)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    std::fs::rename(tmp, path)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub computed: usize,
    pub reused: usize,
    pub failed: usize,
}

/// Runs every grid point not already completed in `out`. The file is
/// rewritten in axis order after each point, so an interrupted sweep leaves
/// a valid CSV that a second call completes. `limit` caps the number of
/// points computed in this call.
pub fn run_sweep(spec: &SweepSpec, out: &Path, limit: Option<usize>) -> Result<SweepSummary, CliError> {
    spec.validate()?;
    let points = spec.values.iter().map(|v| Ok((*v, spec.point(*v)?))).collect::<Result<Vec<_>, CliError>>()?;
    let done: BTreeMap<String, SweepRow> = if out.exists() {
        read_rows(out)?.into_iter().filter(|r| r.status == "ok").map(|r| (r.hash.clone(), r)).collect()
    } else {
        BTreeMap::new()
    };
    let axis = spec.axis.key();
    let mut slots: Vec<Option<SweepRow>> = points.iter().map(|(_, c)| done.get(&c.hash()).cloned()).collect();
    let reused = slots.iter().filter(|s| s.is_some()).count();
    let todo: Vec<usize> = (0..points.len()).filter(|k| slots[*k].is_none()).take(limit.unwrap_or(usize::MAX)).collect();
    write_rows(out, &slots.iter().flatten().cloned().collect::<Vec<_>>())?;

    let writer = Mutex::new((&mut slots, SweepSummary { reused, ..Default::default() }));
    let work = |k: &usize| -> Result<(), CliError> {
        let (v, cfg) = &points[*k];
        let row = match run(cfg) {
            Ok(r) => SweepRow::ok(axis, *v, cfg.hash(), &r),
            Err(e) => SweepRow::failed(axis, *v, cfg.hash(), &e),
        };
        let mut guard = writer.lock().expect("sweep writer poisoned");
        let (slots, summary) = &mut *guard;
        if row.status == "ok" {
            summary.computed += 1;
        } else {
            summary.failed += 1;
        }
        slots[*k] = Some(row);
        write_rows(out, &slots.iter().flatten().cloned().collect::<Vec<_>>())
    };
    if spec.parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(spec.parallelism).build().map_err(|e| CliError::Config(e.to_string()))?;
        pool.install(|| todo.par_iter().try_for_each(work))?;
    } else {
        todo.iter().try_for_each(work)?;
    }
    let (_, summary) = writer.into_inner().expect("sweep writer poisoned");
    Ok(summary)
}
