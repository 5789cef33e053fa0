//! Time propagation of the spectral coefficients through the pulse.

pub mod adams;
mod rhs;

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dipole::{CouplingSet, Gauge, Theory};
use crate::error::{Error, Result};
use crate::observables::{ionization_yield, YieldReport};
use crate::pulse::{FieldProfile, PulseParams};
use crate::real::Real;

pub use adams::{Adams, StepFailure, Tolerances, MAX_ORDER};
pub use rhs::{rhs, CouplingRhs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_order: usize,
    /// Upper bound on the step (a.u.); unbounded when `None`.
    pub max_step: Option<f64>,
    /// Store the full coefficient vector at every checkpoint.
    pub dense_output: bool,
    pub max_steps: u64,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_order: MAX_ORDER, max_step: None, dense_output: false, max_steps: 20_000_000 }
    }
}

impl PropagationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(1e-12..=1e-4).contains(&self.rtol) {
            return Err(Error::Config(format!("rtol must lie in [1e-12, 1e-4], got {:e}", self.rtol)));
        }
        if !(self.atol > 0.0 && self.atol.is_finite()) {
            return Err(Error::Config(format!("atol must be positive, got {:e}", self.atol)));
        }
        if !(1..=MAX_ORDER).contains(&self.max_order) {
            return Err(Error::Config(format!("max_order must lie in [1, {MAX_ORDER}], got {}", self.max_order)));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::Config(format!("max_step must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    pub time: T,
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Diagnostics recorded once per carrier period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub time: f64,
    pub norm: f64,
    pub survival: f64,
    pub bound: f64,
    pub positive_continuum: f64,
    pub negative_energy: f64,
    /// `(re, im)` pairs when dense output is on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    pub steps: u64,
    pub rejected_steps: u64,
    pub rhs_evaluations: u64,
    pub wall_seconds: f64,
    pub final_order: usize,
    /// `max |Σ|C|² − 1|` over checkpoints and the final state.
    pub max_norm_defect: f64,
}

/// Everything needed to rerun a propagation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub threads: usize,
    pub theory: Theory,
    pub gauge: Gauge,
    pub include_ne: bool,
    pub states: usize,
    pub channels: Vec<String>,
    pub initial_state: usize,
    pub pulse: PulseParams,
    pub settings: PropagationSettings,
    pub hermiticity_residual: f64,
    /// Flat configuration the run was built from, when driven by one.
    pub inputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct RunResult<T> {
    pub state: StateVector<T>,
    pub report: YieldReport,
    pub checkpoints: Vec<Checkpoint>,
    pub stats: PropagationStats,
    pub manifest: Manifest,
}

fn checkpoint<T: Real>(time: T, c: &[Complex<T>], couplings: &CouplingSet<T>, dense: bool) -> Result<Checkpoint> {
    let r = ionization_yield(c, couplings)?;
    Ok(Checkpoint {
        time: time.to_f64_lossy(),
        norm: r.norm,
        survival: r.survival,
        bound: r.survival + r.bound_excitation,
        positive_continuum: r.ionization,
        negative_energy: r.negative_energy,
        coeffs: dense.then(|| c.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect()),
    })
}

/// Integrates `c0` from `t0` to `t1` under `profile`, recording a
/// checkpoint at each of `marks` (ascending, inside the interval) and at `t1`.
pub fn evolve<T: Real>(
    couplings: &CouplingSet<T>,
    profile: &dyn FieldProfile,
    t0: T,
    t1: T,
    c0: Vec<Complex<T>>,
    marks: &[T],
    settings: &PropagationSettings,
) -> Result<(StateVector<T>, Vec<Checkpoint>, PropagationStats)> {
    settings.validate()?;
    let n = couplings.len();
    if c0.len() != n {
        return Err(Error::Internal(format!("{} coefficients for {} states", c0.len(), n)));
    }
    let wall = Instant::now();
    let max_step = settings.max_step.unwrap_or(f64::INFINITY);
    let tol = Tolerances { rtol: settings.rtol, atol: settings.atol, max_order: settings.max_order, max_step };
    // The pulse starts with zero field and slope, so the first step must not
    // be sized from the initial derivative alone.
    let mut stepper = Adams::new(t0, c0, T::of(1e-4) * (t1 - t0), tol);
    let mut f = CouplingRhs::new(couplings, profile);
    let mut eval = |t: T, y: &[Complex<T>], d: &mut [Complex<T>]| f.eval(t, y, d);

    let mut next_mark = 0;
    let mut checkpoints = Vec::with_capacity(marks.len() + 1);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); n];
    let mut max_defect = 0.0f64;
    // Steps are shortened to land exactly on t1.
    let landing = T::of(1e-12) * (t1 - t0);

    while t1 - stepper.x > landing {
        if stepper.steps >= settings.max_steps {
            return Err(Error::Propagation {
                t: stepper.x.to_f64_lossy(),
                reason: format!("step budget of {} exhausted", settings.max_steps),
            });
        }
        let remaining = t1 - stepper.x;
        if stepper.h > remaining {
            stepper.h = remaining;
        }
        stepper.step(&mut eval).map_err(|failure| Error::Propagation {
            t: stepper.x.to_f64_lossy(),
            reason: match failure {
                StepFailure::StepUnderflow => format!(
                    "step size underflow after {} steps (last h = {:e}); the system is too stiff for the tolerance, \
                     set a smaller max_step or use the length gauge",
                    stepper.steps,
                    stepper.h.to_f64_lossy()
                ),
                StepFailure::ToleranceTooSmall => "rtol/atol are below what rounding permits; loosen them".into(),
            },
        })?;
        while next_mark < marks.len() && marks[next_mark] <= stepper.x {
            stepper.interpolate(marks[next_mark], &mut scratch);
            let cp = checkpoint(marks[next_mark], &scratch, couplings, settings.dense_output)?;
            max_defect = max_defect.max((cp.norm - 1.0).abs());
            checkpoints.push(cp);
            next_mark += 1;
        }
    }
    let final_cp = checkpoint(t1, &stepper.y, couplings, settings.dense_output)?;
    max_defect = max_defect.max((final_cp.norm - 1.0).abs());
    checkpoints.push(final_cp);
    let stats = PropagationStats {
        steps: stepper.steps,
        rejected_steps: stepper.rejected,
        rhs_evaluations: stepper.rhs_evals,
        wall_seconds: wall.elapsed().as_secs_f64(),
        final_order: stepper.order(),
        max_norm_defect: max_defect,
    };
    Ok((StateVector { time: t1, coeffs: stepper.y }, checkpoints, stats))
}

/// Integrates from `−T/2` to `T/2` starting from the state `initial` of the
/// coupling index map, with a checkpoint after every carrier period.
pub fn propagate<T: Real>(
    couplings: &CouplingSet<T>,
    pulse: &PulseParams,
    initial: usize,
    settings: &PropagationSettings,
) -> Result<RunResult<T>> {
    let n = couplings.len();
    if initial >= n {
        return Err(Error::Config(format!("initial state {initial} is outside the index map of {n} states")));
    }
    let mut c0 = vec![Complex::new(T::zero(), T::zero()); n];
    c0[initial] = Complex::new(T::one(), T::zero());
    let marks: Vec<T> = (1..pulse.cycles).map(|k| T::of(pulse.start() + k as f64 * pulse.period())).collect();
    let (state, checkpoints, stats) =
        evolve(couplings, pulse, T::of(pulse.start()), T::of(pulse.end()), c0, &marks, settings)?;
    let report = ionization_yield(&state.coeffs, couplings)?;
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        threads: rayon::current_num_threads(),
        theory: couplings.theory,
        gauge: couplings.gauge,
        include_ne: couplings.include_ne,
        states: n,
        channels: couplings.channels.iter().map(|c| c.label.clone()).collect(),
        initial_state: initial,
        pulse: *pulse,
        settings: *settings,
        hermiticity_residual: couplings.hermiticity_residual.to_f64_lossy(),
        inputs: BTreeMap::new(),
    };
    Ok(RunResult { state, report, checkpoints, stats, manifest })
}
