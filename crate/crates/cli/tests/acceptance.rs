//! Acceptance criteria, one line per criterion.
//!
//! Plain binary (no libtest harness). `ACCEPTANCE_ONLY=4,5` restricts the
//! run to the listed criteria; `ACCEPTANCE_CACHE=<dir>` keeps finished
//! propagations on disk keyed by the config hash.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use tdde::bspline::{BasisParams, RadialBasis};
use tdde::constants::PhysicalConstants;
use tdde::dipole::{build_coupling, radial_length_nr, ChannelInfo, CouplingBlock, CouplingSet, DipoleOperators, Gauge, Spectra, StateRef, Theory};
use tdde::nonrel_structure::NonrelSpectra;
use tdde::observables::{pair_threshold_photons, photon_count};
use tdde::propagator::{evolve, PropagationSettings};
use tdde::pulse::{intensity_to_field, wavelength_to_omega, ConstantField, PulseParams};
use tdde::rel_structure::{RelativisticSpectra, StateClass};
use tdde::scaling::{delta_ip, keldysh, rate_scale, rate_scale_at, scaled_charge, RateTable};
use tdde_cli::config::{Photon, RunConfig, Strength};
use tdde_cli::run::{run, RunRecord};
use tdde_cli::validate::{validate, Check, ValidateOptions};
use tdde_cli::CliError;

type Res<T> = Result<T, CliError>;

struct Verdict {
    passed: bool,
    detail: String,
    notes: Vec<String>,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into(), notes: Vec::new() }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

/// Propagations shared between criteria.
struct Runs {
    memo: RefCell<HashMap<String, RunRecord>>,
    dir: Option<PathBuf>,
}

impl Runs {
    fn new() -> Self {
        let dir = std::env::var_os("ACCEPTANCE_CACHE").map(PathBuf::from);
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).expect("cache directory");
        }
        Self { memo: RefCell::new(HashMap::new()), dir }
    }

    fn get(&self, cfg: &RunConfig) -> Res<RunRecord> {
        let key = cfg.hash();
        if let Some(r) = self.memo.borrow().get(&key) {
            return Ok(r.clone());
        }
        let file = self.dir.as_ref().map(|d| d.join(format!("{key}.json")));
        let cached = file.as_ref().and_then(|f| std::fs::read_to_string(f).ok()).and_then(|t| serde_json::from_str::<RunRecord>(&t).ok());
        let rec = match cached {
            Some(r) => r,
            None => {
                let r = run(cfg)?;
                if let Some(f) = &file {
                    std::fs::write(f, serde_json::to_string(&r)?)?;
                }
                r
            }
        };
        self.memo.borrow_mut().insert(key, rec.clone());
        Ok(rec)
    }

    fn yield_of(&self, cfg: &RunConfig) -> Res<f64> {
        Ok(self.get(cfg)?.ionization)
    }
}

/// Propagation basis: 100 splines of order 9, 20 geometric head intervals
/// with ratio 1.1, R = 250/Z.
fn desk(z: f64) -> BasisParams {
    BasisParams::scaled_box(z, 100, 9, 20, 1.1)
}

fn settings(rtol: f64) -> PropagationSettings {
    PropagationSettings { rtol, atol: rtol * 1e-2, ..Default::default() }
}

fn dirac(z: f64, two_j_max: i32, gauge: Gauge, include_ne: bool, omega: f64, intensity: f64) -> RunConfig {
    RunConfig {
        theory: Theory::Dirac,
        z,
        gauge,
        include_ne,
        angular_max: two_j_max,
        basis: desk(z),
        cycles: 20,
        photon: Photon::EnergyAu(omega),
        strength: Strength::IntensityWcm2(intensity),
        settings: settings(1e-7),
        output: None,
        cache_dir: None,
    }
}

fn schrodinger(z: f64, l_max: i32, omega: f64, intensity: f64) -> RunConfig {
    RunConfig { theory: Theory::Schrodinger, include_ne: false, ..dirac(z, l_max, Gauge::Length, false, omega, intensity) }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn half(two_j: i32) -> String {
    format!("{two_j}/2")
}

fn checks_line(checks: &[Check]) -> Verdict {
    let passed = checks.iter().all(|c| c.passed);
    let worst = checks.iter().map(|c| c.value / c.tolerance).fold(0.0, f64::max);
    let mut v = Verdict::new(passed, format!("{} checks, worst deviation {worst:.2e} of tolerance", checks.len()));
    for c in checks {
        v = v.note(format!("{}: {:.3e} (tol {:.0e}) {}", c.name, c.value, c.tolerance, c.detail));
    }
    v
}

fn structure_checks() -> Res<Vec<Check>> {
    Ok(validate(ValidateOptions { basis_n: 200, mutate_velocity: false, skip_propagation: true })?.checks)
}

fn c1_golden() -> Res<Verdict> {
    let checks: Vec<Check> = structure_checks()?.into_iter().filter(|c| c.name.starts_with("eigen_")).collect();
    Ok(checks_line(&checks))
}

fn c2_identities() -> Res<Verdict> {
    let checks: Vec<Check> = structure_checks()?.into_iter().filter(|c| c.name.starts_with("gauge_identity") || c.name.starts_with("trk")).collect();
    Ok(checks_line(&checks))
}

const C3_TOL: f64 = 1e-4;

fn c3_scaling(runs: &Runs) -> Res<Verdict> {
    let twin = |z: f64| RunConfig { settings: settings(1e-8), ..schrodinger(z, 3, z * z, 1e13 * z.powi(6)) };
    let (y1, y50) = (runs.yield_of(&twin(1.0))?, runs.yield_of(&twin(50.0))?);
    let residual = rel(y50, y1);

    // One-photon regime at 30·Z² eV and Z⁶·10¹¹ W/cm².
    let ev = PhysicalConstants::default().ev_to_au(30.0);
    let h = runs.yield_of(&RunConfig { settings: settings(1e-8), ..schrodinger(1.0, 2, ev, 1e11) })?;
    let z = 50.0;
    let d = runs.yield_of(&RunConfig { settings: settings(1e-8), ..dirac(z, 5, Gauge::Length, false, ev * z * z, 1e11 * z.powi(6)) })?;
    let broken = (d / h - 1.0).abs();
    let passed = residual <= C3_TOL && broken > 10.0 * residual;
    Ok(Verdict::new(passed, format!("TDSE Z=1 vs Z=50 twin: {residual:.2e} (tol {C3_TOL:.0e}); TDDE Z=50 / TDSE Z=1 - 1 = {broken:.3e} (> 10x residual)"))
        .note(format!("TDSE yields {y1:.10e} / {y50:.10e}"))
        .note(format!("30 Z² eV, Z⁶·1e11 W/cm²: TDSE {h:.6e}, TDDE {d:.6e}")))
}

/// Angular truncation for the criteria 4 comparisons.
const FIG1_TWO_J: i32 = 11;
const FIG1_Z: f64 = 50.0;
const FIG1_OMEGA: f64 = 500.0;
const FIG1_INTENSITY: f64 = 5e23;

fn fig1(two_j: i32, gauge: Gauge, ne: bool) -> RunConfig {
    dirac(FIG1_Z, two_j, gauge, ne, FIG1_OMEGA, FIG1_INTENSITY)
}

fn c4_fig1(runs: &Runs) -> Res<Verdict> {
    let tj = FIG1_TWO_J;
    let l_ne = runs.yield_of(&fig1(tj, Gauge::Length, true))?;
    let v_ne = runs.yield_of(&fig1(tj, Gauge::Velocity, true))?;
    let l_no = runs.yield_of(&fig1(tj, Gauge::Length, false))?;
    let v_no = runs.yield_of(&fig1(tj, Gauge::Velocity, false))?;
    let gauge_gap = rel(v_ne, l_ne);
    let agreed = 0.5 * (l_ne + v_ne);
    let factor = agreed / v_no;
    let ne_effect = rel(l_no, l_ne);
    let a = gauge_gap <= 5e-3;
    let b = (1.3..=1.7).contains(&factor);
    let c = (1e-5..=1e-4).contains(&ne_effect);
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    Ok(Verdict::new(
        a && b && c,
        format!(
            "j_max {}: (a) L/V with NE {gauge_gap:.2e} (<= 5e-3) {}; (b) agreed / V without NE = {factor:.3} (in [1.3, 1.7]) {}; (c) L NE effect {ne_effect:.2e} (in [1e-5, 1e-4]) {}",
            half(tj),
            mark(a),
            mark(b),
            mark(c)
        ),
    )
    .note(format!("L NE {l_ne:.10e}, V NE {v_ne:.10e}, L no NE {l_no:.10e}, V no NE {v_no:.10e}")))
}

/// Successive j_max yields within this relative change count as converged.
const CONV_TOL: f64 = 1e-3;
const CONV_J: [i32; 5] = [3, 5, 7, 9, 11];

/// Smallest j_max whose yield is within `CONV_TOL` of the next one.
fn converged_at(ys: &[f64]) -> Option<i32> {
    (0..ys.len() - 1).find(|&k| (k..ys.len() - 1).all(|m| rel(ys[m], ys[m + 1]) < CONV_TOL)).map(|k| CONV_J[k])
}

fn c5_convergence(runs: &Runs) -> Res<Verdict> {
    let length: Vec<f64> = CONV_J.iter().map(|&tj| runs.yield_of(&fig1(tj, Gauge::Length, false))).collect::<Res<_>>()?;
    let velocity: Vec<f64> = CONV_J.iter().map(|&tj| runs.yield_of(&fig1(tj, Gauge::Velocity, true))).collect::<Res<_>>()?;
    let (jl, jv) = (converged_at(&length), converged_at(&velocity));
    let show = |j: Option<i32>| j.map_or_else(|| format!("beyond {}", half(CONV_J[CONV_J.len() - 1])), half);
    let passed = match (jv, jl) {
        (Some(v), Some(l)) => v < l,
        (Some(_), None) => true,
        _ => false,
    };
    let seq = |ys: &[f64]| ys.iter().zip(CONV_J).map(|(y, tj)| format!("{}: {y:.6e}", half(tj))).collect::<Vec<_>>().join(", ");
    Ok(Verdict::new(passed, format!("converged j_max (step change < {CONV_TOL:.0e}): velocity {}, length {}", show(jv), show(jl)))
        .note(format!("length, no NE: {}", seq(&length)))
        .note(format!("velocity, NE: {}", seq(&velocity))))
}

const FIG2_SCALED_NM: [f64; 4] = [40.0, 100.0, 160.0, 260.0];
const FIG2_TWO_J: i32 = 7;

fn c6_fig2(runs: &Runs) -> Res<Verdict> {
    let mut ratios = Vec::new();
    let mut notes = Vec::new();
    for z in [40.0, 80.0] {
        let mut row = Vec::new();
        for nm in FIG2_SCALED_NM {
            let omega = wavelength_to_omega(nm) * z * z;
            let intensity = 1e13 * z.powi(6);
            let with = runs.yield_of(&dirac(z, FIG2_TWO_J, Gauge::Velocity, true, omega, intensity))?;
            let without = runs.yield_of(&dirac(z, FIG2_TWO_J, Gauge::Velocity, false, omega, intensity))?;
            row.push(without / with);
        }
        notes.push(format!("Z = {z}: {}", row.iter().zip(FIG2_SCALED_NM).map(|(r, nm)| format!("{nm} nm {r:.4}")).collect::<Vec<_>>().join(", ")));
        ratios.push(row);
    }
    let one_photon = ratios.iter().all(|r| (r[0] - 1.0).abs() <= 0.02);
    let monotone = ratios.iter().all(|r| r.windows(2).all(|w| w[1] < w[0]));
    let last = FIG2_SCALED_NM.len() - 1;
    let (r40, r80) = (ratios[0][last], ratios[1][last]);
    let separated = r80 < r40 && r40 / r80 > 2.0;
    let mut v = Verdict::new(
        one_photon && monotone && separated,
        format!("ratio at 40 nm within 2% of 1: {one_photon}; monotone decrease: {monotone}; 260 nm Z=40 {r40:.3} vs Z=80 {r80:.3} (need Z=80 below, ratio > 2)"),
    );
    for n in notes {
        v = v.note(n);
    }
    Ok(v)
}

fn c7_formulas() -> Res<Verdict> {
    let c = PhysicalConstants::default();
    let zp = scaled_charge(50.0, c.c);
    let f0 = intensity_to_field(5e22);
    let g1 = format!("{:.2}", keldysh(50.0, wavelength_to_omega(0.05), f0));
    let g2 = format!("{:.2}", keldysh(50.0, wavelength_to_omega(0.15), f0));
    let fcr = format!("{:.2e}", c.critical_field());
    let small_z = delta_ip(1.0, c.c) * 8.0 * c.c * c.c;
    let ok = [(zp - 50.88).abs() <= 0.01, g1 == "38.17", g2 == "12.72", fcr == "2.57e6", (small_z - 1.0).abs() <= 1e-4];
    Ok(Verdict::new(ok.iter().all(|&b| b), format!("Z'(50) = {zp:.4}; gamma = {g1} / {g2}; F_cr = {fcr}; dIp(1)·8c² = {small_z:.6}")))
}

fn c8_thresholds() -> Res<Verdict> {
    let c = PhysicalConstants::default();
    let n50 = photon_count(50.0, 500.0, true, &c)?;
    let pair = pair_threshold_photons(500.0, &c)?;
    let omega80 = c.ev_to_au(15.0 * 6400.0);
    let n80 = photon_count(80.0, omega80, true, &c)?;
    let n80_nr = photon_count(80.0, omega80, false, &c)?;
    let passed = n50 == 3 && pair == 76 && pair > 70 && n80 == 2 && n80_nr == 1;
    Ok(Verdict::new(passed, format!("Z=50 at 500 a.u.: {n50} photons, pair threshold {pair}; Z=80 at 15·Z² eV: {n80} photons (nonrelativistic {n80_nr})")))
}

const FIG5_NM: [f64; 3] = [0.05, 0.10, 0.15];
const FIG5_TWO_J: i32 = 11;
// Near-threshold Dirac pseudostates need a denser basis than the desk grid.
const FIG5_DIRAC_N: usize = 250;

fn c9_fig5(runs: &Runs) -> Res<Verdict> {
    let z = 50.0;
    let zp = scaled_charge(z, PhysicalConstants::default().c);
    let mut passed = true;
    let mut notes = Vec::new();
    for nm in FIG5_NM {
        let omega = wavelength_to_omega(nm);
        let basis = BasisParams::scaled_box(z, FIG5_DIRAC_N, 9, FIG5_DIRAC_N / 5, 1.1);
        let d = runs.yield_of(&RunConfig { basis, ..dirac(z, FIG5_TWO_J, Gauge::Length, false, omega, 5e22) })?;
        let s = runs.yield_of(&schrodinger(z, (FIG5_TWO_J - 1) / 2, omega, 5e22))?;
        let sp = runs.yield_of(&schrodinger(zp, (FIG5_TWO_J - 1) / 2, omega, 5e22))?;
        let (near, far) = ((sp.ln() - d.ln()).abs(), (s.ln() - d.ln()).abs());
        passed &= 5.0 * near <= far;
        notes.push(format!("{nm} nm: TDDE {d:.4e}, TDSE(Z) {s:.4e}, TDSE(Z') {sp:.4e}; |dlog| {far:.3e} vs {near:.3e} (x{:.1})", far / near));
    }
    let mut v = Verdict::new(passed, format!("Z' = {zp:.4}; scaled-charge TDSE at least 5x closer to TDDE at {} wavelengths", FIG5_NM.len()));
    for n in notes {
        v = v.note(n);
    }
    Ok(v)
}

fn two_level(omega: f64) -> CouplingSet<f64> {
    let ch = |label: &str, l, offset| ChannelInfo { label: label.into(), l, two_j: 2 * l, kappa: 0, offset, len: 1 };
    let st = |channel| StateRef { channel, index: 0, energy: -0.5, class: StateClass::Bound };
    CouplingSet {
        theory: Theory::Schrodinger,
        gauge: Gauge::Length,
        include_ne: false,
        channels: vec![ch("s", 0, 0), ch("p", 1, 1)],
        states: vec![st(0), st(1)],
        blocks: vec![CouplingBlock { bra: 0, ket: 1, gauge: Gauge::Length, rows: 1, cols: 1, data: vec![omega] }],
        initial: 0,
        profile_scale: 1.0,
        hermiticity_residual: 0.0,
    }
}

/// `∫ A(t) e^{iΔt} dt` over the pulse, from the exponential expansion of
/// `cos²(πt/T) sin(ωt)`.
fn vector_potential_transform(p: &PulseParams, delta: f64) -> Complex<f64> {
    let beta = 2.0 * PI / p.duration;
    let w = p.omega;
    let window = |mu: f64| if mu.abs() < 1e-12 { p.duration } else { 2.0 * (0.5 * mu * p.duration).sin() / mu };
    let terms = [(w, 0.5), (-w, -0.5), (w + beta, 0.25), (w - beta, 0.25), (-w + beta, -0.25), (-w - beta, -0.25)];
    let sum: f64 = terms.iter().map(|(nu, a)| a * window(nu + delta)).sum();
    Complex::new(0.0, -0.5) * p.a0 * sum
}

/// First-order 1s → εp yield in length gauge: `Σ_f |⟨f|z|1s⟩|² Δ² |Â(Δ)|²`.
fn first_order_yield(basis: &RadialBasis<f64>, p: &PulseParams) -> Res<f64> {
    let sp = NonrelSpectra::solve(basis, 1.0, 1)?;
    let ops = DipoleOperators::new(basis)?;
    let s = sp.ground_state()?;
    let mut y = 0.0;
    for f in sp.channel(1).expect("p channel").states.iter().filter(|f| f.energy > 0.0) {
        let d = radial_length_nr(&ops, f, s)?;
        let delta = f.energy - s.energy;
        y += d * d / 3.0 * delta * delta * vector_potential_transform(p, delta).norm_sqr();
    }
    Ok(y)
}

fn c10_properties(runs: &Runs) -> Res<Verdict> {
    let mut ok = Vec::new();
    let mut v = Verdict::new(true, "");

    let h = |rtol: f64| RunConfig {
        basis: BasisParams::scaled_box(1.0, 40, 7, 10, 1.1),
        cycles: 3,
        settings: settings(rtol),
        ..schrodinger(1.0, 3, 0.6, 3e14)
    };
    let recs = [1e-6, 1e-8, 1e-10].map(|r| runs.get(&h(r)));
    let recs: Vec<RunRecord> = recs.into_iter().collect::<Res<_>>()?;
    let d: Vec<f64> = recs.iter().map(|r| r.stats.max_norm_defect).collect();
    let norm_ok = d[0] > d[1] && d[1] > d[2] && d[2] < 1e-8 && recs.iter().zip([1e-6, 1e-8, 1e-10]).all(|(r, t)| r.report.norm <= 1.0 + 10.0 * t);
    ok.push(norm_ok);
    v = v.note(format!("norm defect at rtol 1e-6/1e-8/1e-10: {:.2e} / {:.2e} / {:.2e}", d[0], d[1], d[2]));

    let partition = recs.iter().map(|r| r.report.partition_defect().abs()).fold(0.0, f64::max);
    ok.push(partition <= 1e-12);
    v = v.note(format!("partition identity {partition:.2e} (tol 1e-12)"));

    let c = PhysicalConstants::default();
    let basis = RadialBasis::new(BasisParams::scaled_box(50.0, 60, 7, 20, 1.1))?;
    let rsp = RelativisticSpectra::solve(&basis, 50.0, 5, &c)?;
    let nsp = NonrelSpectra::solve(&basis, 50.0, 3)?;
    let mut herm: f64 = 0.0;
    for gauge in [Gauge::Length, Gauge::Velocity] {
        herm = herm.max(build_coupling(Spectra::Dirac(&rsp), &basis, gauge, true, 5, &c)?.hermiticity_residual);
        herm = herm.max(build_coupling(Spectra::Schrodinger(&nsp), &basis, gauge, false, 3, &c)?.hermiticity_residual);
    }
    ok.push(herm < 1e-12);
    v = v.note(format!("Hermiticity residual {herm:.2e} (tol 1e-12)"));

    let omega = 0.7;
    let marks: Vec<f64> = (1..40).map(|k| 0.25 * k as f64).collect();
    let tight = PropagationSettings { rtol: 1e-11, atol: 1e-13, dense_output: true, ..Default::default() };
    let c0 = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
    let (_, cps, _) = evolve(&two_level(omega), &ConstantField { field: 1.0, vector_potential: 0.0 }, 0.0, 10.0, c0, &marks, &tight)?;
    let rabi = cps
        .iter()
        .map(|cp| {
            let c = cp.coeffs.as_ref().expect("dense output");
            (c[1][0] * c[1][0] + c[1][1] * c[1][1] - (omega * cp.time).sin().powi(2)).abs()
        })
        .fold(0.0, f64::max);
    ok.push(rabi < 1e-8);
    v = v.note(format!("Rabi two-level deviation {rabi:.2e} (tol 1e-8)"));

    let pt = RunConfig { basis: BasisParams::scaled_box(1.0, 100, 9, 20, 1.1), settings: settings(1e-9), ..schrodinger(1.0, 2, 0.8, 1e10) };
    let numeric = runs.yield_of(&pt)?;
    let oracle = first_order_yield(&RadialBasis::new(pt.basis)?, &pt.pulse()?)?;
    let pt_ok = numeric < 1e-4 && rel(numeric, oracle) <= 0.1;
    ok.push(pt_ok);
    v = v.note(format!("one-photon yield {numeric:.6e} vs first order {oracle:.6e}: {:.2e} (tol 0.1)", rel(numeric, oracle)));

    v.passed = ok.iter().all(|&b| b);
    v.detail = format!("{} of {} property checks pass", ok.iter().filter(|&&b| b).count(), ok.len());
    Ok(v)
}

fn c11_rates() -> Res<Verdict> {
    let c = PhysicalConstants::default().c;
    let f0: Vec<f64> = (0..41).map(|k| 0.005 * 1.1f64.powi(k)).collect();
    let gamma: Vec<f64> = f0.iter().map(|f| 1e-2 * (-(f / 0.04f64).ln().powi(2) / 0.5).exp()).collect();
    let table = RateTable::new(f0, gamma)?;
    let (fp, gp) = table.peak();
    let mut ok = true;
    let mut notes = Vec::new();
    let mut peaks = Vec::new();
    for z in [36.0, 54.0, 86.0] {
        let s = scaled_charge(z, c) / z;
        let out = rate_scale(&table, z, c);
        let (fq, gq) = out.peak();
        let shift = fq / fp / s.powi(3) - 1.0;
        let scale = gq / gp / (s * s) - 1.0;
        let probe = rate_scale_at(&table, z, c, &[fp * s.powi(3)])?[0];
        ok &= shift.abs() < 1e-12 && scale.abs() < 1e-12 && rel(probe, gp * s * s) < 1e-12;
        notes.push(format!("Z = {z}: peak at {fq:.6e} ({shift:.1e}), value {gq:.6e} ({scale:.1e})"));
        peaks.push(gq);
    }
    let grows = peaks.windows(2).all(|w| w[1] > w[0]);
    let mut v = Verdict::new(ok && grows, format!("peak field shifted by (Z'/Z)³ and value by (Z'/Z)²; peak rate grows over Z = 36, 54, 86: {grows}"));
    for n in notes {
        v = v.note(n);
    }
    Ok(v)
}

fn main() -> ExitCode {
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let runs = Runs::new();
    let criteria: [(u32, &str, &dyn Fn() -> Res<Verdict>); 11] = [
        (1, "eigenvalue golden values", &c1_golden),
        (2, "gauge-form identities and TRK sum", &c2_identities),
        (3, "TDSE Z-scaling invariance", &|| c3_scaling(&runs)),
        (4, "Fig. 1 operating point", &|| c4_fig1(&runs)),
        (5, "j_max convergence ordering", &|| c5_convergence(&runs)),
        (6, "NE-exclusion ratio trend", &|| c6_fig2(&runs)),
        (7, "scaling formulas", &c7_formulas),
        (8, "photon-count thresholds", &c8_thresholds),
        (9, "scaled-charge TDSE surrogate", &|| c9_fig5(&runs)),
        (10, "property suites", &|| c10_properties(&runs)),
        (11, "rate-scaling estimator", &c11_rates),
    ];
    let mut failed = 0;
    for (id, title, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let v = f().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {title}: {status} - {} [{:.0}s]", v.detail, t.elapsed().as_secs_f64());
        for n in &v.notes {
            println!("      {n}");
        }
        failed += usize::from(!v.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
