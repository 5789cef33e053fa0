//! Variable-order, variable-step Adams PECE integrator in modified divided
//! difference form with local extrapolation (Shampine and Gordon's STEP and
//! INTRP), for complex systems.
//!
//! Local errors are measured in the Euclidean norm of the components scaled
//! by `rtol·|y| + atol`, as in the original code.

use num_complex::Complex;

use crate::real::Real;

/// Highest order supported by the coefficient tables.
pub const MAX_ORDER: usize = 12;

const TWO: [f64; 13] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0, 8192.0];
const GSTR: [f64; 13] =
    [0.5, 0.0833, 0.0417, 0.0264, 0.0188, 0.0143, 0.0114, 0.00936, 0.00789, 0.00679, 0.00592, 0.00524, 0.00468];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_order: usize,
    pub max_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepFailure {
    /// The requested tolerance is below what rounding permits.
    ToleranceTooSmall,
    /// The step size dropped below the resolution of `t`.
    StepUnderflow,
}

/// Integrator state. Arrays are indexed from 1 to mirror the recurrences.
pub struct Adams<T: Real> {
    tol: Tolerances,
    pub x: T,
    pub y: Vec<Complex<T>>,
    yp: Vec<Complex<T>>,
    p: Vec<Complex<T>>,
    wt: Vec<T>,
    phi: Vec<Vec<Complex<T>>>,
    psi: [T; 14],
    alpha: [T; 14],
    beta: [T; 14],
    sig: [T; 15],
    v: [T; 14],
    w: [T; 14],
    g: [T; 15],
    pub h: T,
    hold: T,
    k: usize,
    kold: usize,
    ns: usize,
    start: bool,
    phase1: bool,
    nornd: bool,
    pub rhs_evals: u64,
    pub steps: u64,
    pub rejected: u64,
}

fn c0<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> Adams<T> {
    /// `h0` sets the direction and an upper bound for the first step.
    pub fn new(x0: T, y0: Vec<Complex<T>>, h0: T, tol: Tolerances) -> Self {
        let n = y0.len();
        let z = T::zero();
        Self {
            tol: Tolerances { max_order: tol.max_order.clamp(1, MAX_ORDER), ..tol },
            x: x0,
            y: y0,
            yp: vec![c0(); n],
            p: vec![c0(); n],
            wt: vec![z; n],
            phi: vec![vec![c0(); n]; 17],
            psi: [z; 14],
            alpha: [z; 14],
            beta: [z; 14],
            sig: [z; 15],
            v: [z; 14],
            w: [z; 14],
            g: [z; 15],
            h: h0,
            hold: z,
            k: 1,
            kold: 0,
            ns: 0,
            start: true,
            phase1: true,
            nornd: true,
            rhs_evals: 0,
            steps: 0,
            rejected: 0,
        }
    }

    /// Order used by the last successful step.
    pub fn order(&self) -> usize {
        self.kold
    }

    /// Caps the next step at `limit` in magnitude.
    pub fn limit_step(&mut self, limit: T) {
        if self.h.abs() > limit {
            self.h = limit.copysign(self.h);
        }
    }

    fn weighted_norm(&self, v: impl Iterator<Item = (usize, Complex<T>)>) -> T {
        v.fold(T::zero(), |acc, (l, z)| acc + z.norm_sqr() / (self.wt[l] * self.wt[l])).sqrt()
    }

    /// Takes one successful step, retrying internally after rejected ones.
    pub fn step<F>(&mut self, f: &mut F) -> Result<(), StepFailure>
    where
        F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    {
        let n = self.y.len();
        let u = T::epsilon();
        let fouru = T::of(4.0) * u;
        let twou = T::of(2.0) * u;
        let rtol = T::of(self.tol.rtol);
        let atol = T::of(self.tol.atol);
        let eps = T::one();
        let half = T::of(0.5);
        let max_order = self.tol.max_order;
        for l in 0..n {
            self.wt[l] = rtol * self.y[l].norm() + atol;
        }

        // Block 0: step size and tolerance sanity checks.
        if self.h.abs() < fouru * self.x.abs() {
            return Err(StepFailure::StepUnderflow);
        }
        let p5eps = half * eps;
        let round = twou * self.weighted_norm(self.y.iter().copied().enumerate());
        if p5eps < round {
            return Err(StepFailure::ToleranceTooSmall);
        }
        self.g[1] = T::one();
        self.g[2] = half;
        self.sig[1] = T::one();
        if self.start {
            f(self.x, &self.y, &mut self.yp);
            self.rhs_evals += 1;
            for l in 0..n {
                self.phi[1][l] = self.yp[l];
                self.phi[2][l] = c0();
            }
            let sum = self.weighted_norm(self.yp.iter().copied().enumerate());
            let mut absh = self.h.abs();
            if eps < T::of(16.0) * sum * self.h * self.h {
                absh = T::of(0.25) * (eps / sum).sqrt();
            }
            absh = absh.min(T::of(self.tol.max_step));
            self.h = absh.max(fouru * self.x.abs()).copysign(self.h);
            self.hold = T::zero();
            self.k = 1;
            self.kold = 0;
            self.start = false;
            self.phase1 = true;
            self.nornd = true;
            if p5eps <= T::of(100.0) * round {
                self.nornd = false;
                for l in 0..n {
                    self.phi[15][l] = c0();
                }
            }
        }
        let mut ifail = 0;

        loop {
            // Block 1: coefficients for the current step.
            let k = self.k;
            let (kp1, kp2) = (k + 1, k + 2);
            if self.h != self.hold {
                self.ns = 0;
            }
            if self.ns <= self.kold {
                self.ns += 1;
            }
            let ns = self.ns;
            let nsp1 = ns + 1;
            if k >= ns {
                self.beta[ns] = T::one();
                self.alpha[ns] = T::one() / T::of_usize(ns);
                let mut temp1 = self.h * T::of_usize(ns);
                self.sig[nsp1] = T::one();
                if k >= nsp1 {
                    for i in nsp1..=k {
                        let im1 = i - 1;
                        let temp2 = self.psi[im1];
                        self.psi[im1] = temp1;
                        self.beta[i] = self.beta[im1] * self.psi[im1] / temp2;
                        temp1 = temp2 + self.h;
                        self.alpha[i] = self.h / temp1;
                        self.sig[i + 1] = T::of_usize(i) * self.alpha[i] * self.sig[i];
                    }
                }
                self.psi[k] = temp1;
                if ns > 1 {
                    if k > self.kold {
                        self.v[k] = T::one() / T::of_usize(k * kp1);
                        if ns >= 3 {
                            for j in 1..=ns - 2 {
                                let i = k - j;
                                self.v[i] = self.v[i] - self.alpha[j + 1] * self.v[i + 1];
                            }
                        }
                    }
                    let temp5 = self.alpha[ns];
                    for iq in 1..=kp1 - ns {
                        self.v[iq] = self.v[iq] - temp5 * self.v[iq + 1];
                        self.w[iq] = self.v[iq];
                    }
                    self.g[nsp1] = self.w[1];
                } else {
                    for iq in 1..=k {
                        self.v[iq] = T::one() / T::of_usize(iq * (iq + 1));
                        self.w[iq] = self.v[iq];
                    }
                }
                let nsp2 = ns + 2;
                if kp1 >= nsp2 {
                    for i in nsp2..=kp1 {
                        let temp6 = self.alpha[i - 1];
                        for iq in 1..=kp2 - i {
                            self.w[iq] = self.w[iq] - temp6 * self.w[iq + 1];
                        }
                        self.g[i] = self.w[1];
                    }
                }
            }

            // Block 2: predict, evaluate, estimate errors.
            if k >= nsp1 {
                for i in nsp1..=k {
                    let b = self.beta[i];
                    self.phi[i].iter_mut().for_each(|z| *z = *z * b);
                }
            }
            {
                let (lo, hi) = self.phi.split_at_mut(kp2);
                let (kp1_row, kp2_row) = (&mut lo[kp1], &mut hi[0]);
                for l in 0..n {
                    kp2_row[l] = kp1_row[l];
                    kp1_row[l] = c0();
                    self.p[l] = c0();
                }
            }
            for j in 1..=k {
                let i = kp1 - j;
                let g = self.g[i];
                let (lo, hi) = self.phi.split_at_mut(i + 1);
                let (row, next) = (&mut lo[i], &hi[0]);
                for l in 0..n {
                    self.p[l] = self.p[l] + row[l] * g;
                    row[l] = row[l] + next[l];
                }
            }
            if self.nornd {
                for l in 0..n {
                    self.p[l] = self.y[l] + self.p[l] * self.h;
                }
            } else {
                for l in 0..n {
                    let tau = self.p[l] * self.h - self.phi[15][l];
                    self.p[l] = self.y[l] + tau;
                    self.phi[16][l] = (self.p[l] - self.y[l]) - tau;
                }
            }
            let xold = self.x;
            self.x = self.x + self.h;
            let absh = self.h.abs();
            f(self.x, &self.p, &mut self.yp);
            self.rhs_evals += 1;

            let (mut erkm2, mut erkm1, mut erk) = (T::zero(), T::zero(), T::zero());
            for l in 0..n {
                let inv = T::one() / self.wt[l];
                let temp4 = self.yp[l] - self.phi[1][l];
                if k >= 3 {
                    erkm2 += ((self.phi[k - 1][l] + temp4) * inv).norm_sqr();
                }
                if k >= 2 {
                    erkm1 += ((self.phi[k][l] + temp4) * inv).norm_sqr();
                }
                erk += (temp4 * inv).norm_sqr();
            }
            if k >= 3 {
                erkm2 = absh * self.sig[k - 1] * T::of(GSTR[k - 3]) * erkm2.sqrt();
            }
            if k >= 2 {
                erkm1 = absh * self.sig[k] * T::of(GSTR[k - 2]) * erkm1.sqrt();
            }
            let temp5 = absh * erk.sqrt();
            let err = temp5 * (self.g[k] - self.g[kp1]);
            erk = temp5 * self.sig[kp1] * T::of(GSTR[k - 1]);
            let mut knew = k;
            if k >= 3 {
                if erkm1.max(erkm2) <= erk {
                    knew = k - 1;
                }
            } else if k == 2 && erkm1 <= half * erk {
                knew = k - 1;
            }

            if err > eps {
                // Block 3: rejected step; restore and retry smaller.
                self.rejected += 1;
                self.phase1 = false;
                self.x = xold;
                for i in 1..=k {
                    let inv = T::one() / self.beta[i];
                    let (lo, hi) = self.phi.split_at_mut(i + 1);
                    let (row, next) = (&mut lo[i], &hi[0]);
                    for l in 0..n {
                        row[l] = (row[l] - next[l]) * inv;
                    }
                }
                if k >= 2 {
                    for i in 2..=k {
                        self.psi[i - 1] = self.psi[i] - self.h;
                    }
                }
                ifail += 1;
                let mut temp2 = half;
                if ifail >= 3 {
                    if ifail > 3 && p5eps < T::of(0.25) * erk {
                        temp2 = (p5eps / erk).sqrt();
                    }
                    knew = 1;
                }
                self.h = self.h * temp2;
                self.k = knew;
                self.ns = 0;
                if self.h.abs() < fouru * self.x.abs() || self.h.abs() < T::min_positive_value().sqrt() {
                    return Err(StepFailure::StepUnderflow);
                }
                continue;
            }

            // Block 4: accepted; correct, evaluate, update differences.
            self.kold = k;
            self.hold = self.h;
            let temp1 = self.h * self.g[kp1];
            if self.nornd {
                for l in 0..n {
                    self.y[l] = self.p[l] + (self.yp[l] - self.phi[1][l]) * temp1;
                }
            } else {
                for l in 0..n {
                    let rho = (self.yp[l] - self.phi[1][l]) * temp1 - self.phi[16][l];
                    self.y[l] = self.p[l] + rho;
                    self.phi[15][l] = (self.y[l] - self.p[l]) - rho;
                }
            }
            f(self.x, &self.y, &mut self.yp);
            self.rhs_evals += 1;
            self.steps += 1;
            {
                let (lo, hi) = self.phi.split_at_mut(kp2);
                let kp2_row = &mut hi[0];
                for l in 0..n {
                    lo[kp1][l] = self.yp[l] - lo[1][l];
                    kp2_row[l] = lo[kp1][l] - kp2_row[l];
                }
                let (head, tail) = lo.split_at_mut(kp1);
                let d = &tail[0];
                for row in head.iter_mut().take(kp1).skip(1) {
                    for l in 0..n {
                        row[l] = row[l] + d[l];
                    }
                }
            }

            let mut erkp1 = T::zero();
            if knew == k - 1 || k == max_order {
                self.phase1 = false;
            }
            let mut next_k = k;
            let mut raise = false;
            let mut lower = false;
            if self.phase1 {
                raise = true;
            } else if knew == k - 1 {
                lower = true;
            } else if kp1 <= ns {
                erkp1 = absh * T::of(GSTR[kp1 - 1]) * self.weighted_norm(self.phi[kp2].iter().copied().enumerate());
                if k == 1 {
                    if erkp1 < half * erk {
                        raise = true;
                    }
                } else if erkm1 <= erk.min(erkp1) {
                    lower = true;
                } else if !(erkp1 >= erk || k == max_order) {
                    raise = true;
                }
            }
            if raise && k < max_order {
                next_k = kp1;
                erk = erkp1;
            } else if lower {
                next_k = k - 1;
                erk = erkm1;
            }
            self.k = next_k;

            let mut hnew = self.h + self.h;
            if !(self.phase1 || p5eps >= erk * T::of(TWO[next_k])) {
                hnew = self.h;
                if p5eps < erk {
                    let r = (p5eps / erk).powf(T::one() / T::of_usize(next_k + 1));
                    hnew = (absh * half.max(T::of(0.9).min(r))).max(fouru * self.x.abs()).copysign(self.h);
                }
            }
            self.h = hnew;
            self.limit_step(T::of(self.tol.max_step));
            return Ok(());
        }
    }

    /// Value of the interpolating polynomial of the last step at `xout`.
    pub fn interpolate(&self, xout: T, yout: &mut [Complex<T>]) {
        let hi = xout - self.x;
        let ki = self.kold + 1;
        let kip1 = ki + 1;
        let mut w = [T::zero(); 15];
        let mut g = [T::zero(); 15];
        g[1] = T::one();
        for (i, wi) in w.iter_mut().enumerate().take(ki + 1).skip(1) {
            *wi = T::one() / T::of_usize(i);
        }
        let mut term = T::zero();
        for j in 2..=ki {
            let psijm1 = self.psi[j - 1];
            let gamma = (hi + term) / psijm1;
            let eta = hi / psijm1;
            for i in 1..=kip1 - j {
                w[i] = gamma * w[i] - eta * w[i + 1];
            }
            g[j] = w[1];
            term = psijm1;
        }
        for (l, out) in yout.iter_mut().enumerate() {
            let mut acc = c0();
            for j in 1..=ki {
                let i = kip1 - j;
                acc = acc + self.phi[i][l] * g[i];
            }
            *out = self.y[l] + acc * hi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(rtol: f64, atol: f64) -> Tolerances {
        Tolerances { rtol, atol, max_order: MAX_ORDER, max_step: f64::INFINITY }
    }

    fn integrate<F>(y0: Vec<Complex<f64>>, t1: f64, tol: Tolerances, mut f: F) -> (Adams<f64>, Vec<Complex<f64>>)
    where
        F: FnMut(f64, &[Complex<f64>], &mut [Complex<f64>]),
    {
        let mut a = Adams::new(0.0, y0, t1, tol);
        while a.x < t1 {
            a.step(&mut f).unwrap();
        }
        let mut out = vec![Complex::new(0.0, 0.0); a.y.len()];
        a.interpolate(t1, &mut out);
        (a, out)
    }

    #[test]
    fn exponential_growth() {
        let (_, y) = integrate(vec![Complex::new(1.0, 0.0)], 2.0, tol(1e-12, 1e-14), |_, y, d| d[0] = y[0]);
        assert!((y[0].re - 2f64.exp()).abs() < 1e-9 * 2f64.exp(), "{}", y[0]);
    }

    #[test]
    fn harmonic_rotation_keeps_modulus() {
        // y' = i ω y
        let omega = 7.0;
        let (a, y) = integrate(vec![Complex::new(1.0, 0.0)], 10.0, tol(1e-11, 1e-13), |_, y, d| {
            d[0] = Complex::new(0.0, omega) * y[0];
        });
        let want = Complex::new((omega * 10.0).cos(), (omega * 10.0).sin());
        assert!((y[0] - want).norm() < 1e-8, "{} vs {}", y[0], want);
        assert!(a.order() > 4, "order {}", a.order());
    }

    #[test]
    fn tighter_tolerance_is_more_accurate_and_costlier() {
        let run = |rtol: f64| {
            let (a, y) = integrate(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)], 6.0, tol(rtol, rtol * 1e-2), |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            });
            ((y[0].re - 6f64.cos()).abs(), a.steps)
        };
        let (e6, s6) = run(1e-6);
        let (e10, s10) = run(1e-10);
        assert!(e10 < e6 && s10 > s6, "{e6} {s6} {e10} {s10}");
        assert!(e10 < 1e-8);
    }

    #[test]
    fn respects_max_step_and_order() {
        let t = Tolerances { rtol: 1e-8, atol: 1e-10, max_order: 3, max_step: 0.01 };
        let mut a = Adams::new(0.0, vec![Complex::new(1.0, 0.0)], 1.0, t);
        let mut f = |_: f64, y: &[Complex<f64>], d: &mut [Complex<f64>]| d[0] = -y[0];
        let mut last = 0.0;
        while a.x < 1.0 {
            a.step(&mut f).unwrap();
            assert!(a.x - last <= 0.01 + 1e-15);
            assert!(a.order() <= 3);
            last = a.x;
        }
    }

    #[test]
    fn impossible_tolerance_is_reported() {
        let mut a = Adams::new(0.0, vec![Complex::new(1.0, 0.0)], 1.0, tol(1e-20, 0.0));
        let mut f = |_: f64, y: &[Complex<f64>], d: &mut [Complex<f64>]| d[0] = -y[0];
        assert_eq!(a.step(&mut f), Err(StepFailure::ToleranceTooSmall));
    }

    #[test]
    fn interpolation_inside_last_step() {
        let mut a = Adams::new(0.0, vec![Complex::new(1.0, 0.0)], 1.0, tol(1e-12, 1e-14));
        let mut f = |_: f64, y: &[Complex<f64>], d: &mut [Complex<f64>]| d[0] = -y[0];
        let mut prev = 0.0;
        let mut out = vec![Complex::new(0.0, 0.0)];
        while a.x < 1.0 {
            a.step(&mut f).unwrap();
            let mid = 0.5 * (prev + a.x);
            a.interpolate(mid, &mut out);
            assert!((out[0].re - (-mid).exp()).abs() < 1e-10, "t={mid}: {}", out[0].re);
            prev = a.x;
        }
    }
}
