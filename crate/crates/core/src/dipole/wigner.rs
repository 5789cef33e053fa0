//! Exact Wigner 3j symbols from the Racah closed form.
//!
//! A 3j symbol is always `±√q` for a rational `q`, so it is carried as a
//! [`Surd`] and converted to floating point only at the end.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::real::Real;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn int(v: i32) -> Self {
        Self(2 * v)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl std::ops::Neg for HalfInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `sign · √square` with an exact nonnegative rational `square`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub negative: bool,
    pub square: BigRational,
}

impl Surd {
    pub fn zero() -> Self {
        Self { negative: false, square: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self { negative: false, square: BigRational::one() }
    }

    /// `±√(num/den)`
    pub fn new(negative: bool, num: i64, den: i64) -> Self {
        Self { negative, square: BigRational::new(BigInt::from(num), BigInt::from(den)) }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    pub fn negate(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        Surd { negative: self.negative != other.negative, square: &self.square * &other.square }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Scale huge numerators/denominators before converting.
        let n = self.square.numer();
        let d = self.square.denom();
        let shift = (n.bits().max(d.bits()) as i64 - 900).max(0) as usize;
        let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
        let v = (nf / df).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn to_real<T: Real>(&self) -> T {
        T::of(self.to_f64())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}√({})", if self.negative { "-" } else { "" }, self.square)
    }
}

/// Why a 3j symbol was returned as zero without evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeJFlag {
    /// `|m| > j` or a `j ± m` that is not an integer.
    InvalidArguments,
    /// `m₁ + m₂ + m₃ ≠ 0`.
    MagneticSum,
    /// `j₁, j₂, j₃` violate the triangle condition.
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeJ {
    pub value: Surd,
    pub flag: Option<ThreeJFlag>,
}

fn factorial(n: i32) -> BigInt {
    (1..=n.max(0) as u32).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact `(j₁ j₂ j₃; m₁ m₂ m₃)`.
pub fn wigner3j_exact(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> ThreeJ {
    let zero = |flag| ThreeJ { value: Surd::zero(), flag: Some(flag) };
    let (tj1, tj2, tj3, tm1, tm2, tm3) = (j1.0, j2.0, j3.0, m1.0, m2.0, m3.0);
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        if tj < 0 || tm.abs() > tj || (tj + tm) % 2 != 0 {
            return zero(ThreeJFlag::InvalidArguments);
        }
    }
    if tm1 + tm2 + tm3 != 0 {
        return zero(ThreeJFlag::MagneticSum);
    }
    if (tj1 + tj2 + tj3) % 2 != 0 || tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() {
        return zero(ThreeJFlag::Triangle);
    }
    // Integer arguments of the factorials.
    let a = (tj1 + tj2 - tj3) / 2;
    let b = (tj1 - tj2 + tj3) / 2;
    let c = (-tj1 + tj2 + tj3) / 2;
    let s = (tj1 + tj2 + tj3) / 2 + 1;
    let delta = BigRational::new(factorial(a) * factorial(b) * factorial(c), factorial(s));
    let prod = factorial((tj1 + tm1) / 2)
        * factorial((tj1 - tm1) / 2)
        * factorial((tj2 + tm2) / 2)
        * factorial((tj2 - tm2) / 2)
        * factorial((tj3 + tm3) / 2)
        * factorial((tj3 - tm3) / 2);

    let x1 = (tj3 - tj2 + tm1) / 2;
    let x2 = (tj3 - tj1 - tm2) / 2;
    let y1 = (tj1 + tj2 - tj3) / 2;
    let y2 = (tj1 - tm1) / 2;
    let y3 = (tj2 + tm2) / 2;
    let t_min = 0.max(-x1).max(-x2);
    let t_max = y1.min(y2).min(y3);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = factorial(t) * factorial(x1 + t) * factorial(x2 + t) * factorial(y1 - t) * factorial(y2 - t) * factorial(y3 - t);
        let term = BigRational::new(BigInt::one(), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return ThreeJ { value: Surd::zero(), flag: None };
    }
    let phase_odd = ((tj1 - tj2 - tm3) / 2).rem_euclid(2) == 1;
    let negative = phase_odd != sum.is_negative();
    let square = &sum * &sum * delta * BigRational::from_integer(prod);
    ThreeJ { value: Surd { negative, square }, flag: None }
}

/// Floating-point value of the 3j symbol; zero whenever it is flagged.
pub fn wigner3j<T: Real>(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> T {
    wigner3j_exact(j1, j2, j3, m1, m2, m3).value.to_real()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn closed_forms() {
        // (j j 0; m −m 0) = (−1)^{j−m}/√(2j+1)
        let v = wigner3j_exact(h(2), h(2), h(0), h(0), h(0), h(0));
        assert_eq!(v.value, Surd::new(true, 1, 3));
        assert!((v.value.to_f64() + 0.577350269189626).abs() < 1e-15);
        // (j 1 j; −m 0 m) = m/√(j(j+1)(2j+1)) with j = m = 1/2
        let v = wigner3j_exact(h(1), h(2), h(1), h(-1), h(0), h(1));
        assert_eq!(v.value, Surd::new(false, 1, 6));
        assert!((v.value.to_f64() - 0.408248290463863).abs() < 1e-15);
    }

    #[test]
    fn vanishing_cases_are_flagged() {
        assert_eq!(wigner3j_exact(h(2), h(2), h(6), h(0), h(0), h(0)).flag, Some(ThreeJFlag::Triangle));
        assert_eq!(wigner3j_exact(h(2), h(2), h(2), h(2), h(0), h(0)).flag, Some(ThreeJFlag::MagneticSum));
        assert_eq!(wigner3j_exact(h(2), h(2), h(2), h(4), h(-4), h(0)).flag, Some(ThreeJFlag::InvalidArguments));
        assert_eq!(wigner3j_exact(h(2), h(2), h(2), h(1), h(-1), h(0)).flag, Some(ThreeJFlag::InvalidArguments));
        // (1 1 1; 0 0 0) vanishes by parity, without a flag.
        let v = wigner3j_exact(h(2), h(2), h(2), h(0), h(0), h(0));
        assert!(v.value.is_zero() && v.flag.is_none());
    }

    /// `⟨j₁ m; 1 0 | j m⟩` from the standard rank-1 table, converted to 3j.
    fn rank_one_oracle(tj1: i32, tj: i32, tm: i32) -> f64 {
        let j1 = tj1 as f64 / 2.0;
        let m = tm as f64 / 2.0;
        let cg = if tj == tj1 + 2 {
            ((j1 + m + 1.0) * (j1 - m + 1.0) / ((2.0 * j1 + 1.0) * (j1 + 1.0))).sqrt()
        } else if tj == tj1 {
            m / (j1 * (j1 + 1.0)).sqrt()
        } else {
            -((j1 - m) * (j1 + m) / (j1 * (2.0 * j1 + 1.0))).sqrt()
        };
        // (j1 1 j; m 0 −m) = (−1)^{j1 − 1 + m} ⟨j1 m; 1 0|j m⟩ / √(2j+1)
        let phase = if ((tj1 - 2 + tm) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        phase * cg / ((tj + 1) as f64).sqrt()
    }

    #[test]
    fn matches_rank_one_table() {
        for tj1 in 1..=15 {
            for tj in [tj1 - 2, tj1, tj1 + 2] {
                if tj < 0 || (tj == tj1 && tj1 == 0) {
                    continue;
                }
                let mut tm = -tj1.min(tj);
                while tm <= tj1.min(tj) {
                    let got = wigner3j::<f64>(h(tj1), h(2), h(tj), h(tm), h(0), h(-tm));
                    let want = rank_one_oracle(tj1, tj, tm);
                    assert!((got - want).abs() < 1e-14, "tj1={tj1} tj={tj} tm={tm}: {got} vs {want}");
                    tm += 2;
                }
            }
        }
    }

    #[test]
    fn orthogonality_over_m() {
        // Σ_{m1,m2} (2j3+1) (j1 j2 j3; m1 m2 m3)² = 1
        for (tj1, tj2, tj3) in [(3, 2, 5), (4, 2, 2), (5, 3, 4), (7, 2, 7)] {
            let tm3 = if tj3 % 2 == 0 { 0 } else { 1 };
            let mut total = 0.0;
            let mut tm1 = -tj1;
            while tm1 <= tj1 {
                let tm2 = -tm1 - tm3;
                if tm2.abs() <= tj2 {
                    let v = wigner3j::<f64>(h(tj1), h(tj2), h(tj3), h(tm1), h(tm2), h(tm3));
                    total += (tj3 + 1) as f64 * v * v;
                }
                tm1 += 2;
            }
            assert!((total - 1.0).abs() < 1e-14, "{tj1} {tj2} {tj3}: {total}");
        }
    }
}
