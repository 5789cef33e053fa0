//! Angular factors of the `z`-polarized dipole coupling.

use crate::real::Real;
use crate::rel_structure::KappaChannel;

use super::wigner::{wigner3j_exact, HalfInt, Surd};

/// Relativistic channel with magnetic quantum number `m` (stored doubled).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelLabel {
    pub channel: KappaChannel,
    pub two_m: i32,
}

impl RelLabel {
    /// The `m = 1/2` sublevel used throughout propagation.
    pub fn half(channel: KappaChannel) -> Self {
        Self { channel, two_m: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonrelLabel {
    pub l: i32,
    pub m: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngularFactor {
    pub exact: Surd,
    pub value: f64,
    pub same_m: bool,
    pub unit_delta_l: bool,
}

impl AngularFactor {
    fn build(exact: Surd, same_m: bool, unit_delta_l: bool) -> Self {
        let exact = if same_m && unit_delta_l { exact } else { Surd::zero() };
        let value = exact.to_f64();
        Self { exact, value, same_m, unit_delta_l }
    }

    pub fn allowed(&self) -> bool {
        self.same_m && self.unit_delta_l
    }

    pub fn get<T: Real>(&self) -> T {
        T::of(self.value)
    }
}

fn sign_of_half(twice: i32) -> bool {
    // true when (−1)^{twice/2} = −1; `twice` is even.
    (twice / 2).rem_euclid(2) == 1
}

/// `W_fi = (−1)^{j_f−m_f} (−1)^{j_i+½} √((2j_f+1)(2j_i+1))
///        (j_f 1 j_i; −m_f 0 m_i) (j_f 1 j_i; −½ 0 ½)`
pub fn angular_rel(f: RelLabel, i: RelLabel) -> AngularFactor {
    let (tjf, tji) = (f.channel.two_j(), i.channel.two_j());
    let one = HalfInt::int(1);
    let zero = HalfInt::int(0);
    let a = wigner3j_exact(
        HalfInt::from_twice(tjf),
        one,
        HalfInt::from_twice(tji),
        HalfInt::from_twice(-f.two_m),
        zero,
        HalfInt::from_twice(i.two_m),
    );
    let b = wigner3j_exact(
        HalfInt::from_twice(tjf),
        one,
        HalfInt::from_twice(tji),
        HalfInt::from_twice(-1),
        zero,
        HalfInt::from_twice(1),
    );
    let mut w = a.value.mul(&b.value).mul(&Surd::new(false, ((tjf + 1) * (tji + 1)) as i64, 1));
    if sign_of_half(tjf - f.two_m) != sign_of_half(tji + 1) {
        w = w.negate();
    }
    let same_m = f.two_m == i.two_m;
    let unit_delta_l = (f.channel.l() - i.channel.l()).abs() == 1;
    AngularFactor::build(w, same_m, unit_delta_l)
}

/// `W_fi = (−1)^{l_f−m_f} (−1)^{l_f} √((2l_f+1)(2l_i+1))
///        (l_f 1 l_i; −m_f 0 m_i) (l_f 1 l_i; 0 0 0)`
pub fn angular_nonrel(f: NonrelLabel, i: NonrelLabel) -> AngularFactor {
    let one = HalfInt::int(1);
    let zero = HalfInt::int(0);
    let (lf, li) = (HalfInt::int(f.l), HalfInt::int(i.l));
    let a = wigner3j_exact(lf, one, li, HalfInt::int(-f.m), zero, HalfInt::int(i.m));
    let b = wigner3j_exact(lf, one, li, zero, zero, zero);
    let mut w = a.value.mul(&b.value).mul(&Surd::new(false, ((2 * f.l + 1) * (2 * i.l + 1)) as i64, 1));
    if (f.l - f.m + f.l).rem_euclid(2) == 1 {
        w = w.negate();
    }
    AngularFactor::build(w, f.m == i.m, (f.l - i.l).abs() == 1)
}
