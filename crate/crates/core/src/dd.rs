//! Minimal double-double arithmetic (about 32 significant digits).
//!
//! Only what the alternating overlap series needs: sums, products with `f64`
//! and division by `f64`. Built on the error-free `two_sum` / `fma` products.

use std::ops::{Add, AddAssign, Neg};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    #[cfg(test)]
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact square of an `f64`.
    pub fn square_of(x: f64) -> Self {
        let (hi, lo) = two_prod(x, x);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = self.lo.mul_add(b, e);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, t) = two_sum(self.hi, -p);
        let t = t - e + self.lo;
        let q2 = (s + t) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_bits() {
        // 1 + 1e-20 - 1 vanishes in f64 but not here.
        let x = DoubleDouble::ONE + DoubleDouble::from_f64(1e-20) + DoubleDouble::from_f64(-1.0);
        assert!((x.to_f64() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn division_round_trip() {
        let third = DoubleDouble::ONE.div_f64(3.0);
        let back = third.mul_f64(3.0) + DoubleDouble::from_f64(-1.0);
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn exact_square() {
        let x = 0.1f64;
        let s = DoubleDouble::square_of(x);
        // hi + lo reproduces x*x beyond f64 rounding
        assert_eq!(s.hi, x * x);
        assert_eq!(s.lo, x.mul_add(x, -(x * x)));
        let m = s.mul(DoubleDouble::ONE);
        assert_eq!(m, s);
    }
}
