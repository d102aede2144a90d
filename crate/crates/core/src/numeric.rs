//! Exact arithmetic over the field Q(sqrt(17)).
//!
//! All potential parameters used by the move engine are of the form
//! `(a + b*sqrt(17)) / 16` with small integers `a`, `b`. Working in the field
//! directly keeps every potential comparison exact, so move choices and their
//! tie-breaks never depend on floating summation order. Doubles appear only
//! at display boundaries.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_rational::Rational64;
use num_traits::{Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rat = Rational64;

/// Convenience constructor for a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// An element `a + b*sqrt(17)` of the real quadratic field Q(sqrt(17)).
///
/// Equality is exact: sqrt(17) is irrational, so the representation is
/// canonical. Ordering is decided by an exact sign test, never by floats.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct Q17 {
    a: Rat,
    b: Rat,
}

impl Q17 {
    pub const ZERO: Q17 = Q17 { a: Rat::new_raw(0, 1), b: Rat::new_raw(0, 1) };

    pub fn new(a: Rat, b: Rat) -> Self {
        Q17 { a, b }
    }

    /// Purely rational element.
    pub fn rational(a: Rat) -> Self {
        Q17 { a, b: Rat::zero() }
    }

    pub fn from_int(a: i64) -> Self {
        Q17::rational(Rat::from_integer(a))
    }

    /// `(a + b*sqrt(17)) / 16`, the shape of every tabulated constant.
    pub fn sixteenth(a: i64, b: i64) -> Self {
        Q17 { a: rat(a, 16), b: rat(b, 16) }
    }

    /// Rational part.
    pub fn rational_part(&self) -> Rat {
        self.a
    }

    /// Coefficient of sqrt(17).
    pub fn radical_part(&self) -> Rat {
        self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of the value: -1, 0 or +1.
    ///
    /// For mixed-sign coefficients the sign follows from comparing `a^2`
    /// with `17 b^2`; the two can never be equal for nonzero rationals
    /// because 17 is not a perfect square.
    pub fn signum(&self) -> i32 {
        let (sa, sb) = (sign(self.a), sign(self.b));
        match (sa, sb) {
            (0, 0) => 0,
            (s, 0) | (0, s) => s,
            (1, 1) => 1,
            (-1, -1) => -1,
            _ => {
                let lhs = self.a * self.a;
                let rhs = self.b * self.b * Rat::from_integer(17);
                debug_assert_ne!(lhs, rhs, "sqrt(17) cannot be rational");
                // a and b have opposite signs; the larger square wins for
                // whichever term carries it.
                if lhs > rhs { sa } else { sb }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other { self } else { other }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other { self } else { other }
    }

    /// Approximate value for display and tolerance checks.
    pub fn to_f64(&self) -> f64 {
        ratio_f64(self.a) + ratio_f64(self.b) * 17f64.sqrt()
    }
}

fn sign(r: Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn ratio_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl PartialOrd for Q17 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q17 {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl Add for Q17 {
    type Output = Q17;
    fn add(self, rhs: Q17) -> Q17 {
        Q17 { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl AddAssign for Q17 {
    fn add_assign(&mut self, rhs: Q17) {
        *self = *self + rhs;
    }
}

impl Sub for Q17 {
    type Output = Q17;
    fn sub(self, rhs: Q17) -> Q17 {
        Q17 { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl SubAssign for Q17 {
    fn sub_assign(&mut self, rhs: Q17) {
        *self = *self - rhs;
    }
}

impl Neg for Q17 {
    type Output = Q17;
    fn neg(self) -> Q17 {
        Q17 { a: -self.a, b: -self.b }
    }
}

impl Mul for Q17 {
    type Output = Q17;
    fn mul(self, rhs: Q17) -> Q17 {
        // (a + b r)(c + d r) = ac + 17 bd + (ad + bc) r  with  r = sqrt(17)
        Q17 {
            a: self.a * rhs.a + Rat::from_integer(17) * self.b * rhs.b,
            b: self.a * rhs.b + self.b * rhs.a,
        }
    }
}

impl Mul<Rat> for Q17 {
    type Output = Q17;
    fn mul(self, rhs: Rat) -> Q17 {
        Q17 { a: self.a * rhs, b: self.b * rhs }
    }
}

impl Mul<i64> for Q17 {
    type Output = Q17;
    fn mul(self, rhs: i64) -> Q17 {
        self * Rat::from_integer(rhs)
    }
}

impl From<Rat> for Q17 {
    fn from(r: Rat) -> Self {
        Q17::rational(r)
    }
}

impl From<i64> for Q17 {
    fn from(n: i64) -> Self {
        Q17::from_int(n)
    }
}

impl fmt::Debug for Q17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt17 (~{:.6})", self.a, self.b, self.to_f64())
    }
}

impl fmt::Display for Q17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{:.9}", self.to_f64())
        }
    }
}

/// Embeds a double exactly as a rational (every finite f64 is rational).
///
/// Used when callers hand in custom parameters as doubles; the embedding is
/// exact, so later comparisons still are.
pub fn rational_from_f64(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    // Scale by powers of two until integral; f64 mantissas are finite binary
    // fractions, so this terminates well before the i64 range is exhausted.
    let mut num = x;
    let mut den: i64 = 1;
    for _ in 0..60 {
        if num.fract() == 0.0 {
            if num.abs() > i64::MAX as f64 {
                return None;
            }
            return Some(rat(num as i64, den));
        }
        num *= 2.0;
        den = den.checked_mul(2)?;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt17() -> Q17 {
        Q17::new(Rat::zero(), Rat::from_integer(1))
    }

    #[test]
    fn zero_constant_is_zero() {
        assert!(Q17::ZERO.is_zero());
        assert_eq!(Q17::ZERO + Q17::from_int(3), Q17::from_int(3));
    }

    #[test]
    fn sqrt17_squares_to_17() {
        let r = sqrt17();
        assert_eq!(r * r, Q17::from_int(17));
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 5 - sqrt(17) > 0, 4 - sqrt(17) < 0
        assert_eq!((Q17::from_int(5) - sqrt17()).signum(), 1);
        assert_eq!((Q17::from_int(4) - sqrt17()).signum(), -1);
        // sqrt(17) - 4 > 0
        assert_eq!((sqrt17() - Q17::from_int(4)).signum(), 1);
        assert_eq!(Q17::ZERO.signum() * 0, 0);
    }

    #[test]
    fn ordering_matches_f64() {
        let vals = [
            Q17::sixteenth(9, -1),
            Q17::sixteenth(5, 3),
            Q17::from_int(2),
            Q17::sixteenth(1, 7),
            Q17::sixteenth(23, 1),
        ];
        for x in &vals {
            for y in &vals {
                let exact = x.cmp(y);
                let approx = x.to_f64().partial_cmp(&y.to_f64()).unwrap();
                assert_eq!(exact, approx, "{x:?} vs {y:?}");
            }
        }
    }

    #[test]
    fn f64_embedding_is_exact() {
        assert_eq!(rational_from_f64(0.25), Some(rat(1, 4)));
        assert_eq!(rational_from_f64(3.0), Some(rat(3, 1)));
        assert_eq!(rational_from_f64(-1.5), Some(rat(-3, 2)));
        assert!(rational_from_f64(f64::NAN).is_none());
    }
}
