//! Outward-rounded interval arithmetic.
//!
//! Every operation computes its endpoints in round-to-nearest and then pushes
//! each endpoint one unit in the last place outward, so the result is always
//! a superset of the exact real range. Negation, absolute value and hulls are
//! exact and are not inflated.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by partial interval operations.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("division by an interval containing zero: [{lo:e}, {hi:e}]")]
    DivisionByZero { lo: f64, hi: f64 },
    #[error("square root of an interval with a negative part: [{lo:e}, {hi:e}]")]
    NegativeSqrt { lo: f64, hi: f64 },
    #[error("invalid interval bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
}

/// Three-way sign certificate of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignClass {
    Positive,
    Negative,
    /// Contains zero, including intervals with a zero endpoint.
    Straddles,
}

impl SignClass {
    /// `+1`, `-1` or `0`.
    pub fn as_i32(self) -> i32 {
        match self {
            SignClass::Positive => 1,
            SignClass::Negative => -1,
            SignClass::Straddles => 0,
        }
    }
}

#[inline]
fn down(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v.next_down()
    }
}

#[inline]
fn up(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v.next_up()
    }
}

/// A closed interval `[lo, hi]` of reals with `f64` endpoints.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Checked constructor; rejects NaN, infinities and reversed bounds.
    pub fn new(lo: f64, hi: f64) -> Result<Self, DomainError> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(DomainError::InvalidBounds { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[v, v]` for an exact machine number.
    #[inline]
    pub fn point(v: f64) -> Self {
        debug_assert!(v.is_finite(), "non-finite point {v}");
        Interval { lo: v, hi: v }
    }

    #[inline]
    fn outward(lo: f64, hi: f64) -> Self {
        Interval {
            lo: down(lo),
            hi: up(hi),
        }
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    /// Largest absolute value in the interval.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn is_subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn overlaps(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    /// Smallest interval containing both operands.
    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Common part of both operands, `None` if they are disjoint.
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn sign_class(self) -> SignClass {
        if self.lo > 0.0 {
            SignClass::Positive
        } else if self.hi < 0.0 {
            SignClass::Negative
        } else {
            SignClass::Straddles
        }
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    /// Square, tighter than `self * self` when the interval straddles zero.
    pub fn sqr(self) -> Interval {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.lo >= 0.0 {
            Interval::outward(a, b)
        } else if self.hi <= 0.0 {
            Interval::outward(b, a)
        } else {
            Interval {
                lo: 0.0,
                hi: up(a.max(b)),
            }
        }
    }

    pub fn sqrt(self) -> Result<Interval, DomainError> {
        if self.lo < 0.0 {
            return Err(DomainError::NegativeSqrt {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(Interval {
            lo: down(self.lo.sqrt()).max(0.0),
            hi: up(self.hi.sqrt()),
        })
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval, DomainError> {
        if rhs.contains_zero() {
            return Err(DomainError::DivisionByZero { lo: rhs.lo, hi: rhs.hi });
        }
        let q = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        Ok(Interval::outward(min4(q), max4(q)))
    }

    pub fn recip(self) -> Result<Interval, DomainError> {
        Interval::ONE.checked_div(self)
    }

    /// Multiplication by an exact scalar.
    pub fn scale(self, s: f64) -> Interval {
        if s >= 0.0 {
            Interval::outward(self.lo * s, self.hi * s)
        } else {
            Interval::outward(self.hi * s, self.lo * s)
        }
    }

    pub fn max(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

#[inline]
fn min4(v: [f64; 4]) -> f64 {
    v[0].min(v[1]).min(v[2].min(v[3]))
}

#[inline]
fn max4(v: [f64; 4]) -> f64 {
    v[0].max(v[1]).max(v[2].max(v[3]))
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(v: f64) -> Self {
        Interval::point(v)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval::outward(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval::outward(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let p = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        Interval::outward(min4(p), max4(p))
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self.scale(rhs)
    }
}

impl Add<Interval> for f64 {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::point(self) + rhs
    }
}

impl Sub<Interval> for f64 {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::point(self) - rhs
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        rhs.scale(self)
    }
}

/// Interval box or interval vector in phase space `(x, y, z)`: `x` fast, `y` and `z` slow.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct IntervalVec3 {
    pub x: Interval,
    pub y: Interval,
    pub z: Interval,
}

impl IntervalVec3 {
    pub const ZERO: IntervalVec3 = IntervalVec3 {
        x: Interval::ZERO,
        y: Interval::ZERO,
        z: Interval::ZERO,
    };

    pub fn new(x: Interval, y: Interval, z: Interval) -> Self {
        IntervalVec3 { x, y, z }
    }

    pub fn from_point(p: [f64; 3]) -> Self {
        IntervalVec3 {
            x: Interval::point(p[0]),
            y: Interval::point(p[1]),
            z: Interval::point(p[2]),
        }
    }

    /// Axis-aligned box hull of a set of points.
    pub fn hull_of_points(points: &[[f64; 3]]) -> Self {
        let mut b = IntervalVec3::from_point(points[0]);
        for p in &points[1..] {
            b = b.hull(IntervalVec3::from_point(*p));
        }
        b
    }

    pub fn hull(self, other: IntervalVec3) -> Self {
        IntervalVec3 {
            x: self.x.hull(other.x),
            y: self.y.hull(other.y),
            z: self.z.hull(other.z),
        }
    }

    pub fn dot(self, other: IntervalVec3) -> Interval {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, o: IntervalVec3) -> IntervalVec3 {
        IntervalVec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn scale(self, s: f64) -> IntervalVec3 {
        IntervalVec3 {
            x: self.x.scale(s),
            y: self.y.scale(s),
            z: self.z.scale(s),
        }
    }

    pub fn components(self) -> [Interval; 3] {
        [self.x, self.y, self.z]
    }

    pub fn contains_point(self, p: [f64; 3]) -> bool {
        self.x.contains(p[0]) && self.y.contains(p[1]) && self.z.contains(p[2])
    }

    pub fn mid(self) -> [f64; 3] {
        [self.x.mid(), self.y.mid(), self.z.mid()]
    }
}

impl Add for IntervalVec3 {
    type Output = IntervalVec3;
    fn add(self, o: IntervalVec3) -> IntervalVec3 {
        IntervalVec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for IntervalVec3 {
    type Output = IntervalVec3;
    fn sub(self, o: IntervalVec3) -> IntervalVec3 {
        IntervalVec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for IntervalVec3 {
    type Output = IntervalVec3;
    fn neg(self) -> IntervalVec3 {
        IntervalVec3::new(-self.x, -self.y, -self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn add_encloses_exact_sum() {
        let r = iv(1.0, 2.0) + iv(3.0, 4.0);
        assert!(iv(4.0, 6.0).is_subset_of(r));
        assert!(r.lo() > 4.0 - 1e-14 && r.hi() < 6.0 + 1e-14);
    }

    #[test]
    fn mul_sign_cases() {
        let r = iv(-1.0, 2.0) * iv(3.0, 4.0);
        assert!(iv(-4.0, 8.0).is_subset_of(r));
        assert!(r.lo() > -4.0 - 1e-14 && r.hi() < 8.0 + 1e-14);
        let r = iv(-2.0, -1.0) * iv(-3.0, 5.0);
        assert!(iv(-10.0, 6.0).is_subset_of(r));
    }

    #[test]
    fn sqrt_of_exact_squares() {
        let r = iv(4.0, 9.0).sqrt().unwrap();
        assert!(iv(2.0, 3.0).is_subset_of(r));
        assert!(r.width() < 1.0 + 1e-14);
    }

    #[test]
    fn partial_ops_reject_bad_domains() {
        assert!(matches!(
            iv(1.0, 2.0).checked_div(iv(-1.0, 1.0)),
            Err(DomainError::DivisionByZero { .. })
        ));
        assert!(iv(1.0, 2.0).checked_div(iv(0.0, 1.0)).is_err());
        assert!(matches!(iv(-1e-300, 1.0).sqrt(), Err(DomainError::NegativeSqrt { .. })));
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn division_and_reciprocal() {
        let r = iv(1.0, 2.0).checked_div(iv(4.0, 8.0)).unwrap();
        assert!(iv(0.125, 0.5).is_subset_of(r));
        let r = iv(1.0, 2.0).checked_div(iv(-8.0, -4.0)).unwrap();
        assert!(iv(-0.5, -0.125).is_subset_of(r));
        assert!(iv(-0.5, -0.25).is_subset_of(iv(-4.0, -2.0).recip().unwrap()));
    }

    #[test]
    fn hull_cases() {
        assert_eq!(iv(1.0, 2.0).hull(iv(3.0, 4.0)), iv(1.0, 4.0));
        assert_eq!(iv(0.0, 1.0).hull(iv(0.5, 0.7)), iv(0.0, 1.0));
        assert_eq!(iv(-1.0, 0.0).hull(iv(0.0, 1.0)), iv(-1.0, 1.0));
        assert_eq!(iv(0.0, 2.0).intersect(iv(1.0, 3.0)), Some(iv(1.0, 2.0)));
        assert_eq!(iv(0.0, 1.0).intersect(iv(2.0, 3.0)), None);
    }

    #[test]
    fn sign_classes() {
        assert_eq!(iv(0.1, 3.0).sign_class(), SignClass::Positive);
        assert_eq!(iv(-2.0, -1e-300).sign_class(), SignClass::Negative);
        assert_eq!(iv(0.0, 1.0).sign_class(), SignClass::Straddles);
        assert_eq!(iv(-1.0, 0.0).sign_class(), SignClass::Straddles);
        assert_eq!(Interval::ZERO.sign_class(), SignClass::Straddles);
    }

    #[test]
    fn abs_sqr_and_scale() {
        assert_eq!(iv(-3.0, 2.0).abs(), iv(0.0, 3.0));
        assert_eq!(iv(-3.0, -2.0).abs(), iv(2.0, 3.0));
        let s = iv(-3.0, 2.0).sqr();
        assert_eq!(s.lo(), 0.0);
        assert!(s.contains(9.0));
        let s = iv(-3.0, -2.0).sqr();
        assert!(iv(4.0, 9.0).is_subset_of(s));
        let s = iv(1.0, 2.0).scale(-0.5);
        assert!(iv(-1.0, -0.5).is_subset_of(s));
    }

    #[test]
    fn point_ops_are_inflated_by_one_ulp() {
        let r = Interval::point(0.1) + Interval::point(0.2);
        assert!(r.lo() < r.hi());
        assert_eq!(r.lo().next_up().next_up(), r.hi());
    }

    #[test]
    fn overflow_saturates_soundly() {
        let big = Interval::point(f64::MAX);
        let r = big * big;
        assert_eq!(r.hi(), f64::INFINITY);
        let r = r - r;
        assert!(r.contains_zero());
        assert!(!r.lo().is_nan() && !r.hi().is_nan());
    }

    #[test]
    fn vector_cross_and_dot() {
        let e1 = IntervalVec3::from_point([1.0, 0.0, 0.0]);
        let e2 = IntervalVec3::from_point([0.0, 1.0, 0.0]);
        let c = e1.cross(e2);
        assert!(c.z.contains(1.0) && c.x.contains(0.0) && c.y.contains(0.0));
        assert!(e1.dot(e2).contains(0.0));
        let b = IntervalVec3::hull_of_points(&[[0.0, 1.0, 2.0], [1.0, -1.0, 3.0]]);
        assert_eq!(b.y, iv(-1.0, 1.0));
        assert!(b.contains_point([0.5, 0.0, 2.5]));
    }
}
