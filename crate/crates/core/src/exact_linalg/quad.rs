//! Elements `a + b·sqrt(d)` of a real quadratic field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{sign_of_surd, LinalgError, Rational};

/// `a + b·sqrt(d)` with `d` squarefree.
///
/// `d = 1` is reserved for rationals embedded with `b = 0`; such values mix
/// freely with any field. Operator impls panic on a field mismatch, the
/// `checked_*` methods return [`LinalgError::FieldMismatch`] instead.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuadRepr", into = "QuadRepr")]
pub struct QuadNum {
    a: Rational,
    b: Rational,
    d: u64,
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    a: Rational,
    b: Rational,
    d: u64,
}

impl TryFrom<QuadRepr> for QuadNum {
    type Error = LinalgError;
    fn try_from(r: QuadRepr) -> Result<Self, Self::Error> {
        QuadNum::new(r.a, r.b, r.d)
    }
}

impl From<QuadNum> for QuadRepr {
    fn from(q: QuadNum) -> Self {
        QuadRepr { a: q.a, b: q.b, d: q.d }
    }
}

fn is_squarefree(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl QuadNum {
    /// Builds `a + b sqrt(d)`; `d` must be squarefree, and `d = 1` only with `b = 0`.
    pub fn new(a: Rational, b: Rational, d: u64) -> Result<Self, LinalgError> {
        if d == 0 || !is_squarefree(d) {
            return Err(LinalgError::Parse(format!("{d} is not a positive squarefree integer")));
        }
        if d == 1 && !b.is_zero() {
            return Err(LinalgError::Parse("d = 1 requires b = 0".into()));
        }
        Ok(Self::raw(a, b, d))
    }

    fn raw(a: Rational, b: Rational, d: u64) -> Self {
        // A rational keeps d = 1 so it can combine with any field.
        if b.is_zero() {
            QuadNum { a, b, d: 1 }
        } else {
            QuadNum { a, b, d }
        }
    }

    pub fn rational(a: Rational) -> Self {
        QuadNum { a, b: Rational::zero(), d: 1 }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(Rational::from_int(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: u64) -> Result<Self, LinalgError> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// Field parameter; 1 for rational values.
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.a.is_integer()
    }

    fn common_d(&self, other: &Self) -> Result<u64, LinalgError> {
        match (self.d, other.d) {
            (x, y) if x == y => Ok(x),
            (1, y) => Ok(y),
            (x, 1) => Ok(x),
            (x, y) => Err(LinalgError::FieldMismatch(x, y)),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, LinalgError> {
        let d = self.common_d(o)?;
        Ok(Self::raw(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, LinalgError> {
        let d = self.common_d(o)?;
        Ok(Self::raw(&self.a - &o.a, &self.b - &o.b, d))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, LinalgError> {
        let d = self.common_d(o)?;
        let dr = Rational::from_int(d as i64);
        let a = &self.a * &o.a + &(&self.b * &o.b) * &dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(Self::raw(a, b, d))
    }

    /// Field conjugate `a - b sqrt(d)`.
    pub fn conj(&self) -> Self {
        Self::raw(self.a.clone(), -&self.b, self.d)
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        let dr = Rational::from_int(self.d as i64);
        &self.a * &self.a - &(&self.b * &self.b) * &dr
    }

    pub fn recip(&self) -> Result<Self, LinalgError> {
        let n = self.norm();
        let inv = n.recip().ok_or(LinalgError::DivisionByZero)?;
        Ok(Self::raw(&self.a * &inv, -&(&self.b * &inv), self.d))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, LinalgError> {
        self.checked_mul(&o.recip()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::raw(&self.a * r, &self.b * r, self.d)
    }

    pub fn signum(&self) -> Ordering {
        sign_of_surd(&self.a, &self.b, self.d)
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let naive = self.a.to_f64() + self.b.to_f64() * (self.d as f64).sqrt();
        if self.is_rational() || self.a.is_negative() == self.b.is_negative() {
            return naive;
        }
        // Opposite signs cancel; x = norm / conj(x) is stable.
        let c = self.conj();
        let cf = c.a.to_f64() + c.b.to_f64() * (self.d as f64).sqrt();
        self.norm().to_f64() / cf
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor();
        }
        // floor(b sqrt d) from an integer square root, then correct by sign tests.
        let p = self.b.numer().clone();
        let q = self.b.denom().clone();
        let r = (&p * &p * BigInt::from(self.d)).sqrt();
        let t = if p.sign() == num_bigint::Sign::Minus {
            -(r.div_floor(&q) + BigInt::one())
        } else {
            r.div_floor(&q)
        };
        let mut k = self.a.floor() + t;
        loop {
            let lower = self.checked_sub(&QuadNum::rational(Rational::from_int(k.clone()))).unwrap();
            if lower.signum() == Ordering::Less {
                k -= 1;
                continue;
            }
            let upper = self
                .checked_sub(&QuadNum::rational(Rational::from_int(&k + BigInt::one())))
                .unwrap();
            if upper.signum() != Ordering::Less {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// Exact fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        let k = self.floor();
        self.checked_sub(&QuadNum::rational(Rational::from_int(k))).unwrap()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QuadNum::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|x| x.signum())
    }
}

impl From<Rational> for QuadNum {
    fn from(r: Rational) -> Self {
        QuadNum::rational(r)
    }
}

impl From<i64> for QuadNum {
    fn from(n: i64) -> Self {
        QuadNum::int(n)
    }
}

macro_rules! quad_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a QuadNum> for &'a QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: &'a QuadNum) -> QuadNum {
                self.$checked(rhs).expect("quadratic field mismatch")
            }
        }
        impl $tr for QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: QuadNum) -> QuadNum {
                (&self).$m(&rhs)
            }
        }
    };
}

quad_op!(Add, add, checked_add);
quad_op!(Sub, sub, checked_sub);
quad_op!(Mul, mul, checked_mul);
quad_op!(Div, div, checked_div);

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::raw(-self.a, -self.b, self.d)
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::raw(-&self.a, -&self.b, self.d)
    }
}

impl fmt::Debug for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{:?}", self.a)
        } else {
            write!(f, "{:?} + {:?}·√{}", self.a, self.b, self.d)
        }
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
