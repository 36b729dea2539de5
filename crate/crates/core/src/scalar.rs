//! Scalar abstraction and exact exponent arithmetic.
//!
//! All numerical kernels are generic over [`Real`], which is implemented for
//! `f32` and `f64`. Lebesgue exponents are kept as exact rationals so that
//! combinations such as `d(1/α − 1/q − 1/p)` cancel to exactly zero when they
//! should, and `∞` is a distinguished value rather than a float sentinel.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Floating point scalar used by every kernel in the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot hold
    /// the value, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    #[inline]
    fn from_ratio(r: Rational64) -> Self {
        Self::from_int(*r.numer()) / Self::from_int(*r.denom())
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x^e` for an exact rational exponent.
///
/// Integer exponents go through `powi`, everything else through `powf`.
/// Equal `(x, e)` always take the same path, so two call sites that build the
/// same rational exponent get bit-identical results.
#[inline]
pub fn pow_rational<T: Real>(x: T, e: Rational64) -> T {
    if e.is_zero() {
        T::one()
    } else if e.is_one() {
        x
    } else if e.is_integer() && e.numer().abs() <= 64 {
        x.powi(*e.numer() as i32)
    } else {
        x.powf(T::from_ratio(e))
    }
}

/// An extended Lebesgue exponent in `(0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(Rational64::new_raw(1, 1));
    pub const TWO: Exponent = Exponent::Finite(Rational64::new_raw(2, 1));
    pub const INFINITY: Exponent = Exponent::Infinite;

    pub fn integer(n: i64) -> Result<Self, Error> {
        Self::rational(Rational64::from_integer(n))
    }

    pub fn rational(r: Rational64) -> Result<Self, Error> {
        if r <= Rational64::zero() {
            return Err(Error::InvalidExponent(format!("{r} is not positive")));
        }
        Ok(Exponent::Finite(r))
    }

    /// Converts a float to the nearest simple rational (`1.5` becomes `3/2`).
    pub fn from_f64(x: f64) -> Result<Self, Error> {
        if x == f64::INFINITY {
            return Ok(Exponent::Infinite);
        }
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::InvalidExponent(format!("{x} is not a positive exponent")));
        }
        let r = Rational64::approximate_float(x)
            .ok_or_else(|| Error::InvalidExponent(format!("{x} has no rational form")))?;
        Self::rational(r)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// `1/e` with the convention `1/∞ = 0`.
    pub fn recip(&self) -> Rational64 {
        match self {
            Exponent::Finite(r) => r.recip(),
            Exponent::Infinite => Rational64::zero(),
        }
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            Exponent::Finite(r) => Some(*r),
            Exponent::Infinite => None,
        }
    }

    pub fn value<T: Real>(&self) -> T {
        match self {
            Exponent::Finite(r) => T::from_ratio(*r),
            Exponent::Infinite => T::infinity(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value::<f64>()
    }

    /// `|x|^e` for finite `e`, with exact shortcuts for `e = 1, 2`.
    #[inline]
    pub fn pow_abs<T: Real>(&self, x: T) -> T {
        let a = x.abs();
        match self {
            Exponent::Finite(r) if r.is_one() => a,
            Exponent::Finite(r) if *r == Rational64::from_integer(2) => a * a,
            Exponent::Finite(r) => pow_rational(a, *r),
            Exponent::Infinite => a,
        }
    }

    /// `x^{1/e}`, which is 1 for `e = ∞`.
    #[inline]
    pub fn root<T: Real>(&self, x: T) -> T {
        match self {
            Exponent::Finite(r) if r.is_one() => x,
            Exponent::Finite(r) if *r == Rational64::from_integer(2) => x.sqrt(),
            Exponent::Finite(r) => pow_rational(x, r.recip()),
            Exponent::Infinite => T::one(),
        }
    }

    fn check_at_least_one(&self, name: &str) -> Result<(), Error> {
        match self {
            Exponent::Finite(r) if *r < Rational64::one() => Err(Error::InvalidExponent(format!(
                "{name} = {r} must be at least 1"
            ))),
            _ => Ok(()),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Infinite, Exponent::Infinite) => Ordering::Equal,
            (Exponent::Infinite, _) => Ordering::Greater,
            (_, Exponent::Infinite) => Ordering::Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinite => write!(f, "inf"),
            Exponent::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Exponent::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Exponent::Infinite),
            _ => {}
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| Error::InvalidExponent(s.to_string()))?;
            let d: i64 = d.trim().parse().map_err(|_| Error::InvalidExponent(s.to_string()))?;
            if d == 0 {
                return Err(Error::InvalidExponent(s.to_string()));
            }
            return Self::rational(Rational64::new(n, d));
        }
        let x: f64 = t.parse().map_err(|_| Error::InvalidExponent(s.to_string()))?;
        Self::from_f64(x)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Infinite => s.serialize_str("inf"),
            Exponent::Finite(r) if r.is_integer() => s.serialize_i64(*r.numer()),
            Exponent::Finite(r) => s.serialize_f64(<f64 as Real>::from_ratio(*r)),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(x) => Exponent::from_f64(x),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Inner exponent `q` and outer exponent `p` of an amalgam-type norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentPair {
    pub q: Exponent,
    pub p: Exponent,
}

impl ExponentPair {
    /// The Fofana-space range `1 ≤ q ≤ p ≤ ∞`.
    pub fn new(q: Exponent, p: Exponent) -> Result<Self, Error> {
        let pair = Self::unordered(q, p)?;
        if q > p {
            return Err(Error::InvalidExponent(format!("need q ≤ p, got q = {q}, p = {p}")));
        }
        Ok(pair)
    }

    /// Any `1 ≤ q, p ≤ ∞`. Plain amalgam norms are defined for every such pair.
    pub fn unordered(q: Exponent, p: Exponent) -> Result<Self, Error> {
        q.check_at_least_one("q")?;
        p.check_at_least_one("p")?;
        Ok(Self { q, p })
    }

    pub fn from_f64(q: f64, p: f64) -> Result<Self, Error> {
        Self::new(Exponent::from_f64(q)?, Exponent::from_f64(p)?)
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q={}, p={})", self.q, self.p)
    }
}

/// `d · r` as an exact rational.
pub(crate) fn scaled(d: usize, r: Rational64) -> Rational64 {
    r * Rational64::from_integer(d as i64)
}
