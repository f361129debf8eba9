//! Arithmetic backends.
//!
//! Every geometric routine in this crate is written against [`Scalar`]. Two
//! backends implement it: [`Rational`] (arbitrary precision, comparisons are
//! decided exactly) and `f64` (comparisons use a single global tolerance τ).

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Exact rational backend.
pub type Rational = BigRational;

/// Default float tolerance τ, in table units.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static FLOAT_TOLERANCE: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Sets the float backend tolerance τ for the whole process.
///
/// Non-positive or non-finite values are ignored.
pub fn set_float_tolerance(tau: f64) {
    if tau.is_finite() && tau > 0.0 {
        FLOAT_TOLERANCE.store(tau.to_bits(), AtomicOrdering::Relaxed);
    }
}

pub fn float_tolerance() -> f64 {
    f64::from_bits(FLOAT_TOLERANCE.load(AtomicOrdering::Relaxed))
}

/// Number type shared by the exact and float backends.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + ToPrimitive + Send + Sync + 'static
{
    /// `true` for backends whose comparisons need no tolerance.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn from_frac(num: i64, den: i64) -> Self;

    /// Conversion from a float. The exact backend only accepts it when
    /// `allow_lossy` is set, and then converts the binary value exactly.
    fn from_f64(x: f64, allow_lossy: bool) -> Option<Self>;

    /// Zero for the exact backend, τ for floats.
    fn tolerance() -> Self;

    /// Parses an integer, a fraction `p/q`, or (float backend only) a decimal.
    fn parse(s: &str) -> Result<Self, ParseError>;

    /// Lossless textual rendering: `p/q` (or `p`) for rationals, shortest
    /// round-trip decimal for floats.
    fn to_exact_string(&self) -> String;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Sign with backend equality: values within τ of zero are `Equal`.
    fn sign_cmp(&self) -> Ordering {
        let tol = Self::tolerance();
        if *self > tol {
            Ordering::Greater
        } else if *self < -tol.clone() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn is_pos(&self) -> bool {
        self.sign_cmp() == Ordering::Greater
    }

    fn is_neg(&self) -> bool {
        self.sign_cmp() == Ordering::Less
    }

    fn is_zero_tol(&self) -> bool {
        self.sign_cmp() == Ordering::Equal
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero_tol()
    }

    /// Backend comparison: `Equal` when the values agree within τ.
    fn cmp_tol(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign_cmp()
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::from_frac(1, 2)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_frac(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64, allow_lossy: bool) -> Option<Self> {
        if allow_lossy {
            BigRational::from_float(x)
        } else if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
            Some(Self::from_int(x as i64))
        } else {
            None
        }
    }

    fn tolerance() -> Self {
        Self::zero()
    }

    fn parse(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let bad = || ParseError::Number(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(BigRational::from_integer(n))
            }
        }
    }

    fn to_exact_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_frac(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(x: f64, _allow_lossy: bool) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn tolerance() -> Self {
        float_tolerance()
    }

    fn parse(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let bad = || ParseError::Number(s.to_string());
        let v = match s.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().map_err(|_| bad())?;
                let d: f64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0.0 {
                    return Err(bad());
                }
                n / d
            }
            None => s.parse().map_err(|_| bad())?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    }

    fn to_exact_string(&self) -> String {
        format!("{self:?}")
    }
}

/// Angular distance on the circle, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`,
/// found by walking the continued fraction expansions of both ends.
pub fn simplest_rational_in(lo: f64, hi: f64) -> Option<(i64, i64)> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return None;
    }
    if lo <= 0.0 && hi >= 0.0 {
        return Some((0, 1));
    }
    if hi < 0.0 {
        return simplest_rational_in(-hi, -lo).map(|(p, q)| (-p, q));
    }
    // Convergent recurrences for the shared continued fraction prefix.
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..64 {
        let fa = a.floor();
        if fa + 1.0 <= b || fa == a {
            // An integer lies in [a, b]: take the smallest one.
            let t = if fa == a { fa } else { fa + 1.0 };
            let t = t as i64;
            let p = t.checked_mul(p1)?.checked_add(p0)?;
            let q = t.checked_mul(q1)?.checked_add(q0)?;
            return Some((p, q));
        }
        let t = fa as i64;
        let p = t.checked_mul(p1)?.checked_add(p0)?;
        let q = t.checked_mul(q1)?.checked_add(q0)?;
        p0 = p1;
        q0 = q1;
        p1 = p;
        q1 = q;
        let (na, nb) = (1.0 / (b - fa), 1.0 / (a - fa));
        a = na;
        b = nb;
    }
    None
}

/// A user-facing decimal as a scalar. The exact backend takes the simplest
/// fraction within a relative 1e-12 of `x`, so `0.4` becomes `2/5`.
pub fn from_decimal<S: Scalar>(x: f64) -> Option<S> {
    if !S::EXACT {
        return S::from_f64(x, false);
    }
    let slack = 1e-12 * x.abs().max(1.0);
    match simplest_rational_in(x - slack, x + slack) {
        Some((p, q)) => Some(S::from_frac(p, q)),
        None => S::from_f64(x, true),
    }
}
