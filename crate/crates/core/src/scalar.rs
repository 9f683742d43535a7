//! Exact arithmetic in the quadratic field Q(sqrt 2).
//!
//! Every coordinate handled by the game is a [`Scalar`] `p + q*sqrt(2)` with
//! rational `p` and `q`. Sign, equality and order are decided exactly, which
//! lets the catalog tell rational points from irrational ones without any
//! floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

pub type Rational = BigRational;

static PRECISION_BITS: AtomicU32 = AtomicU32::new(64);

/// Bits of precision used when an irrational scalar has to be rounded to a
/// rational bound (enclosures, distance intervals).
pub fn precision_bits() -> u32 {
    PRECISION_BITS.load(AtomicOrdering::Relaxed)
}

/// Sets the process-wide rounding precision. Values below 16 are raised to 16.
pub fn set_precision_bits(bits: u32) {
    PRECISION_BITS.store(bits.max(16), AtomicOrdering::Relaxed);
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-k` as a rational.
pub fn pow2_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Rational bounds `lo <= sqrt(2) <= hi` with `hi - lo = 2^-bits`.
pub fn sqrt2_bounds(bits: u32) -> (Rational, Rational) {
    let scaled: BigUint = BigUint::from(2u32) << (2 * bits as usize);
    let root = scaled.sqrt();
    let den = BigInt::one() << bits;
    let lo = Rational::new(BigInt::from(root.clone()), den.clone());
    let hi = Rational::new(BigInt::from(root + 1u32), den);
    (lo, hi)
}

/// Largest rational `r` with denominator `2^bits` and `r^2 <= x` (x >= 0).
pub fn sqrt_floor(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (x * Rational::from_integer(scale)).floor().to_integer();
    let root = scaled.to_biguint().unwrap_or_default().sqrt();
    Rational::new(BigInt::from(root), BigInt::one() << bits)
}

/// Smallest rational `r` with denominator `2^bits` and `r^2 >= x` (x >= 0).
pub fn sqrt_ceil(x: &Rational, bits: u32) -> Rational {
    let lo = sqrt_floor(x, bits);
    if &(&lo * &lo) == x {
        lo
    } else {
        lo + pow2_neg(bits)
    }
}

/// Exact square root of a non-negative rational, if it has one.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().to_biguint()?;
    let d = x.denom().to_biguint()?;
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &rn * &rn == n && &rd * &rd == d {
        Some(Rational::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den`, a plain integer, or a finite decimal such as `-0.625`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let s = text.trim();
    let bad = || ParseError::Rational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let mag = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        let r = Rational::new(mag, den);
        return Ok(if negative { -r } else { r });
    }
    Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

/// An element `p + q*sqrt(2)` of Q(sqrt 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    p: Rational,
    q: Rational,
}

impl Scalar {
    pub fn new(p: Rational, q: Rational) -> Self {
        Scalar { p, q }
    }

    pub fn from_rational(p: Rational) -> Self {
        Scalar { p, q: Rational::zero() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn sqrt2() -> Self {
        Scalar { p: Rational::zero(), q: Rational::one() }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.p
    }

    pub fn sqrt2_part(&self) -> &Rational {
        &self.q
    }

    /// True when the value lies in Q (the sqrt 2 component vanishes).
    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Exact sign of `p + q*sqrt(2)`.
    pub fn signum(&self) -> Ordering {
        let sp = self.p.cmp(&Rational::zero());
        let sq = self.q.cmp(&Rational::zero());
        match (sp, sq) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (a, b) if a == b => a,
            _ => {
                // opposite signs: compare p^2 with 2 q^2
                let p2 = &self.p * &self.p;
                let q2 = &self.q * &self.q * rat_int(2);
                match p2.cmp(&q2) {
                    Ordering::Greater => sp,
                    Ordering::Less => sq,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, r: &Rational) -> Scalar {
        let q = if self.q.is_zero() { Rational::zero() } else { &self.q * r };
        Scalar { p: &self.p * r, q }
    }

    pub fn add_rational(&self, r: &Rational) -> Scalar {
        Scalar { p: &self.p + r, q: self.q.clone() }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.add_rational(&-r).signum()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        // 1 / (p + q r2) = (p - q r2) / (p^2 - 2 q^2)
        let norm = &self.p * &self.p - &self.q * &self.q * rat_int(2);
        Some(Scalar { p: &self.p / &norm, q: -&self.q / &norm })
    }

    /// Rational enclosure `[lo, hi]` of the value, of width at most
    /// `|q| * 2^-bits`; exact for rational scalars.
    pub fn bounds(&self, bits: u32) -> (Rational, Rational) {
        if self.q.is_zero() {
            return (self.p.clone(), self.p.clone());
        }
        let (s_lo, s_hi) = sqrt2_bounds(bits);
        let a = &self.p + &self.q * &s_lo;
        let b = &self.p + &self.q * &s_hi;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Rational lower bound, tight to the current precision.
    pub fn lower_rational(&self) -> Rational {
        self.bounds(precision_bits()).0
    }

    /// Rational upper bound, tight to the current precision.
    pub fn upper_rational(&self) -> Rational {
        self.bounds(precision_bits()).1
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.q.is_zero() {
            return self.p.floor().to_integer();
        }
        // irrational: never an integer, so refining the enclosure decides
        let mut bits = 64;
        loop {
            let (lo, hi) = self.bounds(bits);
            let fl = lo.floor().to_integer();
            if hi.floor().to_integer() == fl {
                return fl;
            }
            bits *= 2;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn to_f64(&self) -> f64 {
        // refine the enclosure until both ends round to nearly the same double,
        // since p + q sqrt 2 can cancel badly
        let mut bits = 64;
        while bits <= 1 << 14 {
            let (lo, hi) = self.bounds(bits);
            let (a, b) = (lo.to_f64().unwrap_or(f64::NAN), hi.to_f64().unwrap_or(f64::NAN));
            if a == b || (b - a).abs() <= 1e-15 * a.abs().max(b.abs()) {
                return a + (b - a) / 2.0;
            }
            bits *= 4;
        }
        self.p.to_f64().unwrap_or(f64::NAN) + self.q.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl From<Rational> for Scalar {
    fn from(p: Rational) -> Self {
        Scalar::from_rational(p)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $tr<&'b Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| Scalar { p: &a.p + &b.p, q: &a.q + &b.q });
forward_binop!(Sub, sub, |a, b| Scalar { p: &a.p - &b.p, q: &a.q - &b.q });
forward_binop!(Mul, mul, |a, b| match (a.q.is_zero(), b.q.is_zero()) {
    (true, true) => Scalar::from_rational(&a.p * &b.p),
    (true, false) => b.scale(&a.p),
    (false, true) => a.scale(&b.p),
    (false, false) => Scalar {
        p: &a.p * &b.p + &a.q * &b.q * rat_int(2),
        q: &a.p * &b.q + &a.q * &b.p,
    },
});
forward_binop!(Div, div, |a, b| a * b.recip().expect("division by zero scalar"));

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { p: -self.p, q: -self.q }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { p: -&self.p, q: -&self.q }
    }
}

/// Text form `p_num/p_den+q_num/q_den*r2`; the sqrt 2 term is omitted when
/// it vanishes.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "{}", format_rational(&self.p))
        } else {
            write!(f, "{}+{}*r2", format_rational(&self.p), format_rational(&self.q))
        }
    }
}

impl FromStr for Scalar {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = s.strip_suffix("*r2") else {
            return Ok(Scalar::from_rational(parse_rational(&s)?));
        };
        // split at the last '+' or binary '-' before the sqrt 2 coefficient
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'+' | b'-' | b'/')
        });
        let (p, q) = match split {
            Some(i) if bytes[i] == b'+' => (parse_rational(&body[..i])?, parse_rational(&body[i + 1..])?),
            Some(i) => (parse_rational(&body[..i])?, parse_rational(&body[i..])?),
            None => (Rational::zero(), parse_rational(body)?),
        };
        Ok(Scalar { p, q })
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    p: String,
    q: String,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr { p: format_rational(&self.p), q: format_rational(&self.q) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(deserializer)?;
        let p = parse_rational(&repr.p).map_err(serde::de::Error::custom)?;
        let q = parse_rational(&repr.q).map_err(serde::de::Error::custom)?;
        Ok(Scalar { p, q })
    }
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Greatest common divisor helper for reduced-fraction tests.
pub fn coprime(a: &BigInt, b: &BigInt) -> bool {
    a.gcd(b).is_one()
}
