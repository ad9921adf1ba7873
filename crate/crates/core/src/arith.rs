//! Arbitrary-precision naturals and the modular machinery behind Γ and Θ.
//!
//! Everything here is a pure function on immutable values. `Natural` wraps a
//! [`BigUint`] and crosses every external boundary as a decimal string.
//! Word-sized variants (`gcd_u64`, `mod_inverse_u64`) back the hot loops in
//! the density scanner and are checked against the big-integer versions.

use std::fmt;
use std::ops::{Add, Div, Mul, Rem, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A nonnegative integer of unbounded size.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Natural(BigUint);

impl Natural {
    pub fn zero() -> Self {
        Natural(BigUint::zero())
    }

    pub fn one() -> Self {
        Natural(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_even(&self) -> bool {
        !self.0.bit(0)
    }

    pub fn is_odd(&self) -> bool {
        self.0.bit(0)
    }

    pub fn pow(&self, exp: u32) -> Self {
        Natural(self.0.pow(exp))
    }

    /// `self - rhs`, or `None` if that would go negative.
    pub fn checked_sub(&self, rhs: &Natural) -> Option<Natural> {
        (self.0 >= rhs.0).then(|| Natural(&self.0 - &rhs.0))
    }

    /// True when `self` divides `other`. Zero divides only zero.
    pub fn divides(&self, other: &Natural) -> bool {
        if self.is_zero() {
            other.is_zero()
        } else {
            (&other.0 % &self.0).is_zero()
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.0.clone())
    }
}

impl From<BigUint> for Natural {
    fn from(v: BigUint) -> Self {
        Natural(v)
    }
}

macro_rules! from_prim {
    ($($t:ty),*) => {$(
        impl From<$t> for Natural {
            fn from(v: $t) -> Self {
                Natural(BigUint::from(v))
            }
        }
    )*};
}
from_prim!(u8, u16, u32, u64, u128, usize);

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Natural {
    type Err = Error;

    /// Accepts plain decimal digits only: no sign, no separators, no whitespace.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(s.to_owned()));
        }
        BigUint::parse_bytes(s.as_bytes(), 10)
            .map(Natural)
            .ok_or_else(|| Error::Parse(s.to_owned()))
    }
}

impl Serialize for Natural {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Natural {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Natural> for &Natural {
            type Output = Natural;
            fn $method(self, rhs: &Natural) -> Natural {
                Natural($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Natural> for Natural {
            type Output = Natural;
            fn $method(self, rhs: Natural) -> Natural {
                Natural($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Natural> for Natural {
            type Output = Natural;
            fn $method(self, rhs: &Natural) -> Natural {
                Natural($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<u64> for &Natural {
            type Output = Natural;
            fn $method(self, rhs: u64) -> Natural {
                Natural($trait::$method(&self.0, rhs))
            }
        }
        impl $trait<u64> for Natural {
            type Output = Natural;
            fn $method(self, rhs: u64) -> Natural {
                Natural($trait::$method(self.0, rhs))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Mul, mul);
forward_binop!(Div, div);
forward_binop!(Rem, rem);
// Panics on underflow, like BigUint. Use `checked_sub` where the sign is not known.
forward_binop!(Sub, sub);

/// A pair divided through by its gcd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedPair {
    pub a: Natural,
    pub b: Natural,
    /// The removed common factor, gcd of the original inputs.
    pub d: Natural,
}

impl ReducedPair {
    /// One member divides the other (equivalently, one of them is 1).
    pub fn is_divisible(&self) -> bool {
        self.a.is_one() || self.b.is_one()
    }
}

pub fn gcd(a: &Natural, b: &Natural) -> Result<Natural> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let mut x = a.0.clone();
    let mut y = b.0.clone();
    while !y.is_zero() {
        let r = &x % &y;
        x = std::mem::replace(&mut y, r);
    }
    Ok(Natural(x))
}

pub fn reduce(a: &Natural, b: &Natural) -> Result<ReducedPair> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput(a.clone(), b.clone()));
    }
    let d = gcd(a, b)?;
    Ok(ReducedPair {
        a: a / &d,
        b: b / &d,
        d,
    })
}

/// The inverse of `a` modulo `m`, in `1..m`, by the extended Euclidean algorithm.
pub fn mod_inverse(a: &Natural, m: &Natural) -> Result<Natural> {
    if m.0 < BigUint::from(2u8) {
        return Err(Error::ModulusTooSmall(m.clone()));
    }
    let not_invertible = || Error::NotInvertible {
        a: a.clone(),
        m: m.clone(),
    };
    let residue = &a.0 % &m.0;
    if residue.is_zero() {
        return Err(not_invertible());
    }

    // Invariant: old_s * residue ≡ old_r (mod m), s * residue ≡ r (mod m).
    let modulus = BigInt::from_biguint(Sign::Plus, m.0.clone());
    let (mut old_r, mut r) = (BigInt::from_biguint(Sign::Plus, residue), modulus.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
    }
    if !old_r.is_one() {
        return Err(not_invertible());
    }
    let t = ((old_s % &modulus) + &modulus) % &modulus;
    Ok(Natural(t.to_biguint().expect("reduced into [0, m)")))
}

/// Θ(a, b): the inverse of a/d modulo b/d lying strictly between 0 and b/d.
pub fn theta(a: &Natural, b: &Natural) -> Result<Natural> {
    let pair = reduce(a, b)?;
    theta_reduced(&pair).ok_or_else(|| Error::ThetaUndefined {
        a: a.clone(),
        b: b.clone(),
    })
}

/// Θ on an already reduced pair; `None` when b/d = 1.
pub(crate) fn theta_reduced(pair: &ReducedPair) -> Option<Natural> {
    if pair.b.is_one() {
        return None;
    }
    Some(mod_inverse(&pair.a, &pair.b).expect("reduced pair is coprime"))
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Word-sized `mod_inverse`. Returns `None` if `m < 2` or `gcd(a, m) != 1`.
pub fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    if m < 2 {
        return None;
    }
    let (mut old_r, mut r) = (i128::from(a % m), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(i128::from(m)) as u64)
}
