//! Exact arithmetic in the Eisenstein integers ℤ[ζ], ζ² + ζ + 1 = 0.
//!
//! Elements are stored in the basis {1, ζ}; products are reduced with
//! ζ² = −1 − ζ so the pair of coordinates is always canonical.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;

/// `x + y·ζ` with arbitrary-precision coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct EisensteinInt {
    pub x: BigInt,
    pub y: BigInt,
}

impl EisensteinInt {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        EisensteinInt {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn rational(x: impl Into<BigInt>) -> Self {
        EisensteinInt::new(x, 0)
    }

    pub fn zero() -> Self {
        EisensteinInt::new(0, 0)
    }

    pub fn one() -> Self {
        EisensteinInt::new(1, 0)
    }

    /// The primitive cube root of unity ζ.
    pub fn zeta() -> Self {
        EisensteinInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    /// True when the element lies in ℤ.
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Complex conjugation, ζ ↦ ζ̄ = −1 − ζ.
    pub fn conj(&self) -> Self {
        EisensteinInt {
            x: &self.x - &self.y,
            y: -&self.y,
        }
    }

    /// `z·z̄ = x² − xy + y²`.
    pub fn norm(&self) -> BigInt {
        &self.x * &self.x - &self.x * &self.y + &self.y * &self.y
    }

    /// `z + z̄ = 2x − y`.
    pub fn trace(&self) -> BigInt {
        (&self.x << 1) - &self.y
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        EisensteinInt {
            x: &self.x * k,
            y: &self.y * k,
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = EisensteinInt::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Exact quotient `self / rhs`, or `None` when `rhs` is zero or does not
    /// divide `self` in ℤ[ζ].
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let n = rhs.norm();
        let num = self * &rhs.conj();
        let (qx, rx) = num.x.div_rem(&n);
        let (qy, ry) = num.y.div_rem(&n);
        (rx.is_zero() && ry.is_zero()).then(|| EisensteinInt::new(qx, qy))
    }

    /// Divisibility by a rational integer, coordinate by coordinate.
    pub fn divisible_by_integer(&self, m: &BigInt) -> bool {
        (&self.x % m).is_zero() && (&self.y % m).is_zero()
    }

    /// gcd of the two coordinates (the largest rational integer dividing z).
    pub fn content(&self) -> BigInt {
        self.x.gcd(&self.y)
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{}", self.x),
            (true, false) => write!(f, "{}ζ", self.y),
            (false, false) if self.y.is_negative() => {
                write!(f, "{} - {}ζ", self.x, self.y.abs())
            }
            (false, false) => write!(f, "{} + {}ζ", self.x, self.y),
        }
    }
}

impl From<i64> for EisensteinInt {
    fn from(x: i64) -> Self {
        EisensteinInt::rational(x)
    }
}

impl From<BigInt> for EisensteinInt {
    fn from(x: BigInt) -> Self {
        EisensteinInt::rational(x)
    }
}

fn mul_coords(a: &EisensteinInt, b: &EisensteinInt) -> EisensteinInt {
    // (x1 + y1ζ)(x2 + y2ζ) = (x1x2 − y1y2) + (x1y2 + y1x2 − y1y2)ζ
    let yy = &a.y * &b.y;
    EisensteinInt {
        x: &a.x * &b.x - &yy,
        y: &a.x * &b.y + &a.y * &b.x - yy,
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&EisensteinInt> for &EisensteinInt {
            type Output = EisensteinInt;
            fn $method(self, rhs: &EisensteinInt) -> EisensteinInt {
                $body(self, rhs)
            }
        }
        impl $tr<EisensteinInt> for EisensteinInt {
            type Output = EisensteinInt;
            fn $method(self, rhs: EisensteinInt) -> EisensteinInt {
                $body(&self, &rhs)
            }
        }
        impl $tr<&EisensteinInt> for EisensteinInt {
            type Output = EisensteinInt;
            fn $method(self, rhs: &EisensteinInt) -> EisensteinInt {
                $body(&self, rhs)
            }
        }
        impl $tr<EisensteinInt> for &EisensteinInt {
            type Output = EisensteinInt;
            fn $method(self, rhs: EisensteinInt) -> EisensteinInt {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &EisensteinInt, b: &EisensteinInt| EisensteinInt {
    x: &a.x + &b.x,
    y: &a.y + &b.y,
});
forward_binop!(Sub, sub, |a: &EisensteinInt, b: &EisensteinInt| EisensteinInt {
    x: &a.x - &b.x,
    y: &a.y - &b.y,
});
forward_binop!(Mul, mul, mul_coords);

impl AddAssign<&EisensteinInt> for EisensteinInt {
    fn add_assign(&mut self, rhs: &EisensteinInt) {
        self.x += &rhs.x;
        self.y += &rhs.y;
    }
}

impl SubAssign<&EisensteinInt> for EisensteinInt {
    fn sub_assign(&mut self, rhs: &EisensteinInt) {
        self.x -= &rhs.x;
        self.y -= &rhs.y;
    }
}

impl MulAssign<&EisensteinInt> for EisensteinInt {
    fn mul_assign(&mut self, rhs: &EisensteinInt) {
        *self = mul_coords(self, rhs);
    }
}

impl Neg for EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt {
            x: -self.x,
            y: -self.y,
        }
    }
}

impl Neg for &EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt {
            x: -&self.x,
            y: -&self.y,
        }
    }
}

/// Decomposition type of a rational prime in ℚ(ζ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimeType {
    Split,
    Inert,
    Ramified,
}

impl PrimeType {
    /// The mod-3 rule. Assumes `ell` is prime.
    pub fn of(ell: u64) -> PrimeType {
        match ell % 3 {
            0 => PrimeType::Ramified,
            1 => PrimeType::Split,
            _ => PrimeType::Inert,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} is not prime")]
pub struct NotPrime(pub u64);

pub fn classify_prime(ell: u64) -> Result<PrimeType, NotPrime> {
    if !arith::is_prime(ell) {
        return Err(NotPrime(ell));
    }
    Ok(PrimeType::of(ell))
}

/// Whether some prime of ℤ[ζ] above the rational prime `ell` divides `z`.
///
/// `ell` must be prime. For split and ramified `ell` this is `ell | norm(z)`;
/// for inert `ell` the prime above is `(ell)` itself, so both coordinates
/// must be divisible.
pub fn divides_above(ell: u64, z: &EisensteinInt) -> bool {
    let x = arith::bigint_mod(&z.x, ell);
    let y = arith::bigint_mod(&z.y, ell);
    match PrimeType::of(ell) {
        PrimeType::Inert => x == 0 && y == 0,
        PrimeType::Split | PrimeType::Ramified => {
            // x² − xy + y² mod ell, computed on residues
            let m = ell as u128;
            let (x, y) = (x as u128, y as u128);
            let n = (x * x % m + y * y % m + m - x * y % m) % m;
            n == 0
        }
    }
}
