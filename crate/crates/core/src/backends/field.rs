//! Arithmetic modulo the Mersenne prime 2^61 − 1.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// The default share modulus.
pub const P: u64 = (1 << 61) - 1;

/// An element of Z_p, always reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn new(v: u64) -> Fe {
        Fe(v % P)
    }

    /// Signed values embed as `v mod p`.
    pub fn from_i64(v: i64) -> Fe {
        Fe(v.rem_euclid(P as i64) as u64)
    }

    /// Centered lift into `(−p/2, p/2]`.
    pub fn to_i64(self) -> i64 {
        if self.0 > P / 2 {
            self.0 as i64 - P as i64
        } else {
            self.0 as i64
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn random(rng: &mut impl Rng) -> Fe {
        Fe(rng.gen_range(0..P))
    }
}

impl Add for Fe {
    type Output = Fe;
    fn add(self, o: Fe) -> Fe {
        let s = self.0 + o.0;
        Fe(if s >= P { s - P } else { s })
    }
}

impl Sub for Fe {
    type Output = Fe;
    fn sub(self, o: Fe) -> Fe {
        self + (-o)
    }
}

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        Fe(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl Mul for Fe {
    type Output = Fe;
    fn mul(self, o: Fe) -> Fe {
        Fe((u128::from(self.0) * u128::from(o.0) % u128::from(P)) as u64)
    }
}

impl std::iter::Sum for Fe {
    fn sum<I: Iterator<Item = Fe>>(iter: I) -> Fe {
        iter.fold(Fe::ZERO, Add::add)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
