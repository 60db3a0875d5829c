use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_rational::Ratio;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact non-negative cost. Serialized as a JSON integer when whole and as a
/// `"num/den"` string otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(pub Ratio<i64>);

impl Cost {
    pub const ZERO: Cost = Cost(Ratio::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> Cost {
        Cost(Ratio::new(num, den))
    }

    pub fn int(v: i64) -> Cost {
        Cost(Ratio::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        *self.0.numer() == 0
    }

    /// Smallest integer not below the cost.
    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }
}

impl From<i64> for Cost {
    fn from(v: i64) -> Cost {
        Cost::int(v)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, o: Cost) -> Cost {
        Cost(self.0 + o.0)
    }
}

impl Mul for Cost {
    type Output = Cost;
    fn mul(self, o: Cost) -> Cost {
        Cost(self.0 * o.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseCostError(String);

impl fmt::Display for ParseCostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid cost `{}`", self.0)
    }
}

impl std::error::Error for ParseCostError {}

impl FromStr for Cost {
    type Err = ParseCostError;

    fn from_str(s: &str) -> Result<Cost, ParseCostError> {
        let bad = || ParseCostError(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: i64 = num.parse().map_err(|_| bad())?;
        let den: i64 = den.parse().map_err(|_| bad())?;
        if den <= 0 || num < 0 {
            return Err(bad());
        }
        Ok(Cost::new(num, den))
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            s.serialize_i64(*self.0.numer())
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

struct CostVisitor;

impl Visitor<'_> for CostVisitor {
    type Value = Cost;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a non-negative integer, a decimal, or a \"num/den\" string")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cost, E> {
        i64::try_from(v)
            .map(Cost::int)
            .map_err(|_| E::custom("cost out of range"))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cost, E> {
        if v < 0 {
            return Err(E::custom("cost must be non-negative"));
        }
        Ok(Cost::int(v))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cost, E> {
        if v.is_nan() || v < 0.0 {
            return Err(E::custom("cost must be non-negative"));
        }
        Ratio::<i64>::approximate_float(v)
            .map(Cost)
            .ok_or_else(|| E::custom("cost out of range"))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Cost, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Cost, D::Error> {
        d.deserialize_any(CostVisitor)
    }
}
