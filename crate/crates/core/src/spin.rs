use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A half-integer quantum number stored as twice its value.
///
/// Used both for total spins `J` (non-negative) and projections `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt(2 * value)
    }

    /// Rounds `value` to the nearest half-integer, rejecting values further
    /// than `tol` from one.
    pub fn from_f64(value: f64, tol: f64) -> Result<Self> {
        let twice = (2.0 * value).round();
        if !value.is_finite() || (twice - 2.0 * value).abs() > 2.0 * tol {
            return invalid(format!("{value} is not a half-integer"));
        }
        Ok(HalfInt(twice as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `J(J+1)`, the eigenvalue of the total spin squared.
    pub fn casimir(self) -> f64 {
        let j = self.as_f64();
        j * (j + 1.0)
    }

    /// Multiplicity `2J + 1` of an irrep with this spin.
    pub fn dimension(self) -> usize {
        debug_assert!(self.0 >= 0);
        (self.0 + 1) as usize
    }

    /// All projections `-J, -J+1, ..., J` in increasing order.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.0;
        (0..=j).map(move |k| HalfInt(-j + 2 * k))
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3/2"`, `"-1/2"`, `"1"` or decimal forms such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("malformed half-integer '{s}'")))?;
            return match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt::from_int(num)),
                _ => invalid(format!("malformed half-integer '{s}'")),
            };
        }
        let value: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("malformed half-integer '{s}'")))?;
        HalfInt::from_f64(value, 1e-9)
    }
}
