//! Exact half-integers, stored as twice their value.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub fn from_twice(t: i64) -> Self {
        HalfInt(t)
    }

    pub fn int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    /// Nearest half-integer, `None` if `x` is not within 1e-9 of one.
    pub fn from_f64(x: f64) -> Option<Self> {
        let t = (2.0 * x).round();
        if (2.0 * x - t).abs() > 1e-9 {
            return None;
        }
        Some(HalfInt(t as i64))
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn f(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Value as an integer; panics on a proper half.
    pub fn as_int(self) -> i64 {
        assert!(self.is_integer(), "{self} is not an integer");
        self.0 / 2
    }

    /// `(-1)^self` for integral values.
    pub fn parity_sign(self) -> f64 {
        if self.as_int().rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Steps `self, self + 1, ..., hi`.
    pub fn range_to(self, hi: HalfInt) -> impl Iterator<Item = HalfInt> {
        let lo = self.0;
        (0..)
            .map(move |k| HalfInt(lo + 2 * k))
            .take_while(move |x| x.0 <= hi.0)
    }

    /// Parse "3/2", "-1/2", "2" or "1.5".
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            return match d {
                1 => Some(HalfInt(2 * n)),
                2 => Some(HalfInt(n)),
                _ => None,
            };
        }
        HalfInt::from_f64(s.parse().ok()?)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, o: HalfInt) {
        self.0 += o.0;
    }
}

impl SubAssign for HalfInt {
    fn sub_assign(&mut self, o: HalfInt) {
        self.0 -= o.0;
    }
}
