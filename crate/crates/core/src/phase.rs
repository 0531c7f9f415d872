//! Phases kept as exact rational multiples of π.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `π · num / den`, reduced, with value in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase {
    num: i64,
    den: i64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    pub const HALF_PI: Phase = Phase { num: 1, den: 2 };
    pub const PI: Phase = Phase { num: 1, den: 1 };
    pub const THREE_HALF_PI: Phase = Phase { num: 3, den: 2 };

    /// `π · num / den`, reduced modulo 2π.
    pub fn new(num: i64, den: i64) -> Result<Phase> {
        if den == 0 {
            return Err(Error::Format("phase denominator is zero".into()));
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        Ok(Phase {
            num: num.rem_euclid(2 * den),
            den,
        })
    }

    /// Multiple of π/2.
    pub fn quarter(k: i64) -> Phase {
        Phase::new(k, 2).unwrap()
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// True iff the value is one of 0, π/2, π, 3π/2.
    pub fn is_quarter_turn(&self) -> bool {
        2 % self.den == 0
    }

    /// Index in `0..4` for quarter turns.
    pub fn quarter_index(&self) -> Option<i64> {
        self.is_quarter_turn().then(|| self.num * 2 / self.den)
    }

    pub fn radians(&self) -> f64 {
        std::f64::consts::PI * self.num as f64 / self.den as f64
    }

    /// Exact at quarter turns.
    pub fn cos(&self) -> f64 {
        match self.quarter_index() {
            Some(0) => 1.0,
            Some(1) | Some(3) => 0.0,
            Some(2) => -1.0,
            _ => self.radians().cos(),
        }
    }

    /// Exact at quarter turns.
    pub fn sin(&self) -> f64 {
        match self.quarter_index() {
            Some(0) | Some(2) => 0.0,
            Some(1) => 1.0,
            Some(3) => -1.0,
            _ => self.radians().sin(),
        }
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        let l = self.den.lcm(&rhs.den);
        Phase::new(self.num * (l / self.den) + rhs.num * (l / rhs.den), l).unwrap()
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::new(-self.num, self.den).unwrap()
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "π"),
            (n, 1) => write!(f, "{n}π"),
            (1, d) => write!(f, "π/{d}"),
            (n, d) => write!(f, "{n}π/{d}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseRepr {
    pi_num: i64,
    pi_den: i64,
}

/// Serialized as `{"pi_num": n, "pi_den": d}`.
impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseRepr {
            pi_num: self.num,
            pi_den: self.den,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PhaseRepr::deserialize(d)?;
        Phase::new(r.pi_num, r.pi_den).map_err(serde::de::Error::custom)
    }
}
