//! Exact lattice frequencies `k ∈ ℤ² \ {0}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wide::WideReal;

/// A lattice point with its squared norm cached.
///
/// Ordering is by `(|k|², k1, k2)`, the storage order of every field.
/// Arithmetic is exact; a `Frequency` may be zero or non-canonical as an
/// intermediate value, see [`Frequency::canonical`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frequency {
    k1: BigInt,
    k2: BigInt,
    norm2: BigInt,
}

impl Frequency {
    pub fn new(k1: impl Into<BigInt>, k2: impl Into<BigInt>) -> Frequency {
        let (k1, k2) = (k1.into(), k2.into());
        let norm2 = &k1 * &k1 + &k2 * &k2;
        Frequency { k1, k2, norm2 }
    }

    pub fn k1(&self) -> &BigInt {
        &self.k1
    }

    pub fn k2(&self) -> &BigInt {
        &self.k2
    }

    /// `|k|²`, exact.
    pub fn norm2(&self) -> &BigInt {
        &self.norm2
    }

    pub fn norm(&self) -> WideReal {
        WideReal::from_bigint(&self.norm2).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.k1.is_zero() && self.k2.is_zero()
    }

    /// `k1 > 0`, or `k1 = 0` and `k2 > 0`: `arg(k1 + i k2) ∈ (−π/2, π/2]`.
    pub fn is_canonical(&self) -> bool {
        self.k1.is_positive() || (self.k1.is_zero() && self.k2.is_positive())
    }

    /// Canonical representative of `±k`, and whether a flip happened.
    pub fn canonical(&self) -> Result<(Frequency, bool)> {
        if self.is_zero() {
            return Err(Error::InvalidFrequency("zero frequency (0,0)".into()));
        }
        Ok(if self.is_canonical() {
            (self.clone(), false)
        } else {
            (-self, true)
        })
    }

    /// `k^⊥ = (−k2, k1)`.
    pub fn perp(&self) -> Frequency {
        Frequency {
            k1: -&self.k2,
            k2: self.k1.clone(),
            norm2: self.norm2.clone(),
        }
    }

    pub fn dot(&self, other: &Frequency) -> BigInt {
        &self.k1 * &other.k1 + &self.k2 * &other.k2
    }

    /// `self^⊥ · other = k1·o2 − k2·o1`.
    pub fn cross(&self, other: &Frequency) -> BigInt {
        &self.k1 * &other.k2 - &self.k2 * &other.k1
    }

    pub fn scale(&self, n: &BigInt) -> Frequency {
        Frequency {
            k1: &self.k1 * n,
            k2: &self.k2 * n,
            norm2: &self.norm2 * n * n,
        }
    }

    /// Coordinates as doubles (lossy for huge frequencies).
    pub fn to_f64(&self) -> [f64; 2] {
        [
            WideReal::from_bigint(&self.k1).to_f64_lossy(),
            WideReal::from_bigint(&self.k2).to_f64_lossy(),
        ]
    }

    /// Coordinates as `i64` when they fit.
    pub fn to_i64(&self) -> Option<[i64; 2]> {
        use num_traits::ToPrimitive;
        Some([self.k1.to_i64()?, self.k2.to_i64()?])
    }

    /// Dyadic block index `j` with `2^j <= |k| < 2^(j+1)`.
    pub fn dyadic_block(&self) -> u64 {
        debug_assert!(!self.is_zero());
        (self.norm2.bits() - 1) / 2
    }
}

impl Ord for Frequency {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm2
            .cmp(&other.norm2)
            .then_with(|| self.k1.cmp(&other.k1))
            .then_with(|| self.k2.cmp(&other.k2))
    }
}

impl PartialOrd for Frequency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for &Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        Frequency {
            k1: -&self.k1,
            k2: -&self.k2,
            norm2: self.norm2.clone(),
        }
    }
}

impl Add for &Frequency {
    type Output = Frequency;
    fn add(self, rhs: &Frequency) -> Frequency {
        Frequency::new(&self.k1 + &rhs.k1, &self.k2 + &rhs.k2)
    }
}

impl Sub for &Frequency {
    type Output = Frequency;
    fn sub(self, rhs: &Frequency) -> Frequency {
        Frequency::new(&self.k1 - &rhs.k1, &self.k2 - &rhs.k2)
    }
}

impl Mul<&BigInt> for &Frequency {
    type Output = Frequency;
    fn mul(self, n: &BigInt) -> Frequency {
        self.scale(n)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

impl std::str::FromStr for Frequency {
    type Err = Error;

    /// Parses `"a,b"` (optionally parenthesized).
    fn from_str(s: &str) -> Result<Frequency> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut it = t.split(',');
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => return Err(Error::Format(format!("expected \"k1,k2\", got {s:?}"))),
        };
        let parse = |x: &str| {
            x.parse::<BigInt>()
                .map_err(|_| Error::Format(format!("bad integer {x:?} in frequency {s:?}")))
        };
        Ok(Frequency::new(parse(a)?, parse(b)?))
    }
}

/// Serialized as a pair of decimal strings.
impl Serialize for Frequency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.k1.to_string(), self.k2.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let parse = |x: &str| x.parse::<BigInt>().map_err(serde::de::Error::custom);
        Ok(Frequency::new(parse(&a)?, parse(&b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_half_lattice() {
        assert!(Frequency::new(1, 0).is_canonical());
        assert!(Frequency::new(0, 3).is_canonical());
        assert!(Frequency::new(2, -5).is_canonical());
        assert!(!Frequency::new(0, -3).is_canonical());
        assert!(!Frequency::new(-1, 2).is_canonical());
        let (c, flipped) = Frequency::new(-1, 2).canonical().unwrap();
        assert_eq!(c, Frequency::new(1, -2));
        assert!(flipped);
        assert!(Frequency::new(0, 0).canonical().is_err());
    }

    #[test]
    fn perp_and_products() {
        let k = Frequency::new(3, 4);
        assert_eq!(k.perp(), Frequency::new(-4, 3));
        assert_eq!(k.norm2(), &BigInt::from(25));
        let w = Frequency::new(1, 2);
        assert_eq!(k.cross(&w), k.perp().dot(&w));
        assert_eq!(k.dot(&k.perp()), BigInt::from(0));
    }

    #[test]
    fn ordering_is_norm_first() {
        let mut v = [
            Frequency::new(2, 0),
            Frequency::new(0, 1),
            Frequency::new(1, -1),
            Frequency::new(1, 1),
            Frequency::new(1, 0),
        ];
        v.sort();
        let s: Vec<String> = v.iter().map(|k| k.to_string()).collect();
        assert_eq!(s, ["(0,1)", "(1,0)", "(1,-1)", "(1,1)", "(2,0)"]);
    }

    #[test]
    fn dyadic_blocks() {
        assert_eq!(Frequency::new(1, 0).dyadic_block(), 0);
        assert_eq!(Frequency::new(1, 1).dyadic_block(), 0);
        assert_eq!(Frequency::new(2, 0).dyadic_block(), 1);
        assert_eq!(Frequency::new(3, 3).dyadic_block(), 2);
        assert_eq!(Frequency::new(0, 8).dyadic_block(), 3);
    }

    #[test]
    fn parse_and_serde() {
        let k: Frequency = "(-7, 12)".parse().unwrap();
        assert_eq!(k, Frequency::new(-7, 12));
        let j = serde_json::to_string(&k).unwrap();
        assert_eq!(j, r#"["-7","12"]"#);
        let back: Frequency = serde_json::from_str(&j).unwrap();
        assert_eq!(back, k);
        assert!("1;2".parse::<Frequency>().is_err());
    }
}
