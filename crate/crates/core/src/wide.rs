//! Extended-range real numbers.
//!
//! Amplitudes produced by the frequency cascade span hundreds of decimal
//! orders of magnitude, so they are carried as an `f64` mantissa in `[1, 2)`
//! together with a 64-bit binary exponent. Every operation rounds the mantissa
//! once (relative error at most `2^-52`), and the exponent never saturates
//! inside `±2^62`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Exponent bound; anything beyond is treated as a programming error.
pub const EXP_LIMIT: i64 = 1 << 62;

/// Shift beyond which the smaller addend is invisible at double precision.
const ALIGN_LIMIT: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct WideReal {
    /// Zero, or a finite value with `1 <= |mant| < 2`.
    mant: f64,
    exp: i64,
}

/// Multiply `x` by `2^e` without intermediate overflow or underflow.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    // 2^1000 and 2^-1000 are both normal doubles.
    let big = f64::from_bits(((1023 + 1000) as u64) << 52);
    let small = f64::from_bits(((1023 - 1000) as u64) << 52);
    while e > 1000 {
        x *= big;
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= small;
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((1023 + e) as u64) << 52)
}

/// Split a finite nonzero double into `(m, e)` with `1 <= |m| < 2`.
fn frexp(x: f64) -> (f64, i64) {
    debug_assert!(x.is_finite() && x != 0.0);
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal: rescale into the normal range first
        let (m, e) = frexp(x * f64::from_bits(((1023 + 64) as u64) << 52));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
    (m, biased - 1023)
}

impl WideReal {
    pub const ZERO: WideReal = WideReal { mant: 0.0, exp: 0 };
    pub const ONE: WideReal = WideReal { mant: 1.0, exp: 0 };

    fn normalized(mant: f64, exp: i64) -> WideReal {
        if mant == 0.0 {
            return WideReal::ZERO;
        }
        assert!(mant.is_finite(), "non-finite mantissa in WideReal");
        let (m, e) = frexp(mant);
        let exp = exp + e;
        assert!(exp.abs() < EXP_LIMIT, "WideReal exponent out of range");
        WideReal { mant: m, exp }
    }

    /// Builds `m * 2^e`; `m` need not be normalized.
    pub fn from_parts(m: f64, e: i64) -> WideReal {
        WideReal::normalized(m, e)
    }

    pub fn from_f64(x: f64) -> WideReal {
        WideReal::normalized(x, 0)
    }

    pub fn from_bigint(n: &BigInt) -> WideReal {
        let bits = n.bits() as i64;
        if bits <= 63 {
            return WideReal::from_f64(n.to_i64().unwrap() as f64);
        }
        let shift = bits - 64;
        let top: BigInt = n.abs() >> (shift as usize);
        let m = top.to_u64().unwrap() as f64;
        let m = if n.sign() == Sign::Minus { -m } else { m };
        WideReal::normalized(m, shift)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt) -> WideReal {
        WideReal::from_bigint(num) / WideReal::from_bigint(den)
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0.0
    }

    /// −1, 0 or +1.
    pub fn signum(&self) -> i8 {
        if self.mant > 0.0 {
            1
        } else if self.mant < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Mantissa magnitude in `[1, 2)` (0 for zero).
    pub fn mantissa(&self) -> f64 {
        self.mant.abs()
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn abs(self) -> WideReal {
        WideReal {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Nearest double; `Err` if the magnitude exceeds the double range.
    /// Values below the double range flush towards zero.
    pub fn to_f64(&self) -> Result<f64, Error> {
        if self.is_zero() {
            return Ok(0.0);
        }
        if self.exp > 1023 {
            return Err(Error::Range(format!(
                "value 2^{} exceeds double precision range",
                self.exp
            )));
        }
        Ok(ldexp(self.mant, self.exp))
    }

    /// Like [`to_f64`](Self::to_f64) but saturating to ±∞.
    pub fn to_f64_lossy(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else if self.exp > 1023 {
            self.mant.signum() * f64::INFINITY
        } else {
            ldexp(self.mant, self.exp)
        }
    }

    pub fn sqrt(self) -> WideReal {
        assert!(self.mant >= 0.0, "square root of a negative WideReal");
        if self.is_zero() {
            return self;
        }
        let (m, e) = if self.exp.rem_euclid(2) == 1 {
            (self.mant * 2.0, self.exp - 1)
        } else {
            (self.mant, self.exp)
        };
        WideReal::normalized(m.sqrt(), e / 2)
    }

    pub fn square(self) -> WideReal {
        self * self
    }

    pub fn powi(self, n: i64) -> WideReal {
        if n < 0 {
            return WideReal::ONE / self.powi(-n);
        }
        let mut base = self;
        let mut acc = WideReal::ONE;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Base-2 logarithm of a positive value.
    pub fn log2(&self) -> f64 {
        assert!(self.mant > 0.0, "log2 of non-positive WideReal");
        self.exp as f64 + self.mant.log2()
    }

    /// `self^p` for positive `self`; integer exponents go through [`powi`](Self::powi).
    pub fn powf(self, p: f64) -> WideReal {
        if p.fract() == 0.0 && p.abs() < 1e15 {
            return self.powi(p as i64);
        }
        if self.is_zero() {
            assert!(p > 0.0, "0 raised to a non-positive power");
            return WideReal::ZERO;
        }
        // split p * log2(x) exactly-ish into integer and fractional parts:
        // p*e may be huge, so handle the exponent and mantissa terms apart.
        let e_part = p * self.exp as f64;
        let m_part = p * self.mant.log2();
        let (ei, ef) = (e_part.floor(), e_part - e_part.floor());
        let frac = ef + m_part;
        let fi = frac.floor();
        WideReal::normalized((frac - fi).exp2(), ei as i64 + fi as i64)
    }

    pub fn max(self, other: WideReal) -> WideReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: WideReal) -> WideReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Smallest integer not below `self`; `self` must be non-negative.
    pub fn ceil_bigint(&self) -> BigInt {
        assert!(self.mant >= 0.0);
        if self.is_zero() {
            return BigInt::zero();
        }
        if self.exp < 52 {
            return BigInt::from(ldexp(self.mant, self.exp).ceil() as u64);
        }
        // mantissa carries 53 bits; scale the integer mantissa back up
        let int_m = ldexp(self.mant, 52) as u64;
        BigInt::from(int_m) << ((self.exp - 52) as usize)
    }

    /// Relative distance `|a-b| / max(|a|,|b|)`, 0 when both vanish.
    pub fn rel_diff(a: WideReal, b: WideReal) -> f64 {
        let scale = a.abs().max(b.abs());
        if scale.is_zero() {
            return 0.0;
        }
        ((a - b).abs() / scale).to_f64_lossy()
    }

    /// Triple used by the JSON formats: `(sign, m, e)`.
    pub fn to_triple(&self) -> (i8, f64, i64) {
        (self.signum(), self.mant.abs(), self.exp)
    }

    pub fn from_triple(sign: i8, m: f64, e: i64) -> Result<WideReal, Error> {
        match sign {
            0 => Ok(WideReal::ZERO),
            1 | -1 => {
                if !(1.0..2.0).contains(&m) {
                    return Err(Error::Format(format!(
                        "wide-real mantissa {m} outside [1,2)"
                    )));
                }
                if e.abs() >= EXP_LIMIT {
                    return Err(Error::Format(format!("wide-real exponent {e} out of range")));
                }
                Ok(WideReal {
                    mant: m * sign as f64,
                    exp: e,
                })
            }
            _ => Err(Error::Format(format!("wide-real sign {sign} not in {{-1,0,1}}"))),
        }
    }
}

impl From<f64> for WideReal {
    fn from(x: f64) -> Self {
        WideReal::from_f64(x)
    }
}

impl From<&BigInt> for WideReal {
    fn from(n: &BigInt) -> Self {
        WideReal::from_bigint(n)
    }
}

impl Neg for WideReal {
    type Output = WideReal;
    fn neg(self) -> WideReal {
        WideReal {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Add for WideReal {
    type Output = WideReal;
    fn add(self, rhs: WideReal) -> WideReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = hi.exp - lo.exp;
        if shift > ALIGN_LIMIT {
            return hi;
        }
        WideReal::normalized(hi.mant + ldexp(lo.mant, -shift), hi.exp)
    }
}

impl Sub for WideReal {
    type Output = WideReal;
    fn sub(self, rhs: WideReal) -> WideReal {
        self + (-rhs)
    }
}

impl Mul for WideReal {
    type Output = WideReal;
    fn mul(self, rhs: WideReal) -> WideReal {
        if self.is_zero() || rhs.is_zero() {
            return WideReal::ZERO;
        }
        WideReal::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Mul<f64> for WideReal {
    type Output = WideReal;
    fn mul(self, rhs: f64) -> WideReal {
        self * WideReal::from_f64(rhs)
    }
}

impl Div for WideReal {
    type Output = WideReal;
    fn div(self, rhs: WideReal) -> WideReal {
        assert!(!rhs.is_zero(), "WideReal division by zero");
        if self.is_zero() {
            return WideReal::ZERO;
        }
        WideReal::normalized(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl PartialOrd for WideReal {
    fn partial_cmp(&self, other: &WideReal) -> Option<Ordering> {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.partial_cmp(&sb);
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        let mag = match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.mant.abs().partial_cmp(&other.mant.abs())?,
            o => o,
        };
        Some(if sa > 0 { mag } else { mag.reverse() })
    }
}

impl std::iter::Sum for WideReal {
    fn sum<I: Iterator<Item = WideReal>>(iter: I) -> WideReal {
        iter.fold(WideReal::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for WideReal {
    /// Decimal scientific notation with 16 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0e0");
        }
        if self.exp.abs() < 1000 {
            return write!(f, "{:.15e}", ldexp(self.mant, self.exp));
        }
        let l10 = self.exp as f64 * std::f64::consts::LOG10_2 + self.mant.abs().log10();
        let mut e10 = l10.floor();
        let mut m10 = 10f64.powf(l10 - e10);
        if m10 >= 10.0 {
            m10 /= 10.0;
            e10 += 1.0;
        }
        let sign = if self.mant < 0.0 { "-" } else { "" };
        write!(f, "{sign}{m10:.15}e{}", e10 as i64)
    }
}

/// JSON shape `{"sign":±1,"m":<double>,"e":<int>}`.
#[derive(Serialize, Deserialize)]
struct WideRealRepr {
    sign: i8,
    m: f64,
    e: i64,
}

impl Serialize for WideReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (sign, m, e) = self.to_triple();
        WideRealRepr { sign, m, e }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WideReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = WideRealRepr::deserialize(d)?;
        WideReal::from_triple(r.sign, r.m, r.e).map_err(serde::de::Error::custom)
    }
}
