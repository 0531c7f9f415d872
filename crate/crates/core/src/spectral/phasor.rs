use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::phase::Phase;
use crate::wide::WideReal;

/// Coefficients of `a·cos(k·x) + b·sin(k·x)`.
///
/// Equivalently the complex number `z = a − i·b`, for which the scalar is
/// `Re(z·e^{i k·x})`; products of modes become products of `z`s.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Phasor {
    pub a: WideReal,
    pub b: WideReal,
}

impl Phasor {
    pub const ZERO: Phasor = Phasor {
        a: WideReal::ZERO,
        b: WideReal::ZERO,
    };

    pub fn new(a: WideReal, b: WideReal) -> Phasor {
        Phasor { a, b }
    }

    pub fn from_f64(a: f64, b: f64) -> Phasor {
        Phasor::new(a.into(), b.into())
    }

    /// `ρ·cos(k·x + θ)`: `a = ρ cos θ`, `b = −ρ sin θ`.
    pub fn from_polar(rho: WideReal, theta: Phase) -> Phasor {
        Phasor::new(rho * theta.cos(), -(rho * theta.sin()))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `ρ = √(a² + b²)`.
    pub fn rho(&self) -> WideReal {
        (self.a.square() + self.b.square()).sqrt()
    }

    /// `θ` with `a = ρ cos θ`, `b = −ρ sin θ`, in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // ratios keep the atan2 arguments inside double range
        let r = self.rho();
        let c = (self.a / r).to_f64_lossy();
        let s = (-self.b / r).to_f64_lossy();
        s.atan2(c).rem_euclid(std::f64::consts::TAU)
    }

    pub fn scale(&self, c: WideReal) -> Phasor {
        Phasor::new(self.a * c, self.b * c)
    }

    /// Complex product of the `z` representations.
    pub fn mul_z(&self, other: &Phasor) -> Phasor {
        // z1 z2 = (a1 − i b1)(a2 − i b2) = (a1a2 − b1b2) − i(a1b2 + b1a2)
        Phasor::new(
            self.a * other.a - self.b * other.b,
            self.a * other.b + self.b * other.a,
        )
    }

    /// Complex conjugate of `z`: the same scalar written at frequency `−k`.
    pub fn conj_z(&self) -> Phasor {
        Phasor::new(self.a, -self.b)
    }

    /// `z·i`, i.e. a phase shift by `+π/2`.
    pub fn times_i(&self) -> Phasor {
        // i(a − i b) = b + i a  →  a' = b, b' = −a
        Phasor::new(self.b, -self.a)
    }

    /// `z·e^{iφ}`.
    pub fn rotate(&self, phi: Phase) -> Phasor {
        self.mul_z(&Phasor::from_polar(WideReal::ONE, phi))
    }

    /// Magnitude of the difference relative to `scale`.
    pub fn rel_err(&self, other: &Phasor, scale: WideReal) -> f64 {
        if scale.is_zero() {
            return if (*self - *other).is_zero() { 0.0 } else { f64::INFINITY };
        }
        ((*self - *other).rho() / scale).to_f64_lossy()
    }
}

impl Add for Phasor {
    type Output = Phasor;
    fn add(self, rhs: Phasor) -> Phasor {
        Phasor::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Phasor {
    type Output = Phasor;
    fn sub(self, rhs: Phasor) -> Phasor {
        Phasor::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for Phasor {
    type Output = Phasor;
    fn neg(self) -> Phasor {
        Phasor::new(-self.a, -self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(w: WideReal) -> f64 {
        w.to_f64().unwrap()
    }

    #[test]
    fn polar_roundtrip() {
        let p = Phasor::from_polar(2.0.into(), Phase::HALF_PI);
        assert_eq!((f(p.a), f(p.b)), (0.0, -2.0));
        assert_eq!(f(p.rho()), 2.0);
        assert!((p.angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn product_matches_trig_identity() {
        // Re(z1 e^{ix}) Re(z2 e^{iy}) = ½Re(z1 z2 e^{i(x+y)}) + ½Re(z1 conj(z2) e^{i(x−y)})
        let p = Phasor::from_f64(0.3, -1.2);
        let q = Phasor::from_f64(-0.7, 0.4);
        let (x, y) = (0.37f64, -1.91f64);
        let lhs = (0.3 * x.cos() - 1.2 * x.sin()) * (-0.7 * y.cos() + 0.4 * y.sin());
        let s = p.mul_z(&q);
        let d = p.mul_z(&q.conj_z());
        let rhs = 0.5 * (f(s.a) * (x + y).cos() + f(s.b) * (x + y).sin())
            + 0.5 * (f(d.a) * (x - y).cos() + f(d.b) * (x - y).sin());
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn rotation_by_quarter_turns() {
        let p = Phasor::from_polar(1.0.into(), Phase::ZERO);
        assert_eq!(p.times_i(), p.rotate(Phase::HALF_PI));
        assert_eq!(p.rotate(Phase::PI), -p);
    }
}
