//! Sparse real trigonometric vector fields on the torus 𝕋² = ℝ²/2πℤ².
//!
//! A [`SolenoidalField`] is a finite sum `Σ (a_k cos(k·x) + b_k sin(k·x)) k^⊥`
//! over canonical frequencies; it is divergence free by construction. A
//! [`GeneralField`] carries an arbitrary vector amplitude per frequency,
//! stored in the lattice frame `(k, k^⊥)` of that frequency so that the Leray
//! projection only needs exact integer dot products.

mod norms;
mod phasor;

pub use norms::{besov_bmo_proxies, sobolev_norm, sobolev_norm_squared, NormProxies};
pub use phasor::Phasor;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::Frequency;
use crate::phase::Phase;
use crate::wide::WideReal;

/// One solenoidal mode `(a cos(k·x) + b sin(k·x)) k^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasorMode {
    pub freq: Frequency,
    pub phasor: Phasor,
}

impl PhasorMode {
    /// `ρ cos(k·x + θ) k^⊥`; `k` is canonicalized.
    pub fn polar(k: Frequency, rho: WideReal, theta: Phase) -> Result<PhasorMode> {
        canonicalize_mode(&k, rho, theta)
    }

    pub fn rho(&self) -> WideReal {
        self.phasor.rho()
    }

    pub fn angle(&self) -> f64 {
        self.phasor.angle()
    }
}

/// Returns the canonical mode representing `ρ cos(k·x + θ) k^⊥`.
///
/// For non-canonical `k` the mode moves to `−k` with phase `π − θ`
/// (cosine is even and `(−k)^⊥ = −k^⊥`).
pub fn canonicalize_mode(k: &Frequency, rho: WideReal, theta: Phase) -> Result<PhasorMode> {
    let (freq, flipped) = k.canonical()?;
    let theta = if flipped { Phase::PI - theta } else { theta };
    Ok(PhasorMode {
        freq,
        phasor: Phasor::from_polar(rho, theta),
    })
}

/// Canonical form of a phasor written at a possibly non-canonical `k`
/// along the vector `k^⊥`.
pub(crate) fn canonical_phasor(k: &Frequency, p: Phasor) -> Result<(Frequency, Phasor)> {
    let (freq, flipped) = k.canonical()?;
    // Re(z e^{ik·x}) k^⊥ = Re(conj(z) e^{−ik·x}) · (−(−k)^⊥)
    Ok(if flipped { (freq, -p.conj_z()) } else { (freq, p) })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolenoidalField {
    modes: BTreeMap<Frequency, Phasor>,
}

impl SolenoidalField {
    pub fn new() -> SolenoidalField {
        SolenoidalField::default()
    }

    pub fn from_modes<I: IntoIterator<Item = PhasorMode>>(modes: I) -> SolenoidalField {
        let mut f = SolenoidalField::new();
        for m in modes {
            f.add_mode(m);
        }
        f
    }

    /// Single mode `ρ cos(k·x + θ) k^⊥`.
    pub fn single(k: Frequency, rho: WideReal, theta: Phase) -> Result<SolenoidalField> {
        Ok(SolenoidalField::from_modes([canonicalize_mode(&k, rho, theta)?]))
    }

    /// Adds a canonical mode, merging with any mode already present.
    pub fn add_mode(&mut self, m: PhasorMode) {
        debug_assert!(m.freq.is_canonical());
        self.add_phasor(m.freq, m.phasor);
    }

    pub(crate) fn add_phasor(&mut self, freq: Frequency, p: Phasor) {
        use std::collections::btree_map::Entry;
        match self.modes.entry(freq) {
            Entry::Vacant(e) => {
                if !p.is_zero() {
                    e.insert(p);
                }
            }
            Entry::Occupied(mut e) => {
                let sum = *e.get() + p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Adds a phasor written at an arbitrary nonzero `k` along `k^⊥`.
    pub fn add_raw(&mut self, k: &Frequency, p: Phasor) -> Result<()> {
        let (freq, p) = canonical_phasor(k, p)?;
        self.add_phasor(freq, p);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn get(&self, k: &Frequency) -> Option<&Phasor> {
        self.modes.get(k)
    }

    /// Modes in storage order `(|k|², k1, k2)`.
    pub fn iter(&self) -> impl Iterator<Item = (&Frequency, &Phasor)> {
        self.modes.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = PhasorMode> + '_ {
        self.modes.iter().map(|(k, p)| PhasorMode {
            freq: k.clone(),
            phasor: *p,
        })
    }

    pub fn scale(&self, c: WideReal) -> SolenoidalField {
        if c.is_zero() {
            return SolenoidalField::new();
        }
        SolenoidalField {
            modes: self.modes.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect(),
        }
    }

    pub fn negate(&self) -> SolenoidalField {
        self.scale(-WideReal::ONE)
    }

    pub fn to_general(&self) -> GeneralField {
        let mut g = GeneralField::new();
        for (k, p) in &self.modes {
            g.add(k.clone(), Phasor::ZERO, *p);
        }
        g
    }

    /// Pointwise value in double precision.
    pub fn evaluate(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let mut out = [0.0; 2];
        for (k, p) in &self.modes {
            let kf = k.to_f64();
            let (a, b) = (p.a.to_f64()?, p.b.to_f64()?);
            let t = kf[0] * x[0] + kf[1] * x[1];
            let s = a * t.cos() + b * t.sin();
            let v = [-kf[1] * s, kf[0] * s];
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(Error::Range(format!("mode {k} overflows double precision")));
            }
            out[0] += v[0];
            out[1] += v[1];
        }
        Ok(out)
    }

    /// Largest `|k|` present, if any.
    pub fn max_frequency(&self) -> Option<&Frequency> {
        self.modes.keys().next_back()
    }
}

/// Per-frequency field `cos(k·x) v + sin(k·x) w`, stored in the frame
/// `(k, k^⊥)`: `long` carries the `k` component and `trans` the `k^⊥`
/// component, each as a [`Phasor`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrameAmplitude {
    pub long: Phasor,
    pub trans: Phasor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralMode {
    pub freq: Frequency,
    pub amp: FrameAmplitude,
}

impl GeneralMode {
    /// `cos(k·x) v + sin(k·x) w` for Cartesian `v`, `w`; `k` is canonicalized.
    pub fn from_cartesian(k: &Frequency, v: [WideReal; 2], w: [WideReal; 2]) -> Result<GeneralMode> {
        let (freq, flipped) = k.canonical()?;
        let w = if flipped { [-w[0], -w[1]] } else { w };
        let n2 = WideReal::from_bigint(freq.norm2());
        let (k1, k2) = (WideReal::from_bigint(freq.k1()), WideReal::from_bigint(freq.k2()));
        // components along k and k^⊥ = (−k2, k1), in units of those vectors
        let along = |u: [WideReal; 2]| (u[0] * k1 + u[1] * k2) / n2;
        let across = |u: [WideReal; 2]| (u[1] * k1 - u[0] * k2) / n2;
        Ok(GeneralMode {
            freq,
            amp: FrameAmplitude {
                long: Phasor::new(along(v), along(w)),
                trans: Phasor::new(across(v), across(w)),
            },
        })
    }

    /// Cartesian `(v, w)`.
    pub fn cartesian(&self) -> ([WideReal; 2], [WideReal; 2]) {
        let (k1, k2) = (
            WideReal::from_bigint(self.freq.k1()),
            WideReal::from_bigint(self.freq.k2()),
        );
        let vec = |l: WideReal, t: WideReal| [l * k1 - t * k2, l * k2 + t * k1];
        (
            vec(self.amp.long.a, self.amp.trans.a),
            vec(self.amp.long.b, self.amp.trans.b),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneralField {
    modes: BTreeMap<Frequency, FrameAmplitude>,
}

impl GeneralField {
    pub fn new() -> GeneralField {
        GeneralField::default()
    }

    pub fn from_modes<I: IntoIterator<Item = GeneralMode>>(modes: I) -> GeneralField {
        let mut g = GeneralField::new();
        for m in modes {
            g.add(m.freq, m.amp.long, m.amp.trans);
        }
        g
    }

    /// Adds `long·k + trans·k^⊥` at canonical `k`.
    pub fn add(&mut self, k: Frequency, long: Phasor, trans: Phasor) {
        debug_assert!(k.is_canonical());
        let e = self.modes.entry(k.clone()).or_default();
        e.long = e.long + long;
        e.trans = e.trans + trans;
        if e.long.is_zero() && e.trans.is_zero() {
            self.modes.remove(&k);
        }
    }

    /// Adds the scalar phasor `p` at arbitrary nonzero `k` times the integer
    /// vector `dir`; the vector is split exactly into the `(k, k^⊥)` frame.
    pub fn add_directed(&mut self, k: &Frequency, p: Phasor, dir: &Frequency) -> Result<()> {
        let (freq, flipped) = k.canonical()?;
        let p = if flipped { p.conj_z() } else { p };
        let n2 = WideReal::from_bigint(freq.norm2());
        let long = WideReal::from_bigint(&dir.dot(&freq)) / n2;
        // dir · k^⊥ = k1·d2 − k2·d1
        let trans = WideReal::from_bigint(&freq.cross(dir)) / n2;
        self.add(freq, p.scale(long), p.scale(trans));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn get(&self, k: &Frequency) -> Option<&FrameAmplitude> {
        self.modes.get(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Frequency, &FrameAmplitude)> {
        self.modes.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = GeneralMode> + '_ {
        self.modes.iter().map(|(k, a)| GeneralMode {
            freq: k.clone(),
            amp: *a,
        })
    }

    pub fn evaluate(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let mut out = [0.0; 2];
        for m in self.modes() {
            let kf = m.freq.to_f64();
            let (v, w) = m.cartesian();
            let t = kf[0] * x[0] + kf[1] * x[1];
            let (c, s) = (t.cos(), t.sin());
            for i in 0..2 {
                out[i] += v[i].to_f64()? * c + w[i].to_f64()? * s;
            }
        }
        if !(out[0].is_finite() && out[1].is_finite()) {
            return Err(Error::Range("general field overflows double precision".into()));
        }
        Ok(out)
    }
}

/// Exact per-frequency sum of phasor components; cancelled modes are dropped.
pub fn superpose<'a, I: IntoIterator<Item = &'a SolenoidalField>>(fields: I) -> SolenoidalField {
    let mut out = SolenoidalField::new();
    for f in fields {
        for (k, p) in &f.modes {
            out.add_phasor(k.clone(), *p);
        }
    }
    out
}

/// `Δ`: every mode multiplied by `−|k|²`.
pub fn laplacian(f: &SolenoidalField) -> SolenoidalField {
    SolenoidalField {
        modes: f
            .modes
            .iter()
            .map(|(k, p)| (k.clone(), p.scale(-WideReal::from_bigint(k.norm2()))))
            .collect(),
    }
}

/// Leray projection: keeps the `k^⊥` component of every mode.
pub fn leray_project(f: &GeneralField) -> SolenoidalField {
    let mut out = SolenoidalField::new();
    for (k, a) in &f.modes {
        out.add_phasor(k.clone(), a.trans);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn w(x: f64) -> WideReal {
        WideReal::from_f64(x)
    }

    fn k(a: i64, b: i64) -> Frequency {
        Frequency::new(a, b)
    }

    #[test]
    fn canonicalize_examples() {
        let m = canonicalize_mode(&k(1, 0), w(1.0), Phase::ZERO).unwrap();
        assert_eq!(m.freq, k(1, 0));
        assert_eq!(m.phasor, Phasor::from_polar(w(1.0), Phase::ZERO));

        let theta = Phase::new(1, 3).unwrap();
        let m = canonicalize_mode(&k(-1, 2), w(0.7), theta).unwrap();
        assert_eq!(m.freq, k(1, -2));
        assert_eq!(m.phasor, Phasor::from_polar(w(0.7), Phase::PI - theta));

        let m = canonicalize_mode(&k(0, -3), w(2.0), Phase::HALF_PI).unwrap();
        assert_eq!(m.freq, k(0, 3));
        assert_eq!(m.phasor, Phasor::from_polar(w(2.0), Phase::HALF_PI));

        assert!(matches!(
            canonicalize_mode(&k(0, 0), w(1.0), Phase::ZERO),
            Err(Error::InvalidFrequency(_))
        ));
    }

    #[test]
    fn canonicalized_mode_evaluates_identically() {
        // ((0,−3), 2, π/2) and its canonical form both equal (6 sin(3x₂), 0)
        let m = canonicalize_mode(&k(0, -3), w(2.0), Phase::HALF_PI).unwrap();
        let f = SolenoidalField::from_modes([m]);
        for i in 0..16 {
            for j in 0..16 {
                let x = [2.0 * PI * i as f64 / 16.0, 2.0 * PI * j as f64 / 16.0];
                let raw = 2.0 * (-3.0 * x[1] + PI / 2.0).cos();
                let expect = [3.0 * raw, 0.0]; // (−3)^⊥ direction: (3, 0)
                let got = f.evaluate(x).unwrap();
                assert!((got[0] - expect[0]).abs() < 1e-13);
                assert!((got[0] - 6.0 * (3.0 * x[1]).sin()).abs() < 1e-13);
                assert!(got[1].abs() < 1e-13);
            }
        }
    }

    #[test]
    fn superpose_examples() {
        let a = SolenoidalField::single(k(1, 0), w(1.0), Phase::ZERO).unwrap();
        let b = SolenoidalField::single(k(1, 0), w(1.0), Phase::PI).unwrap();
        assert!(superpose([&a, &b]).is_empty());

        let c = SolenoidalField::single(k(0, 2), w(1.0), Phase::ZERO).unwrap();
        let u = superpose([&a, &c]);
        assert_eq!(u.len(), 2);

        let d = SolenoidalField::single(k(1, 0), w(1.0), Phase::HALF_PI).unwrap();
        let s = superpose([&a, &d]);
        let p = s.get(&k(1, 0)).unwrap();
        assert!((p.rho().to_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.angle() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_examples() {
        let f = SolenoidalField::single(k(1, 0), w(1.0), Phase::ZERO).unwrap();
        let l = laplacian(&f);
        let p = l.get(&k(1, 0)).unwrap();
        assert_eq!(p.rho().to_f64().unwrap(), 1.0);
        assert!((p.angle() - PI).abs() < 1e-15);

        let f = SolenoidalField::single(k(1, 1), w(0.5), Phase::ZERO).unwrap();
        let p = *laplacian(&f).get(&k(1, 1)).unwrap();
        assert_eq!(p.rho().to_f64().unwrap(), 1.0);
        assert!((p.angle() - PI).abs() < 1e-15);

        assert!(laplacian(&SolenoidalField::new()).is_empty());
    }

    #[test]
    fn leray_examples() {
        let z = [WideReal::ZERO; 2];
        let along = GeneralMode::from_cartesian(&k(1, 0), [w(1.0), w(0.0)], z).unwrap();
        assert!(leray_project(&GeneralField::from_modes([along])).is_empty());

        let across = GeneralMode::from_cartesian(&k(1, 0), [w(0.0), w(1.0)], z).unwrap();
        let p = leray_project(&GeneralField::from_modes([across]));
        assert_eq!(p, SolenoidalField::single(k(1, 0), w(1.0), Phase::ZERO).unwrap());

        let diag = GeneralMode::from_cartesian(&k(1, 1), [w(1.0), w(0.0)], z).unwrap();
        let p = leray_project(&GeneralField::from_modes([diag]));
        let m = p.get(&k(1, 1)).unwrap();
        assert_eq!(m.rho().to_f64().unwrap(), 0.5);
        assert!((m.angle() - PI).abs() < 1e-15);
    }

    #[test]
    fn cartesian_frame_roundtrip() {
        let v = [w(0.3), w(-1.1)];
        let wv = [w(2.5), w(0.25)];
        let m = GeneralMode::from_cartesian(&k(-3, 2), v, wv).unwrap();
        assert_eq!(m.freq, k(3, -2));
        let (v2, w2) = m.cartesian();
        let x = [0.4f64, 1.3f64];
        let t = -3.0 * x[0] + 2.0 * x[1];
        for i in 0..2 {
            let lhs = v[i].to_f64().unwrap() * t.cos() + wv[i].to_f64().unwrap() * t.sin();
            let t2 = 3.0 * x[0] - 2.0 * x[1];
            let rhs = v2[i].to_f64().unwrap() * t2.cos() + w2[i].to_f64().unwrap() * t2.sin();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn evaluate_examples() {
        let u0 = SolenoidalField::single(k(1, 1), w(0.5), Phase::ZERO).unwrap();
        assert_eq!(u0.evaluate([0.0, 0.0]).unwrap(), [-0.5, 0.5]);
        let v = u0.evaluate([PI, 0.0]).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] + 0.5).abs() < 1e-15);

        let huge = SolenoidalField::single(k(1, 0), w(1e300).powi(3), Phase::ZERO).unwrap();
        assert!(matches!(huge.evaluate([0.0, 0.0]), Err(Error::Range(_))));
    }
}
