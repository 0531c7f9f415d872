//! Fixture families: lacunary series, lacunary resonant pairs and seeded random
//! fields, together with a checker for the conditions that make them admissible.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Frequency;
use crate::phase::Phase;
use crate::spectral::{
    canonicalize_mode, FrameAmplitude, GeneralField, Phasor, PhasorMode, SolenoidalField,
};
use crate::wide::WideReal;

/// How level `j` frequencies are derived from the base frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrequencyRule {
    /// `k_j = r^j k_0`. All levels are parallel, so they never interact.
    Geometric,
    /// `k_j = r^j R^j k_0` with `R` the quarter rotation `k ↦ k^⊥`.
    Rotating,
    /// Frequencies given level by level; `base_freq` and the ratio are unused.
    Explicit { freqs: Vec<Frequency> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AmplitudeRule {
    /// `ρ_j = r^j`.
    Geometric { ratio: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhaseRule {
    Zero,
    Explicit { values: Vec<Phase> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunarySpec {
    pub base_freq: Frequency,
    pub gap_ratio: u64,
    pub count: usize,
    pub frequency_rule: FrequencyRule,
    pub amplitude_rule: AmplitudeRule,
    pub phase_rule: PhaseRule,
}

impl LacunarySpec {
    /// Geometric frequencies, `ρ_j = r^j`, zero phases.
    pub fn geometric(base: Frequency, gap_ratio: u64, count: usize, amp_ratio: f64) -> LacunarySpec {
        LacunarySpec {
            base_freq: base,
            gap_ratio,
            count,
            frequency_rule: FrequencyRule::Geometric,
            amplitude_rule: AmplitudeRule::Geometric { ratio: amp_ratio },
            phase_rule: PhaseRule::Zero,
        }
    }

    /// Like [`LacunarySpec::geometric`] but turning a quarter per level.
    pub fn rotating(base: Frequency, gap_ratio: u64, count: usize, amp_ratio: f64) -> LacunarySpec {
        LacunarySpec {
            frequency_rule: FrequencyRule::Rotating,
            ..LacunarySpec::geometric(base, gap_ratio, count, amp_ratio)
        }
    }

    /// Image of `v` under the level-`j` map of the frequency rule, before
    /// canonicalization.
    fn transform(&self, v: &Frequency, j: usize) -> Frequency {
        let scale = BigInt::from(self.gap_ratio).pow(j as u32);
        let mut out = v * &scale;
        if self.frequency_rule == FrequencyRule::Rotating {
            for _ in 0..j % 4 {
                out = out.perp();
            }
        }
        out
    }

    /// Raw level frequencies, without any validation.
    pub fn frequencies(&self) -> Vec<Frequency> {
        match &self.frequency_rule {
            FrequencyRule::Explicit { freqs } => freqs.clone(),
            _ => (0..self.count)
                .map(|j| self.transform(&self.base_freq, j))
                .collect(),
        }
    }

    pub fn amplitudes(&self) -> Result<Vec<WideReal>> {
        let n = self.level_count();
        let v: Vec<WideReal> = match &self.amplitude_rule {
            AmplitudeRule::Geometric { ratio } => {
                (0..n).map(|j| WideReal::from_f64(*ratio).powi(j as i64)).collect()
            }
            AmplitudeRule::Explicit { values } => values.iter().map(|&x| x.into()).collect(),
        };
        if v.len() != n {
            return Err(Error::Spec(format!(
                "{} amplitudes given for {n} levels",
                v.len()
            )));
        }
        if v.iter().any(|r| r.signum() < 0) {
            return Err(Error::Spec("amplitudes must be non-negative".into()));
        }
        Ok(v)
    }

    pub fn phases(&self) -> Result<Vec<Phase>> {
        let n = self.level_count();
        match &self.phase_rule {
            PhaseRule::Zero => Ok(vec![Phase::ZERO; n]),
            PhaseRule::Explicit { values } if values.len() == n => Ok(values.clone()),
            PhaseRule::Explicit { values } => Err(Error::Spec(format!(
                "{} phases given for {n} levels",
                values.len()
            ))),
        }
    }

    pub fn level_count(&self) -> usize {
        match &self.frequency_rule {
            FrequencyRule::Explicit { freqs } => freqs.len(),
            _ => self.count,
        }
    }

    fn validate(&self) -> Result<Vec<Frequency>> {
        if !matches!(self.frequency_rule, FrequencyRule::Explicit { .. }) && self.gap_ratio <= 8 {
            return Err(Error::Spec("gap condition requires ratio > 8".into()));
        }
        if self.level_count() == 0 {
            return Err(Error::Spec("count must be at least 1".into()));
        }
        let ks = self.frequencies();
        for (j, k) in ks.iter().enumerate() {
            if k.is_zero() {
                return Err(Error::Spec(format!("level {j} has zero frequency")));
            }
        }
        for j in 1..ks.len() {
            if !gap_holds(&ks[j - 1], &ks[j]) {
                return Err(Error::Spec(format!(
                    "gap condition |k_{j}| > 8|k_{}| fails at level {j}",
                    j - 1
                )));
            }
        }
        Ok(ks)
    }
}

/// `|next| > 8|prev|`, decided on exact squared norms.
fn gap_holds(prev: &Frequency, next: &Frequency) -> bool {
    next.norm2() > &(prev.norm2() * 64u32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonantSpec {
    pub lacunary: LacunarySpec,
    pub omegas: Vec<Frequency>,
    pub etas: Vec<Phase>,
}

impl ResonantSpec {
    /// Level `ω_j` obtained from `omega0` by the same map that produces `k_j`,
    /// so orthogonality and the ratio `|k_j|/|ω_j|` carry over from level 0.
    pub fn following(lacunary: LacunarySpec, omega0: Frequency, eta: Phase) -> ResonantSpec {
        let n = lacunary.level_count();
        let omegas = (0..n).map(|j| lacunary.transform(&omega0, j)).collect();
        ResonantSpec {
            lacunary,
            omegas,
            etas: vec![eta; n],
        }
    }

    fn validate(&self) -> Result<Vec<Frequency>> {
        let ks = self.lacunary.validate()?;
        if self.omegas.len() != ks.len() || self.etas.len() != ks.len() {
            return Err(Error::Spec(format!(
                "{} levels but {} omegas and {} etas",
                ks.len(),
                self.omegas.len(),
                self.etas.len()
            )));
        }
        for (j, (k, w)) in ks.iter().zip(&self.omegas).enumerate() {
            if w.is_zero() {
                return Err(Error::Spec(format!("omega at level {j} is zero")));
            }
            if !num_traits::Zero::is_zero(&k.dot(w)) {
                return Err(Error::Spec(format!(
                    "orthogonality ω_j·k_j = 0 fails at level {j}"
                )));
            }
            if !gap_holds(w, k) {
                return Err(Error::Spec(format!("|k_j| > 8|ω_j| fails at level {j}")));
            }
        }
        Ok(ks)
    }
}

/// `Σ_j ρ_j cos(k_j·x + θ_j) k_j^⊥`.
pub fn lacunary_field(spec: &LacunarySpec) -> Result<SolenoidalField> {
    let ks = spec.validate()?;
    let rhos = spec.amplitudes()?;
    let thetas = spec.phases()?;
    let mut modes = Vec::with_capacity(ks.len());
    for ((k, rho), theta) in ks.iter().zip(rhos).zip(thetas) {
        modes.push(canonicalize_mode(k, rho, theta)?);
    }
    Ok(SolenoidalField::from_modes(modes))
}

/// `Σ_j ρ_j (cos(k_j·x + θ_j) k_j^⊥ + cos((k_j+ω_j)·x + η_j)(k_j+ω_j)^⊥)`.
pub fn resonant_field(spec: &ResonantSpec) -> Result<SolenoidalField> {
    let ks = spec.validate()?;
    let rhos = spec.lacunary.amplitudes()?;
    let thetas = spec.lacunary.phases()?;
    let mut modes: Vec<PhasorMode> = Vec::with_capacity(2 * ks.len());
    for j in 0..ks.len() {
        modes.push(canonicalize_mode(&ks[j], rhos[j], thetas[j])?);
        let kw = &ks[j] + &spec.omegas[j];
        modes.push(canonicalize_mode(&kw, rhos[j], spec.etas[j])?);
    }
    Ok(SolenoidalField::from_modes(modes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub k: Frequency,
    pub rho: WideReal,
    /// `|k_j| / |k_{j−1}|`.
    pub gap_ratio: Option<f64>,
    pub gap_ok: Option<bool>,
    pub omega: Option<Frequency>,
    pub orthogonal: Option<bool>,
    /// `|k_j| > 8|ω_j|`.
    pub scale_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub sobolev_order: u32,
    pub levels: Vec<LevelReport>,
    /// Partial sums of `Σ ρ_j² |k_j|^{−2N}`.
    pub sobolev_partial_sums: Vec<WideReal>,
    /// Partial sums of `Σ ρ_j² |k_j|/|ω_j|` (resonant families only).
    pub summability_partial_sums: Vec<WideReal>,
    /// Geometric extrapolation of the remaining sobolev series, when the
    /// last two terms decrease.
    pub sobolev_tail_estimate: Option<WideReal>,
    pub summability_tail_estimate: Option<WideReal>,
    pub flags: Vec<String>,
}

impl FamilyReport {
    pub fn all_pass(&self) -> bool {
        self.flags.is_empty()
    }
}

fn partial_sums(terms: &[WideReal]) -> Vec<WideReal> {
    let mut acc = WideReal::ZERO;
    terms
        .iter()
        .map(|t| {
            acc = acc + *t;
            acc
        })
        .collect()
}

fn geometric_tail(terms: &[WideReal]) -> Option<WideReal> {
    let [.., a, b] = terms else { return None };
    if a.is_zero() || b >= a {
        return None;
    }
    let q = *b / *a;
    Some(*b * q / (WideReal::ONE - q))
}

fn lacunary_levels(spec: &LacunarySpec, flags: &mut Vec<String>) -> (Vec<Frequency>, Vec<WideReal>) {
    if !matches!(spec.frequency_rule, FrequencyRule::Explicit { .. }) && spec.gap_ratio <= 8 {
        flags.push(format!("gap ratio {} does not exceed 8", spec.gap_ratio));
    }
    let ks = spec.frequencies();
    let rhos = match spec.amplitudes() {
        Ok(r) => r,
        Err(e) => {
            flags.push(e.to_string());
            vec![WideReal::ZERO; ks.len()]
        }
    };
    (ks, rhos)
}

/// Checks the gap, orthogonality and summability conditions level by level,
/// reporting flags instead of failing.
pub fn family_conditions_report(spec: &LacunarySpec, sobolev_order: u32) -> FamilyReport {
    conditions(spec, None, sobolev_order)
}

pub fn resonant_conditions_report(spec: &ResonantSpec, sobolev_order: u32) -> FamilyReport {
    conditions(&spec.lacunary, Some(&spec.omegas), sobolev_order)
}

fn conditions(spec: &LacunarySpec, omegas: Option<&[Frequency]>, n: u32) -> FamilyReport {
    let mut flags = Vec::new();
    let (ks, rhos) = lacunary_levels(spec, &mut flags);
    let mut levels = Vec::with_capacity(ks.len());
    let mut sob = Vec::new();
    let mut summ = Vec::new();
    for (j, (k, rho)) in ks.iter().zip(&rhos).enumerate() {
        let (gap_ratio, gap_ok) = if j == 0 {
            (None, None)
        } else {
            let ok = gap_holds(&ks[j - 1], k);
            if !ok {
                flags.push(format!("gap condition |k_{j}| > 8|k_{}| fails", j - 1));
            }
            ((k.norm() / ks[j - 1].norm()).to_f64().ok(), Some(ok))
        };
        let omega = omegas.and_then(|w| w.get(j)).cloned();
        let (orthogonal, scale_ok) = match &omega {
            Some(w) => {
                let orth = num_traits::Zero::is_zero(&k.dot(w));
                let scale = gap_holds(w, k);
                if !orth {
                    flags.push(format!("orthogonality ω_{j}·k_{j} = 0 fails"));
                }
                if !scale {
                    flags.push(format!("|k_{j}| > 8|ω_{j}| fails"));
                }
                if !w.is_zero() {
                    summ.push(rho.square() * k.norm() / w.norm());
                }
                (Some(orth), Some(scale))
            }
            None => {
                if omegas.is_some() {
                    flags.push(format!("level {j} has no omega"));
                }
                (None, None)
            }
        };
        if k.is_zero() {
            flags.push(format!("level {j} has zero frequency"));
        } else {
            sob.push(rho.square() * WideReal::from_bigint(k.norm2()).powi(-(n as i64)));
        }
        levels.push(LevelReport {
            level: j,
            k: k.clone(),
            rho: *rho,
            gap_ratio,
            gap_ok,
            omega,
            orthogonal,
            scale_ok,
        });
    }
    FamilyReport {
        sobolev_order: n,
        levels,
        sobolev_tail_estimate: geometric_tail(&sob),
        summability_tail_estimate: geometric_tail(&summ),
        sobolev_partial_sums: partial_sums(&sob),
        summability_partial_sums: partial_sums(&summ),
        flags,
    }
}

/// Square-integrable fixture: distinct canonical frequencies uniform in the
/// disk `|k| ≤ radius`, amplitudes `decay^i · U[½, 1]` and uniform phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomFieldSpec {
    pub seed: u64,
    pub modes: usize,
    pub radius: i64,
    pub decay: f64,
}

fn random_canonical(rng: &mut ChaCha8Rng, radius: i64) -> Frequency {
    loop {
        let a = rng.gen_range(0..=radius);
        let b = rng.gen_range(-radius..=radius);
        let k = Frequency::new(a, b);
        if k.is_canonical() && a * a + b * b <= radius * radius {
            return k;
        }
    }
}

pub fn random_field(spec: &RandomFieldSpec) -> Result<SolenoidalField> {
    let disk = (0..=spec.radius)
        .flat_map(|a| (-spec.radius..=spec.radius).map(move |b| (a, b)))
        .filter(|&(a, b)| Frequency::new(a, b).is_canonical() && a * a + b * b <= spec.radius * spec.radius)
        .count();
    if spec.modes > disk {
        return Err(Error::Spec(format!(
            "{} modes requested but the disk of radius {} holds {disk}",
            spec.modes, spec.radius
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut f = SolenoidalField::new();
    let mut amp = 1.0;
    while f.len() < spec.modes {
        let k = random_canonical(&mut rng, spec.radius);
        if f.get(&k).is_some() {
            continue;
        }
        let rho = amp * rng.gen_range(0.5..1.0);
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        f.add_mode(PhasorMode {
            freq: k,
            phasor: Phasor::from_f64(rho * theta.cos(), -rho * theta.sin()),
        });
        amp *= spec.decay;
    }
    Ok(f)
}

/// General (not necessarily solenoidal) field with `count` distinct
/// frequencies in the disk and standard-normal-ish Cartesian amplitudes.
pub fn random_general_field(seed: u64, count: usize, radius: i64) -> Result<GeneralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GeneralField::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut tries = 0usize;
    while seen.len() < count {
        tries += 1;
        if tries > 100 * count + 1000 {
            return Err(Error::Spec(format!("could not place {count} modes in radius {radius}")));
        }
        let k = random_canonical(&mut rng, radius);
        if !seen.insert(k.clone()) {
            continue;
        }
        let mut c = || WideReal::from_f64(rng.gen_range(-1.0..1.0));
        let v = [c(), c()];
        let w = [c(), c()];
        let m = crate::spectral::GeneralMode::from_cartesian(&k, v, w)?;
        let FrameAmplitude { long, trans } = m.amp;
        g.add(m.freq, long, trans);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::nonlinear_term;
    use crate::spectral::{besov_bmo_proxies, sobolev_norm};

    fn f(x: WideReal) -> f64 {
        x.to_f64().unwrap()
    }

    #[test]
    fn single_level() {
        let s = LacunarySpec::geometric(Frequency::new(1, 1), 9, 1, 1.0);
        let u = lacunary_field(&s).unwrap();
        assert_eq!(u, SolenoidalField::single(Frequency::new(1, 1), 1.0.into(), Phase::ZERO).unwrap());
    }

    #[test]
    fn three_levels_and_h_minus_one() {
        let s = LacunarySpec::geometric(Frequency::new(1, 1), 9, 3, 0.5);
        let u = lacunary_field(&s).unwrap();
        let got: Vec<(Frequency, f64)> = u.iter().map(|(k, p)| (k.clone(), f(p.rho()))).collect();
        assert_eq!(
            got,
            vec![
                (Frequency::new(1, 1), 1.0),
                (Frequency::new(9, 9), 0.5),
                (Frequency::new(81, 81), 0.25)
            ]
        );
        let h = f(sobolev_norm(&u, -1.0));
        assert!((h - (21.0f64 / 32.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bmo_proxy_of_geometric_family() {
        let s = LacunarySpec::geometric(Frequency::new(1, 1), 9, 12, 0.5);
        let p = besov_bmo_proxies(&lacunary_field(&s).unwrap());
        let expected = (1.0 - 0.25f64.powi(12)) / 0.75;
        assert!((f(p.bmo) - expected.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ratio_eight_is_rejected() {
        let s = LacunarySpec::geometric(Frequency::new(1, 1), 8, 3, 0.5);
        let e = lacunary_field(&s).unwrap_err();
        assert_eq!(e.to_string(), "invalid spec: gap condition requires ratio > 8");
        let r = family_conditions_report(&s, 2);
        assert!(!r.all_pass());
        assert_eq!(r.levels[1].gap_ok, Some(false));
    }

    #[test]
    fn explicit_gap_violation_names_level() {
        let s = LacunarySpec {
            frequency_rule: FrequencyRule::Explicit {
                freqs: vec![Frequency::new(1, 0), Frequency::new(0, 9), Frequency::new(70, 0)],
            },
            amplitude_rule: AmplitudeRule::Explicit { values: vec![1.0, 0.5, 0.25] },
            ..LacunarySpec::geometric(Frequency::new(1, 0), 9, 3, 1.0)
        };
        let e = lacunary_field(&s).unwrap_err().to_string();
        assert!(e.contains("level 2"), "{e}");
    }

    #[test]
    fn valid_family_passes() {
        let s = LacunarySpec::rotating(Frequency::new(1, 1), 9, 3, 0.25);
        let r = family_conditions_report(&s, 2);
        assert!(r.all_pass(), "{:?}", r.flags);
        assert_eq!(r.levels.len(), 3);
        assert!(r.levels[1].gap_ratio.unwrap() > 8.99);
        assert!(r.sobolev_tail_estimate.is_some());
    }

    #[test]
    fn rotating_levels_turn() {
        let s = LacunarySpec::rotating(Frequency::new(1, 1), 9, 3, 0.5);
        let ks = s.frequencies();
        assert_eq!(ks[1], Frequency::new(-9, 9));
        assert_eq!(ks[2], Frequency::new(-81, -81));
        let u = lacunary_field(&s).unwrap();
        assert_eq!(u.len(), 3);
        assert!(!nonlinear_term(&u).unwrap().is_empty());
    }

    #[test]
    fn resonant_one_level() {
        let lac = LacunarySpec::geometric(Frequency::new(0, 9), 9, 1, 1.0);
        let spec = ResonantSpec::following(lac, Frequency::new(1, 0), Phase::ZERO);
        let u = resonant_field(&spec).unwrap();
        let ks: Vec<Frequency> = u.iter().map(|(k, _)| k.clone()).collect();
        assert_eq!(ks, vec![Frequency::new(0, 9), Frequency::new(1, 9)]);
        let n = nonlinear_term(&u).unwrap();
        assert!((f(n.get(&Frequency::new(1, 0)).unwrap().rho()) - 4.5).abs() < 1e-14);
    }

    #[test]
    fn resonant_summability_sum() {
        let lac = LacunarySpec::geometric(Frequency::new(0, 9), 9, 4, 0.25);
        let spec = ResonantSpec::following(lac, Frequency::new(1, 0), Phase::ZERO);
        let r = resonant_conditions_report(&spec, 2);
        assert!(r.all_pass(), "{:?}", r.flags);
        let expected: f64 = 9.0 * (0..4).map(|j| 16f64.powi(-j)).sum::<f64>();
        assert!((f(*r.summability_partial_sums.last().unwrap()) - expected).abs() < 1e-13);
    }

    #[test]
    fn resonant_orthogonality_flag() {
        let lac = LacunarySpec::geometric(Frequency::new(0, 9), 9, 2, 0.25);
        let mut spec = ResonantSpec::following(lac, Frequency::new(1, 0), Phase::ZERO);
        spec.omegas[1] = Frequency::new(1, 1);
        assert!(resonant_field(&spec).is_err());
        let r = resonant_conditions_report(&spec, 2);
        assert_eq!(r.levels[1].orthogonal, Some(false));
        assert!(!r.all_pass());
    }

    #[test]
    fn random_fields_are_seeded() {
        let spec = RandomFieldSpec { seed: 7, modes: 8, radius: 16, decay: 0.8 };
        let a = random_field(&spec).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a, random_field(&spec).unwrap());
        let g = random_general_field(3, 10, 32).unwrap();
        assert_eq!(g.len(), 10);
    }

    #[test]
    fn spec_json_roundtrip() {
        let lac = LacunarySpec::rotating(Frequency::new(1, 1), 9, 4, 0.125);
        let spec = ResonantSpec::following(lac, Frequency::new(1, -1), Phase::HALF_PI);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ResonantSpec>(&s).unwrap(), spec);
    }
}
