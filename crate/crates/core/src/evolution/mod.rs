//! Galerkin Navier–Stokes evolution `∂_t v = Δv − P(v·∇v)` on the disk
//! `|k| ≤ M`, in double precision.
//!
//! The viscous part is integrated exactly and the nonlinear part with the
//! classical fourth-order Runge–Kutta weights (Lawson's integrating-factor
//! scheme), so a field whose nonlinearity vanishes follows `e^{−|k|²t}`
//! to rounding.

mod kernel;

pub use kernel::{nonlinear_sparse, Disk, FftKernel};

use std::io::Write;
use std::sync::Arc;

use num_bigint::BigInt;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Frequency;
use crate::spectral::{Phasor, SolenoidalField};
use crate::wide::WideReal;

/// Which nonlinear kernel to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    /// Pair sums while few modes are active, FFT otherwise.
    #[default]
    Auto,
    Sparse,
    Fft,
}

const SPARSE_LIMIT: usize = 96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub radius: i64,
    pub dt: f64,
    pub t_final: f64,
    /// Steps between recorded samples; the final time is always recorded.
    pub record_every: usize,
    #[serde(default)]
    pub kernel: KernelChoice,
}

impl EvolutionConfig {
    pub fn new(radius: i64, dt: f64, t_final: f64) -> EvolutionConfig {
        EvolutionConfig {
            radius,
            dt,
            t_final,
            record_every: 1,
            kernel: KernelChoice::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::Config("truncation radius must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config("time step must be positive".into()));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config("final time must be nonnegative".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken, so that they end at `t_final`.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize;
        if n == 0 {
            (0, self.dt)
        } else {
            (n, self.t_final / n as f64)
        }
    }
}

/// A truncated state: one complex coefficient `z = a − ib` per canonical disk point.
#[derive(Clone, Debug)]
pub struct SpectralState {
    pub disk: Arc<Disk>,
    pub t: f64,
    pub z: Vec<Complex64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub kept: usize,
    pub dropped: usize,
    /// `‖·‖_{H⁻¹}` of the discarded modes.
    pub dropped_h_minus1: f64,
}

fn k_norm2(k: [i64; 2]) -> f64 {
    (k[0] * k[0] + k[1] * k[1]) as f64
}

/// Projects `f` onto `|k| ≤ radius`.
pub fn galerkin_truncate(f: &SolenoidalField, radius: i64) -> Result<(SpectralState, Truncation)> {
    let disk = Arc::new(Disk::new(radius));
    let mut z = vec![Complex64::default(); disk.len()];
    let mut tr = Truncation::default();
    let r2 = BigInt::from(radius) * radius;
    let mut dropped2 = 0.0;
    for (k, p) in f.iter() {
        if k.norm2() > &r2 {
            tr.dropped += 1;
            // ρ²/(2|k|²), evaluated in wide range
            let m = (p.rho().square() / WideReal::from_bigint(k.norm2()) * WideReal::from_f64(0.5)).to_f64_lossy();
            dropped2 += m;
            continue;
        }
        let ki = k.to_i64().expect("frequency inside the disk fits in i64");
        let (a, b) = (p.a.to_f64()?, p.b.to_f64()?);
        z[disk.index(ki).expect("canonical point of the disk")] = Complex64::new(a, -b);
        tr.kept += 1;
    }
    tr.dropped_h_minus1 = dropped2.sqrt();
    Ok((SpectralState { disk, t: 0.0, z }, tr))
}

impl SpectralState {
    pub fn zeros(radius: i64) -> SpectralState {
        let disk = Arc::new(Disk::new(radius));
        let z = vec![Complex64::default(); disk.len()];
        SpectralState { disk, t: 0.0, z }
    }

    pub fn to_field(&self) -> SolenoidalField {
        let mut f = SolenoidalField::new();
        for (k, z) in self.disk.points.iter().zip(&self.z) {
            if *z != Complex64::default() {
                f.add_raw(
                    &Frequency::new(k[0], k[1]),
                    Phasor::new(WideReal::from_f64(z.re), WideReal::from_f64(-z.im)),
                )
                .expect("disk points are nonzero");
            }
        }
        f
    }

    fn weighted(&self, power: i32) -> f64 {
        self.disk
            .points
            .iter()
            .zip(&self.z)
            .map(|(k, z)| z.norm_sqr() * k_norm2(*k).powi(power))
            .sum::<f64>()
            * 0.5
    }

    /// `‖v‖²_{L²}` in the averaged measure.
    pub fn energy(&self) -> f64 {
        self.weighted(1)
    }

    /// `‖∇v‖²_{L²}`.
    pub fn enstrophy(&self) -> f64 {
        self.weighted(2)
    }

    pub fn h_minus1(&self) -> f64 {
        self.weighted(0).sqrt()
    }

    /// `Σ ρ|k|`, an upper bound for `sup |v|`.
    pub fn sup_estimate(&self) -> f64 {
        self.disk
            .points
            .iter()
            .zip(&self.z)
            .map(|(k, z)| z.norm() * k_norm2(*k).sqrt())
            .sum()
    }

    /// `‖self − other‖_{H⁻¹}`; both states must share a disk.
    pub fn distance_h_minus1(&self, other: &SpectralState) -> f64 {
        assert_eq!(self.z.len(), other.z.len(), "states on different disks");
        let s: f64 = self
            .z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (0.5 * s).sqrt()
    }

    pub fn active_modes(&self) -> usize {
        self.z.iter().filter(|z| **z != Complex64::default()).count()
    }
}

/// Integrating-factor RK4 stepper bound to one disk.
pub struct Stepper {
    disk: Arc<Disk>,
    choice: KernelChoice,
    fft: Option<FftKernel>,
    decay: Vec<f64>,
}

impl Stepper {
    pub fn new(disk: Arc<Disk>, choice: KernelChoice) -> Stepper {
        let fft = (choice != KernelChoice::Sparse).then(|| FftKernel::new(disk.radius));
        let decay = disk.points.iter().map(|k| k_norm2(*k)).collect();
        Stepper {
            disk,
            choice,
            fft,
            decay,
        }
    }

    /// `−P(v·∇v)` truncated to the disk.
    pub fn nonlinear(&self, z: &[Complex64]) -> Vec<Complex64> {
        let sparse = match self.choice {
            KernelChoice::Sparse => true,
            KernelChoice::Fft => false,
            KernelChoice::Auto => z.iter().filter(|c| **c != Complex64::default()).count() <= SPARSE_LIMIT,
        };
        match (sparse, &self.fft) {
            (false, Some(fft)) => fft.nonlinear(&self.disk, z),
            _ => nonlinear_sparse(&self.disk, z),
        }
    }

    fn propagate(&self, z: &[Complex64], h: f64) -> Vec<Complex64> {
        z.iter().zip(&self.decay).map(|(z, d)| z * (-d * h).exp()).collect()
    }

    fn enstrophy(&self, z: &[Complex64]) -> f64 {
        z.iter().zip(&self.decay).map(|(z, d)| z.norm_sqr() * d * d).sum::<f64>() * 0.5
    }

    /// Advances `state` by `h` and returns the RK4 quadrature of `∫‖∇v‖²`
    /// over the step.
    pub fn step(&self, state: &mut SpectralState, h: f64) -> f64 {
        let z = &state.z;
        let axpy = |x: &[Complex64], a: f64, y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(x, y)| x + y * a).collect()
        };
        let k1 = self.nonlinear(z);
        let s2 = self.propagate(&axpy(z, 0.5 * h, &k1), 0.5 * h);
        let k2 = self.nonlinear(&s2);
        let zh = self.propagate(z, 0.5 * h);
        let s3 = axpy(&zh, 0.5 * h, &k2);
        let k3 = self.nonlinear(&s3);
        let s4 = axpy(&self.propagate(z, h), h, &self.propagate(&k3, 0.5 * h));
        let k4 = self.nonlinear(&s4);

        let dissipated = h / 6.0
            * (self.enstrophy(z) + 2.0 * self.enstrophy(&s2) + 2.0 * self.enstrophy(&s3) + self.enstrophy(&s4));

        let e_full = self.propagate(z, h);
        let e_k1 = self.propagate(&k1, h);
        let mid: Vec<Complex64> = k2.iter().zip(&k3).map(|(a, b)| a + b).collect();
        let e_mid = self.propagate(&mid, 0.5 * h);
        state.z = (0..z.len())
            .map(|i| e_full[i] + (e_k1[i] + e_mid[i] * 2.0 + k4[i]) * (h / 6.0))
            .collect();
        state.t += h;
        dissipated
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub h_minus1: f64,
    pub sup_estimate: f64,
    pub distance_to_initial: f64,
    /// `∫₀ᵗ ‖∇v‖²`.
    pub dissipated: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: EvolutionConfig,
    pub truncation: Truncation,
    pub step_taken: f64,
    pub samples: Vec<Sample>,
    pub initial: SpectralState,
    pub last: SpectralState,
}

fn sample(s: &SpectralState, initial: &SpectralState, dissipated: f64) -> Sample {
    Sample {
        t: s.t,
        energy: s.energy(),
        enstrophy: s.enstrophy(),
        h_minus1: s.h_minus1(),
        sup_estimate: s.sup_estimate(),
        distance_to_initial: s.distance_h_minus1(initial),
        dissipated,
    }
}

/// Evolves the Galerkin truncation of `f` and records the observers.
pub fn evolve(f: &SolenoidalField, config: &EvolutionConfig) -> Result<Trajectory> {
    config.validate()?;
    let (initial, truncation) = galerkin_truncate(f, config.radius)?;
    evolve_state(initial, truncation, config)
}

pub fn evolve_state(initial: SpectralState, truncation: Truncation, config: &EvolutionConfig) -> Result<Trajectory> {
    config.validate()?;
    let stepper = Stepper::new(initial.disk.clone(), config.kernel);
    let (steps, h) = config.steps();
    let mut state = initial.clone();
    let mut dissipated = 0.0;
    let mut samples = vec![sample(&state, &initial, 0.0)];
    for n in 1..=steps {
        dissipated += stepper.step(&mut state, h);
        if n == steps {
            state.t = config.t_final;
        }
        let energy = state.energy();
        if !energy.is_finite() || energy > 1e300 {
            return Err(Error::Divergence {
                t: state.t,
                detail: format!("energy {energy:e} after step {n}"),
            });
        }
        if n % config.record_every == 0 || n == steps {
            samples.push(sample(&state, &initial, dissipated));
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        truncation,
        step_taken: h,
        samples,
        initial,
        last: state,
    })
}

/// How far a candidate steady state drifts under the flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyComparison {
    pub initial_h_minus1: f64,
    /// Extremes of `‖v(t) − f‖_{H⁻¹}` over the recorded samples with `t > 0`.
    pub max_distance: f64,
    pub min_distance: f64,
    pub final_distance: f64,
    /// `‖v(T)‖_{H⁻¹} / ‖f‖_{H⁻¹}`, zero for the zero field.
    pub decay_ratio: f64,
}

pub fn compare_steady(traj: &Trajectory) -> SteadyComparison {
    let initial = traj.initial.h_minus1();
    let later: Vec<f64> = traj.samples.iter().skip(1).map(|s| s.distance_to_initial).collect();
    let last = traj.samples.last().expect("a trajectory has its initial sample");
    SteadyComparison {
        initial_h_minus1: initial,
        max_distance: later.iter().copied().fold(0.0, f64::max),
        min_distance: later.iter().copied().reduce(f64::min).unwrap_or(0.0),
        final_distance: last.distance_to_initial,
        decay_ratio: if initial > 0.0 { last.h_minus1 / initial } else { 0.0 },
    }
}

#[derive(Serialize)]
struct CsvHeader<'a> {
    schema: &'static str,
    config: &'a EvolutionConfig,
    step_taken: f64,
    truncation: &'a Truncation,
    active_modes_initial: usize,
    comparison: SteadyComparison,
}

pub const TRAJECTORY_SCHEMA: &str = "sparse-steady/trajectory/v1";

impl Trajectory {
    /// `max_t |½E(t) − ½E(0) + ∫₀ᵗ‖∇v‖²| / E(0)`, zero for the zero field.
    pub fn energy_audit(&self) -> f64 {
        let e0 = self.samples[0].energy;
        if e0 == 0.0 {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|s| (0.5 * s.energy - 0.5 * e0 + s.dissipated).abs() / e0)
            .fold(0.0, f64::max)
    }

    /// CSV with one `#`-prefixed JSON header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header = CsvHeader {
            schema: TRAJECTORY_SCHEMA,
            config: &self.config,
            step_taken: self.step_taken,
            truncation: &self.truncation,
            active_modes_initial: self.initial.active_modes(),
            comparison: compare_steady(self),
        };
        writeln!(w, "# {}", serde_json::to_string(&header)?)?;
        writeln!(w, "t,energy,enstrophy,h_minus1,distance_to_initial")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e}",
                s.t, s.energy, s.enstrophy, s.h_minus1, s.distance_to_initial
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Phase;
    use crate::spectral::PhasorMode;

    fn mode(k: (i64, i64), rho: f64, theta: Phase) -> PhasorMode {
        PhasorMode::polar(Frequency::new(k.0, k.1), rho.into(), theta).unwrap()
    }

    #[test]
    fn single_mode_is_heat_flow() {
        let f = SolenoidalField::from_modes([mode((2, 1), 0.7, Phase::new(1, 3).unwrap())]);
        let traj = evolve(&f, &EvolutionConfig::new(4, 0.01, 0.5)).unwrap();
        for s in &traj.samples {
            let expect = 0.7 * 0.7 * 5.0 / 2.0 * (-10.0 * s.t).exp();
            assert!((s.energy - expect).abs() <= 1e-13 * expect, "t={} {} {}", s.t, s.energy, expect);
        }
        assert!(traj.energy_audit() < 1e-6, "{}", traj.energy_audit());
    }

    #[test]
    fn truncation_reports_dropped_mass() {
        let f = SolenoidalField::from_modes([mode((1, 0), 1.0, Phase::ZERO), mode((3, 4), 2.0, Phase::ZERO)]);
        let (s, tr) = galerkin_truncate(&f, 4).unwrap();
        assert_eq!((tr.kept, tr.dropped), (1, 1));
        assert!((tr.dropped_h_minus1 - (2.0f64 / 25.0).sqrt()).abs() < 1e-15);
        assert!((s.h_minus1() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.to_field(), SolenoidalField::from_modes([mode((1, 0), 1.0, Phase::ZERO)]));
    }

    #[test]
    fn zero_field_stays_zero() {
        let traj = evolve(&SolenoidalField::new(), &EvolutionConfig::new(3, 0.1, 1.0)).unwrap();
        assert!(traj.samples.iter().all(|s| s.energy == 0.0));
        let c = compare_steady(&traj);
        assert_eq!((c.max_distance, c.min_distance, c.decay_ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn energy_balance_with_interaction() {
        let f = SolenoidalField::from_modes([
            mode((1, 0), 1.0, Phase::ZERO),
            mode((0, 2), 1.0, Phase::new(1, 4).unwrap()),
            mode((1, 1), 0.5, Phase::ZERO),
        ]);
        let mut cfg = EvolutionConfig::new(12, 2e-3, 0.5);
        cfg.record_every = 25;
        let traj = evolve(&f, &cfg).unwrap();
        assert!(traj.energy_audit() < 1e-8, "{}", traj.energy_audit());
        assert!(traj.last.active_modes() > 3);
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# {"));
        assert_eq!(text.lines().count(), 2 + traj.samples.len());
    }

    #[test]
    fn config_checks() {
        assert!(EvolutionConfig::new(0, 0.1, 1.0).validate().is_err());
        assert!(EvolutionConfig::new(2, -0.1, 1.0).validate().is_err());
        assert_eq!(EvolutionConfig::new(2, 0.3, 1.0).steps().0, 4);
        assert_eq!(EvolutionConfig::new(2, 0.1, 1.0).steps().0, 10);
    }
}
