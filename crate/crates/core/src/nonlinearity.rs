//! Bilinear calculus of solenoidal modes.
//!
//! For modes `A = Re(z_A e^{iα·x}) α^⊥` and `B = Re(z_B e^{iβ·x}) β^⊥`,
//!
//! ```text
//! A·∇B = (α^⊥·β) Re(z_A e^{iα·x}) Re(i z_B e^{iβ·x}) β^⊥
//!      = ½(α^⊥·β) [ Re(i z_A z_B e^{i(α+β)·x}) + Re(−i z_A z̄_B e^{i(α−β)·x}) ] β^⊥
//! ```
//!
//! [`advect`] and [`interact`] evaluate this product directly and project it;
//! that path is the reference for everything else in the crate, including the
//! closed symmetric formula in [`symmetric_interact`].

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::Frequency;
use crate::spectral::{
    canonical_phasor, leray_project, sobolev_norm, GeneralField, Phasor, PhasorMode,
    SolenoidalField,
};
use crate::wide::WideReal;

/// `A·∇B` as a general field at (the canonical forms of) `k_A ± k_B`.
pub fn advect(a: &PhasorMode, b: &PhasorMode) -> Result<GeneralField> {
    let mut out = GeneralField::new();
    let c = a.freq.cross(&b.freq);
    if num_traits::Zero::is_zero(&c) {
        return Ok(out);
    }
    let half_c = WideReal::from_bigint(&c) * WideReal::from_f64(0.5);
    let dir = b.freq.perp();

    let sum = &a.freq + &b.freq;
    let p_sum = a.phasor.mul_z(&b.phasor).times_i().scale(half_c);
    out.add_directed(&sum, p_sum, &dir)?;

    let diff = &a.freq - &b.freq;
    let p_diff = -a.phasor.mul_z(&b.phasor.conj_z()).times_i().scale(half_c);
    if diff.is_zero() {
        // k_A^⊥·k_A = 0 already returned above; anything else is a bug
        if !p_diff.is_zero() {
            return Err(Error::ZeroMean(format!(
                "advect({}, {}) has a mean component",
                a.freq, b.freq
            )));
        }
    } else {
        out.add_directed(&diff, p_diff, &dir)?;
    }
    Ok(out)
}

/// `P(A·∇B)`: at most two canonical solenoidal modes.
pub fn interact(a: &PhasorMode, b: &PhasorMode) -> Result<SolenoidalField> {
    Ok(leray_project(&advect(a, b)?))
}

/// `P(A·∇B + B·∇A)` from the closed product-to-sum formula
///
/// ```text
/// at α+β:  ½(α^⊥·β) (|β|²−|α|²)/|α+β|² · i z_A z_B
/// at α−β:  ½(α^⊥·β) (|α|²−|β|²)/|α−β|² · (−i) z_A z̄_B
/// ```
///
/// Empty whenever `|α| = |β|`. Requires `α ≠ ±β`.
pub fn symmetric_interact(a: &PhasorMode, b: &PhasorMode) -> Result<SolenoidalField> {
    let (alpha, beta) = (&a.freq, &b.freq);
    if alpha == beta || alpha == &(-beta) {
        return Err(Error::Precondition(format!(
            "symmetric_interact needs k_A ≠ ±k_B, got {alpha} and {beta}"
        )));
    }
    let mut out = SolenoidalField::new();
    let c = alpha.cross(beta);
    let gap = beta.norm2() - alpha.norm2();
    if num_traits::Zero::is_zero(&c) || num_traits::Zero::is_zero(&gap) {
        return Ok(out);
    }
    let num = WideReal::from_bigint(&(c * gap)) * WideReal::from_f64(0.5);

    let sum = alpha + beta;
    let p = a
        .phasor
        .mul_z(&b.phasor)
        .times_i()
        .scale(num / WideReal::from_bigint(sum.norm2()));
    let (k, p) = canonical_phasor(&sum, p)?;
    out.add_phasor(k, p);

    let diff = alpha - beta;
    // (|α|²−|β|²)(−i) = (|β|²−|α|²)(+i)
    let p = a
        .phasor
        .mul_z(&b.phasor.conj_z())
        .times_i()
        .scale(num / WideReal::from_bigint(diff.norm2()));
    let (k, p) = canonical_phasor(&diff, p)?;
    out.add_phasor(k, p);
    Ok(out)
}

/// Output of [`nonlinear_term_detailed`]: the merged field together with the
/// gross magnitude `Σ|contribution|` that landed on each frequency, which is
/// the natural scale for judging cancellation error there.
#[derive(Clone, Debug, Default)]
pub struct AccumulatedField {
    pub field: SolenoidalField,
    pub gross: BTreeMap<Frequency, WideReal>,
}

impl AccumulatedField {
    pub fn add(&mut self, k: Frequency, p: Phasor) {
        let g = self.gross.entry(k.clone()).or_insert(WideReal::ZERO);
        *g = *g + p.rho();
        self.field.add_phasor(k, p);
    }

    pub fn add_field(&mut self, f: &SolenoidalField) {
        for (k, p) in f.iter() {
            self.add(k.clone(), *p);
        }
    }

    pub fn gross_at(&self, k: &Frequency) -> WideReal {
        self.gross.get(k).copied().unwrap_or(WideReal::ZERO)
    }
}

/// `P(u·∇u) = Σ_{i≠j} P(u_i·∇u_j)` over ordered mode pairs.
pub fn nonlinear_term(f: &SolenoidalField) -> Result<SolenoidalField> {
    Ok(nonlinear_term_detailed(f)?.field)
}

/// As [`nonlinear_term`], also reporting per-frequency gross magnitudes.
///
/// Pairs are evaluated in parallel but merged in a fixed order, so the result
/// is bit-identical regardless of thread count.
pub fn nonlinear_term_detailed(f: &SolenoidalField) -> Result<AccumulatedField> {
    let modes: Vec<PhasorMode> = f.modes().collect();
    let n = modes.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let parts: Vec<SolenoidalField> = pairs
        .par_iter()
        .map(|&(i, j)| interact(&modes[i], &modes[j]))
        .collect::<Result<_>>()?;
    let mut acc = AccumulatedField::default();
    for part in &parts {
        acc.add_field(part);
    }
    Ok(acc)
}

/// Enumeration order of the double sum over mode pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairOrder {
    /// By increasing `max(i, j)`, then lexicographically.
    MaxIndexLex,
    /// Row-major over `(i, j)`.
    RowMajor,
}

impl PairOrder {
    fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            PairOrder::MaxIndexLex => {
                let mut v = Vec::with_capacity(n * n.saturating_sub(1));
                for m in 1..n {
                    v.extend((0..m).map(|i| (i, m)));
                    v.extend((0..m).map(|j| (m, j)));
                }
                v
            }
            PairOrder::RowMajor => (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableauPair {
    pub i: usize,
    pub j: usize,
    pub outputs: Vec<Frequency>,
    /// `‖P(u_i·∇u_j)‖_{H^{−N}}`.
    pub contribution: WideReal,
}

/// Partial sums of the admissibility double series for a finite field.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionTableau {
    pub sobolev_order: u32,
    pub order: PairOrder,
    pub pairs: Vec<TableauPair>,
    pub partial_sums: Vec<WideReal>,
}

impl InteractionTableau {
    pub fn total(&self) -> WideReal {
        self.partial_sums.last().copied().unwrap_or(WideReal::ZERO)
    }

    pub fn is_monotone(&self) -> bool {
        self.partial_sums.windows(2).all(|w| w[0] <= w[1])
    }

    /// Largest single pair contribution.
    pub fn leading_term(&self) -> WideReal {
        self.pairs
            .iter()
            .map(|p| p.contribution)
            .fold(WideReal::ZERO, WideReal::max)
    }

    /// Sum of the contributions of the last `⌈len/4⌉` pairs.
    pub fn final_quarter_tail(&self) -> WideReal {
        let q = self.pairs.len().div_ceil(4);
        self.pairs[self.pairs.len() - q..]
            .iter()
            .map(|p| p.contribution)
            .sum()
    }

    /// CSV export: `i,j,outputs,contribution,running_sum`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "i,j,outputs,contribution,running_sum")?;
        for (p, s) in self.pairs.iter().zip(&self.partial_sums) {
            let outs: Vec<String> = p.outputs.iter().map(|k| format!("{}:{}", k.k1(), k.k2())).collect();
            writeln!(w, "{},{},{},{},{}", p.i, p.j, outs.join(";"), p.contribution, s)?;
        }
        Ok(())
    }
}

/// Accumulates `ρ_{k₁}ρ_{k₂}‖P(cos(k₁·x+θ₁) sin(k₂·x+θ₂)(k₁^⊥·k₂) k₂^⊥)‖_{H^{−N}}`
/// over ordered pairs of modes (storage order), stopping after `cutoff` pairs.
pub fn admissibility_partial_sums(
    f: &SolenoidalField,
    sobolev_order: u32,
    cutoff: usize,
    order: PairOrder,
) -> Result<InteractionTableau> {
    let modes: Vec<PhasorMode> = f.modes().collect();
    let mut pairs: Vec<(usize, usize)> = order.pairs(modes.len());
    pairs.truncate(cutoff);
    let s = -(sobolev_order as f64);
    let rows: Vec<TableauPair> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let out = interact(&modes[i], &modes[j])?;
            Ok(TableauPair {
                i,
                j,
                outputs: out.iter().map(|(k, _)| k.clone()).collect(),
                contribution: sobolev_norm(&out, s),
            })
        })
        .collect::<Result<_>>()?;
    let mut running = WideReal::ZERO;
    let partial_sums = rows
        .iter()
        .map(|r| {
            running = running + r.contribution;
            running
        })
        .collect();
    Ok(InteractionTableau {
        sobolev_order,
        order,
        pairs: rows,
        partial_sums,
    })
}
