//! Inductive frequency-cascade construction of a singular steady state.
//!
//! Starting from `u₀ = ρ₀ cos(k₀·x) k₀^⊥`, stage `n ≥ 1` adds a resonant pair
//!
//! ```text
//! v_n = ρ_n cos(k_n·x) k_n^⊥,   w_n = ρ_n cos((k_n+ω_n)·x + η_n)(k_n+ω_n)^⊥
//! ```
//!
//! whose mutual interaction at the low frequency `ω_n` cancels the oldest
//! uncancelled error term `γ_n` of the ledger. Every other term the stage
//! creates is appended to the ledger as a block `A_n` of `8n−1` entries, so
//! that `ΔU_n − P(U_n·∇U_n)` is exactly the ledger tail `γ_{n+1}, …`.
//!
//! All ledger amplitudes come from one pair rule: for modes `(α, ρ_A, θ)` and
//! `(β, ρ_B, η)`, the residual `−P(A·∇B + B·∇A)` is
//!
//! ```text
//! λ₊ cos((α+β)·x + θ+η−π/2)(α+β)^⊥ + λ₋ cos((α−β)·x + θ−η−π/2)(α−β)^⊥,
//! λ± = ½ ρ_A ρ_B (α^⊥·β)(|β|²−|α|²) / |α±β|².
//! ```

mod verify;

pub use verify::{
    compare_reports, verify_construction, Check, CheckStatus, StageReport, TableauSummary,
    VerificationReport, VerifyOptions, REPORT_SCHEMA,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{bigint_str, ratio_str, ratio_to_wide};
use crate::lattice::Frequency;
use crate::nonlinearity::{nonlinear_term_detailed, AccumulatedField};
use crate::phase::Phase;
use crate::spectral::{canonicalize_mode, laplacian, Phasor, SolenoidalField};
use crate::wide::WideReal;

pub const STATE_SCHEMA: &str = "sparse-steady/construction/v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    #[serde(with = "ratio_str")]
    pub rho0: BigRational,
    pub k0: Frequency,
    #[serde(with = "ratio_str")]
    pub c0: BigRational,
    pub exponent: u32,
    /// Drops the `C₀` and `(8n−1)^e` floors on `N_n`.
    pub unsafe_schedule: bool,
    /// Per-stage `N_n`, keyed by stage number.
    #[serde(default)]
    pub n_overrides: BTreeMap<usize, String>,
    pub max_stage: usize,
}

impl ConstructionConfig {
    /// `ρ₀ = 1/2`, `k₀ = (1,1)`, `C₀ = 4`, exponent 12.
    pub fn standard(max_stage: usize) -> ConstructionConfig {
        ConstructionConfig {
            rho0: BigRational::new(1.into(), 2.into()),
            k0: Frequency::new(1, 1),
            c0: BigRational::from_integer(4.into()),
            exponent: 12,
            unsafe_schedule: false,
            n_overrides: BTreeMap::new(),
            max_stage,
        }
    }

    /// Same data with only the hard floors `N > 8`, `|k_n| > 8|k_{n−1}|`.
    pub fn toy(max_stage: usize) -> ConstructionConfig {
        ConstructionConfig {
            unsafe_schedule: true,
            ..ConstructionConfig::standard(max_stage)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho0.is_positive() && self.rho0 < BigRational::one()) {
            return Err(Error::Config("rho0 must lie in (0,1)".into()));
        }
        if !self.c0.is_positive() {
            return Err(Error::Config("c0 must be positive".into()));
        }
        if self.k0.is_zero() {
            return Err(Error::Config("k0 must be nonzero".into()));
        }
        for (n, v) in &self.n_overrides {
            if *n == 0 {
                return Err(Error::Config("stage 0 has no N to override".into()));
            }
            v.parse::<BigInt>()
                .map_err(|_| Error::Config(format!("override for stage {n} is not an integer: {v:?}")))?;
        }
        Ok(())
    }

    pub fn rho0_wide(&self) -> WideReal {
        ratio_to_wide(&self.rho0)
    }

    pub fn c0_wide(&self) -> WideReal {
        ratio_to_wide(&self.c0)
    }

    fn override_for(&self, n: usize) -> Option<BigInt> {
        self.n_overrides.get(&n).and_then(|v| v.parse().ok())
    }
}

/// Which term of the stage expansion produced a ledger entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LedgerRule {
    /// `Δu₀`.
    Initial,
    /// `Δv_n` at `k_n`.
    Mode,
    /// `Δw_n` at `k_n+ω_n`.
    Companion,
    /// `(v_n, w_n)` at `2k_n+ω_n`.
    Doubled,
    VvSum,
    VvDiff,
    VwSum,
    VwDiff,
    WvSum,
    WvDiff,
    WwSum,
    WwDiff,
}

/// One term `|λ_p| cos(γ_p·x + β_p) γ_p^⊥` of the residual expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub p: usize,
    pub gamma: Frequency,
    pub lambda_abs: WideReal,
    pub beta: Phase,
    pub stage: usize,
    pub rule: LedgerRule,
    /// The older stage `j` for cross terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<usize>,
}

impl LedgerEntry {
    pub fn phasor(&self) -> Phasor {
        Phasor::from_polar(self.lambda_abs, self.beta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub n: usize,
    /// `γ_n`; absent at stage 0.
    pub omega: Option<Frequency>,
    #[serde(rename = "N", with = "bigint_str")]
    pub big_n: BigInt,
    pub k: Frequency,
    pub rho: WideReal,
    /// `η_n`; at stage 0 the phase of `u₀` on its canonical frequency.
    pub eta: Phase,
    pub emitted: (usize, usize),
    pub null_stage: bool,
}

impl StageRecord {
    /// `v_n` (or `u₀` at stage 0) as a raw mode.
    fn v(&self) -> RawMode {
        let phase = if self.n == 0 { self.eta } else { Phase::ZERO };
        RawMode {
            k: self.k.clone(),
            rho: self.rho,
            phase,
        }
    }

    /// `w_n`; stage 0 has none.
    fn w(&self) -> Option<RawMode> {
        let omega = self.omega.as_ref()?;
        Some(RawMode {
            k: &self.k + omega,
            rho: self.rho,
            phase: self.eta,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionState {
    pub schema: String,
    pub config: ConstructionConfig,
    pub stages: Vec<StageRecord>,
    pub ledger: Vec<LedgerEntry>,
    /// Smallest `C₀` for which both stage inequalities hold so far.
    pub c0_witness: WideReal,
}

impl ConstructionState {
    pub fn completed_stages(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, n: usize) -> &StageRecord {
        &self.stages[n]
    }

    pub fn entry(&self, p: usize) -> &LedgerEntry {
        &self.ledger[p - 1]
    }

    /// Entries of block `A_n`.
    pub fn block(&self, n: usize) -> &[LedgerEntry] {
        let (a, b) = ledger_layout(n);
        &self.ledger[a - 1..b]
    }
}

/// Index range `(first, last)` of block `A_n`.
pub fn ledger_layout(n: usize) -> (usize, usize) {
    if n == 0 {
        return (1, 1);
    }
    (4 * n * n + 3 - 5 * n, 4 * n * n + 3 * n + 1)
}

/// The stage `j` with `γ_p ∈ A_j`.
pub fn stage_of_index(p: usize) -> usize {
    assert!(p >= 1, "ledger indices start at 1");
    let mut n = 0;
    while ledger_layout(n).1 < p {
        n += 1;
    }
    n
}

#[derive(Clone, Debug)]
struct RawMode {
    k: Frequency,
    rho: WideReal,
    phase: Phase,
}

/// `(frequency, signed λ, phase)` before sign folding and canonicalization.
type RawTerm = (Frequency, WideReal, Phase);

/// Residual terms `−P(A·∇B + B·∇A)` at `α+β` and `α−β`.
fn pair_terms(a: &RawMode, b: &RawMode) -> (RawTerm, RawTerm) {
    let (alpha, beta) = (&a.k, &b.k);
    let c = alpha.cross(beta);
    let gap = beta.norm2() - alpha.norm2();
    let num = WideReal::from_bigint(&(c * gap)) * (a.rho * b.rho) * WideReal::from_f64(0.5);
    let sum = alpha + beta;
    let diff = alpha - beta;
    let lam = |k: &Frequency| {
        if k.is_zero() || num.is_zero() {
            WideReal::ZERO
        } else {
            num / WideReal::from_bigint(k.norm2())
        }
    };
    let (lp, lm) = (lam(&sum), lam(&diff));
    (
        (sum, lp, a.phase + b.phase - Phase::HALF_PI),
        (diff, lm, a.phase - b.phase - Phase::HALF_PI),
    )
}

fn make_entry(
    p: usize,
    term: RawTerm,
    stage: usize,
    rule: LedgerRule,
    partner: Option<usize>,
) -> Result<LedgerEntry> {
    let (k, lambda, phase) = term;
    if k.is_zero() {
        return Err(Error::Degenerate {
            stage,
            detail: format!("{rule:?} term with partner {partner:?} lands on the zero frequency"),
        });
    }
    let phase = if lambda.signum() < 0 { phase + Phase::PI } else { phase };
    let (gamma, flipped) = k.canonical()?;
    let beta = if flipped { Phase::PI - phase } else { phase };
    Ok(LedgerEntry {
        p,
        gamma,
        lambda_abs: lambda.abs(),
        beta,
        stage,
        rule,
        partner,
    })
}

/// Validates the configuration and records stage 0 and `γ₁`.
pub fn init_construction(config: ConstructionConfig) -> Result<ConstructionState> {
    config.validate()?;
    let rho0 = config.rho0_wide();
    let u0 = canonicalize_mode(&config.k0, rho0, Phase::ZERO)?;
    let (k0, flipped) = config.k0.canonical()?;
    let theta0 = if flipped { Phase::PI } else { Phase::ZERO };
    debug_assert_eq!(u0.freq, k0);
    let lam = -(rho0 * WideReal::from_bigint(config.k0.norm2()));
    let first = make_entry(1, (config.k0.clone(), lam, Phase::ZERO), 0, LedgerRule::Initial, None)?;
    Ok(ConstructionState {
        schema: STATE_SCHEMA.into(),
        stages: vec![StageRecord {
            n: 0,
            omega: None,
            big_n: BigInt::one(),
            k: k0,
            rho: rho0,
            eta: theta0,
            emitted: (1, 1),
            null_stage: false,
        }],
        ledger: vec![first],
        c0_witness: WideReal::ZERO,
        config,
    })
}

/// Smallest `m ≥ 0` with `m² ≥ x`.
fn ceil_sqrt(x: &BigInt) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let s = x.sqrt();
    if &(&s * &s) < x {
        s + 1
    } else {
        s
    }
}

fn ceil_ratio(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// The hard floors `N > 8` and `N|ω_n| > 8|k_{n−1}|`.
fn hard_floor(omega: &Frequency, k_prev: &Frequency) -> BigInt {
    // N²|ω|² > 64|k|²  ⇔  N² ≥ ⌊64|k|²/|ω|²⌋ + 1
    let q = (k_prev.norm2() * 64u32) / omega.norm2() + 1u32;
    ceil_sqrt(&q).max(BigInt::from(9))
}

/// `⌈4 C₀⁶ ρ₀⁻⁴⌉`.
pub fn c0_floor(config: &ConstructionConfig) -> BigInt {
    let r = BigRational::from_integer(4.into()) * num_traits::pow(config.c0.clone(), 6)
        / num_traits::pow(config.rho0.clone(), 4);
    ceil_ratio(&r)
}

/// `N_n` for stage `n`: the minimal integer above every applicable floor, or
/// the configured override after checking the hard floors.
pub fn choose_n(state: &ConstructionState, n: usize) -> Result<BigInt> {
    if n == 0 || n != state.stages.len() {
        return Err(Error::Precondition(format!(
            "choose_n({n}) needs exactly stages 0..{} complete",
            n.saturating_sub(1)
        )));
    }
    let omega = &state.entry(n).gamma;
    let k_prev = &state.stages[n - 1].k;
    let hard = hard_floor(omega, k_prev);
    if let Some(v) = state.config.override_for(n) {
        if v < hard {
            return Err(Error::Schedule(format!(
                "override N_{n} = {v} is below the floor {hard} (N > 8 and |k_n| > 8|k_{{n-1}}|)"
            )));
        }
        return Ok(v);
    }
    if state.config.unsafe_schedule {
        return Ok(hard);
    }
    let growth = num_traits::pow(BigInt::from(8 * n as u64 - 1), state.config.exponent as usize);
    Ok(hard.max(c0_floor(&state.config)).max(growth))
}

/// Performs stage `n = completed + 1`.
pub fn advance_stage(mut state: ConstructionState) -> Result<ConstructionState> {
    let n = state.stages.len();
    let target = state.entry(n).clone();
    let omega = target.gamma.clone();
    let big_n = choose_n(&state, n)?;
    let (k, _) = (&omega.perp() * &big_n).canonical()?;
    // s = k^⊥·ω = ±N|ω|²; the W term sits at ω with amplitude ½ρ²s and phase η−π/2
    let s = k.cross(&omega);
    let null_stage = target.lambda_abs.is_zero();
    let rho = if null_stage {
        WideReal::ZERO
    } else {
        (target.lambda_abs * WideReal::from_f64(2.0)
            / (WideReal::from_bigint(&big_n) * WideReal::from_bigint(omega.norm2())))
        .sqrt()
    };
    let eta = if s.is_positive() {
        target.beta - Phase::HALF_PI
    } else {
        target.beta + Phase::HALF_PI
    };

    let (first, last) = ledger_layout(n);
    let record = StageRecord {
        n,
        omega: Some(omega.clone()),
        big_n,
        k: k.clone(),
        rho,
        eta,
        emitted: (first, last),
        null_stage,
    };
    let v = record.v();
    let w = record.w().expect("stage n ≥ 1 has a companion");

    let mut terms: Vec<(RawTerm, LedgerRule, Option<usize>)> = Vec::with_capacity(8 * n - 1);
    let neg = |x: WideReal| -x;
    terms.push(((v.k.clone(), neg(rho * WideReal::from_bigint(v.k.norm2())), v.phase), LedgerRule::Mode, None));
    terms.push(((w.k.clone(), neg(rho * WideReal::from_bigint(w.k.norm2())), w.phase), LedgerRule::Companion, None));
    terms.push((pair_terms(&v, &w).0, LedgerRule::Doubled, None));

    let olds_v: Vec<RawMode> = state.stages.iter().map(StageRecord::v).collect();
    let olds_w: Vec<Option<RawMode>> = state.stages.iter().map(StageRecord::w).collect();
    let families: [(&RawMode, bool, LedgerRule, LedgerRule); 4] = [
        (&v, false, LedgerRule::VvSum, LedgerRule::VvDiff),
        (&v, true, LedgerRule::VwSum, LedgerRule::VwDiff),
        (&w, false, LedgerRule::WvSum, LedgerRule::WvDiff),
        (&w, true, LedgerRule::WwSum, LedgerRule::WwDiff),
    ];
    for (mine, partner_w, plus_rule, minus_rule) in families {
        let partners: Vec<(usize, &RawMode)> = (0..n)
            .filter_map(|j| {
                if partner_w {
                    olds_w[j].as_ref().map(|m| (j, m))
                } else {
                    Some((j, &olds_v[j]))
                }
            })
            .collect();
        let pairs: Vec<(usize, (RawTerm, RawTerm))> =
            partners.iter().map(|&(j, m)| (j, pair_terms(mine, m))).collect();
        for (j, (plus, _)) in &pairs {
            terms.push((plus.clone(), plus_rule, Some(*j)));
        }
        for (j, (_, minus)) in pairs {
            terms.push((minus, minus_rule, Some(j)));
        }
    }
    debug_assert_eq!(terms.len(), 8 * n - 1);

    for (i, (term, rule, partner)) in terms.into_iter().enumerate() {
        let e = make_entry(first + i, term, n, rule, partner)?;
        state.ledger.push(e);
    }
    state.stages.push(record);
    state.c0_witness = state.c0_witness.max(stage_c0_witness(&state, n).0);
    Ok(state)
}

/// `(max of both, |k_{j(n)}|/|ω_n|, |λ_n| / (|k_{j(n)}|² ρ_{j(n)} sup(1, ρ₀, …, ρ_{j(n)})))`.
pub(crate) fn stage_c0_witness(state: &ConstructionState, n: usize) -> (WideReal, WideReal, WideReal) {
    let st = &state.stages[n];
    let omega = st.omega.as_ref().expect("stage n ≥ 1");
    let j = stage_of_index(n);
    let kj = &state.stages[j].k;
    let w_omega = kj.norm() / omega.norm();
    let lambda = state.entry(n).lambda_abs;
    let sup = state.stages[..=j]
        .iter()
        .map(|s| s.rho)
        .fold(WideReal::ONE, WideReal::max);
    let denom = WideReal::from_bigint(kj.norm2()) * state.stages[j].rho * sup;
    let w_lambda = if lambda.is_zero() {
        WideReal::ZERO
    } else {
        lambda / denom
    };
    (w_omega.max(w_lambda), w_omega, w_lambda)
}

/// Runs stages `1..=config.max_stage`.
pub fn build(config: ConstructionConfig) -> Result<ConstructionState> {
    let target = config.max_stage;
    let mut state = init_construction(config)?;
    for _ in 0..target {
        state = advance_stage(state)?;
    }
    Ok(state)
}

fn check_stage(state: &ConstructionState, n: usize) -> Result<()> {
    if n > state.completed_stages() {
        return Err(Error::Precondition(format!(
            "stage {n} requested but only {} completed",
            state.completed_stages()
        )));
    }
    Ok(())
}

/// `U_n = u₀ + Σ_{j≤n} (v_j + w_j)`.
pub fn materialize_partial(state: &ConstructionState, n: usize) -> Result<SolenoidalField> {
    check_stage(state, n)?;
    let mut f = SolenoidalField::new();
    for st in &state.stages[..=n] {
        for m in std::iter::once(st.v()).chain(st.w()) {
            if !m.rho.is_zero() {
                f.add_mode(canonicalize_mode(&m.k, m.rho, m.phase)?);
            }
        }
    }
    Ok(f)
}

/// The uncancelled ledger tail `γ_{n+1}, …, γ_{last(n)}`, merged per
/// frequency, with gross magnitudes.
pub fn residual_from_ledger_detailed(state: &ConstructionState, n: usize) -> Result<AccumulatedField> {
    check_stage(state, n)?;
    let mut acc = AccumulatedField::default();
    for e in &state.ledger[n..ledger_layout(n).1] {
        acc.add(e.gamma.clone(), e.phasor());
    }
    Ok(acc)
}

pub fn residual_from_ledger(state: &ConstructionState, n: usize) -> Result<SolenoidalField> {
    Ok(residual_from_ledger_detailed(state, n)?.field)
}

/// `ΔU_n − P(U_n·∇U_n)` through the generic spectral path only.
pub fn residual_brute_detailed(state: &ConstructionState, n: usize) -> Result<AccumulatedField> {
    let u = materialize_partial(state, n)?;
    let nl = nonlinear_term_detailed(&u)?;
    let mut acc = AccumulatedField::default();
    acc.add_field(&laplacian(&u));
    for (k, p) in nl.field.iter() {
        acc.field.add_phasor(k.clone(), -*p);
    }
    for (k, g) in nl.gross {
        let e = acc.gross.entry(k).or_insert(WideReal::ZERO);
        *e = *e + g;
    }
    Ok(acc)
}

pub fn residual_brute(state: &ConstructionState, n: usize) -> Result<SolenoidalField> {
    Ok(residual_brute_detailed(state, n)?.field)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualComparison {
    /// Largest `|brute − ledger| / gross` over all frequencies present in either.
    pub max_rel_err: f64,
    pub worst_frequency: Option<Frequency>,
    pub frequencies: usize,
}

/// Per-frequency comparison of the two residual paths. The scale at each
/// frequency is the larger gross magnitude, since exact cancellations there
/// make the net value itself meaningless as a reference.
pub fn compare_residuals(state: &ConstructionState, n: usize) -> Result<ResidualComparison> {
    let brute = residual_brute_detailed(state, n)?;
    let ledger = residual_from_ledger_detailed(state, n)?;
    let keys: std::collections::BTreeSet<&Frequency> =
        brute.gross.keys().chain(ledger.gross.keys()).collect();
    let mut worst = (0.0f64, None);
    for k in &keys {
        let a = brute.field.get(k).copied().unwrap_or(Phasor::ZERO);
        let b = ledger.field.get(k).copied().unwrap_or(Phasor::ZERO);
        let scale = brute.gross_at(k).max(ledger.gross_at(k));
        let err = a.rel_err(&b, scale);
        if err > worst.0 || (worst.1.is_none() && err.is_nan()) {
            worst = (err, Some((*k).clone()));
        }
    }
    Ok(ResidualComparison {
        max_rel_err: worst.0,
        worst_frequency: worst.1,
        frequencies: keys.len(),
    })
}
