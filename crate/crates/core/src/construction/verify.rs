use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    c0_floor, compare_residuals, ledger_layout, materialize_partial, residual_from_ledger,
    stage_c0_witness, stage_of_index, ConstructionState, LedgerEntry,
};
use crate::error::Result;
use crate::lattice::Frequency;
use crate::nonlinearity::{admissibility_partial_sums, PairOrder};
use crate::spectral::{besov_bmo_proxies, sobolev_norm};
use crate::wide::WideReal;

pub const REPORT_SCHEMA: &str = "sparse-steady/report/v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Sobolev order `N` of the admissibility sum.
    pub sobolev_order: u32,
    pub pair_cutoff: usize,
    pub residual_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            sobolev_order: 3,
            pair_cutoff: 100_000,
            residual_tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub n: usize,
    pub residual_max_rel_err: f64,
    pub residual_worst_frequency: Option<Frequency>,
    /// `‖ΔU_n − P(U_n·∇U_n)‖_{H⁻³}` of the merged ledger tail.
    pub residual_h_minus3: WideReal,
    /// `Σ_tail |λ_p| ‖cos(γ_p·x) γ_p^⊥‖_{H⁻³}`, a triangle-inequality majorant.
    pub tail_majorant: WideReal,
    /// `tail_majorant(n) − tail_majorant(n−1)`, computed as the mass added by
    /// `A_n` minus the cancelled `γ_n` so that it survives rounding.
    pub tail_delta: Option<WideReal>,
    pub emitted: usize,
    pub block_min_norm: WideReal,
    pub block_max_norm: WideReal,
    /// `min |γ|/|k_n|` and `max |γ|/|k_n|` over `A_n`.
    pub block_window: Option<(f64, f64)>,
    /// `min|A_{n+1}| / max|A_n|`, when stage `n+1` exists.
    pub separation_margin: Option<WideReal>,
    pub separated: Option<bool>,
    /// `ρ_n / (ρ₀ N_n^{−1/4})`.
    pub rho_bound_ratio: Option<WideReal>,
    pub j_of_n: Option<usize>,
    pub c0_omega_witness: Option<WideReal>,
    pub c0_lambda_witness: Option<WideReal>,
    /// `Σ_{1≤j≤n} ρ_j² |k_j|/|ω_j|`.
    pub summability_partial: WideReal,
    /// `2C₀³ρ₀(1 + Σ_{1≤m≤n} (8m−1) N_m^{−1/4})`.
    pub summability_majorant: WideReal,
    pub h_minus1: WideReal,
    pub besov_proxy: WideReal,
    pub bmo_proxy: WideReal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableauSummary {
    pub stage: usize,
    pub sobolev_order: u32,
    pub order: PairOrder,
    pub modes: usize,
    pub pairs: usize,
    pub total: WideReal,
    pub leading_term: WideReal,
    pub final_quarter_tail: WideReal,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub ledger_order: String,
    pub unsafe_schedule: bool,
    pub completed_stages: usize,
    pub residual_tolerance: f64,
    pub stages: Vec<StageReport>,
    pub c0_configured: String,
    pub c0_witness: WideReal,
    pub c0_floor: String,
    pub tail_strictly_decreasing: bool,
    /// `tail_majorant(last) / tail_majorant(1)`.
    pub tail_ratio: Option<WideReal>,
    pub admissibility: TableauSummary,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn mode_h_minus3(e: &LedgerEntry) -> WideReal {
    // ‖λ cos(γ·x) γ^⊥‖_{H⁻³} = λ |γ|^{−2} / √2
    e.lambda_abs / WideReal::from_bigint(e.gamma.norm2()) * WideReal::from_f64(std::f64::consts::FRAC_1_SQRT_2)
}

fn tail_majorant(state: &ConstructionState, n: usize) -> WideReal {
    state.ledger[n..ledger_layout(n).1].iter().map(mode_h_minus3).sum()
}

fn block_norms(state: &ConstructionState, n: usize) -> (&Frequency, &Frequency) {
    let block = state.block(n);
    let min = block.iter().map(|e| &e.gamma).min_by(|a, b| a.norm2().cmp(b.norm2())).unwrap();
    let max = block.iter().map(|e| &e.gamma).max_by(|a, b| a.norm2().cmp(b.norm2())).unwrap();
    (min, max)
}

fn stage_report(state: &ConstructionState, n: usize) -> Result<StageReport> {
    let cmp = compare_residuals(state, n)?;
    let residual = residual_from_ledger(state, n)?;
    let st = state.stage(n);
    let (bmin, bmax) = block_norms(state, n);
    let last = state.completed_stages();
    let (separation_margin, separated) = if n < last {
        let (next_min, _) = block_norms(state, n + 1);
        (
            Some(next_min.norm() / bmax.norm()),
            Some(next_min.norm2() > bmax.norm2()),
        )
    } else {
        (None, None)
    };
    let block_window = (n >= 1).then(|| {
        let kn = st.k.norm();
        ((bmin.norm() / kn).to_f64_lossy(), (bmax.norm() / kn).to_f64_lossy())
    });

    let rho0 = state.config.rho0_wide();
    let c0 = state.config.c0_wide();
    let (rho_bound_ratio, j_of_n, c0_omega, c0_lambda) = if n >= 1 {
        let bound = rho0 * WideReal::from_bigint(&st.big_n).powf(-0.25);
        let (_, wo, wl) = stage_c0_witness(state, n);
        (Some(st.rho / bound), Some(stage_of_index(n)), Some(wo), Some(wl))
    } else {
        (None, None, None, None)
    };
    let mut partial = WideReal::ZERO;
    let mut inner = WideReal::ONE;
    for s in &state.stages[1..=n] {
        partial = partial + s.rho.square() * WideReal::from_bigint(&s.big_n);
        inner = inner
            + WideReal::from_f64((8 * s.n - 1) as f64) * WideReal::from_bigint(&s.big_n).powf(-0.25);
    }
    let majorant = WideReal::from_f64(2.0) * c0 * c0 * c0 * rho0 * inner;

    let u = materialize_partial(state, n)?;
    let proxies = besov_bmo_proxies(&u);
    Ok(StageReport {
        n,
        residual_max_rel_err: cmp.max_rel_err,
        residual_worst_frequency: cmp.worst_frequency,
        residual_h_minus3: sobolev_norm(&residual, -3.0),
        tail_majorant: tail_majorant(state, n),
        tail_delta: (n >= 1).then(|| {
            let added: WideReal = state.block(n).iter().map(mode_h_minus3).sum();
            added - mode_h_minus3(state.entry(n))
        }),
        emitted: state.block(n).len(),
        block_min_norm: bmin.norm(),
        block_max_norm: bmax.norm(),
        block_window,
        separation_margin,
        separated,
        rho_bound_ratio,
        j_of_n,
        c0_omega_witness: c0_omega,
        c0_lambda_witness: c0_lambda,
        summability_partial: partial,
        summability_majorant: majorant,
        h_minus1: sobolev_norm(&u, -1.0),
        besov_proxy: proxies.besov,
        bmo_proxy: proxies.bmo,
    })
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn check(name: &str, status: CheckStatus, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        status,
        detail: detail.into(),
    }
}

fn structural_checks(state: &ConstructionState) -> Vec<Check> {
    let last = state.completed_stages();
    let mut out = Vec::new();

    let mut bad = Vec::new();
    if state.ledger.len() != ledger_layout(last).1 {
        bad.push(format!("ledger holds {} entries, expected {}", state.ledger.len(), ledger_layout(last).1));
    }
    for (i, e) in state.ledger.iter().enumerate() {
        if e.p != i + 1 || e.stage != stage_of_index(e.p) {
            bad.push(format!("entry {} is out of place", i + 1));
            break;
        }
    }
    for st in &state.stages {
        if st.emitted != ledger_layout(st.n) {
            bad.push(format!("stage {} emitted range {:?}", st.n, st.emitted));
        }
    }
    out.push(check(
        "ledger-counts",
        status(bad.is_empty()),
        if bad.is_empty() { format!("{} entries, 8n−1 per stage", state.ledger.len()) } else { bad.join("; ") },
    ));

    let open: Vec<usize> = state
        .ledger
        .iter()
        .filter(|e| !e.beta.is_quarter_turn())
        .map(|e| e.p)
        .chain(state.stages.iter().filter(|s| !s.eta.is_quarter_turn()).map(|s| s.n))
        .collect();
    out.push(check(
        "quarter-turn-closure",
        status(open.is_empty()),
        if open.is_empty() { "every β_p and η_n is a multiple of π/2".to_string() } else { format!("non quarter-turn phases at {open:?}") },
    ));

    let mut geo = Vec::new();
    for n in 1..=last {
        let st = state.stage(n);
        let omega = st.omega.as_ref().unwrap();
        let nn = &st.big_n;
        if omega != &state.entry(n).gamma {
            geo.push(format!("ω_{n} ≠ γ_{n}"));
        }
        if !num_traits::Zero::is_zero(&omega.dot(&st.k)) {
            geo.push(format!("ω_{n}·k_{n} ≠ 0"));
        }
        if st.k.norm2() != &(nn * nn * omega.norm2()) {
            geo.push(format!("|k_{n}|² ≠ N²|ω_{n}|²"));
        }
        if nn <= &num_bigint::BigInt::from(8) {
            geo.push(format!("N_{n} ≤ 8"));
        }
        if st.k.norm2() <= &(state.stage(n - 1).k.norm2() * 64u32) {
            geo.push(format!("|k_{n}| ≤ 8|k_{}|", n - 1));
        }
        let lam = state.entry(n).lambda_abs;
        let rho2 = lam * WideReal::from_f64(2.0) / (WideReal::from_bigint(nn) * WideReal::from_bigint(omega.norm2()));
        if WideReal::rel_diff(st.rho.square(), rho2) > 1e-12 {
            geo.push(format!("ρ_{n} inconsistent with |λ_{n}|"));
        }
        if st.null_stage != lam.is_zero() {
            geo.push(format!("null flag of stage {n}"));
        }
    }
    out.push(check(
        "stage-geometry",
        status(geo.is_empty()),
        if geo.is_empty() { "ω_n = γ_n, ω_n·k_n = 0, |k_n| = N_n|ω_n|, N_n > 8, |k_n| > 8|k_{n−1}|, ρ_n from |λ_n|".to_string() } else { geo.join("; ") },
    ));
    out
}

/// Recomputes every identity and bound for a completed construction.
pub fn verify_construction(state: &ConstructionState, opts: &VerifyOptions) -> Result<VerificationReport> {
    let last = state.completed_stages();
    let stages: Vec<StageReport> = (0..=last)
        .into_par_iter()
        .map(|n| stage_report(state, n))
        .collect::<Result<_>>()?;
    let tail_strictly_decreasing = stages
        .iter()
        .skip(1)
        .all(|s| s.tail_delta.is_none_or(|d| d.signum() < 0));
    let tail_ratio = (last >= 1).then(|| stages[last].tail_majorant / stages[1].tail_majorant);

    let u = materialize_partial(state, last)?;
    let t = admissibility_partial_sums(&u, opts.sobolev_order, opts.pair_cutoff, PairOrder::MaxIndexLex)?;
    let admissibility = TableauSummary {
        stage: last,
        sobolev_order: opts.sobolev_order,
        order: t.order,
        modes: u.len(),
        pairs: t.pairs.len(),
        total: t.total(),
        leading_term: t.leading_term(),
        final_quarter_tail: if t.pairs.is_empty() { WideReal::ZERO } else { t.final_quarter_tail() },
        monotone: t.is_monotone(),
    };

    let mut checks = structural_checks(state);

    let worst = stages
        .iter()
        .max_by(|a, b| a.residual_max_rel_err.total_cmp(&b.residual_max_rel_err))
        .unwrap();
    let ok = stages.iter().all(|s| s.residual_max_rel_err <= opts.residual_tolerance);
    checks.push(check(
        "residual-identity",
        status(ok),
        format!(
            "max per-frequency error {:.3e} at stage {}{} (tolerance {:.0e})",
            worst.residual_max_rel_err,
            worst.n,
            worst.residual_worst_frequency.as_ref().map(|k| format!(", frequency {k}")).unwrap_or_default(),
            opts.residual_tolerance
        ),
    ));

    let unsep: Vec<usize> = stages.iter().filter(|s| s.separated == Some(false)).map(|s| s.n).collect();
    checks.push(check(
        "separation",
        status(unsep.is_empty()),
        if unsep.is_empty() { "max|A_n| < min|A_{n+1}| for every completed pair of stages".to_string() } else { format!("blocks overlap after stages {unsep:?}") },
    ));

    let schedule = !state.config.unsafe_schedule;
    let na = |name: &str| check(name, CheckStatus::NotApplicable, "unsafe schedule");
    if schedule && last >= 1 {
        let over: Vec<usize> = stages
            .iter()
            .filter(|s| s.rho_bound_ratio.is_some_and(|r| r > WideReal::ONE))
            .map(|s| s.n)
            .collect();
        checks.push(check(
            "rho-bound",
            status(over.is_empty()),
            if over.is_empty() { "ρ_n ≤ ρ₀ N_n^{−1/4} at every stage".to_string() } else { format!("violated at stages {over:?}") },
        ));
        let c0 = state.config.c0_wide();
        checks.push(check(
            "c0-inequalities",
            status(state.c0_witness <= c0 * WideReal::from_f64(1.0 + 1e-12)),
            format!("minimal witnessing C₀ = {}, configured {}", state.c0_witness, crate::io::format_ratio(&state.config.c0)),
        ));
        let over: Vec<usize> = stages
            .iter()
            .filter(|s| s.summability_partial > s.summability_majorant)
            .map(|s| s.n)
            .collect();
        checks.push(check(
            "summability",
            status(over.is_empty()),
            if over.is_empty() { "Σρ_j²|k_j|/|ω_j| below its majorant at every stage".to_string() } else { format!("majorant exceeded at stages {over:?}") },
        ));
    } else {
        checks.push(na("rho-bound"));
        checks.push(na("c0-inequalities"));
        checks.push(na("summability"));
    }
    checks.push(check(
        "admissibility",
        status(admissibility.monotone),
        format!(
            "{} pairs at N = {}, total {}, final-quarter tail {} vs leading term {}",
            admissibility.pairs, admissibility.sobolev_order, admissibility.total, admissibility.final_quarter_tail, admissibility.leading_term
        ),
    ));

    let mut notes = vec![
        "ledger order: k_n, k_n+ω_n, 2k_n+ω_n, then v·v, v·w, w·v, w·w cross terms, each + for increasing j then − for increasing j".to_string(),
        "the window [5/8, 11/8]·|k_n| is not asserted; block_window reports the actual ratios".to_string(),
        "BMO⁻¹ is reported through proxies only".to_string(),
    ];
    if schedule {
        notes.push("standard-schedule frequencies are far beyond any Galerkin grid; evolution applies to unsafe schedules only".to_string());
    }

    Ok(VerificationReport {
        schema: REPORT_SCHEMA.into(),
        ledger_order: "bullet-list".into(),
        unsafe_schedule: state.config.unsafe_schedule,
        completed_stages: last,
        residual_tolerance: opts.residual_tolerance,
        stages,
        c0_configured: crate::io::format_ratio(&state.config.c0),
        c0_witness: state.c0_witness,
        c0_floor: c0_floor(&state.config).to_string(),
        tail_strictly_decreasing,
        tail_ratio,
        admissibility,
        checks,
        notes,
    })
}

fn wide_from_value(v: &Value) -> Option<WideReal> {
    let o = v.as_object()?;
    if o.len() != 3 {
        return None;
    }
    let sign = o.get("sign")?.as_i64()?.to_i8()?;
    WideReal::from_triple(sign, o.get("m")?.as_f64()?, o.get("e")?.as_i64()?).ok()
}

fn walk(path: &str, a: &Value, b: &Value, tol: f64, out: &mut Vec<String>) {
    if let (Some(x), Some(y)) = (wide_from_value(a), wide_from_value(b)) {
        if WideReal::rel_diff(x, y) > tol {
            out.push(format!("{path}: {x} vs {y}"));
        }
        return;
    }
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            let scale = x.abs().max(y.abs());
            // NaN on either side counts as a mismatch
            let close = (x - y).abs() <= tol * scale;
            if x != y && !close {
                out.push(format!("{path}: {x} vs {y}"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{path}: length {} vs {}", x.len(), y.len()));
                return;
            }
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                walk(&format!("{path}[{i}]"), p, q, tol, out);
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            for (k, p) in x {
                match y.get(k) {
                    Some(q) => walk(&format!("{path}.{k}"), p, q, tol, out),
                    None => out.push(format!("{path}.{k}: missing")),
                }
            }
            for k in y.keys().filter(|k| !x.contains_key(*k)) {
                out.push(format!("{path}.{k}: unexpected"));
            }
        }
        _ if a == b => {}
        _ => out.push(format!("{path}: {a} vs {b}")),
    }
}

/// Paths at which two reports differ by more than `tol` relative.
pub fn compare_reports(a: &VerificationReport, b: &VerificationReport, tol: f64) -> Vec<String> {
    let (x, y) = (serde_json::to_value(a).unwrap(), serde_json::to_value(b).unwrap());
    let mut out = Vec::new();
    walk("report", &x, &y, tol, &mut out);
    out
}
