//! Sobolev norms and Besov/BMO proxies of solenoidal fields.
//!
//! Norms use the averaged measure on 𝕋², so a single mode satisfies
//! `‖ρ cos(k·x+θ) k^⊥‖²_{H^s} = ρ² |k|^(2+2s) / 2`.

use std::collections::BTreeMap;

use super::SolenoidalField;
use crate::wide::WideReal;

/// `Σ_k ρ_k² |k|^(2+2s) / 2`.
pub fn sobolev_norm_squared(f: &SolenoidalField, s: f64) -> WideReal {
    let mut acc = WideReal::ZERO;
    for (k, p) in f.iter() {
        let rho2 = p.a.square() + p.b.square();
        let weight = WideReal::from_bigint(k.norm2()).powf(1.0 + s);
        acc = acc + rho2 * weight;
    }
    acc * WideReal::from_f64(0.5)
}

pub fn sobolev_norm(f: &SolenoidalField, s: f64) -> WideReal {
    sobolev_norm_squared(f, s).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormProxies {
    /// `sup_j 2^(−j) Σ_{block j} ρ_k |k|`, an upper bound for `‖·‖_{B^{−1}_{∞,∞}}`.
    pub besov: WideReal,
    /// `(Σ_j (Σ_{block j} ρ_k)²)^(1/2)`, a Paley-type estimate for the BMO
    /// norm of the stream function. Not the exact `BMO^{−1}` norm.
    pub bmo: WideReal,
}

/// Dyadic-block proxies over blocks `2^j ≤ |k| < 2^(j+1)`.
pub fn besov_bmo_proxies(f: &SolenoidalField) -> NormProxies {
    let mut blocks: BTreeMap<u64, (WideReal, WideReal)> = BTreeMap::new();
    for (k, p) in f.iter() {
        let rho = p.rho();
        let e = blocks.entry(k.dyadic_block()).or_insert((WideReal::ZERO, WideReal::ZERO));
        e.0 = e.0 + rho * k.norm();
        e.1 = e.1 + rho;
    }
    let mut besov = WideReal::ZERO;
    let mut bmo2 = WideReal::ZERO;
    for (j, (weighted, plain)) in blocks {
        besov = besov.max(weighted * WideReal::from_parts(1.0, -(j as i64)));
        bmo2 = bmo2 + plain.square();
    }
    NormProxies {
        besov,
        bmo: bmo2.sqrt(),
    }
}
