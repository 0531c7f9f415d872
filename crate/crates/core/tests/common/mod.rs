//! Independent oracles: grid quadrature of the advection term, a Cartesian
//! Leray projection, and small helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use sparse_steady::spectral::{GeneralField, GeneralMode};
use sparse_steady::{Frequency, SolenoidalField};

pub type Key = (i64, i64);

/// `(k, a, b)` in double precision for every mode of `f`.
pub fn modes_f64(f: &SolenoidalField) -> Vec<(Key, f64, f64)> {
    f.iter()
        .map(|(k, p)| {
            let [k1, k2] = k.to_i64().expect("test frequencies fit in i64");
            ((k1, k2), p.a.to_f64().unwrap(), p.b.to_f64().unwrap())
        })
        .collect()
}

pub fn canonical(k: Key) -> bool {
    k.0 > 0 || (k.0 == 0 && k.1 > 0)
}

/// Real field sampled on a `g × g` grid of `[0, 2π)²`, with trig values
/// taken from one integer-indexed table so that `k·x_j` is exact.
pub struct Grid {
    pub g: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Grid {
    pub fn new(g: usize) -> Grid {
        let cos = (0..g).map(|j| (2.0 * PI * j as f64 / g as f64).cos()).collect();
        let sin = (0..g).map(|j| (2.0 * PI * j as f64 / g as f64).sin()).collect();
        Grid { g, cos, sin }
    }

    fn phase(&self, k: Key, j1: usize, j2: usize) -> usize {
        let g = self.g as i64;
        (k.0 * j1 as i64 + k.1 * j2 as i64).rem_euclid(g) as usize
    }

    /// Velocity and its gradient `[u, v, ∂₁u, ∂₂u, ∂₁v, ∂₂v]` at every node.
    pub fn sample(&self, modes: &[(Key, f64, f64)]) -> Vec<[f64; 6]> {
        let g = self.g;
        let mut out = vec![[0.0; 6]; g * g];
        for j1 in 0..g {
            for j2 in 0..g {
                let cell = &mut out[j1 * g + j2];
                for &(k, a, b) in modes {
                    let t = self.phase(k, j1, j2);
                    let (c, s) = (self.cos[t], self.sin[t]);
                    let amp = a * c + b * s;
                    let damp = -a * s + b * c;
                    let perp = [-(k.1 as f64), k.0 as f64];
                    let kk = [k.0 as f64, k.1 as f64];
                    cell[0] += amp * perp[0];
                    cell[1] += amp * perp[1];
                    cell[2] += damp * kk[0] * perp[0];
                    cell[3] += damp * kk[1] * perp[0];
                    cell[4] += damp * kk[0] * perp[1];
                    cell[5] += damp * kk[1] * perp[1];
                }
            }
        }
        out
    }

    /// `(u·∇)u` at every node.
    pub fn advection(&self, modes: &[(Key, f64, f64)]) -> Vec<[f64; 2]> {
        self.sample(modes)
            .iter()
            .map(|c| [c[0] * c[2] + c[1] * c[3], c[0] * c[4] + c[1] * c[5]])
            .collect()
    }

    /// Cosine and sine coefficients of a vector field at canonical `k`.
    pub fn coefficients(&self, field: &[[f64; 2]], k: Key) -> ([f64; 2], [f64; 2]) {
        let g = self.g;
        let (mut c, mut s) = ([0.0; 2], [0.0; 2]);
        for j1 in 0..g {
            for j2 in 0..g {
                let t = self.phase(k, j1, j2);
                let v = field[j1 * g + j2];
                for i in 0..2 {
                    c[i] += v[i] * self.cos[t];
                    s[i] += v[i] * self.sin[t];
                }
            }
        }
        let w = 2.0 / (g * g) as f64;
        ([c[0] * w, c[1] * w], [s[0] * w, s[1] * w])
    }

    pub fn mean(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() / field.len() as f64
    }
}

/// Solenoidal phasor `(a, b)` of the Leray projection of `cos v + sin w` at `k`.
pub fn project_onto_perp(k: Key, v: [f64; 2], w: [f64; 2]) -> (f64, f64) {
    let perp = [-(k.1 as f64), k.0 as f64];
    let n2 = (k.0 * k.0 + k.1 * k.1) as f64;
    ((v[0] * perp[0] + v[1] * perp[1]) / n2, (w[0] * perp[0] + w[1] * perp[1]) / n2)
}

/// Every frequency `±α ± β` reachable from a pair of modes, canonicalized.
pub fn pair_outputs(modes: &[(Key, f64, f64)]) -> Vec<Key> {
    let mut out = std::collections::BTreeSet::new();
    for (i, &(a, ..)) in modes.iter().enumerate() {
        for &(b, ..) in &modes[i..] {
            for k in [(a.0 + b.0, a.1 + b.1), (a.0 - b.0, a.1 - b.1)] {
                if k == (0, 0) {
                    continue;
                }
                out.insert(if canonical(k) { k } else { (-k.0, -k.1) });
            }
        }
    }
    out.into_iter().collect()
}

/// Smallest power of two grid that resolves every product of the given modes
/// tested against every output frequency.
pub fn grid_for(modes: &[(Key, f64, f64)]) -> usize {
    let m = modes.iter().map(|(k, ..)| k.0.abs().max(k.1.abs())).max().unwrap_or(1);
    ((4 * m + 1) as usize).next_power_of_two()
}

/// `P(u·∇u)` by grid quadrature, at every frequency reachable from a pair.
pub fn grid_nonlinear(f: &SolenoidalField) -> BTreeMap<Key, (f64, f64)> {
    let modes = modes_f64(f);
    let grid = Grid::new(grid_for(&modes));
    let adv = grid.advection(&modes);
    pair_outputs(&modes)
        .into_iter()
        .map(|k| {
            let (c, s) = grid.coefficients(&adv, k);
            (k, project_onto_perp(k, c, s))
        })
        .collect()
}

/// Leray projection done in Cartesian components: `v − (v·k)k/|k|²`.
pub fn cartesian_leray(g: &GeneralField) -> BTreeMap<Key, (f64, f64)> {
    g.modes()
        .map(|m: GeneralMode| {
            let (v, w) = m.cartesian();
            let [k1, k2] = m.freq.to_i64().unwrap();
            let v = [v[0].to_f64().unwrap(), v[1].to_f64().unwrap()];
            let w = [w[0].to_f64().unwrap(), w[1].to_f64().unwrap()];
            ((k1, k2), project_onto_perp((k1, k2), v, w))
        })
        .collect()
}

/// Worst `|x − y| / scale` over the union of keys, zero where both vanish.
pub fn max_rel_diff(a: &BTreeMap<Key, (f64, f64)>, b: &BTreeMap<Key, (f64, f64)>, scale: f64) -> f64 {
    let keys: std::collections::BTreeSet<Key> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter()
        .map(|k| {
            let x = a.get(&k).copied().unwrap_or((0.0, 0.0));
            let y = b.get(&k).copied().unwrap_or((0.0, 0.0));
            ((x.0 - y.0).abs().max((x.1 - y.1).abs())) / scale
        })
        .fold(0.0, f64::max)
}

pub fn as_map(f: &SolenoidalField) -> BTreeMap<Key, (f64, f64)> {
    modes_f64(f).into_iter().map(|(k, a, b)| (k, (a, b))).collect()
}

pub fn largest(m: &BTreeMap<Key, (f64, f64)>) -> f64 {
    m.values().map(|(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max)
}

pub fn freq(k: Key) -> Frequency {
    Frequency::new(k.0, k.1)
}

/// `(Σ ρ|k|)²`, the size of `|u||∇u|` and so the natural scale of `P(u·∇u)`.
pub fn product_scale(f: &SolenoidalField) -> f64 {
    let s: f64 = modes_f64(f)
        .iter()
        .map(|&(k, a, b)| (a * a + b * b).sqrt() * ((k.0 * k.0 + k.1 * k.1) as f64).sqrt())
        .sum();
    s * s
}
