//! `−P(v·∇v)` on the canonical disk `|k| ≤ M`, in double precision.
//!
//! Coefficients are the complex numbers `z = a − ib` of the modes
//! `Re(z e^{ik·x}) k^⊥`. Two exact routes are provided: a sparse pair
//! convolution and a pseudo-spectral product on a grid of size `G ≥ 3M+1`,
//! where no product of retained modes can alias back onto the disk.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// The canonical lattice points of the disk `|k| ≤ M`, with a dense lookup.
#[derive(Clone, Debug)]
pub struct Disk {
    pub radius: i64,
    pub points: Vec<[i64; 2]>,
    lookup: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Disk {
    pub fn new(radius: i64) -> Disk {
        let side = (2 * radius + 1) as usize;
        let mut lookup = vec![NONE; side * side];
        let mut points = Vec::new();
        for k1 in 0..=radius {
            for k2 in -radius..=radius {
                let canonical = k1 > 0 || k2 > 0;
                if canonical && k1 * k1 + k2 * k2 <= radius * radius {
                    points.push([k1, k2]);
                }
            }
        }
        points.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1], k[0], k[1]));
        for (i, k) in points.iter().enumerate() {
            lookup[Self::slot(radius, *k)] = i as u32;
        }
        Disk {
            radius,
            points,
            lookup,
        }
    }

    fn slot(radius: i64, k: [i64; 2]) -> usize {
        ((k[0] + radius) * (2 * radius + 1) + (k[1] + radius)) as usize
    }

    /// Index of a canonical `k` inside the disk.
    pub fn index(&self, k: [i64; 2]) -> Option<usize> {
        let r = self.radius;
        if k[0].abs() > r || k[1].abs() > r {
            return None;
        }
        match self.lookup[Self::slot(r, k)] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn transpose(data: &mut [Complex64], g: usize) {
    for r in 0..g {
        for c in r + 1..g {
            data.swap(r * g + c, c * g + r);
        }
    }
}

fn norm2(k: [i64; 2]) -> f64 {
    (k[0] * k[0] + k[1] * k[1]) as f64
}

/// Adds the projected `c·z` written at raw `γ` along `γ^⊥` to `out`.
fn deposit(disk: &Disk, out: &mut [Complex64], gamma: [i64; 2], z: Complex64) {
    let canonical = gamma[0] > 0 || (gamma[0] == 0 && gamma[1] > 0);
    let (k, z) = if canonical {
        (gamma, z)
    } else {
        ([-gamma[0], -gamma[1]], -z.conj())
    };
    if let Some(i) = disk.index(k) {
        out[i] += z;
    }
}

/// `−P(v·∇v)` by direct summation over ordered pairs of nonzero modes.
pub fn nonlinear_sparse(disk: &Disk, z: &[Complex64]) -> Vec<Complex64> {
    let active: Vec<usize> = (0..z.len()).filter(|&i| z[i] != Complex64::default()).collect();
    let mut out = vec![Complex64::default(); z.len()];
    let i_unit = Complex64::new(0.0, 1.0);
    for &ia in &active {
        let a = disk.points[ia];
        for &ib in &active {
            if ia == ib {
                continue;
            }
            let b = disk.points[ib];
            let c = (a[0] * b[1] - a[1] * b[0]) as f64;
            if c == 0.0 {
                continue;
            }
            let (za, zb) = (z[ia], z[ib]);
            // A·∇B = ½c[Re(i z_A z_B e^{i(α+β)x}) + Re(−i z_A z̄_B e^{i(α−β)x})] β^⊥,
            // and β^⊥ projects onto γ^⊥ with weight β·γ/|γ|²
            for (gamma, zz) in [
                ([a[0] + b[0], a[1] + b[1]], i_unit * za * zb),
                ([a[0] - b[0], a[1] - b[1]], -i_unit * za * zb.conj()),
            ] {
                let w = (b[0] * gamma[0] + b[1] * gamma[1]) as f64 / norm2(gamma);
                deposit(disk, &mut out, gamma, -zz * (0.5 * c * w));
            }
        }
    }
    out
}

/// Pseudo-spectral evaluation of `−P(v·∇v)` through the vorticity form
/// `(curl(v·∇v))^ = (v·∇ω)^` on an unaliased grid.
pub struct FftKernel {
    grid: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftKernel {
    pub fn new(radius: i64) -> FftKernel {
        let grid = ((3 * radius + 1) as usize).next_power_of_two().max(4);
        let mut planner = FftPlanner::new();
        FftKernel {
            grid,
            forward: planner.plan_fft_forward(grid),
            inverse: planner.plan_fft_inverse(grid),
        }
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    fn wrap(&self, q: i64) -> usize {
        q.rem_euclid(self.grid as i64) as usize
    }

    /// In-place 2D transform of a row-major `grid × grid` array. Rows are
    /// independent, so the passes run in parallel without affecting the result.
    fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        let g = self.grid;
        let plan = if inverse { &self.inverse } else { &self.forward };
        let rows = |d: &mut [Complex64]| {
            d.par_chunks_mut(g).for_each(|row| plan.process(row));
        };
        rows(data);
        transpose(data, g);
        rows(data);
        transpose(data, g);
    }

    pub fn nonlinear(&self, disk: &Disk, z: &[Complex64]) -> Vec<Complex64> {
        let g = self.grid;
        let n = g * g;
        // full-lattice coefficients ĉ(q) with v = Σ_q ĉ(q) e^{iq·x} q^⊥:
        // ĉ(k) = z/2 and ĉ(−k) = −z̄/2 for canonical k
        // two real fields per complex transform: u_x + i u_y and ∂_xω + i ∂_yω
        let mut u = vec![Complex64::default(); n];
        let mut dw = vec![Complex64::default(); n];
        let i_unit = Complex64::new(0.0, 1.0);
        for (idx, k) in disk.points.iter().enumerate() {
            if z[idx] == Complex64::default() {
                continue;
            }
            for (q, c) in [(*k, z[idx] * 0.5), ([-k[0], -k[1]], -z[idx].conj() * 0.5)] {
                // rows index the first coordinate
                let s = self.wrap(q[0]) * g + self.wrap(q[1]);
                let (q1, q2) = (q[0] as f64, q[1] as f64);
                u[s] += c * (-q2) + i_unit * c * q1;
                let omega = i_unit * c * (q1 * q1 + q2 * q2);
                dw[s] += i_unit * q1 * omega + i_unit * (i_unit * q2 * omega);
            }
        }
        self.fft2(&mut u, true);
        self.fft2(&mut dw, true);
        let mut prod: Vec<Complex64> = u
            .iter()
            .zip(&dw)
            .map(|(u, w)| Complex64::new(u.re * w.re + u.im * w.im, 0.0))
            .collect();
        self.fft2(&mut prod, false);
        let scale = 1.0 / n as f64;
        disk.points
            .iter()
            .map(|k| {
                let gh = prod[self.wrap(k[0]) * g + self.wrap(k[1])] * scale;
                // (v·∇v)^·k^⊥ = −i ĝ(k); the mode coefficient is twice the
                // k^⊥ component, with the overall minus sign of −P(v·∇v)
                -(-i_unit * gh) * (2.0 / norm2(*k))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(disk: &Disk, modes: &[([i64; 2], f64, f64)]) -> Vec<Complex64> {
        let mut z = vec![Complex64::default(); disk.len()];
        for (k, a, b) in modes {
            z[disk.index(*k).unwrap()] = Complex64::new(*a, -*b);
        }
        z
    }

    #[test]
    fn disk_layout() {
        let d = Disk::new(2);
        // canonical points with |k| ≤ 2: 6 at radius ≤ √2 plus (2,0), (0,2)
        assert_eq!(d.len(), 6);
        assert_eq!(d.points[0], [0, 1]);
        assert_eq!(d.index([1, -1]), Some(2));
        assert_eq!(d.index([-1, 0]), None);
        assert_eq!(Disk::new(1).points, vec![[0, 1], [1, 0]]);
    }

    #[test]
    fn sparse_matches_library_kernel() {
        let d = Disk::new(8);
        let z = field(&d, &[([1, 0], 1.0, 0.0), ([0, 1], 1.0, 0.0)]);
        let nl = nonlinear_sparse(&d, &z);
        // −(interact(A,B) + interact(B,A)) vanishes for |α| = |β|
        assert!(nl.iter().all(|c| c.norm() < 1e-15));

        let z = field(&d, &[([1, 0], 1.0, 0.0), ([0, 2], 1.0, 0.0)]);
        let nl = nonlinear_sparse(&d, &z);
        for k in [[1, 2], [1, -2]] {
            assert!((nl[d.index(k).unwrap()].norm() - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn fft_matches_sparse() {
        let d = Disk::new(10);
        let z = field(
            &d,
            &[([1, 0], 1.0, 0.2), ([0, 2], -0.3, 0.7), ([3, -1], 0.25, 0.5), ([2, 5], 0.1, -0.4)],
        );
        let a = nonlinear_sparse(&d, &z);
        let k = FftKernel::new(10);
        assert_eq!(k.grid(), 32);
        let b = k.nonlinear(&d, &z);
        let scale: f64 = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-13 * scale, "{x} vs {y}");
        }
    }
}
