//! Cross tau-Wigner distributions and their Born-Jordan average.
//!
//! `W_tau(f, g)(x, w) = int exp(-2 pi i y w) f(x + tau y) conj(g(x - (1 - tau) y)) dy`.
//! The dilated arguments leave the sample lattice, so they are evaluated by
//! band-limited (trigonometric) interpolation of the samples.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{check_tau, tf_shift, Grid, PhaseSpacePoint, SampledSignal};
use crate::stft::PhaseSpaceArray;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn gauss_legendre(m: usize) -> Result<Self> {
        if m == 0 || m > 256 {
            return Err(Error::OutOfRange {
                name: "nodes",
                detail: format!("{m} not in 1..=256"),
            });
        }
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        for i in 0..(m + 1) / 2 {
            // Root of P_m on [-1, 1], refined by Newton from the Chebyshev-like guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(m, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            nodes[m - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[m - 1 - i] = 0.5 * w;
        }
        Ok(Self { nodes, weights })
    }

    /// One node at `tau` with unit weight.
    pub fn single(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(Self {
            nodes: vec![tau],
            weights: vec![1.0],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(t, w)| w * f(t)).sum()
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cross tau-Wigner distribution on the signal grid times its frequency grid.
pub fn tau_wigner(f: &SampledSignal, g: &SampledSignal, tau: f64) -> Result<PhaseSpaceArray> {
    check_tau(tau)?;
    f.check_grid(g)?;
    let grid = *f.grid();
    let n = grid.len();
    let dt = grid.spacing();
    let dft = grid.dft();
    let fs = dft.forward(f.values());
    let gs = dft.forward(g.values());
    let lag = Grid::centered(n, dt)?;
    let lag_dft = lag.dft();
    let ys: Vec<f64> = lag.points().collect();

    // columns[j][a] = f(x_a + tau y_j) conj(g(x_a - (1 - tau) y_j))
    let columns: Vec<Vec<Complex64>> = ys
        .par_iter()
        .map(|&y| {
            let mut a = vec![ZERO; n];
            let mut b = vec![ZERO; n];
            dft.shifted_from_spectrum(&fs, tau * y, &mut a);
            dft.shifted_from_spectrum(&gs, -(1.0 - tau) * y, &mut b);
            a.iter().zip(&b).map(|(u, v)| u * v.conj()).collect()
        })
        .collect();

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|ix| {
            let mut row: Vec<Complex64> = columns.iter().map(|c| c[ix]).collect();
            lag_dft.forward_in_place(&mut row);
            row
        })
        .collect();
    PhaseSpaceArray::new(grid, grid.frequency_grid(), rows.concat())
}

/// `sum_i w_i W_{tau_i}(f, g)`.
pub fn born_jordan_dist(f: &SampledSignal, g: &SampledSignal, quad: &Quadrature) -> Result<PhaseSpaceArray> {
    if quad.is_empty() {
        return Err(Error::OutOfRange {
            name: "quadrature",
            detail: "no nodes".into(),
        });
    }
    let mut acc: Option<PhaseSpaceArray> = None;
    for (tau, w) in quad.iter() {
        let wt = tau_wigner(f, g, tau)?;
        match acc.as_mut() {
            None => acc = Some(wt.map(|v| v * w)),
            Some(a) => {
                for (s, v) in a.values_mut().iter_mut().zip(wt.values()) {
                    *s += v * w;
                }
            }
        }
    }
    Ok(acc.expect("nonempty quadrature"))
}

/// Largest deviation between `|W_tau(pi(w) f)|` and `|W_tau f|` translated by `w`.
///
/// `w` must be a point of the phase-space grid.
pub fn wigner_covariance_check(f: &SampledSignal, w: PhaseSpacePoint, tau: f64) -> Result<f64> {
    let grid = *f.grid();
    let fgrid = grid.frequency_grid();
    let (sx, rx) = grid.round_shift(w.x);
    let (sw, rw) = fgrid.round_shift(w.omega);
    if rx.abs() > 1e-9 * grid.spacing() || rw.abs() > 1e-9 * fgrid.spacing() {
        return Err(Error::LatticeGrid(format!("shift {w:?} is not on the phase-space grid")));
    }
    let base = tau_wigner(f, f, tau)?;
    let fw = tf_shift(f, w)?;
    let moved = tau_wigner(&fw, &fw, tau)?;
    let n = grid.len() as i64;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let a0 = a - sx;
        if !(0..n).contains(&a0) {
            continue;
        }
        for k in 0..n {
            let k0 = k - sw;
            if !(0..n).contains(&k0) {
                continue;
            }
            let d = moved.get(a as usize, k as usize).norm() - base.get(a0 as usize, k0 as usize).norm();
            worst = worst.max(d.abs());
        }
    }
    Ok(worst)
}
