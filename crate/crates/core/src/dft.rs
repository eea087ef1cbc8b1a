//! Centered discrete Fourier transform on a uniform grid.
//!
//! Samples live at `t_p = origin + (p - n/2) * spacing`, frequencies at
//! `w_q = (q - n/2) / (n * spacing)`. The forward map is the Riemann sum
//! `F(w_q) = spacing * sum_p f(t_p) exp(-2 pi i w_q t_p)` and the inverse
//! uses the dual spacing, so the pair is an exact inverse.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct CenteredDft {
    n: usize,
    spacing: f64,
    origin: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// exp(-2 pi i w_q origin), folded into the forward transform.
    origin_phase: Vec<Complex64>,
}

impl std::fmt::Debug for CenteredDft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CenteredDft")
            .field("n", &self.n)
            .field("spacing", &self.spacing)
            .field("origin", &self.origin)
            .finish()
    }
}

impl CenteredDft {
    /// `n` must be a multiple of 4 (the grid types guarantee a power of two >= 8).
    pub fn new(n: usize, spacing: f64, origin: f64) -> Self {
        assert!(n >= 4 && n % 4 == 0, "centered DFT length must be a multiple of 4");
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let dw = 1.0 / (n as f64 * spacing);
        let origin_phase = (0..n)
            .map(|q| {
                let w = (q as f64 - (n / 2) as f64) * dw;
                Complex64::from_polar(1.0, -2.0 * PI * w * origin)
            })
            .collect();
        Self {
            n,
            spacing,
            origin,
            fwd,
            inv,
            origin_phase,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dual_spacing(&self) -> f64 {
        1.0 / (self.n as f64 * self.spacing)
    }

    /// Frequency of bin `q`.
    pub fn freq(&self, q: usize) -> f64 {
        (q as f64 - (self.n / 2) as f64) * self.dual_spacing()
    }

    /// Sample position of index `p`.
    pub fn time(&self, p: usize) -> f64 {
        self.origin + (p as f64 - (self.n / 2) as f64) * self.spacing
    }

    /// In-place forward transform (time samples -> frequency samples).
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        for (p, v) in buf.iter_mut().enumerate() {
            if p % 2 == 1 {
                *v = -*v;
            }
        }
        self.fwd.process(buf);
        for (q, v) in buf.iter_mut().enumerate() {
            let sign = if q % 2 == 1 { -self.spacing } else { self.spacing };
            *v = *v * self.origin_phase[q] * sign;
        }
    }

    /// In-place inverse transform (frequency samples -> time samples).
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        for (q, v) in buf.iter_mut().enumerate() {
            let c = self.origin_phase[q].conj();
            *v = if q % 2 == 1 { -(*v * c) } else { *v * c };
        }
        self.inv.process(buf);
        let dw = self.dual_spacing();
        for (p, v) in buf.iter_mut().enumerate() {
            let sign = if p % 2 == 1 { -dw } else { dw };
            *v *= sign;
        }
    }

    pub fn forward(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut buf = input.to_vec();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn inverse(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut buf = input.to_vec();
        self.inverse_in_place(&mut buf);
        buf
    }

    /// Band-limited evaluation of `f(t_p + shift)` for every `p`, given the
    /// forward transform `spectrum` of `f`. Samples whose evaluation point
    /// leaves `[origin - L/2, origin + L/2)` are set to zero.
    pub fn shifted_from_spectrum(&self, spectrum: &[Complex64], shift: f64, out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.n);
        for (q, (o, s)) in out.iter_mut().zip(spectrum).enumerate() {
            *o = *s * Complex64::from_polar(1.0, 2.0 * PI * self.freq(q) * shift);
        }
        self.inverse_in_place(out);
        let half = 0.5 * self.n as f64 * self.spacing;
        let lo = self.origin - half;
        let hi = self.origin + half;
        for (p, o) in out.iter_mut().enumerate() {
            let t = self.time(p) + shift;
            if t < lo - 1e-12 * self.spacing || t >= hi - 1e-12 * self.spacing {
                *o = Complex64::new(0.0, 0.0);
            }
        }
    }
}
