//! Short-time Fourier transform, its adjoint, and Gabor frame bounds.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft::CenteredDft;
use crate::error::{Error, Result};
use crate::kahan::{KahanSum, KahanSumC};
use crate::phase_space::{Grid, Lattice, SampledSignal};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Complex values on a rectangular `(x, omega)` grid, stored row-major by `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceArray {
    x_grid: Grid,
    omega_grid: Grid,
    values: Vec<Complex64>,
}

impl PhaseSpaceArray {
    pub fn new(x_grid: Grid, omega_grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != x_grid.len() * omega_grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} phase-space grid",
                values.len(),
                x_grid.len(),
                omega_grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("phase-space array".into()));
        }
        Ok(Self {
            x_grid,
            omega_grid,
            values,
        })
    }

    pub fn zeros(x_grid: Grid, omega_grid: Grid) -> Self {
        Self {
            x_grid,
            omega_grid,
            values: vec![ZERO; x_grid.len() * omega_grid.len()],
        }
    }

    pub fn x_grid(&self) -> &Grid {
        &self.x_grid
    }

    pub fn omega_grid(&self) -> &Grid {
        &self.omega_grid
    }

    pub fn n_x(&self) -> usize {
        self.x_grid.len()
    }

    pub fn n_omega(&self) -> usize {
        self.omega_grid.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, ix: usize, iw: usize) -> Complex64 {
        self.values[ix * self.omega_grid.len() + iw]
    }

    pub fn row(&self, ix: usize) -> &[Complex64] {
        let m = self.omega_grid.len();
        &self.values[ix * m..(ix + 1) * m]
    }

    /// Cell area `dx * domega`.
    pub fn cell(&self) -> f64 {
        self.x_grid.spacing() * self.omega_grid.spacing()
    }

    /// `dx * domega * sum values`.
    pub fn integral(&self) -> Complex64 {
        let acc: KahanSumC = self.values.iter().copied().collect();
        acc.value() * self.cell()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &PhaseSpaceArray) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    /// Time marginal `domega * sum_omega F(x, omega)`, one value per `x`.
    pub fn time_marginal(&self) -> Vec<Complex64> {
        let dw = self.omega_grid.spacing();
        (0..self.n_x())
            .map(|ix| self.row(ix).iter().copied().collect::<KahanSumC>().value() * dw)
            .collect()
    }

    /// Frequency marginal `dx * sum_x F(x, omega)`, one value per `omega`.
    pub fn frequency_marginal(&self) -> Vec<Complex64> {
        let dx = self.x_grid.spacing();
        (0..self.n_omega())
            .map(|iw| {
                (0..self.n_x())
                    .map(|ix| self.get(ix, iw))
                    .collect::<KahanSumC>()
                    .value()
                    * dx
            })
            .collect()
    }

    pub fn conj(&self) -> PhaseSpaceArray {
        PhaseSpaceArray {
            x_grid: self.x_grid,
            omega_grid: self.omega_grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> PhaseSpaceArray {
        PhaseSpaceArray {
            x_grid: self.x_grid,
            omega_grid: self.omega_grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `<self, other> = dx * domega * sum self * conj(other)`.
    pub fn inner(&self, other: &PhaseSpaceArray) -> Result<Complex64> {
        self.check_same(other)?;
        let acc: KahanSumC = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .collect();
        Ok(acc.value() * self.cell())
    }

    fn check_same(&self, other: &PhaseSpaceArray) -> Result<()> {
        if self.x_grid.same_as(&other.x_grid) && self.omega_grid.same_as(&other.omega_grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("phase-space grids differ".into()))
        }
    }
}

/// Extreme eigenvalues of a truncated Gabor frame operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower_bound_estimate: f64,
    pub upper_bound_estimate: f64,
    /// Largest `|k|` of the time shifts `k * alpha` that entered the operator.
    pub gram_truncation_radius: usize,
    /// True when the lattice tiles the periodic grid, so no restriction was needed.
    pub periodic: bool,
}

impl FrameReport {
    pub fn condition_number(&self) -> f64 {
        self.upper_bound_estimate / self.lower_bound_estimate
    }
}

/// `(2/width^2)^{1/4} exp(-pi t^2 / width^2)`, renormalized to unit norm on the grid.
pub fn gaussian_window(grid: Grid, width: f64) -> Result<SampledSignal> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::OutOfRange {
            name: "width",
            detail: format!("{width} must be positive"),
        });
    }
    let c = (2.0 / (width * width)).powf(0.25);
    let g = SampledSignal::from_fn(grid, |t| {
        let s = (t - grid.origin()) / width;
        Complex64::new(c * (-PI * s * s).exp(), 0.0)
    })?;
    let peak = g.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let samples = g.values().iter().filter(|v| v.norm() > 1e-12 * peak).count();
    if samples < 8 {
        return Err(Error::UnderResolved { samples });
    }
    g.normalized()
}

fn check_power_of_two(name: &'static str, v: usize) -> Result<()> {
    if v >= 1 && v.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            detail: format!("{v} must be a power of two"),
        })
    }
}

/// Geometry shared by the STFT and its adjoint.
struct StftLayout {
    n: usize,
    x_step: usize,
    padding: usize,
    x_grid: Grid,
    omega_grid: Grid,
    dft: CenteredDft,
}

impl StftLayout {
    fn new(grid: &Grid, x_step: usize, padding: usize) -> Result<Self> {
        check_power_of_two("x_step", x_step)?;
        check_power_of_two("padding", padding)?;
        let n = grid.len();
        if n / x_step < 8 {
            return Err(Error::OutOfRange {
                name: "x_step",
                detail: format!("{x_step} leaves fewer than 8 time positions"),
            });
        }
        let x_grid = Grid::new(n / x_step, grid.spacing() * x_step as f64, 0.0)?;
        let np = n * padding;
        let omega_grid = Grid::new(np, 1.0 / (np as f64 * grid.spacing()), 0.0)?;
        Ok(Self {
            n,
            x_step,
            padding,
            x_grid,
            omega_grid,
            dft: CenteredDft::new(np, grid.spacing(), grid.origin()),
        })
    }

    fn offset(&self) -> usize {
        self.n * (self.padding - 1) / 2
    }

    /// Storage shift (in signal samples) of column `b`.
    fn shift(&self, b: usize) -> i64 {
        (b as i64 - (self.x_grid.len() / 2) as i64) * self.x_step as i64
    }
}

/// `V_g f(x, omega) = <f, M_omega T_x g>` with `x` on a decimated grid centered at 0
/// and `omega` on the (optionally zero-padded) frequency grid.
pub fn stft(f: &SampledSignal, g: &SampledSignal, x_step: usize, padding: usize) -> Result<PhaseSpaceArray> {
    f.check_grid(g)?;
    let lay = StftLayout::new(f.grid(), x_step, padding)?;
    let n = lay.n;
    let np = lay.omega_grid.len();
    let off = lay.offset();
    let mut values = vec![ZERO; lay.x_grid.len() * np];
    let mut buf = vec![ZERO; np];
    for (b, column) in values.chunks_mut(np).enumerate() {
        let s = lay.shift(b);
        buf.iter_mut().for_each(|v| *v = ZERO);
        for p in 0..n {
            let src = (p as i64 - s).rem_euclid(n as i64) as usize;
            buf[off + p] = f.values()[p] * g.values()[src].conj();
        }
        lay.dft.forward_in_place(&mut buf);
        column.copy_from_slice(&buf);
    }
    PhaseSpaceArray::new(lay.x_grid, lay.omega_grid, values)
}

/// Riemann-sum discretization of `V_g^* F = int F(z) pi(z) g dz`.
///
/// `F` must have the layout produced by [`stft`] for a signal on `g`'s grid.
pub fn adjoint_stft(big_f: &PhaseSpaceArray, g: &SampledSignal) -> Result<SampledSignal> {
    let grid = *g.grid();
    let n = grid.len();
    if big_f.n_x() == 0 || n % big_f.n_x() != 0 || big_f.n_omega() % n != 0 {
        return Err(Error::GridMismatch(format!(
            "{}x{} array does not fit a {}-sample window",
            big_f.n_x(),
            big_f.n_omega(),
            n
        )));
    }
    let lay = StftLayout::new(&grid, n / big_f.n_x(), big_f.n_omega() / n)?;
    if !lay.x_grid.same_as(big_f.x_grid()) || !lay.omega_grid.same_as(big_f.omega_grid()) {
        return Err(Error::GridMismatch("phase-space grids do not match the window grid".into()));
    }
    let dx = lay.x_grid.spacing();
    let off = lay.offset();
    let mut acc = vec![KahanSumC::new(); n];
    let mut buf = vec![ZERO; lay.omega_grid.len()];
    for b in 0..lay.x_grid.len() {
        buf.copy_from_slice(big_f.row(b));
        lay.dft.inverse_in_place(&mut buf);
        let s = lay.shift(b);
        for (p, a) in acc.iter_mut().enumerate() {
            let src = (p as i64 - s).rem_euclid(n as i64) as usize;
            a.add(buf[off + p] * g.values()[src] * dx);
        }
    }
    SampledSignal::new(grid, acc.iter().map(|a| a.value()).collect())
}

/// Inversion formula `f = ||g||^{-2} V_g^* V_g f`; returns the reconstruction and its relative error.
pub fn reconstruct(f: &SampledSignal, g: &SampledSignal) -> Result<(SampledSignal, f64)> {
    let g2 = g.norm_sqr();
    if g2 == 0.0 {
        return Err(Error::OutOfRange {
            name: "window",
            detail: "zero window".into(),
        });
    }
    let v = stft(f, g, 1, 1)?;
    let r = adjoint_stft(&v, g)?.scaled(Complex64::new(1.0 / g2, 0.0));
    let err = r.rel_error(f)?;
    Ok((r, err))
}

/// Index layout of the lattice on the grid, shared by the frame operator and its tests.
#[derive(Debug, Clone)]
pub(crate) struct FrameLayout {
    pub time_steps: i64,
    pub time_indices: Vec<i64>,
    pub freq_indices: Vec<i64>,
    pub periodic: bool,
}

fn integer_ratio(a: f64, b: f64) -> Option<i64> {
    let r = a / b;
    let k = r.round();
    if k >= 1.0 && (r - k).abs() <= 1e-9 * r.max(1.0) {
        Some(k as i64)
    } else {
        None
    }
}

pub(crate) fn frame_layout(grid: &Grid, lattice: &Lattice) -> Result<FrameLayout> {
    let dt = grid.spacing();
    let time_steps = integer_ratio(lattice.alpha(), dt).ok_or_else(|| {
        Error::LatticeGrid(format!(
            "alpha = {} is not a multiple of the grid spacing {dt}",
            lattice.alpha()
        ))
    })?;
    let n_freq = integer_ratio(1.0 / dt, lattice.beta()).ok_or_else(|| {
        Error::LatticeGrid(format!(
            "beta = {} does not divide the sampling rate {}",
            lattice.beta(),
            1.0 / dt
        ))
    })?;
    let n = grid.len() as i64;
    let freq_indices: Vec<i64> = (-(n_freq / 2)..n_freq - n_freq / 2).collect();
    let periodic = n % time_steps == 0;
    let time_indices: Vec<i64> = if periodic {
        let k = n / time_steps;
        (-(k / 2)..k - k / 2).collect()
    } else {
        let half = grid.half_extent();
        let kmax = ((half / lattice.alpha()).ceil() as i64).max(1);
        (-kmax..=kmax)
            .filter(|&k| (k as f64 * lattice.alpha()).abs() < half)
            .collect()
    };
    Ok(FrameLayout {
        time_steps,
        time_indices,
        freq_indices,
        periodic,
    })
}

/// Frame bounds of `{pi(k alpha, l beta) g}` estimated from the frame operator matrix.
///
/// The frequency lattice covers one period of the sampled spectrum. When the
/// time lattice tiles the periodic grid the full operator is used; otherwise
/// every time shift inside the grid enters and the eigenvalues are taken on
/// signals supported in the central half of the grid. The lattice radius is
/// not used: the truncation is fixed by the grid.
pub fn frame_bounds(g: &SampledSignal, lattice: &Lattice) -> Result<FrameReport> {
    let grid = *g.grid();
    let lay = frame_layout(&grid, lattice)?;
    let s = frame_operator_matrix(g, lattice, &lay);
    let n = grid.len();
    let sub = if lay.periodic {
        s
    } else {
        let lo = n / 4;
        s.view((lo, lo), (n / 2, n / 2)).into_owned()
    };
    let eig = sub.symmetric_eigenvalues();
    let lower = eig.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let upper = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FrameReport {
        lower_bound_estimate: lower,
        upper_bound_estimate: upper,
        gram_truncation_radius: lay.time_indices.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0),
        periodic: lay.periodic,
    })
}

/// `sum_lambda |<f, pi(lambda) g>|^2` over the same truncated system as [`frame_bounds`].
pub fn frame_quadratic_form(f: &SampledSignal, g: &SampledSignal, lattice: &Lattice) -> Result<f64> {
    f.check_grid(g)?;
    let lay = frame_layout(g.grid(), lattice)?;
    let mut acc = KahanSum::new();
    for_each_atom(g, lattice, &lay, |atom| {
        let c = f.inner_unchecked(atom);
        acc.add(c.norm_sqr());
    });
    Ok(acc.value())
}

fn for_each_atom(g: &SampledSignal, lattice: &Lattice, lay: &FrameLayout, mut visit: impl FnMut(&SampledSignal)) {
    let grid = *g.grid();
    let n = grid.len() as i64;
    for &k in &lay.time_indices {
        let s = k * lay.time_steps;
        for &l in &lay.freq_indices {
            let w = l as f64 * lattice.beta();
            let vals: Vec<Complex64> = (0..grid.len())
                .map(|p| {
                    let src = (p as i64 - s).rem_euclid(n) as usize;
                    g.values()[src] * Complex64::from_polar(1.0, 2.0 * PI * w * grid.point(p))
                })
                .collect();
            visit(&SampledSignal::from_raw(grid, vals));
        }
    }
}

fn frame_operator_matrix(g: &SampledSignal, lattice: &Lattice, lay: &FrameLayout) -> DMatrix<Complex64> {
    let n = g.grid().len();
    let dt = g.grid().spacing();
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for_each_atom(g, lattice, lay, |atom| {
        let v = atom.values();
        for c in 0..n {
            let vc = v[c].conj() * dt;
            if vc == ZERO {
                continue;
            }
            for r in 0..n {
                s[(r, c)] += v[r] * vc;
            }
        }
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{tf_shift, PhaseSpacePoint};

    fn desk_grid() -> Grid {
        Grid::centered(256, 1.0 / 16.0).unwrap()
    }

    #[test]
    fn gaussian_window_contract() {
        let grid = desk_grid();
        let g = gaussian_window(grid, 1.0).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-12);
        for j in 1..128 {
            assert!((g.values()[128 + j] - g.values()[128 - j]).norm() < 1e-14);
        }
        assert!((g.inner(&g).unwrap().re - 1.0).abs() < 1e-12);
        assert!(matches!(
            gaussian_window(grid, 0.05),
            Err(Error::UnderResolved { .. })
        ));
        assert!(gaussian_window(grid, -1.0).is_err());
    }

    #[test]
    fn stft_at_origin_is_norm() {
        let g = gaussian_window(desk_grid(), 1.0).unwrap();
        let v = stft(&g, &g, 1, 1).unwrap();
        let c = v.get(128, 128);
        assert!((c.re - 1.0).abs() < 1e-12 && c.im.abs() < 1e-12);
    }

    #[test]
    fn gaussian_stft_magnitude() {
        let g = gaussian_window(desk_grid(), 1.0).unwrap();
        for (xs, pad) in [(1, 1), (2, 2)] {
            let v = stft(&g, &g, xs, pad).unwrap();
            let mut worst: f64 = 0.0;
            for ix in 0..v.n_x() {
                for iw in 0..v.n_omega() {
                    let x = v.x_grid().point(ix);
                    let w = v.omega_grid().point(iw);
                    if x * x + w * w <= 9.0 {
                        let exact = (-PI * (x * x + w * w) / 2.0).exp();
                        worst = worst.max((v.get(ix, iw).norm() - exact).abs());
                    }
                }
            }
            assert!(worst < 1e-8, "{worst}");
        }
    }

    #[test]
    fn zero_array_adjoint() {
        let g = gaussian_window(desk_grid(), 1.0).unwrap();
        let v = stft(&g, &g, 1, 1).unwrap();
        let z = PhaseSpaceArray::zeros(*v.x_grid(), *v.omega_grid());
        let r = adjoint_stft(&z, &g).unwrap();
        assert!(r.values().iter().all(|c| *c == ZERO));
    }

    #[test]
    fn reconstruction_of_window() {
        let g = gaussian_window(desk_grid(), 1.0).unwrap();
        let (_, err) = reconstruct(&g, &g).unwrap();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn decimated_and_padded_inversion() {
        let grid = desk_grid();
        let g = gaussian_window(grid, 1.0).unwrap();
        let f = SampledSignal::from_fn(grid, |t| Complex64::new(t * (-PI * t * t).exp(), 0.0)).unwrap();
        let v = stft(&f, &g, 2, 2).unwrap();
        let r = adjoint_stft(&v, &g).unwrap();
        assert!(r.rel_error(&f).unwrap() < 1e-10);
    }

    #[test]
    fn stft_rejects_other_grid() {
        let g = gaussian_window(desk_grid(), 1.0).unwrap();
        let h = gaussian_window(Grid::centered(128, 1.0 / 8.0).unwrap(), 1.0).unwrap();
        assert!(matches!(stft(&g, &h, 1, 1), Err(Error::GridMismatch(_))));
        assert!(stft(&g, &g, 3, 1).is_err());
    }

    #[test]
    fn covariance_of_tf_shift() {
        let grid = desk_grid();
        let g = gaussian_window(grid, 1.0).unwrap();
        let v = stft(&g, &g, 1, 1).unwrap();
        let pairs = [(0.5, 1.0, -0.25, 0.5), (-1.0, -0.5, 1.5, 2.0), (2.0, 0.0, 0.0, -1.0)];
        for &(zx, zw, ux, uw) in &pairs {
            let a = tf_shift(&g, PhaseSpacePoint::new(zx, zw)).unwrap();
            let b = tf_shift(&g, PhaseSpacePoint::new(ux, uw)).unwrap();
            let lhs = a.inner(&b).unwrap().norm();
            let ix = v.x_grid().index_of(ux - zx).unwrap();
            let iw = v.omega_grid().index_of(uw - zw).unwrap();
            assert!((lhs - v.get(ix, iw).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_bounds_reject_incompatible_lattice() {
        let g = gaussian_window(desk_grid(), 1.0).unwrap();
        let l = Lattice::new(0.3, 1.0, 4).unwrap();
        assert!(matches!(frame_bounds(&g, &l), Err(Error::LatticeGrid(_))));
        let l = Lattice::new(0.5, 3.0, 4).unwrap();
        assert!(matches!(frame_bounds(&g, &l), Err(Error::LatticeGrid(_))));
    }

    #[test]
    fn frame_bounds_ordering() {
        let g = gaussian_window(desk_grid(), 1.0).unwrap();
        let r = frame_bounds(&g, &Lattice::new(0.5, 1.0, 4).unwrap()).unwrap();
        assert!(r.periodic);
        assert!(r.lower_bound_estimate > 0.0);
        assert!(r.lower_bound_estimate <= r.upper_bound_estimate);
        assert!(r.condition_number().is_finite());
    }
}
