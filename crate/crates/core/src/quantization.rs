//! Gabor matrices `<Op_tau(s) pi(mu) g, pi(lambda) g>` of tau-quantized operators.
//!
//! Two independent routes are provided. The direct route evaluates the weak
//! pairing `<s, W_tau(pi(lambda) g, pi(mu) g)>` on the phase-space grid; the
//! STFT route evaluates `|V_Phi s(T_tau(lambda, mu), J(lambda - mu))|` with
//! `Phi = W_tau(g, g)`, which fixes magnitudes only.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dft::CenteredDft;
use crate::error::{Error, Result};
use crate::kahan::KahanSumC;
use crate::phase_space::{check_tau, t_tau_unchecked, tf_shift, Grid, Lattice, PhaseSpacePoint, SampledSignal};
use crate::symbols::SymbolSpec;
use crate::wigner::{tau_wigner, Quadrature};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative magnitude below which window samples are treated as zero.
const SUPPORT_THRESHOLD: f64 = 1e-16;

/// Quantization parameter of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TauTag {
    Tau { tau: f64 },
    BornJordan { nodes: usize },
}

impl std::fmt::Display for TauTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TauTag::Tau { tau } => write!(f, "{tau}"),
            TauTag::BornJordan { nodes } => write!(f, "born_jordan({nodes})"),
        }
    }
}

/// Dense Gabor matrix over a truncated lattice; rows index `lambda`, columns `mu`,
/// both in the lattice enumeration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaborMatrix {
    pub lattice: Lattice,
    pub tau: TauTag,
    entries: Vec<Complex64>,
    /// Set for STFT-route matrices, whose entries carry no phase information.
    pub magnitude_only: bool,
    pub window_id: String,
    pub symbol: String,
}

impl GaborMatrix {
    pub fn new(lattice: Lattice, tau: TauTag, entries: Vec<Complex64>, window_id: String, symbol: String) -> Result<Self> {
        let p = lattice.count();
        if entries.len() != p * p {
            return Err(Error::GridMismatch(format!(
                "{} entries for a lattice of {p} points",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("Gabor matrix entry".into()));
        }
        Ok(Self {
            lattice,
            tau,
            entries,
            magnitude_only: false,
            window_id,
            symbol,
        })
    }

    pub fn size(&self) -> usize {
        self.lattice.count()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.size() + col]
    }

    /// Entry for `lambda = (k, l)`, `mu = (k2, l2)` in lattice indices.
    pub fn entry(&self, lambda: (i64, i64), mu: (i64, i64)) -> Option<Complex64> {
        let r = self.lattice.position(lambda.0, lambda.1)?;
        let c = self.lattice.position(mu.0, mu.1)?;
        Some(self.get(r, c))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest entrywise `| |a| - |b| |`.
    pub fn max_magnitude_diff(&self, other: &GaborMatrix) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a.norm() - b.norm()).abs())))
    }

    /// Largest entrywise `|a - b|`.
    pub fn max_abs_diff(&self, other: &GaborMatrix) -> Result<f64> {
        self.check_shape(other)?;
        if self.magnitude_only || other.magnitude_only {
            return Err(Error::MagnitudeOnly);
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    fn check_shape(&self, other: &GaborMatrix) -> Result<()> {
        if self.lattice == other.lattice {
            Ok(())
        } else {
            Err(Error::GridMismatch("matrices live on different lattices".into()))
        }
    }
}

/// Deviation between the two routes, measured on magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteComparison {
    pub max_abs_deviation: f64,
    /// `max_abs_deviation / max |entry|` of the direct route.
    pub max_rel_deviation: f64,
    pub worst_row: usize,
    pub worst_col: usize,
}

pub fn compare_routes(direct: &GaborMatrix, via_stft: &GaborMatrix) -> Result<RouteComparison> {
    direct.check_shape(via_stft)?;
    let mut worst = (0.0, 0, 0);
    let p = direct.size();
    for r in 0..p {
        for c in 0..p {
            let d = (direct.get(r, c).norm() - via_stft.get(r, c).norm()).abs();
            if d > worst.0 {
                worst = (d, r, c);
            }
        }
    }
    let scale = direct.max_abs();
    Ok(RouteComparison {
        max_abs_deviation: worst.0,
        max_rel_deviation: if scale > 0.0 { worst.0 / scale } else { worst.0 },
        worst_row: worst.1,
        worst_col: worst.2,
    })
}

/// Magnitudes from the STFT route with phases from the direct route.
pub fn combine_routes(direct: &GaborMatrix, via_stft: &GaborMatrix) -> Result<GaborMatrix> {
    direct.check_shape(via_stft)?;
    if direct.magnitude_only {
        return Err(Error::MagnitudeOnly);
    }
    let entries = direct
        .entries
        .iter()
        .zip(&via_stft.entries)
        .map(|(d, s)| Complex64::from_polar(s.norm(), d.arg()))
        .collect();
    let mut m = direct.clone();
    m.entries = entries;
    Ok(m)
}

/// Short deterministic descriptor of a sampled window.
pub fn window_id(g: &SampledSignal) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in g.values() {
        for b in v.re.to_bits().to_le_bytes().iter().chain(&v.im.to_bits().to_le_bytes()) {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("n{}-dt{}-{h:016x}", g.grid().len(), g.grid().spacing())
}

/// `s(x_a, omega_k)` on the grid times its frequency grid, row-major by `x`.
pub fn sample_symbol(sym: &SymbolSpec, grid: &Grid) -> Vec<Complex64> {
    let fg = grid.frequency_grid();
    let ws: Vec<f64> = fg.points().collect();
    (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let x = grid.point(a);
            ws.iter().map(move |&w| sym.value(x, w)).collect::<Vec<_>>()
        })
        .collect()
}

/// Checks that the lattice fits the grid: `alpha` a multiple of the spacing,
/// `R alpha` inside the half-extent and `R beta` inside the band.
pub fn check_lattice(lattice: &Lattice, grid: &Grid) -> Result<()> {
    lattice_time_step(lattice, grid).map(|_| ())
}

fn lattice_time_step(lattice: &Lattice, grid: &Grid) -> Result<i64> {
    let r = lattice.alpha() / grid.spacing();
    let s = r.round();
    if s < 1.0 || (r - s).abs() > 1e-9 * r {
        return Err(Error::LatticeGrid(format!(
            "alpha = {} is not a multiple of the grid spacing {}",
            lattice.alpha(),
            grid.spacing()
        )));
    }
    let reach = lattice.radius() as f64 * lattice.alpha();
    if reach >= grid.half_extent() {
        return Err(Error::LatticeGrid(format!(
            "lattice reaches x = {reach}, beyond the grid half-extent {}",
            grid.half_extent()
        )));
    }
    if lattice.radius() as f64 * lattice.beta() >= grid.band_edge() {
        return Err(Error::LatticeGrid(format!(
            "lattice reaches omega = {}, beyond the band edge {}",
            lattice.radius() as f64 * lattice.beta(),
            grid.band_edge()
        )));
    }
    Ok(s as i64)
}

/// Index interval `[lo, hi]` where `|v| > thr` (empty as `lo > hi`).
fn support(v: &[Complex64], thr: f64) -> (usize, usize) {
    let lo = v.iter().position(|c| c.norm() > thr);
    let hi = v.iter().rposition(|c| c.norm() > thr);
    match (lo, hi) {
        (Some(l), Some(h)) => (l, h),
        _ => (1, 0),
    }
}

fn phase_table(count: usize, first: i64, freq_step: f64, points: &[f64], sign: f64) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|i| {
            let w = (first + i as i64) as f64 * freq_step;
            points.iter().map(|&t| Complex64::from_polar(1.0, sign * 2.0 * PI * w * t)).collect()
        })
        .collect()
}

fn check_window(g: &SampledSignal) -> Result<()> {
    if g.norm() == 0.0 {
        return Err(Error::OutOfRange {
            name: "window",
            detail: "zero window".into(),
        });
    }
    Ok(())
}

/// Gabor matrix of `Op_tau(sym)` from the weak definition.
///
/// The grid pairing `dx domega sum_z s(z) conj(W_tau(pi(lambda) g, pi(mu) g)(z))`
/// is evaluated after carrying out the frequency sum first, which turns the
/// symbol into a kernel in `(x, y)`; the reordering is exact.
pub fn gabor_matrix_direct(sym: &SymbolSpec, g: &SampledSignal, lattice: &Lattice, tau: f64) -> Result<GaborMatrix> {
    check_tau(tau)?;
    check_window(g)?;
    let grid = *g.grid();
    let step = lattice_time_step(lattice, &grid)?;
    let n = grid.len();
    let dt = grid.spacing();
    let dft = grid.dft();
    let lag = Grid::centered(n, dt)?;
    let lag_dft: CenteredDft = lag.dft();
    let xs: Vec<f64> = grid.points().collect();
    let ys: Vec<f64> = lag.points().collect();

    // kernel[a][j] = domega sum_k s(x_a, omega_k) exp(2 pi i y_j omega_k)
    let sampled = sample_symbol(sym, &grid);
    let kernel: Vec<Vec<Complex64>> = sampled.par_chunks(n).map(|row| lag_dft.inverse(row)).collect();

    let spectrum = dft.forward(g.values());
    let table = |scale: f64| -> Vec<Vec<Complex64>> {
        ys.par_iter()
            .map(|&y| {
                let mut out = vec![ZERO; n];
                dft.shifted_from_spectrum(&spectrum, scale * y, &mut out);
                out
            })
            .collect()
    };
    let ta = table(tau); // g(t_a + tau y_j)
    let tb = table(-(1.0 - tau)); // g(t_a - (1 - tau) y_j)
    let peak = g.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let thr = SUPPORT_THRESHOLD * peak;
    let sa: Vec<(usize, usize)> = ta.iter().map(|v| support(v, thr)).collect();
    let sb: Vec<(usize, usize)> = tb.iter().map(|v| support(v, thr)).collect();

    let r = lattice.radius() as i64;
    let side = lattice.side();
    let beta = lattice.beta();
    // exp(2 pi i c beta x_a) for c = -2R..=2R
    let e_diff = phase_table(4 * r as usize + 1, -2 * r, beta, &xs, 1.0);
    // exp(-2 pi i l beta tau y_j) and exp(-2 pi i l beta (1 - tau) y_j)
    let p_out = phase_table(side, -r, beta * tau, &ys, -1.0);
    let p_in = phase_table(side, -r, beta * (1.0 - tau), &ys, -1.0);
    let cell = grid.spacing() * dt;

    let shift_pairs: Vec<(i64, i64)> = (-r..=r).flat_map(|kl| (-r..=r).map(move |km| (kl, km))).collect();
    let blocks: Vec<Vec<Complex64>> = shift_pairs
        .par_iter()
        .map(|&(kl, km)| {
            let s_out = kl * step;
            let s_in = km * step;
            let nn = n as i64;
            let mut u: Vec<Vec<KahanSumC>> = vec![vec![KahanSumC::new(); n]; e_diff.len()];
            let mut jmin = n;
            let mut jmax = 0;
            for j in 0..n {
                let (alo, ahi) = sa[j];
                let (blo, bhi) = sb[j];
                if alo > ahi || blo > bhi {
                    continue;
                }
                for pa in alo..=ahi {
                    let a = (pa as i64 + s_out).rem_euclid(nn) as usize;
                    let pb = (a as i64 - s_in).rem_euclid(nn) as usize;
                    if pb < blo || pb > bhi {
                        continue;
                    }
                    let q = kernel[a][j] * ta[j][pa].conj() * tb[j][pb];
                    if q == ZERO {
                        continue;
                    }
                    for (c, e) in e_diff.iter().enumerate() {
                        u[c][j].add(e[a] * q);
                    }
                    jmin = jmin.min(j);
                    jmax = jmax.max(j);
                }
            }
            let mut block = vec![ZERO; side * side];
            if jmin > jmax {
                return block;
            }
            for ll in 0..side {
                for lm in 0..side {
                    let c = (lm as i64 - ll as i64 + 2 * r) as usize;
                    let mut acc = KahanSumC::new();
                    for j in jmin..=jmax {
                        acc.add(p_out[ll][j] * p_in[lm][j] * u[c][j].value());
                    }
                    block[ll * side + lm] = acc.value() * cell;
                }
            }
            block
        })
        .collect();

    let p = lattice.count();
    let mut entries = vec![ZERO; p * p];
    for (b, &(kl, km)) in shift_pairs.iter().enumerate() {
        for ll in 0..side {
            for lm in 0..side {
                let row = lattice.position(kl, ll as i64 - r).expect("in lattice");
                let col = lattice.position(km, lm as i64 - r).expect("in lattice");
                entries[row * p + col] = blocks[b][ll * side + lm];
            }
        }
    }
    GaborMatrix::new(*lattice, TauTag::Tau { tau }, entries, window_id(g), sym.to_string())
}

/// One entry straight from the definition: builds `W_tau(pi(lambda) g, pi(mu) g)`
/// and pairs it with the sampled symbol. Slow; used to cross-check the matrix routes.
pub fn gabor_entry_weak(sym: &SymbolSpec, g: &SampledSignal, lambda: PhaseSpacePoint, mu: PhaseSpacePoint, tau: f64) -> Result<Complex64> {
    let h = tf_shift(g, lambda)?;
    let f = tf_shift(g, mu)?;
    let w = tau_wigner(&h, &f, tau)?;
    let s = sample_symbol(sym, g.grid());
    let acc: KahanSumC = s.iter().zip(w.values()).map(|(a, b)| a * b.conj()).collect();
    Ok(acc.value() * w.cell())
}

fn grid_index(v: f64, spacing: f64, what: &str) -> Result<i64> {
    let r = v / spacing;
    let k = r.round();
    if (r - k).abs() > 1e-9 * r.abs().max(1.0) {
        return Err(Error::LatticeGrid(format!("{what} = {v} is not on the grid (spacing {spacing})")));
    }
    Ok(k as i64)
}

/// Magnitudes `|V_Phi s(T_tau(lambda, mu), J(lambda - mu))|` with `Phi = W_tau(g, g)`.
///
/// Requires every `T_tau(lambda, mu)` to be a phase-space grid point.
pub fn gabor_matrix_stft(sym: &SymbolSpec, g: &SampledSignal, lattice: &Lattice, tau: f64) -> Result<GaborMatrix> {
    check_tau(tau)?;
    check_window(g)?;
    let grid = *g.grid();
    lattice_time_step(lattice, &grid)?;
    let n = grid.len();
    let fg = grid.frequency_grid();
    let phi = tau_wigner(g, g, tau)?;
    let sampled = sample_symbol(sym, &grid);

    let thr = SUPPORT_THRESHOLD * phi.max_abs();
    let mut rows = (n, 0);
    let mut cols = (n, 0);
    for a in 0..n {
        for k in 0..n {
            if phi.get(a, k).norm() > thr {
                rows = (rows.0.min(a), rows.1.max(a));
                cols = (cols.0.min(k), cols.1.max(k));
            }
        }
    }
    if rows.0 > rows.1 {
        return Err(Error::OutOfRange {
            name: "window",
            detail: "tau-Wigner distribution of the window vanishes".into(),
        });
    }
    let xs: Vec<f64> = grid.points().collect();
    let ws: Vec<f64> = fg.points().collect();
    let r = lattice.radius() as i64;
    let (alpha, beta) = (lattice.alpha(), lattice.beta());
    // exp(-2 pi i x_a c beta) and exp(2 pi i omega_k c alpha), c = -2R..=2R
    let e1 = phase_table(4 * r as usize + 1, -2 * r, beta, &xs, -1.0);
    let e2 = phase_table(4 * r as usize + 1, -2 * r, alpha, &ws, 1.0);

    // Group entries sharing the symbol window and the time-difference phase.
    let p = lattice.count();
    let mut groups: BTreeMap<(i64, i64, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for row in 0..p {
        let (kl, ll) = lattice.indices(row);
        let lam = lattice.point(kl, ll);
        for col in 0..p {
            let (km, lm) = lattice.indices(col);
            let y = t_tau_unchecked(lam, lattice.point(km, lm), tau);
            let iy = grid_index(y.x - grid.origin(), grid.spacing(), "T_tau x")?;
            let iw = grid_index(y.omega, fg.spacing(), "T_tau omega")?;
            let c2 = (kl - km + 2 * r) as usize;
            let c1 = (ll - lm + 2 * r) as usize;
            groups.entry((iy, iw, c2)).or_default().push((row * p + col, c1));
        }
    }
    let groups: Vec<_> = groups.into_iter().collect();
    let cell = phi.cell();
    let results: Vec<Vec<(usize, f64)>> = groups
        .par_iter()
        .map(|((iy, iw, c2), members)| {
            let nn = n as i64;
            let mut partial = vec![ZERO; rows.1 - rows.0 + 1];
            for a in rows.0..=rows.1 {
                let sa = a as i64 + iy;
                if !(0..nn).contains(&sa) {
                    continue;
                }
                let srow = &sampled[sa as usize * n..(sa as usize + 1) * n];
                let mut acc = KahanSumC::new();
                for k in cols.0..=cols.1 {
                    let sk = k as i64 + iw;
                    if !(0..nn).contains(&sk) {
                        continue;
                    }
                    acc.add(srow[sk as usize] * phi.get(a, k).conj() * e2[*c2][k]);
                }
                partial[a - rows.0] = acc.value();
            }
            members
                .iter()
                .map(|&(slot, c1)| {
                    let acc: KahanSumC = partial
                        .iter()
                        .enumerate()
                        .map(|(i, v)| e1[c1][rows.0 + i] * v)
                        .collect();
                    (slot, acc.value().norm() * cell)
                })
                .collect()
        })
        .collect();
    let mut entries = vec![ZERO; p * p];
    for (slot, v) in results.into_iter().flatten() {
        entries[slot] = Complex64::new(v, 0.0);
    }
    let mut m = GaborMatrix::new(*lattice, TauTag::Tau { tau }, entries, window_id(g), sym.to_string())?;
    m.magnitude_only = true;
    Ok(m)
}

/// Quadrature average `sum_i w_i M_{tau_i}` of direct-route matrices.
pub fn born_jordan_matrix(sym: &SymbolSpec, g: &SampledSignal, lattice: &Lattice, quad: &Quadrature) -> Result<GaborMatrix> {
    let (mats, _) = born_jordan_parts(sym, g, lattice, quad)?;
    Ok(mats)
}

/// The Born-Jordan matrix together with the per-node matrices it averages.
pub fn born_jordan_parts(sym: &SymbolSpec, g: &SampledSignal, lattice: &Lattice, quad: &Quadrature) -> Result<(GaborMatrix, Vec<GaborMatrix>)> {
    if quad.is_empty() {
        return Err(Error::OutOfRange {
            name: "quadrature",
            detail: "no nodes".into(),
        });
    }
    let parts: Vec<GaborMatrix> = quad
        .nodes()
        .iter()
        .map(|&t| gabor_matrix_direct(sym, g, lattice, t))
        .collect::<Result<_>>()?;
    let p = lattice.count();
    let entries: Vec<Complex64> = (0..p * p)
        .map(|i| {
            parts
                .iter()
                .zip(quad.weights())
                .map(|(m, w)| m.entries[i] * *w)
                .collect::<KahanSumC>()
                .value()
        })
        .collect();
    let bj = GaborMatrix::new(
        *lattice,
        TauTag::BornJordan { nodes: quad.len() },
        entries,
        window_id(g),
        sym.to_string(),
    )?;
    Ok((bj, parts))
}

/// `T f ~ (alpha beta)^2 sum_lambda sum_mu M(lambda, mu) <f, pi(mu) g> pi(lambda) g`.
pub fn apply_operator(m: &GaborMatrix, f: &SampledSignal, g: &SampledSignal) -> Result<SampledSignal> {
    if m.magnitude_only {
        return Err(Error::MagnitudeOnly);
    }
    f.check_grid(g)?;
    let lattice = m.lattice;
    lattice_time_step(&lattice, g.grid())?;
    let atoms: Vec<SampledSignal> = (0..lattice.count())
        .map(|i| tf_shift(g, lattice.point_at(i)))
        .collect::<Result<_>>()?;
    let coeffs: Vec<Complex64> = atoms.iter().map(|a| f.inner_unchecked(a)).collect();
    let p = lattice.count();
    let cell = lattice.density() * lattice.density();
    let d: Vec<Complex64> = (0..p)
        .map(|row| {
            (0..p)
                .map(|col| m.get(row, col) * coeffs[col])
                .collect::<KahanSumC>()
                .value()
                * cell
        })
        .collect();
    let n = g.grid().len();
    let mut acc = vec![KahanSumC::new(); n];
    for (atom, c) in atoms.iter().zip(&d) {
        for (s, v) in acc.iter_mut().zip(atom.values()) {
            s.add(v * c);
        }
    }
    SampledSignal::new(*g.grid(), acc.iter().map(|s| s.value()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stft::gaussian_window;

    fn setup(radius: usize) -> (SampledSignal, Lattice) {
        let grid = Grid::centered(128, 1.0 / 8.0).unwrap();
        (gaussian_window(grid, 1.0).unwrap(), Lattice::new(0.5, 0.5, radius).unwrap())
    }

    #[test]
    fn identity_symbol_gives_gram_matrix() {
        let (g, lat) = setup(2);
        for tau in [0.0, 0.5, 1.0] {
            let m = gabor_matrix_direct(&SymbolSpec::Constant(1.0), &g, &lat, tau).unwrap();
            for row in 0..lat.count() {
                let a = tf_shift(&g, lat.point_at(row)).unwrap();
                for col in 0..lat.count() {
                    let b = tf_shift(&g, lat.point_at(col)).unwrap();
                    assert!((m.get(row, col) - b.inner(&a).unwrap()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn direct_matches_weak_definition() {
        let (g, lat) = setup(2);
        let sym: SymbolSpec = "bracket_power(1) + trig(1, 0.5)".parse().unwrap();
        let m = gabor_matrix_direct(&sym, &g, &lat, 0.3).unwrap();
        for (row, col) in [(0, 0), (3, 17), (12, 12), (24, 5)] {
            let e = gabor_entry_weak(&sym, &g, lat.point_at(row), lat.point_at(col), 0.3).unwrap();
            assert!((m.get(row, col) - e).norm() < 1e-12, "{row},{col}");
        }
    }

    #[test]
    fn routes_agree_in_magnitude() {
        let (g, lat) = setup(2);
        let sym = SymbolSpec::BracketPower(0.5);
        for tau in [0.0, 0.5, 1.0] {
            let d = gabor_matrix_direct(&sym, &g, &lat, tau).unwrap();
            let s = gabor_matrix_stft(&sym, &g, &lat, tau).unwrap();
            assert!(compare_routes(&d, &s).unwrap().max_rel_deviation < 1e-10);
            assert!(combine_routes(&d, &s).unwrap().max_abs_diff(&d).unwrap() < 1e-10);
        }
    }

    #[test]
    fn stft_route_needs_grid_points() {
        let (g, _) = setup(2);
        let lat = Lattice::new(0.5, 0.5, 2).unwrap();
        assert!(matches!(
            gabor_matrix_stft(&SymbolSpec::Constant(1.0), &g, &lat, 0.3),
            Err(Error::LatticeGrid(_))
        ));
    }

    #[test]
    fn lattice_must_fit_grid() {
        let (g, _) = setup(2);
        let too_far = Lattice::new(0.5, 0.5, 20).unwrap();
        assert!(gabor_matrix_direct(&SymbolSpec::Constant(1.0), &g, &too_far, 0.5).is_err());
        let off_grid = Lattice::new(0.3, 0.5, 2).unwrap();
        assert!(gabor_matrix_direct(&SymbolSpec::Constant(1.0), &g, &off_grid, 0.5).is_err());
    }

    #[test]
    fn magnitude_only_matrices_cannot_be_applied() {
        let (g, lat) = setup(1);
        let s = gabor_matrix_stft(&SymbolSpec::Constant(1.0), &g, &lat, 0.5).unwrap();
        assert!(matches!(apply_operator(&s, &g, &g), Err(Error::MagnitudeOnly)));
    }

    #[test]
    fn single_node_born_jordan_is_weyl() {
        let (g, lat) = setup(1);
        let sym = SymbolSpec::BracketPower(1.0);
        let bj = born_jordan_matrix(&sym, &g, &lat, &Quadrature::single(0.5).unwrap()).unwrap();
        let w = gabor_matrix_direct(&sym, &g, &lat, 0.5).unwrap();
        assert_eq!(bj.entries(), w.entries());
    }
}
