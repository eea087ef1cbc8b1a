//! Weighted sequence norms, modulation norms (STFT and frequency-uniform
//! decomposition), Besov norms and empirical embedding checks.
//!
//! Exponents in `(0, 1)` are allowed everywhere; `f64::INFINITY` selects the sup form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::phase_space::{bracket_pow, Lattice, SampledSignal, WeightSpec};
use crate::stft::stft;

/// Values on a truncated lattice, in the lattice enumeration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeArray {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl LatticeArray {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.count() {
            return Err(Error::GridMismatch(format!(
                "{} values for a lattice of {} points",
                values.len(),
                lattice.count()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("lattice array".into()));
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        Self {
            lattice,
            values: vec![Complex64::new(0.0, 0.0); lattice.count()],
        }
    }

    pub fn from_fn(lattice: Lattice, f: impl Fn(i64, i64) -> Complex64) -> Result<Self> {
        let values = lattice.iter().map(|(k, l)| f(k, l)).collect();
        Self::new(lattice, values)
    }

    /// Real nonnegative values, e.g. an envelope.
    pub fn from_real(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        Self::new(lattice, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, k: i64, l: i64) -> Option<Complex64> {
        self.lattice.position(k, l).map(|i| self.values[i])
    }

    pub fn set(&mut self, k: i64, l: i64, v: Complex64) -> Result<()> {
        let i = self.lattice.position(k, l).ok_or_else(|| Error::OutOfRange {
            name: "index",
            detail: format!("({k}, {l}) outside radius {}", self.lattice.radius()),
        })?;
        self.values[i] = v;
        Ok(())
    }

    /// `((k, l), |value|)` pairs in enumeration order.
    pub fn iter_abs(&self) -> impl Iterator<Item = ((i64, i64), f64)> + '_ {
        self.lattice.iter().zip(self.values.iter().map(|v| v.norm()))
    }
}

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            detail: format!("{p} must be in (0, inf]"),
        })
    }
}

/// `(cell * sum v^p)^{1/p}` for nonnegative `v`, or `sup v` when `p` is infinite.
pub fn lp_norm(values: impl IntoIterator<Item = f64>, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else {
        let s: KahanSum = values.into_iter().map(|v| v.powf(p)).collect();
        (cell * s.value()).powf(1.0 / p)
    }
}

/// `(sum_k |a_k|^q <k>^{sq})^{1/q}` with `<k>` taken on the integer index.
pub fn weighted_seq_norm(a: &LatticeArray, q: f64, s: f64) -> Result<f64> {
    check_exponent("q", q)?;
    Ok(lp_norm(
        a.iter_abs()
            .map(|((k, l), v)| v * bracket_pow(&[k as f64, l as f64], s)),
        q,
        1.0,
    ))
}

/// Whether `l^{q2}_{s2}` embeds in `l^{q1}_{s1}` over `Z^dim`:
/// `s2 >= s1` and `1/q1 + s1/dim < 1/q2 + s2/dim`, or the trivial case
/// `q2 <= q1`, `s2 >= s1`.
pub fn seq_inclusion_holds(q1: f64, s1: f64, q2: f64, s2: f64, dim: usize) -> bool {
    let d = dim as f64;
    s2 >= s1 && (q2 <= q1 || 1.0 / q1 + s1 / d < 1.0 / q2 + s2 / d)
}

/// Hoelder constant `||<k>^{s1 - s2}||_{l^r}`, `1/r = 1/q1 - 1/q2`, over the
/// truncated lattice; bounds `||a||_{q1,s1} / ||a||_{q2,s2}` there.
pub fn seq_inclusion_constant(q1: f64, s1: f64, q2: f64, s2: f64, lattice: &Lattice) -> f64 {
    let inv_r = 1.0 / q1 - 1.0 / q2;
    if inv_r <= 0.0 {
        return 1.0;
    }
    lp_norm(
        lattice.iter().map(|(k, l)| bracket_pow(&[k as f64, l as f64], s1 - s2)),
        1.0 / inv_r,
        1.0,
    )
}

/// `1 - S((u - lo) / (hi - lo))` with the degree-7 smoothstep `S`.
fn smooth_cutoff(u: f64, lo: f64, hi: f64) -> f64 {
    let t = ((u - lo) / (hi - lo)).clamp(0.0, 1.0);
    let t4 = t * t * t * t;
    1.0 - t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
}

/// Smooth partitions of unity on the frequency axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionOfUnity {
    /// Unit cubes: `rho = 1` on `|xi| <= 1/2`, `0` beyond `3/4`; `sigma_k = rho(. - k) / sum_l rho(. - l)`.
    Cube,
    /// Dyadic annuli: `phi0 = 1` on `|w| <= 1`, `0` beyond 2; `psi(w) = phi0(w) - phi0(2w)`.
    Dyadic,
}

impl PartitionOfUnity {
    pub fn rho(xi: f64) -> f64 {
        smooth_cutoff(xi.abs(), 0.5, 0.75)
    }

    /// `sigma_k(xi)`.
    pub fn sigma(k: i64, xi: f64) -> f64 {
        let c = xi.floor() as i64;
        let total: f64 = (c - 1..=c + 2).map(|l| Self::rho(xi - l as f64)).sum();
        Self::rho(xi - k as f64) / total
    }

    pub fn phi0(w: f64) -> f64 {
        smooth_cutoff(w.abs(), 1.0, 2.0)
    }

    /// `psi(w) = phi0(w) - phi0(2 w)`, supported in `1/2 <= |w| <= 2`.
    pub fn psi(w: f64) -> f64 {
        Self::phi0(w) - Self::phi0(2.0 * w)
    }

    /// `psi_0 = phi0`, `psi_j = psi(2^{-j} .)`.
    pub fn psi_j(j: usize, w: f64) -> f64 {
        if j == 0 {
            Self::phi0(w)
        } else {
            Self::psi(w / (1u64 << j) as f64)
        }
    }

    pub fn value(&self, index: i64, w: f64) -> f64 {
        match self {
            PartitionOfUnity::Cube => Self::sigma(index, w),
            PartitionOfUnity::Dyadic => Self::psi_j(index.max(0) as usize, w),
        }
    }

    /// Indices whose pieces meet the band `[-edge, edge)`.
    pub fn indices(&self, edge: f64) -> Vec<i64> {
        match self {
            PartitionOfUnity::Cube => {
                let kmax = (edge + 0.75).ceil() as i64 - 1;
                (-kmax..=kmax).collect()
            }
            PartitionOfUnity::Dyadic => (0..=dyadic_levels(edge) as i64).collect(),
        }
    }
}

/// Smallest `J` with `2^J >= edge`, so that `psi_0 + ... + psi_J = 1` on the band.
pub fn dyadic_levels(edge: f64) -> usize {
    edge.log2().ceil().max(0.0) as usize
}

/// `F^{-1}(m F f)` for a frequency multiplier sampled on the frequency grid.
fn fourier_multiplier(f: &SampledSignal, m: impl Fn(f64) -> f64) -> Result<SampledSignal> {
    let grid = *f.grid();
    let dft = grid.dft();
    let fg = grid.frequency_grid();
    let mut spec = dft.forward(f.values());
    for (q, v) in spec.iter_mut().enumerate() {
        *v *= m(fg.point(q));
    }
    dft.inverse_in_place(&mut spec);
    SampledSignal::new(grid, spec)
}

/// Frequency-uniform decomposition `box_k f = F^{-1} sigma_k F f`.
pub fn freq_uniform_decomp(f: &SampledSignal, k: i64) -> Result<SampledSignal> {
    let allowed = PartitionOfUnity::Cube.indices(f.grid().band_edge());
    if !allowed.contains(&k) {
        return Err(Error::OutOfRange {
            name: "k",
            detail: format!(
                "{k} outside the band indices {}..={}",
                allowed[0],
                allowed[allowed.len() - 1]
            ),
        });
    }
    fourier_multiplier(f, |w| PartitionOfUnity::sigma(k, w))
}

/// `||V_g f||_{L^{p,q}_w}`: inner `L^p` over `x`, outer `L^q` over `omega`.
///
/// Tensor weights act as `<x>^m <omega>^s`; polynomial weights as `<(x, omega)>^s`.
pub fn modulation_norm_stft(f: &SampledSignal, g: &SampledSignal, p: f64, q: f64, w: &WeightSpec) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let v = stft(f, g, 1, 1)?;
    let dx = v.x_grid().spacing();
    let dw = v.omega_grid().spacing();
    let xs: Vec<f64> = v.x_grid().points().collect();
    let mut inner = Vec::with_capacity(v.n_omega());
    for k in 0..v.n_omega() {
        let om = v.omega_grid().point(k);
        let col = (0..v.n_x()).map(|a| v.get(a, k).norm() * w.eval_pair(&[xs[a]], &[om]).unwrap_or(f64::NAN));
        inner.push(lp_norm(col, p, dx));
    }
    if inner.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("weight".into()));
    }
    Ok(lp_norm(inner, q, dw))
}

/// `(sum_k ||box_k f||^q_{L^p_h} w(k)^q)^{1/q}`; `h` acts on `x`, `w_seq` on the cube index `k`.
pub fn modulation_norm_decomp(f: &SampledSignal, p: f64, q: f64, h: &WeightSpec, w_seq: &WeightSpec) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let grid = *f.grid();
    let hx: Vec<f64> = grid.points().map(|x| h.eval_pair(&[x], &[])).collect::<Result<_>>()?;
    let mut terms = Vec::new();
    for k in PartitionOfUnity::Cube.indices(grid.band_edge()) {
        let piece = freq_uniform_decomp(f, k)?;
        let inner = lp_norm(
            piece.values().iter().zip(&hx).map(|(v, w)| v.norm() * w),
            p,
            grid.spacing(),
        );
        terms.push(inner * w_seq.eval_slice(&[k as f64]));
    }
    Ok(lp_norm(terms, q, 1.0))
}

/// `(sum_{j=0}^{J} 2^{jsq} ||F^{-1}(psi_j F f)||_p^q)^{1/q}` with `J` capped by the band.
pub fn besov_norm(f: &SampledSignal, p: f64, q: f64, s: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let grid = *f.grid();
    let levels = dyadic_levels(grid.band_edge());
    let mut terms = Vec::with_capacity(levels + 1);
    for j in 0..=levels {
        let piece = fourier_multiplier(f, |w| PartitionOfUnity::psi_j(j, w))?;
        let lp = lp_norm(piece.values().iter().map(|v| v.norm()), p, grid.spacing());
        terms.push(2f64.powf(j as f64 * s) * lp);
    }
    Ok(lp_norm(terms, q, 1.0))
}

/// Ratio statistics of a candidate embedding `A -> B` over an ordered family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// `||f_i||_B / ||f_i||_A`.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// `max_i ratio_i / ratio_0`: blow-up relative to the reference (first) member.
    pub growth: f64,
    pub violated: bool,
}

/// Growth along a family beyond which an embedding counts as violated.
pub const EMBEDDING_GROWTH_LIMIT: f64 = 4.0;

/// Compares `norm_b` against `norm_a` for the same family; the first member is the reference scale.
pub fn check_embedding(norm_a: &[f64], norm_b: &[f64]) -> Result<EmbeddingReport> {
    if norm_a.len() != norm_b.len() || norm_a.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} vs {} norm values",
            norm_a.len(),
            norm_b.len()
        )));
    }
    let mut ratios = Vec::with_capacity(norm_a.len());
    for (a, b) in norm_a.iter().zip(norm_b) {
        if !(a.is_finite() && b.is_finite()) || *a <= 0.0 || *b < 0.0 {
            return Err(Error::NonFinite(format!("norm pair ({a}, {b})")));
        }
        ratios.push(b / a);
    }
    let max_ratio = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let growth = if ratios[0] > 0.0 { max_ratio / ratios[0] } else { f64::INFINITY };
    Ok(EmbeddingReport {
        violated: growth > EMBEDDING_GROWTH_LIMIT,
        ratios,
        max_ratio,
        min_ratio,
        growth,
    })
}

/// One empirical embedding check and the outcome it should have.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCase {
    pub suite: String,
    pub name: String,
    pub expect_violation: bool,
    pub report: EmbeddingReport,
}

impl EmbeddingCase {
    pub fn as_expected(&self) -> bool {
        self.report.violated == self.expect_violation
    }
}

fn case(suite: &str, name: String, expect_violation: bool, a: &[f64], b: &[f64]) -> Result<EmbeddingCase> {
    Ok(EmbeddingCase {
        suite: suite.into(),
        name,
        expect_violation,
        report: check_embedding(a, b)?,
    })
}

fn fmt_exp(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// Predicted embeddings and reversed controls:
/// sequence inclusion over a radius-8 index lattice, the modulation-space chain
/// `M^{inf,1}_{<.>^2} -> M^{inf,2}_{<.>^2} -> M^{inf,1}` and the Besov sandwich
/// `B^{inf,q}_{s+1/q} -> M^{inf,q}_{1 (x) <.>^s} -> B^{inf,q}_{s+theta(q)}`.
pub fn embedding_suite(g: &SampledSignal, seed: u64) -> Result<Vec<EmbeddingCase>> {
    use rand::{Rng, SeedableRng};

    let grid = *g.grid();
    let mut out = Vec::new();

    let lat = Lattice::new(1.0, 1.0, 8)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut family = vec![LatticeArray::from_fn(lat, |k, l| {
        Complex64::new(if k == 0 && l == 0 { 1.0 } else { 0.0 }, 0.0)
    })?];
    for _ in 0..100 {
        let mut a = LatticeArray::zeros(lat);
        for _ in 0..rng.random_range(1..20) {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a.set(rng.random_range(-8..=8), rng.random_range(-8..=8), v)?;
        }
        family.push(a);
    }
    let src: Vec<f64> = family.iter().map(|a| weighted_seq_norm(a, 2.0, 2.0)).collect::<Result<_>>()?;
    let dst: Vec<f64> = family.iter().map(|a| weighted_seq_norm(a, 1.0, 0.0)).collect::<Result<_>>()?;
    out.push(case("sequence", "l^2_2 -> l^1_0".into(), false, &src, &dst)?);
    let deltas: Vec<LatticeArray> = [0i64, 1, 2, 4, 8]
        .iter()
        .map(|&j| LatticeArray::from_fn(lat, |k, l| Complex64::new(if k == j && l == 0 { 1.0 } else { 0.0 }, 0.0)))
        .collect::<Result<_>>()?;
    let src: Vec<f64> = deltas.iter().map(|a| weighted_seq_norm(a, 1.0, 0.0)).collect::<Result<_>>()?;
    let dst: Vec<f64> = deltas.iter().map(|a| weighted_seq_norm(a, 2.0, 2.0)).collect::<Result<_>>()?;
    out.push(case("sequence", "reversed: l^1_0 -> l^2_2".into(), true, &src, &dst)?);

    let fam: Vec<SampledSignal> = crate::signals::norm_family(grid)?.into_iter().map(|(_, f)| f).collect();
    let mods = crate::signals::modulation_family(grid)?;
    let inf = f64::INFINITY;
    let mnorm = |set: &[SampledSignal], q: f64, s: f64| -> Result<Vec<f64>> {
        set.iter().map(|f| modulation_norm_stft(f, g, inf, q, &WeightSpec::tensor(0.0, s))).collect()
    };
    let a = mnorm(&fam, 1.0, 2.0)?;
    let b = mnorm(&fam, 2.0, 2.0)?;
    let c = mnorm(&fam, 1.0, 0.0)?;
    out.push(case("modulation", "M^{inf,1}_2 -> M^{inf,2}_2".into(), false, &a, &b)?);
    out.push(case("modulation", "M^{inf,2}_2 -> M^{inf,1}_0".into(), false, &b, &c)?);
    out.push(case(
        "modulation",
        "reversed: M^{inf,1}_0 -> M^{inf,2}_2".into(),
        true,
        &mnorm(&mods, 1.0, 0.0)?,
        &mnorm(&mods, 2.0, 2.0)?,
    )?);

    for q in [1.0, 2.0, inf] {
        let theta = (1.0 / q - 1.0).min(0.0);
        for s in [0.0, 1.0] {
            let upper = s + 1.0 / q;
            let lower = s + theta;
            let bnorm = |set: &[SampledSignal], t: f64| -> Result<Vec<f64>> {
                set.iter().map(|f| besov_norm(f, inf, q, t)).collect()
            };
            let m = mnorm(&fam, q, s)?;
            let qs = fmt_exp(q);
            out.push(case("besov", format!("B^{{inf,{qs}}}_{upper} -> M^{{inf,{qs}}}_{s}"), false, &bnorm(&fam, upper)?, &m)?);
            out.push(case("besov", format!("M^{{inf,{qs}}}_{s} -> B^{{inf,{qs}}}_{lower}"), false, &m, &bnorm(&fam, lower)?)?);
            out.push(case(
                "besov",
                format!("reversed: B^{{inf,{qs}}}_{lower} -> B^{{inf,{qs}}}_{upper}"),
                true,
                &bnorm(&mods, lower)?,
                &bnorm(&mods, upper)?,
            )?);
        }
    }
    Ok(out)
}
