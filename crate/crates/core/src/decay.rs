//! Off-diagonal decay of Gabor matrices: envelopes, decay-order fits,
//! the pointwise bound with seminorm constants, tau-uniformity and the
//! Born-Jordan comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{weighted_seq_norm, LatticeArray};
use crate::phase_space::{bracket_pow, t_tau, Lattice, PhaseSpacePoint, SampledSignal};
use crate::quantization::{born_jordan_parts, gabor_matrix_direct, GaborMatrix, TauTag};
use crate::symbols::{seminorm, SymbolSpec};
use crate::wigner::Quadrature;

/// Largest derivative order accepted by [`verify_th34`].
pub const MAX_BOUND_ORDER: usize = 6;
/// Box half-width used for seminorms (probed also at twice and four times this).
pub const SEMINORM_RADIUS: f64 = 4.0;
pub const SEMINORM_RESOLUTION: usize = 65;
/// `(q, s)` pairs reported for every envelope.
pub const REPORTED_NORMS: [(f64, f64); 4] = [(1.0, 0.0), (1.0, 3.0), (2.0, 0.0), (f64::INFINITY, 0.0)];

/// Weight an entry `(lambda, mu)` is divided by before taking the envelope:
/// `<T_tau(lambda, mu)>^m` for a tau matrix, `<mu>^m` for a Born-Jordan matrix.
fn diagonal_weight(tag: TauTag, lambda: PhaseSpacePoint, mu: PhaseSpacePoint, m: f64) -> Result<f64> {
    let z = match tag {
        TauTag::Tau { tau } => t_tau(lambda, mu, tau)?,
        TauTag::BornJordan { .. } => mu,
    };
    Ok(bracket_pow(&[z.x, z.omega], m))
}

/// Minimal envelope `h(k) = max_mu |M(mu + k, mu)| / weight` over the
/// difference lattice; classes with no pair stay zero.
pub fn envelope(mat: &GaborMatrix, m: f64) -> Result<LatticeArray> {
    if !m.is_finite() {
        return Err(Error::NonFinite(format!("m = {m}")));
    }
    let lat = mat.lattice;
    let diff = lat.difference_lattice();
    let mut h = vec![0.0f64; diff.count()];
    for (r, (k, l)) in lat.iter().enumerate() {
        let lambda = lat.point(k, l);
        for (c, (k2, l2)) in lat.iter().enumerate() {
            let mu = lat.point(k2, l2);
            let v = mat.get(r, c).norm() / diagonal_weight(mat.tau, lambda, mu, m)?;
            let i = diff.position(k - k2, l - l2).expect("difference inside doubled radius");
            h[i] = h[i].max(v);
        }
    }
    LatticeArray::from_real(diff, h)
}

pub fn envelope_norm(h: &LatticeArray, q: f64, s: f64) -> Result<f64> {
    weighted_seq_norm(h, q, s)
}

/// Least-squares decay order `-d log h / d log <k>` over `|k| >= 2` (and
/// `|k| <= max_norm` when given), `k` in lattice indices.
pub fn decay_order_fit(h: &LatticeArray, max_norm: Option<f64>) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut radii: Vec<f64> = Vec::new();
    for ((k, l), v) in h.iter_abs() {
        let r = ((k * k + l * l) as f64).sqrt();
        if r < 2.0 || v <= 0.0 || max_norm.is_some_and(|mx| r > mx + 1e-9) {
            continue;
        }
        xs.push(bracket_pow(&[r], 1.0).ln());
        ys.push(v.ln());
        if !radii.iter().any(|q| (q - r).abs() < 1e-9) {
            radii.push(r);
        }
    }
    if radii.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} distinct radii with positive envelope, need 4",
            radii.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(-sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeNorm {
    pub q: f64,
    pub s: f64,
    pub value: f64,
}

fn reported_norms(h: &LatticeArray) -> Result<Vec<EnvelopeNorm>> {
    REPORTED_NORMS
        .iter()
        .map(|&(q, s)| Ok(EnvelopeNorm { q, s, value: envelope_norm(h, q, s)? }))
        .collect()
}

/// Bound constant for a non-integer order `s` in `(n, n + 1)`, using `|sigma|_{n+1,m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalBound {
    pub s: f64,
    pub seminorm_used: f64,
    pub bound_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub tau: TauTag,
    pub symbol: String,
    pub m: f64,
    pub n: usize,
    pub radius: usize,
    pub envelope: LatticeArray,
    pub envelope_norms: Vec<EnvelopeNorm>,
    /// Fit over `2 <= |k| <= radius`.
    pub fitted_order: f64,
    pub seminorm_used: f64,
    /// `max |M(lambda, mu)| <lambda - mu>^n / (|sigma|_{n,m} <T_tau(lambda, mu)>^m)`.
    pub bound_constant: f64,
    pub fractional: FractionalBound,
}

/// `max |M| <lambda - mu>^s / <T_tau(lambda, mu)>^m`, distances in phase-space units.
fn weighted_max(mat: &GaborMatrix, tau: f64, s: f64, m: f64) -> Result<f64> {
    let lat = mat.lattice;
    let mut best: f64 = 0.0;
    for (r, (k, l)) in lat.iter().enumerate() {
        let lambda = lat.point(k, l);
        for (c, (k2, l2)) in lat.iter().enumerate() {
            let mu = lat.point(k2, l2);
            let d = lambda - mu;
            let y = t_tau(lambda, mu, tau)?;
            let v = mat.get(r, c).norm() * bracket_pow(&[d.x, d.omega], s) / bracket_pow(&[y.x, y.omega], m);
            best = best.max(v);
        }
    }
    Ok(best)
}

fn member_seminorm(sym: &SymbolSpec, order: usize, m: f64) -> Result<f64> {
    let rep = seminorm(sym, order, m, SEMINORM_RADIUS, SEMINORM_RESOLUTION)?;
    if rep.divergence_flag {
        return Err(Error::NotInClass {
            seminorm: format!(
                "|{sym}|_{{{order},{m}}} grows as {:.3e}, {:.3e}, {:.3e} over radii {}, {}, {}",
                rep.values_by_radius[0],
                rep.values_by_radius[1],
                rep.values_by_radius[2],
                SEMINORM_RADIUS,
                2.0 * SEMINORM_RADIUS,
                4.0 * SEMINORM_RADIUS
            ),
        });
    }
    Ok(rep.value)
}

/// Checks the pointwise bound `|M(lambda, mu)| <= C |sigma|_{n,m} <T_tau>^m / <lambda - mu>^n`
/// on a direct-route matrix and reports the smallest admissible `C`.
pub fn verify_th34(sym: &SymbolSpec, g: &SampledSignal, lattice: &Lattice, tau: f64, n: usize, m: f64) -> Result<DecayReport> {
    if n > MAX_BOUND_ORDER {
        return Err(Error::DerivativeOrder {
            order: n,
            max: MAX_BOUND_ORDER,
        });
    }
    let semi = member_seminorm(sym, n, m)?;
    let semi_next = member_seminorm(sym, n + 1, m)?;
    let mat = gabor_matrix_direct(sym, g, lattice, tau)?;
    report_for(&mat, tau, n, m, semi, semi_next)
}

fn report_for(mat: &GaborMatrix, tau: f64, n: usize, m: f64, semi: f64, semi_next: f64) -> Result<DecayReport> {
    let h = envelope(mat, m)?;
    let fitted_order = decay_order_fit(&h, Some(mat.lattice.radius() as f64))?;
    let s = n as f64 + 0.5;
    Ok(DecayReport {
        tau: mat.tau,
        symbol: mat.symbol.clone(),
        m,
        n,
        radius: mat.lattice.radius(),
        envelope_norms: reported_norms(&h)?,
        envelope: h,
        fitted_order,
        seminorm_used: semi,
        bound_constant: weighted_max(mat, tau, n as f64, m)? / semi,
        fractional: FractionalBound {
            s,
            seminorm_used: semi_next,
            bound_constant: weighted_max(mat, tau, s, m)? / semi_next,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSweepReport {
    pub symbol: String,
    pub m: f64,
    pub q: f64,
    pub s: f64,
    pub taus: Vec<f64>,
    pub norms: Vec<f64>,
    pub max_over_tau: f64,
    pub min_over_tau: f64,
    /// `max_over_tau / min_over_tau`.
    pub ratio: f64,
}

/// Envelope norms `||h_tau||_{l^q_{<.>^s}}` of direct-route matrices for each tau.
pub fn tau_sweep(sym: &SymbolSpec, g: &SampledSignal, lattice: &Lattice, taus: &[f64], m: f64, q: f64, s: f64) -> Result<TauSweepReport> {
    if taus.is_empty() {
        return Err(Error::InsufficientData("empty tau list".into()));
    }
    let norms: Vec<f64> = taus
        .iter()
        .map(|&t| {
            let mat = gabor_matrix_direct(sym, g, lattice, t)?;
            envelope_norm(&envelope(&mat, m)?, q, s)
        })
        .collect::<Result<_>>()?;
    let max_over_tau = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_over_tau = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(TauSweepReport {
        symbol: sym.to_string(),
        m,
        q,
        s,
        taus: taus.to_vec(),
        ratio: max_over_tau / min_over_tau,
        norms,
        max_over_tau,
        min_over_tau,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BjDecayReport {
    pub symbol: String,
    pub nodes: usize,
    pub m: f64,
    pub q: f64,
    pub s: f64,
    /// Envelope against `<mu>^m`.
    pub bj_envelope: LatticeArray,
    pub bj_norm: f64,
    /// `sum_i w_i h_{tau_i}(k) (sqrt 2 <k>)^{|m|}` with `k` in phase-space units.
    pub dominating_envelope: LatticeArray,
    pub dominating_norm: f64,
    pub per_node_norms: Vec<f64>,
    /// `max_k h_BJ(k) / dominating(k)` over classes where the latter is positive.
    pub domination_ratio: f64,
}

pub fn bj_decay_check(sym: &SymbolSpec, g: &SampledSignal, lattice: &Lattice, quad: &Quadrature, m: f64, q: f64, s: f64) -> Result<BjDecayReport> {
    let (bj, parts) = born_jordan_parts(sym, g, lattice, quad)?;
    let bj_env = envelope(&bj, m)?;
    let diff = lattice.difference_lattice();
    let node_envs: Vec<LatticeArray> = parts.iter().map(|p| envelope(p, m)).collect::<Result<_>>()?;
    let per_node_norms = node_envs
        .iter()
        .map(|h| envelope_norm(h, q, s))
        .collect::<Result<Vec<_>>>()?;
    let dom: Vec<f64> = diff
        .iter()
        .enumerate()
        .map(|(i, (k, l))| {
            let p = diff.point(k, l);
            let peetre = (2f64.sqrt() * bracket_pow(&[p.x, p.omega], 1.0)).powf(m.abs());
            node_envs
                .iter()
                .zip(quad.weights())
                .map(|(h, w)| w * h.values()[i].re)
                .sum::<f64>()
                * peetre
        })
        .collect();
    let mut domination_ratio: f64 = 0.0;
    for (b, d) in bj_env.values().iter().zip(&dom) {
        if *d > 0.0 {
            domination_ratio = domination_ratio.max(b.re / d);
        } else if b.re > 0.0 {
            domination_ratio = f64::INFINITY;
        }
    }
    let dominating_envelope = LatticeArray::from_real(diff, dom)?;
    Ok(BjDecayReport {
        symbol: sym.to_string(),
        nodes: quad.len(),
        m,
        q,
        s,
        bj_norm: envelope_norm(&bj_env, q, s)?,
        dominating_norm: envelope_norm(&dominating_envelope, q, s)?,
        bj_envelope: bj_env,
        dominating_envelope,
        per_node_norms,
        domination_ratio,
    })
}
